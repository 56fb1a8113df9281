"""Restaking layer: operators, delegation pools, opt-in service modules,
slashing with freeze semantics, and pooled-security accounting.

Native restake points a beacon validator's withdrawal at this layer;
delegated stake is held by the layer directly.  A proven misbehavior
freezes the operator, slashes delegated stake immediately, and defers
the native share until the affected validators complete their exit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import chain as chain_mod
from .chain import DEPOSIT_GWEI, Status, WithdrawalTarget
from .errors import (
    AlreadyRestaked,
    DecentralizationConstraint,
    DuplicateId,
    NotActive,
    NotOptedIn,
    OperatorFrozen,
    UnknownValidator,
    ZeroAmount,
)


@dataclass
class Operator:
    id: str
    home_validator: bool = False
    opted_avs: set[str] = field(default_factory=set)
    delegated: dict[str, int] = field(default_factory=dict)  # staker -> gwei
    # (validator id, owner entity) pairs with withdrawal target on this layer
    restaked_validators: list[tuple[int, str]] = field(default_factory=list)
    frozen: bool = False


@dataclass(frozen=True)
class AVSModule:
    id: str
    fee_bps_per_year: int = 0
    slashing_fraction: float = 0.0
    profit_from_corruption: int = 0  # gwei, scenario parameter
    home_validators_only: bool = False
    own_stake: int = 0  # gwei the service would post under fragmented security

    def __post_init__(self):
        if not 0.0 <= self.slashing_fraction <= 1.0:
            raise ValueError("slashing_fraction must be in [0, 1]")
        if self.fee_bps_per_year < 0 or self.profit_from_corruption < 0:
            raise ValueError("fee and profit-from-corruption must be non-negative")


@dataclass(frozen=True)
class SlashingEvent:
    avs_id: str
    operator_id: str
    epoch: int
    slashed: int


@dataclass(frozen=True)
class AVSSecurity:
    avs_id: str
    coc_fragmented: int
    coc_pooled: int
    pfc: int
    margin_pooled: int


@dataclass(frozen=True)
class SecurityReport:
    rows: tuple[AVSSecurity, ...]

    CSV_HEADER = "avs_id,coc_fragmented_gwei,coc_pooled_gwei,pfc_gwei,margin_pooled_gwei"

    def csv_rows(self):
        return [
            f"{r.avs_id},{r.coc_fragmented},{r.coc_pooled},{r.pfc},{r.margin_pooled}"
            for r in self.rows
        ]


@dataclass
class RestakeState:
    operators: dict[str, Operator] = field(default_factory=dict)
    avs_registry: dict[str, AVSModule] = field(default_factory=dict)
    events: list[SlashingEvent] = field(default_factory=list)
    # validator id -> gwei still to be taken when its exit completes
    pending_native_slashes: dict[int, int] = field(default_factory=dict)
    fee_credits: dict[str, int] = field(default_factory=dict)  # staker/entity -> gwei
    fee_dust: int = 0


def register_operator(state, operator_id, home_validator=False):
    if operator_id in state.operators:
        raise DuplicateId(operator_id)
    state.operators[operator_id] = Operator(id=operator_id, home_validator=home_validator)


def register_avs(state, module):
    if module.id in state.avs_registry:
        raise DuplicateId(module.id)
    state.avs_registry[module.id] = module


def total_restake(state, operator_id):
    op = state.operators[operator_id]
    return sum(op.delegated.values()) + DEPOSIT_GWEI * len(op.restaked_validators)


def restake_native(state, chain, validator_id, operator_id):
    op = state.operators.get(operator_id)
    if op is None:
        raise NotOptedIn(f"unknown operator {operator_id}")
    if op.frozen:
        raise OperatorFrozen(operator_id)
    v = chain.validators.get(validator_id)
    if v is None:
        raise UnknownValidator(str(validator_id))
    if v.withdrawal_target is WithdrawalTarget.RESTAKE_LAYER:
        raise AlreadyRestaked(str(validator_id))
    if v.status is not Status.ACTIVE:
        raise NotActive(f"validator {validator_id} is {v.status.value}")
    v.withdrawal_target = WithdrawalTarget.RESTAKE_LAYER
    op.restaked_validators.append((validator_id, v.entity))


def delegate(state, staker, operator_id, amount):
    op = state.operators.get(operator_id)
    if op is None:
        raise NotOptedIn(f"unknown operator {operator_id}")
    if op.frozen:
        raise OperatorFrozen(operator_id)
    if amount <= 0:
        raise ZeroAmount("delegation must be positive")
    op.delegated[staker] = op.delegated.get(staker, 0) + amount


def opt_in(state, operator_id, avs_id):
    op = state.operators.get(operator_id)
    avs = state.avs_registry.get(avs_id)
    if op is None or avs is None:
        raise NotOptedIn(f"unknown operator or service ({operator_id}, {avs_id})")
    if op.frozen:
        raise OperatorFrozen(operator_id)
    if avs.home_validators_only and not op.home_validator:
        raise DecentralizationConstraint(
            f"{avs_id} admits home validators only; {operator_id} is not one"
        )
    op.opted_avs.add(avs_id)  # idempotent


def accrue_fees(state, epochs, epochs_per_day=chain_mod.EPOCHS_PER_DAY):
    """Credit service fees for `epochs` epochs of participation.

    Each non-frozen operator earns, per opted service,
    floor(stake * fee_bps * epochs / (10000 * epochs_per_year)); the fee is
    split pro-rata between its delegators and native restakers by stake.
    Returns gwei earned per operator.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    epochs_per_year = epochs_per_day * chain_mod.DAYS_PER_YEAR
    earned = {}
    for op in state.operators.values():
        if op.frozen:
            continue
        stake = total_restake(state, op.id)
        fee = 0
        for avs_id in op.opted_avs:
            avs = state.avs_registry[avs_id]
            fee += stake * avs.fee_bps_per_year * epochs // (10000 * epochs_per_year)
        if fee == 0:
            continue
        earned[op.id] = fee
        parts = [(staker, amt) for staker, amt in op.delegated.items()]
        parts += [(entity, DEPOSIT_GWEI) for _, entity in op.restaked_validators]
        weight = sum(amt for _, amt in parts)
        given = 0
        for staker, amt in parts:
            cut = fee * amt // weight
            state.fee_credits[staker] = state.fee_credits.get(staker, 0) + cut
            given += cut
        state.fee_dust += fee - given
    return earned


def prove_misbehavior(state, chain, avs_id, operator_id, epoch=None):
    """Freeze the operator and slash its stake at the service's fraction.

    Delegated stake is cut immediately pro-rata; the native share is
    recorded per validator and realized when each exit completes (see
    settle_native_slashes).  Repeat proofs against an already-frozen
    operator compose, clamped by the remaining stake.
    """
    op = state.operators.get(operator_id)
    avs = state.avs_registry.get(avs_id)
    if op is None or avs is None or avs_id not in op.opted_avs:
        raise NotOptedIn(f"{operator_id} is not opted into {avs_id}")
    if epoch is None:
        epoch = chain.epoch

    op.frozen = True
    stake = total_restake(state, operator_id)
    slashed = math.floor(avs.slashing_fraction * stake)

    delegated_total = sum(op.delegated.values())
    slash_delegated = slashed * delegated_total // stake if stake else 0
    taken = 0
    stakers = list(op.delegated.items())
    for staker, amt in stakers[:-1]:
        cut = slash_delegated * amt // delegated_total
        op.delegated[staker] = amt - cut
        taken += cut
    if stakers:
        staker, amt = stakers[-1]
        cut = min(amt, slash_delegated - taken)
        op.delegated[staker] = amt - cut
        taken += cut

    slash_native = slashed - taken
    if slash_native and op.restaked_validators:
        per = slash_native // len(op.restaked_validators)
        residue = slash_native - per * len(op.restaked_validators)
        for k, (vid, _) in enumerate(op.restaked_validators):
            amount = per + (residue if k == 0 else 0)
            if amount:
                pending = state.pending_native_slashes.get(vid, 0)
                cap = chain.validators[vid].balance - pending
                state.pending_native_slashes[vid] = pending + min(amount, max(cap, 0))

    event = SlashingEvent(avs_id=avs_id, operator_id=operator_id, epoch=epoch,
                          slashed=slashed)
    state.events.append(event)
    return event


def settle_native_slashes(state, chain):
    """Realize deferred native slashes for validators that have exited.
    The deduction itself lands at the chain's next epoch step."""
    settled = []
    for vid in list(state.pending_native_slashes):
        v = chain.validators.get(vid)
        if v is None or v.status is not Status.EXITED:
            continue
        amount = state.pending_native_slashes.pop(vid)
        chain_mod.apply_slash(chain, vid, amount)
        settled.append((vid, amount))
    return settled


def compute_security(state):
    """Per-service Cost-of-Corruption under fragmented vs pooled security."""
    rows = []
    for avs_id in sorted(state.avs_registry):
        avs = state.avs_registry[avs_id]
        pooled = sum(
            total_restake(state, op.id)
            for op in state.operators.values()
            if avs_id in op.opted_avs
        )
        rows.append(AVSSecurity(
            avs_id=avs_id,
            coc_fragmented=avs.own_stake,
            coc_pooled=pooled,
            pfc=avs.profit_from_corruption,
            margin_pooled=pooled - avs.profit_from_corruption,
        ))
    return SecurityReport(rows=tuple(rows))
