"""Epoch-stepped beacon-chain state machine.

Validator registry with churn-limited activation/exit queues, per-epoch
reward accrual and slash application.  All balances are integer gwei;
this module is the discrete ground truth the analytic wait-time
estimator is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import AlreadyQueued, AmountNot32Eth, NotActive, UnknownValidator

GWEI_PER_ETH = 10**9
DEPOSIT_GWEI = 32 * GWEI_PER_ETH

EPOCHS_PER_DAY = 225
DAYS_PER_YEAR = 365
SECONDS_PER_DAY = 86400

MIN_CHURN = 4
CHURN_QUOTIENT = 65536


class Status(Enum):
    PENDING_QUEUED = "pending_queued"
    ACTIVE = "active"
    EXIT_QUEUED = "exit_queued"
    EXITED = "exited"
    FROZEN = "frozen"


class WithdrawalTarget(Enum):
    BEACON = "beacon"
    RESTAKE_LAYER = "restake_layer"


def churn_limit(active, min_churn=MIN_CHURN, churn_quotient=CHURN_QUOTIENT):
    """Per-epoch validator churn for a given active-set size."""
    if active < 0:
        raise ValueError("active must be non-negative")
    return max(min_churn, active // churn_quotient)


@dataclass
class ValidatorRecord:
    id: int
    balance: int
    entity: str
    status: Status = Status.PENDING_QUEUED
    activation_epoch: int | None = None
    exit_epoch: int | None = None
    withdrawal_target: WithdrawalTarget = WithdrawalTarget.BEACON


@dataclass
class EpochReport:
    epoch: int
    active: int
    activation_queue_len: int
    exit_queue_len: int
    activated: int
    exited: int
    rewards_gwei: int
    slashed_gwei: int

    CSV_HEADER = (
        "epoch,active,activation_queue_len,exit_queue_len,"
        "activated,exited,rewards_gwei,slashed_gwei"
    )

    def csv_row(self):
        return (
            f"{self.epoch},{self.active},{self.activation_queue_len},"
            f"{self.exit_queue_len},{self.activated},{self.exited},"
            f"{self.rewards_gwei},{self.slashed_gwei}"
        )


@dataclass
class ChainState:
    epoch: int = 0
    validators: dict[int, ValidatorRecord] = field(default_factory=dict)
    activation_queue: list[int] = field(default_factory=list)
    exit_queue: list[int] = field(default_factory=list)
    pending_slashes: list[tuple[int, int]] = field(default_factory=list)
    apr_bps: int = 380
    min_churn: int = MIN_CHURN
    churn_quotient: int = CHURN_QUOTIENT
    epochs_per_day: int = EPOCHS_PER_DAY
    # rewards accrue on at most this much balance (the deposit size)
    max_effective_balance: int = DEPOSIT_GWEI
    # numerator remainders dropped by floor division, kept so the exact
    # fractional reward stream can be audited
    reward_dust_num: int = 0
    _next_id: int = 0

    def active_count(self):
        return sum(1 for v in self.validators.values() if v.status is Status.ACTIVE)

    def churn_limit(self):
        return churn_limit(self.active_count(), self.min_churn, self.churn_quotient)

    def total_balance(self):
        return sum(v.balance for v in self.validators.values())


def bootstrap(n_active, entity_prefix="solo", balance=DEPOSIT_GWEI, **kwargs):
    """Chain whose registry starts with `n_active` already-active validators."""
    state = ChainState(**kwargs)
    for i in range(n_active):
        vid = state._next_id
        state._next_id += 1
        state.validators[vid] = ValidatorRecord(
            id=vid,
            balance=balance,
            entity=f"{entity_prefix}_{i}",
            status=Status.ACTIVE,
            activation_epoch=0,
        )
    return state


def submit_deposit(state, entity, amount):
    """Enqueue a new 32-ETH validator; returns its id."""
    if amount != DEPOSIT_GWEI:
        raise AmountNot32Eth(f"deposit must be exactly {DEPOSIT_GWEI} gwei, got {amount}")
    vid = state._next_id
    state._next_id += 1
    state.validators[vid] = ValidatorRecord(id=vid, balance=amount, entity=entity)
    state.activation_queue.append(vid)
    return vid


def request_exit(state, vid):
    v = state.validators.get(vid)
    if v is None:
        raise UnknownValidator(str(vid))
    if vid in state.exit_queue:
        raise AlreadyQueued(str(vid))
    if v.status is not Status.ACTIVE:
        raise NotActive(f"validator {vid} is {v.status.value}")
    v.status = Status.EXIT_QUEUED
    state.exit_queue.append(vid)


def apply_slash(state, vid, amount):
    """Record a pending slash, clamped to the current balance.

    Validators slashed while Active/ExitQueued are frozen; already-exited
    validators just lose balance (withdrawal-time slashing for restaked
    stake).  The deduction lands at the next epoch step.
    """
    v = state.validators.get(vid)
    if v is None:
        raise UnknownValidator(str(vid))
    clamped = min(amount, v.balance)
    state.pending_slashes.append((vid, clamped))
    if v.status in (Status.ACTIVE, Status.EXIT_QUEUED):
        v.status = Status.FROZEN
    return clamped


def process_epoch(state):
    """Advance one epoch: drain queues at the churn limit, accrue rewards,
    apply pending slashes.  Returns an EpochReport."""
    active_at_start = state.active_count()
    budget = churn_limit(active_at_start, state.min_churn, state.churn_quotient)

    activated = 0
    while state.activation_queue and activated < budget:
        vid = state.activation_queue[0]
        v = state.validators[vid]
        if v.status is not Status.PENDING_QUEUED:
            # frozen while queued: drop without consuming churn
            state.activation_queue.pop(0)
            continue
        state.activation_queue.pop(0)
        v.status = Status.ACTIVE
        v.activation_epoch = state.epoch + 1
        activated += 1

    exited = 0
    while state.exit_queue and exited < budget:
        vid = state.exit_queue[0]
        v = state.validators[vid]
        if v.status is not Status.EXIT_QUEUED:
            state.exit_queue.pop(0)
            continue
        state.exit_queue.pop(0)
        v.status = Status.EXITED
        v.exit_epoch = state.epoch + 1
        exited += 1

    rewards = 0
    if state.apr_bps:
        denom = 10000 * state.epochs_per_day * DAYS_PER_YEAR
        for v in state.validators.values():
            if v.status is not Status.ACTIVE:
                continue
            num = min(v.balance, state.max_effective_balance) * state.apr_bps
            v.balance += num // denom
            rewards += num // denom
            state.reward_dust_num += num % denom

    slashed = 0
    for vid, amount in state.pending_slashes:
        v = state.validators[vid]
        take = min(amount, v.balance)
        v.balance -= take
        slashed += take
    state.pending_slashes.clear()

    state.epoch += 1
    return EpochReport(
        epoch=state.epoch,
        active=state.active_count(),
        activation_queue_len=len(state.activation_queue),
        exit_queue_len=len(state.exit_queue),
        activated=activated,
        exited=exited,
        rewards_gwei=rewards,
        slashed_gwei=slashed,
    )
