"""Liquid staking pool with a share-based rebasing claim token.

Deposits mint shares against the pooled backing; oracle reports of the
beacon-side balance rebase every holder proportionally, with the
operator/treasury cut paid by minting new shares (dilution).  Buffered
deposits are launched as 32-ETH validators spread across node operators
(least-loaded first), and withdrawals burn shares at the current rate,
served buffer-first and otherwise by validator exits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import chain as chain_mod
from .chain import DEPOSIT_GWEI, Status
from .errors import (
    InsufficientShares,
    NoOperators,
    NotClaimable,
    StaleReport,
    ZeroAmount,
)

TREASURY = "treasury"


@dataclass
class OperatorSlot:
    operator_id: str
    validator_ids: list[int] = field(default_factory=list)
    assigned_stake: int = 0  # gwei, always 32 ETH x len(validator_ids)


@dataclass(frozen=True)
class OracleReport:
    epoch: int
    beacon_balance: int
    beacon_validator_count: int


@dataclass
class WithdrawalTicket:
    ticket_id: int
    user: str
    gwei: int  # claim fixed at burn time
    claimable: bool = False


@dataclass(frozen=True)
class RebaseSummary:
    reward: int                 # gwei added to the backing (0 on penalty reports)
    penalty: int                # gwei removed on a negative report
    fee_shares_minted: int
    operator_fee_gwei: int      # target operator cut of the reward
    treasury_fee_gwei: int


@dataclass
class PoolState:
    entity: str = "pool"
    total_pooled_eth: int = 0   # gwei backing all shares
    total_shares: int = 0
    accounts: dict[str, int] = field(default_factory=dict)
    buffered_eth: int = 0       # deposited, not yet staked
    operator_fee_bps: int = 500
    treasury_fee_bps: int = 500
    operators: list[OperatorSlot] = field(default_factory=list)
    withdrawal_queue: list[WithdrawalTicket] = field(default_factory=list)
    # gwei newly sent to the beacon chain since the last oracle report
    deposits_since_report: int = 0
    withdrawal_reserve: int = 0  # swept exit balances earmarked for claims
    exiting_validators: set[int] = field(default_factory=set)
    swept_validators: set[int] = field(default_factory=set)
    events: list[tuple] = field(default_factory=list)  # (epoch, kind, entity, gwei, shares)
    _next_ticket: int = 0

    def log(self, epoch, kind, entity, gwei, shares):
        self.events.append((epoch, kind, entity, gwei, shares))


EVENT_CSV_HEADER = "epoch,event_kind,entity,gwei,shares"


def add_operator(pool, operator_id):
    pool.operators.append(OperatorSlot(operator_id=operator_id))


def shares_of(pool, user):
    return pool.accounts.get(user, 0)


def balance_of(pool, user):
    """Gwei value of a holder's shares at the current rate."""
    shares = pool.accounts.get(user, 0)
    if shares == 0 or pool.total_shares == 0:
        return 0
    return shares * pool.total_pooled_eth // pool.total_shares


def submit(pool, user, amount, epoch=0):
    """Deposit gwei, minting shares at the current share rate."""
    if amount <= 0:
        raise ZeroAmount("deposit must be positive")
    if pool.total_shares == 0:
        minted = amount
    else:
        minted = amount * pool.total_shares // pool.total_pooled_eth
    pool.total_pooled_eth += amount
    pool.buffered_eth += amount
    pool.total_shares += minted
    pool.accounts[user] = pool.accounts.get(user, 0) + minted
    pool.log(epoch, "submit", user, amount, minted)
    return minted


def transfer_shares(pool, from_user, to_user, shares, epoch=0):
    if shares < 0 or pool.accounts.get(from_user, 0) < shares:
        raise InsufficientShares(f"{from_user} holds {pool.accounts.get(from_user, 0)}")
    if shares == 0:
        return
    pool.accounts[from_user] -= shares
    pool.accounts[to_user] = pool.accounts.get(to_user, 0) + shares
    pool.log(epoch, "transfer", f"{from_user}->{to_user}", 0, shares)


def handle_oracle_report(pool, report, prev):
    """Apply a beacon balance report: rebase the backing and mint fee shares.

    reward = beacon delta minus deposits made since the previous report.
    The combined operator+treasury cut is minted as new shares so that the
    recipients' post-mint balances equal their bps of the reward; holders
    keep the rest via the rebase.  Penalty reports shrink the backing and
    charge no fees.
    """
    if report.epoch <= prev.epoch:
        raise StaleReport(f"report epoch {report.epoch} <= previous {prev.epoch}")
    delta = report.beacon_balance - prev.beacon_balance - pool.deposits_since_report
    pool.deposits_since_report = 0

    if delta <= 0:
        pool.total_pooled_eth += delta  # rebase down, no fees
        pool.log(report.epoch, "rebase_down", pool.entity, -delta, 0)
        return RebaseSummary(0, -delta, 0, 0, 0)

    reward = delta
    pool.total_pooled_eth += reward

    fee_bps = pool.operator_fee_bps + pool.treasury_fee_bps
    fee_total = reward * fee_bps // 10000
    operator_fee = reward * pool.operator_fee_bps // 10000
    treasury_fee = fee_total - operator_fee
    minted = 0
    if fee_total > 0 and pool.total_shares > 0:
        minted = fee_total * pool.total_shares // (pool.total_pooled_eth - fee_total)
        treasury_shares = minted * treasury_fee // fee_total
        operator_shares = minted - treasury_shares
        pool.accounts[TREASURY] = pool.accounts.get(TREASURY, 0) + treasury_shares
        assigned = [op for op in pool.operators if op.assigned_stake > 0]
        if assigned:
            total_assigned = sum(op.assigned_stake for op in assigned)
            given = 0
            for op in assigned[:-1]:
                cut = operator_shares * op.assigned_stake // total_assigned
                pool.accounts[op.operator_id] = pool.accounts.get(op.operator_id, 0) + cut
                given += cut
            last = assigned[-1]
            pool.accounts[last.operator_id] = (
                pool.accounts.get(last.operator_id, 0) + operator_shares - given
            )
        else:
            # no active operators to pay: the cut stays with the treasury
            pool.accounts[TREASURY] += operator_shares
        pool.total_shares += minted
    pool.log(report.epoch, "rebase_up", pool.entity, reward, minted)
    return RebaseSummary(reward, 0, minted, operator_fee, treasury_fee)


def assign_stake_dvt(pool, chain):
    """Launch buffered ETH as validators, least-loaded operator first
    (ties broken by lowest operator id).  Returns launched validator ids."""
    if not pool.operators:
        raise NoOperators("register at least one node operator first")
    launched = []
    while pool.buffered_eth >= DEPOSIT_GWEI:
        op = min(pool.operators, key=lambda o: (o.assigned_stake, o.operator_id))
        vid = chain_mod.submit_deposit(chain, pool.entity, DEPOSIT_GWEI)
        op.validator_ids.append(vid)
        op.assigned_stake += DEPOSIT_GWEI
        pool.buffered_eth -= DEPOSIT_GWEI
        pool.deposits_since_report += DEPOSIT_GWEI
        launched.append(vid)
        pool.log(chain.epoch, "launch", op.operator_id, DEPOSIT_GWEI, 0)
    return launched


def pool_beacon_balance(pool, chain):
    """Beacon-side balance and validator count backing the pool (unswept)."""
    balance = 0
    count = 0
    for op in pool.operators:
        for vid in op.validator_ids:
            if vid in pool.swept_validators:
                continue
            balance += chain.validators[vid].balance
            count += 1
    return balance, count


def request_withdrawal(pool, chain, user, shares):
    """Burn shares into a fixed gwei claim; serve it from the buffer when
    possible, otherwise request validator exits to cover it."""
    if shares <= 0:
        raise ZeroAmount("withdrawal must burn a positive share amount")
    if pool.accounts.get(user, 0) < shares:
        raise InsufficientShares(f"{user} holds {pool.accounts.get(user, 0)}")
    claim = shares * pool.total_pooled_eth // pool.total_shares
    pool.accounts[user] -= shares
    pool.total_shares -= shares
    pool.total_pooled_eth -= claim

    ticket = WithdrawalTicket(ticket_id=pool._next_ticket, user=user, gwei=claim)
    pool._next_ticket += 1
    pool.withdrawal_queue.append(ticket)
    pool.log(chain.epoch, "withdraw_request", user, claim, shares)

    _serve_from_buffer(pool)
    _request_exits_for_claims(pool, chain)
    return ticket


def _serve_from_buffer(pool):
    for ticket in pool.withdrawal_queue:
        if ticket.claimable:
            continue
        if pool.withdrawal_reserve >= ticket.gwei:
            pool.withdrawal_reserve -= ticket.gwei
            ticket.claimable = True
        elif pool.buffered_eth >= ticket.gwei:
            # buffer gwei back the share ledger, so burn them from it too
            pool.buffered_eth -= ticket.gwei
            ticket.claimable = True
        else:
            break  # FIFO: don't serve later tickets first


def _request_exits_for_claims(pool, chain):
    outstanding = sum(t.gwei for t in pool.withdrawal_queue if not t.claimable)
    covered = pool.withdrawal_reserve + DEPOSIT_GWEI * len(pool.exiting_validators)
    for op in pool.operators:
        for vid in op.validator_ids:
            if covered >= outstanding:
                return
            v = chain.validators[vid]
            if v.status is Status.ACTIVE and vid not in pool.exiting_validators:
                chain_mod.request_exit(chain, vid)
                pool.exiting_validators.add(vid)
                covered += DEPOSIT_GWEI


def finalize_withdrawals(pool, chain):
    """Sweep completed exits into the claim reserve and mark tickets
    claimable.  Exit balance beyond outstanding claims is rewards the
    share ledger has not seen yet; it returns to the buffer and backing."""
    for op in pool.operators:
        for vid in list(op.validator_ids):
            v = chain.validators[vid]
            if v.status is not Status.EXITED or vid in pool.swept_validators:
                continue
            pool.swept_validators.add(vid)
            pool.exiting_validators.discard(vid)
            op.validator_ids.remove(vid)
            op.assigned_stake -= DEPOSIT_GWEI
            pool.withdrawal_reserve += v.balance
            # the swept balance leaves the beacon side; cancel it against
            # deposits so the next oracle delta is not read as a penalty
            pool.deposits_since_report -= v.balance
            pool.log(chain.epoch, "exit_swept", pool.entity, v.balance, 0)
    _serve_from_buffer(pool)
    outstanding = sum(t.gwei for t in pool.withdrawal_queue if not t.claimable)
    if outstanding == 0 and pool.withdrawal_reserve > 0:
        excess = pool.withdrawal_reserve
        pool.withdrawal_reserve = 0
        pool.buffered_eth += excess
        pool.total_pooled_eth += excess
        pool.log(chain.epoch, "reserve_release", pool.entity, excess, 0)


def claim(pool, ticket):
    """Pay out a claimable ticket (terminal; removes it from the queue)."""
    if not ticket.claimable:
        raise NotClaimable(f"ticket {ticket.ticket_id} not claimable yet")
    pool.withdrawal_queue.remove(ticket)
    pool.log(0, "claim", ticket.user, ticket.gwei, 0)
    return ticket.gwei
