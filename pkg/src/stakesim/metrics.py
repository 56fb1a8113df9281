"""Stake-concentration analytics: per-entity distribution, Nakamoto
coefficient, Herfindahl-Hirschman index, and Gini coefficient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import Status
from .errors import EmptyDistribution


@dataclass(frozen=True)
class StakeDistribution:
    entries: tuple[tuple[str, int, float], ...]  # (entity, gwei, fraction), descending
    total: int


@dataclass(frozen=True)
class CentralizationReport:
    nakamoto_coefficient: int
    hhi: float
    gini: float

    CSV_HEADER = "epoch,nakamoto_coefficient,hhi,gini"

    def csv_row(self, epoch):
        return f"{epoch},{self.nakamoto_coefficient},{self.hhi:.6f},{self.gini:.6f}"


def distribution_from_stakes(stakes):
    """Build a StakeDistribution from an entity -> gwei mapping."""
    entries = [(e, g) for e, g in stakes.items() if g > 0]
    total = sum(g for _, g in entries)
    if total == 0:
        return StakeDistribution(entries=(), total=0)
    entries.sort(key=lambda x: (-x[1], x[0]))
    return StakeDistribution(
        entries=tuple((e, g, g / total) for e, g in entries),
        total=total,
    )


def stake_distribution(chain, pool=None, restake=None, look_through_pool=False,
                       delegation_to="operator"):
    """Attribute each active validator's stake to its controlling entity.

    Pool validators are attributed to the pool entity unless
    `look_through_pool` pushes them down to the share holders.  Restaked
    validators go to their operator by default (`delegation_to="operator"`)
    or stay with their owner (`delegation_to="owner"`).
    """
    operator_of = {}
    if restake is not None and delegation_to == "operator":
        for op in restake.operators.values():
            for vid, _ in op.restaked_validators:
                operator_of[vid] = op.id

    stakes = {}
    pool_stake = 0
    for v in chain.validators.values():
        if v.status is not Status.ACTIVE:
            continue
        if pool is not None and v.entity == pool.entity:
            pool_stake += v.balance
            continue
        entity = operator_of.get(v.id, v.entity)
        stakes[entity] = stakes.get(entity, 0) + v.balance

    if pool_stake:
        if look_through_pool and pool.total_shares > 0:
            for holder, shares in pool.accounts.items():
                cut = pool_stake * shares // pool.total_shares
                if cut:
                    stakes[holder] = stakes.get(holder, 0) + cut
        else:
            stakes[pool.entity] = stakes.get(pool.entity, 0) + pool_stake
    return distribution_from_stakes(stakes)


def nakamoto_coefficient(dist, threshold=0.5):
    """Smallest k whose top-k fractions sum strictly above the threshold."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    if not dist.entries:
        raise EmptyDistribution("no stake")
    acc = 0.0
    for k, (_, _, frac) in enumerate(dist.entries, start=1):
        acc += frac
        if acc > threshold:
            return k
    return len(dist.entries)


def hhi(dist):
    """Sum of squared percentage shares; 10000 for a monopoly."""
    if not dist.entries:
        raise EmptyDistribution("no stake")
    return float(sum((100.0 * frac) ** 2 for _, _, frac in dist.entries))


def gini(dist):
    """Discrete Gini coefficient over the stake amounts."""
    if not dist.entries:
        raise EmptyDistribution("no stake")
    x = np.sort(np.array([g for _, g, _ in dist.entries], dtype=np.float64))
    n = x.size
    ranks = np.arange(1, n + 1)
    return float(2.0 * np.sum(ranks * x) / (n * np.sum(x)) - (n + 1) / n)


def centralization_report(dist, threshold=0.5):
    return CentralizationReport(
        nakamoto_coefficient=nakamoto_coefficient(dist, threshold),
        hhi=hhi(dist),
        gini=gini(dist),
    )
