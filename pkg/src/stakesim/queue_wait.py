"""Validator entry/exit wait-time estimation.

`estimate_wait` is the analytic tier-walk over the churn table;
`simulate_queue` is the brute-force epoch-stepped oracle used to verify
it.  Both handle entry queues (active set grows while draining) and exit
queues (active set shrinks).
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass

from .chain import EPOCHS_PER_DAY, SECONDS_PER_DAY
from .errors import ActiveOutOfTableRange, MalformedRow


@dataclass(frozen=True)
class ChurnTable:
    scaling: tuple[int, ...]
    epoch_churn: tuple[int, ...]
    day_churn: tuple[int, ...]

    def __post_init__(self):
        n = len(self.scaling)
        if n < 2 or len(self.epoch_churn) != n or len(self.day_churn) != n:
            raise ValueError("table arrays must have equal length >= 2")
        if any(a >= b for a, b in zip(self.scaling, self.scaling[1:])):
            raise ValueError("scaling must be strictly increasing")
        if any(a > b for a, b in zip(self.epoch_churn, self.epoch_churn[1:])):
            raise ValueError("epoch_churn must be non-decreasing")


def build_churn_table(min_churn=4, churn_quotient=65536, max_tiers=32,
                      epochs_per_day=EPOCHS_PER_DAY):
    """Materialize the churn tiers of max(min_churn, active // churn_quotient).

    Tier i covers active counts in [(min_churn+i)*q, (min_churn+i+1)*q) and
    churns min_churn+i validators per epoch.
    """
    if min_churn < 1 or churn_quotient < 1 or max_tiers < 2:
        raise ValueError("min_churn, churn_quotient >= 1 and max_tiers >= 2 required")
    scaling = tuple((min_churn + i) * churn_quotient for i in range(max_tiers))
    epoch_churn = tuple(min_churn + i for i in range(max_tiers))
    day_churn = tuple(c * epochs_per_day for c in epoch_churn)
    return ChurnTable(scaling, epoch_churn, day_churn)


@dataclass(frozen=True)
class WaitEstimate:
    churn_time_days: float
    curr_churn: int
    ave_churn: float
    wait_secs: int
    wait_days: int
    wait_text: str


def _round_half_up(x):
    return math.floor(x + 0.5)


def _tier_index(table, active):
    if active < table.scaling[0] or active >= table.scaling[-1]:
        raise ActiveOutOfTableRange(
            f"active={active} outside [{table.scaling[0]}, {table.scaling[-1]})"
        )
    return bisect_right(table.scaling, active) - 1


def estimate_wait(active, queue, table, direction="entry"):
    """Analytic wait-time estimate for a queue of the given size.

    Walks the queue across churn tiers: the first segment runs from
    `active` to the nearest tier boundary, later segments span whole
    tiers, each drained at that tier's day churn.  For exits the walk
    descends and the region below the lowest tier churns at the minimum
    rate.
    """
    if active < 0 or queue < 0:
        raise ValueError("active and queue must be non-negative")
    if direction not in ("entry", "exit"):
        raise ValueError(f"unknown direction {direction!r}")
    i = _tier_index(table, active)
    curr_churn = table.epoch_churn[i]

    churn_time_days = 0.0
    churn_factor = 0.0
    remain = queue
    j = i
    position = active
    while remain > 0:
        if direction == "entry":
            if j >= len(table.scaling) - 1:
                raise ActiveOutOfTableRange("queue extends beyond the table's top tier")
            span = table.scaling[j + 1] - position
            take = min(remain, span)
            churn_time_days += take / table.day_churn[j]
            churn_factor += take * table.epoch_churn[j]
            position = table.scaling[j + 1]
            j += 1
        else:
            if j < 0:
                # below the lowest tier the minimum churn applies indefinitely
                churn_time_days += remain / table.day_churn[0]
                churn_factor += remain * table.epoch_churn[0]
                take = remain
            else:
                span = position - table.scaling[j]
                take = min(remain, span)
                if take:
                    churn_time_days += take / table.day_churn[j]
                    churn_factor += take * table.epoch_churn[j]
                position = table.scaling[j]
                j -= 1
        remain -= take

    if queue > 0:
        ave_churn = _round_half_up(churn_factor / queue * 100) / 100
    else:
        ave_churn = float(curr_churn)

    wait_secs = _round_half_up(churn_time_days * SECONDS_PER_DAY)
    wait_days = wait_secs // SECONDS_PER_DAY
    if wait_days > 0:
        wait_text = f"{wait_days} day(s)"
    else:
        hours = wait_secs // 3600
        minutes = _round_half_up((wait_secs % 3600) / 60)
        wait_text = f"{hours} hour(s), {minutes} minute(s)"

    return WaitEstimate(
        churn_time_days=churn_time_days,
        curr_churn=curr_churn,
        ave_churn=ave_churn,
        wait_secs=wait_secs,
        wait_days=wait_days,
        wait_text=wait_text,
    )


def _churn_at(table, active):
    """Epoch churn for any active count, clamping below the lowest tier."""
    if active < table.scaling[0]:
        return table.epoch_churn[0]
    if active >= table.scaling[-1]:
        raise ActiveOutOfTableRange(f"active={active} beyond the table's top tier")
    return table.epoch_churn[bisect_right(table.scaling, active) - 1]


def simulate_queue(active, queue, table, direction="entry"):
    """Brute-force oracle: drain the queue epoch by epoch at the discrete
    churn limit, moving `active` as validators enter or leave.  Returns
    the exact number of epochs until the queue empties.

    Epochs with identical churn are batched; the result is identical to
    the naive one-epoch-at-a-time loop.
    """
    _tier_index(table, active)  # validates the starting point
    if direction not in ("entry", "exit"):
        raise ValueError(f"unknown direction {direction!r}")
    remain = queue
    epochs = 0
    while remain > 0:
        c = _churn_at(table, active)
        if direction == "entry":
            idx = bisect_right(table.scaling, active) - 1
            boundary = table.scaling[idx + 1] if idx + 1 < len(table.scaling) else None
            k_boundary = math.inf if boundary is None else -(-(boundary - active) // c)
        else:
            if active < table.scaling[0]:
                k_boundary = math.inf
            else:
                idx = bisect_right(table.scaling, active) - 1
                # tier idx holds while active >= scaling[idx]
                k_boundary = (active - table.scaling[idx]) // c + 1
        k_drain = -(-remain // c)
        k = min(k_boundary, k_drain)
        drained = min(remain, c * k)
        epochs += k
        remain -= drained
        active += drained if direction == "entry" else -drained
        if direction == "entry" and remain > 0 and active >= table.scaling[-1]:
            raise ActiveOutOfTableRange("queue extends beyond the table's top tier")
    return epochs


def simulate_queue_naive(active, queue, table, direction="entry"):
    """One-epoch-at-a-time reference for simulate_queue (used in tests)."""
    _tier_index(table, active)
    remain = queue
    epochs = 0
    while remain > 0:
        if direction == "entry" and active >= table.scaling[-1]:
            raise ActiveOutOfTableRange("queue extends beyond the table's top tier")
        c = _churn_at(table, active)
        d = min(c, remain)
        remain -= d
        active += d if direction == "entry" else -d
        epochs += 1
    return epochs


HISTORY_HEADER = ["date", "kind", "active", "queue_len", "observed_wait_days"]


@dataclass(frozen=True)
class HistoryRow:
    date: str
    kind: str  # "entry" or "exit"
    active: int
    queue_len: int
    observed_wait_days: float


@dataclass(frozen=True)
class HistoryComparison:
    row: HistoryRow
    estimated_days: float
    residual: float  # estimated - observed


@dataclass(frozen=True)
class HistorySummary:
    rows: tuple[HistoryComparison, ...]
    mean_abs_residual: float
    max_abs_residual: float


def load_history_csv(path):
    """Parse the `date,kind,active,queue_len,observed_wait_days` CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise MalformedRow(0, "empty file")
    if [c.strip() for c in rows[0]] != HISTORY_HEADER:
        raise MalformedRow(0, f"bad header {rows[0]!r}")
    out = []
    for idx, raw in enumerate(rows[1:], start=1):
        try:
            date, kind, active, queue_len, observed = raw
            kind = kind.strip()
            if kind not in ("entry", "exit"):
                raise ValueError(f"kind must be entry or exit, got {kind!r}")
            out.append(HistoryRow(date.strip(), kind, int(active), int(queue_len),
                                  float(observed)))
        except (ValueError, TypeError) as exc:
            raise MalformedRow(idx, str(exc)) from exc
    return out


def compare_history(observations, table):
    """Estimate each observed (active, queue) pair and report residuals."""
    observations = list(observations)
    if not observations:
        raise MalformedRow(0, "no observations")
    comparisons = []
    for row in observations:
        est = estimate_wait(row.active, row.queue_len, table, direction=row.kind)
        comparisons.append(HistoryComparison(
            row=row,
            estimated_days=est.churn_time_days,
            residual=est.churn_time_days - row.observed_wait_days,
        ))
    abs_res = [abs(c.residual) for c in comparisons]
    return HistorySummary(
        rows=tuple(comparisons),
        mean_abs_residual=sum(abs_res) / len(abs_res),
        max_abs_residual=max(abs_res),
    )
