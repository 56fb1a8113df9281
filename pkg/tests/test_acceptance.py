"""Acceptance suite: one test per release criterion, each printing a
pass/fail line.  Run with `pytest tests/test_acceptance.py -v -s`."""

import random
import time
from pathlib import Path

import pytest

from stakesim import chain as C, metrics as M, pool as P, queue_wait as qw
from stakesim import restaking as R, scenario
from stakesim.chain import DEPOSIT_GWEI, GWEI_PER_ETH
from stakesim.errors import OperatorFrozen, StakeSimError

ETH = GWEI_PER_ETH
REPO_ROOT = Path(__file__).resolve().parent.parent
TABLE = qw.build_churn_table(4, 65536, 32)


def report(name, ok):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")
    assert ok


def test_01_estimator_oracle_equivalence():
    rng = random.Random(20230521)
    start = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        active = rng.randrange(262144, 1310720)
        queue = rng.randrange(0, 300001)
        est = qw.estimate_wait(active, queue, TABLE)
        epochs = qw.simulate_queue(active, queue, TABLE)
        worst = max(worst, abs(est.churn_time_days - epochs / 225))
    elapsed = time.monotonic() - start
    print(f"  worst estimator-vs-oracle gap: {worst:.4f} days in {elapsed:.2f}s")
    report("01 oracle equivalence (<=1.0 day, <10s)", worst <= 1.0 and elapsed < 10)


def test_02_worked_tier_walk():
    est = qw.estimate_wait(600000, 90000, TABLE)
    ok = abs(est.churn_time_days - 42.73) < 0.01 and est.ave_churn == 9.38
    print(f"  churnTimeDays={est.churn_time_days:.4f} aveChurn={est.ave_churn}")
    report("02 worked tier walk (42.73 days, aveChurn 9.38)", ok)


def test_03_fee_split_one_eth():
    pl = P.PoolState(operator_fee_bps=500, treasury_fee_bps=500)
    ch = C.ChainState(apr_bps=0)
    P.add_operator(pl, "opA")
    P.add_operator(pl, "opB")
    holders = ("u1", "u2")
    for user in holders:
        P.submit(pl, user, 64 * ETH)
    P.assign_stake_dvt(pl, ch)
    pl.deposits_since_report = 0
    base, count = P.pool_beacon_balance(pl, ch)
    prev = P.OracleReport(0, base, count)
    before = {u: P.balance_of(pl, u) for u in holders}
    P.handle_oracle_report(pl, P.OracleReport(5, base + ETH, count), prev)
    op_gain = P.balance_of(pl, "opA") + P.balance_of(pl, "opB")
    treasury_gain = P.balance_of(pl, P.TREASURY)
    holder_gain = sum(P.balance_of(pl, u) - before[u] for u in holders)
    tol = len(holders) + 2
    ok = (abs(op_gain - ETH // 20) <= tol
          and abs(treasury_gain - ETH // 20) <= tol
          and abs(holder_gain - 9 * ETH // 10) <= tol)
    print(f"  operators +{op_gain} treasury +{treasury_gain} holders +{holder_gain} gwei")
    report("03 fee split 5/5/90 on 1 ETH reward", ok)


def test_04_apr_year_scenario():
    ch = C.ChainState(apr_bps=380)
    pl = P.PoolState(operator_fee_bps=0, treasury_fee_bps=0)
    P.add_operator(pl, "op")
    P.submit(pl, "staker", 32 * ETH)
    P.assign_stake_dvt(pl, ch)
    C.process_epoch(ch)  # activation epoch
    base, count = P.pool_beacon_balance(pl, ch)
    baseline = P.OracleReport(ch.epoch, base, count)
    # zero-delta baseline report: absorbs the launch deposit
    P.handle_oracle_report(pl, baseline, P.OracleReport(-1, 0, 0))
    prev = baseline
    for _ in range(225 * 365):
        C.process_epoch(ch)
    balance, count = P.pool_beacon_balance(pl, ch)
    P.handle_oracle_report(pl, P.OracleReport(ch.epoch, balance, count), prev)
    final = P.balance_of(pl, "staker")
    target = 33_216_000_000
    print(f"  balance after 1 year: {final / 1e9:.6f} ETH (target 33.216 +- 0.001)")
    report("04 APR 380 bps year -> 33.216 ETH", abs(final - target) <= 10**6)


def test_05_pooled_security_thirteen():
    st = R.RestakeState()
    unit = 10**12  # 1000 ETH per operator/service
    for i in range(13):
        R.register_avs(st, R.AVSModule(id=f"avs{i:02d}", own_stake=unit))
    for i in range(13):
        op = f"op{i:02d}"
        R.register_operator(st, op)
        R.delegate(st, f"staker{i}", op, unit)
        for j in range(13):
            R.opt_in(st, op, f"avs{j:02d}")
    rows = R.compute_security(st).rows
    ok = all(r.coc_fragmented == unit and r.coc_pooled == 13 * unit for r in rows)
    print(f"  per-service CoC fragmented={rows[0].coc_fragmented} pooled={rows[0].coc_pooled}")
    report("05 pooled security 1 unit -> 13 units", ok and len(rows) == 13)


def test_06_freeze_is_absorbing():
    st = R.RestakeState()
    ch = C.bootstrap(50)
    R.register_operator(st, "victim")
    R.register_avs(st, R.AVSModule(id="avs0", fee_bps_per_year=200, slashing_fraction=0.5))
    R.delegate(st, "alice", "victim", 100 * ETH)
    R.opt_in(st, "victim", "avs0")
    R.prove_misbehavior(st, ch, "avs0", "victim")

    rng = random.Random(99)
    violations = 0
    for i in range(10**4):
        action = rng.randrange(4)
        try:
            if action == 0:
                R.delegate(st, f"s{i}", "victim", rng.randrange(1, 10 * ETH))
                violations += 1
            elif action == 1:
                R.opt_in(st, "victim", "avs0")
                violations += 1
            elif action == 2:
                vid = rng.randrange(50)
                R.restake_native(st, ch, vid, "victim")
                violations += 1
            else:
                earned = R.accrue_fees(st, rng.randrange(1, 1000))
                if "victim" in earned:
                    violations += 1
        except (OperatorFrozen, StakeSimError):
            pass
    ok = violations == 0 and st.fee_credits.get("victim", 0) == 0
    print(f"  violations over 10^4 post-freeze operations: {violations}")
    report("06 freeze semantics absorbing", ok)


def _conservation_sequence(rng):
    """One randomized mixed chain+pool sequence; returns violation count."""
    violations = 0
    ch = C.ChainState(apr_bps=0)
    pl = P.PoolState()
    P.add_operator(pl, "op")
    users = ["u0", "u1", "u2"]
    for u in users:
        P.submit(pl, u, rng.randrange(1, 64) * ETH)
    P.assign_stake_dvt(pl, ch)
    expected_chain_total = ch.total_balance()
    pending_slash = 0
    for _ in range(rng.randrange(3, 9)):
        op = rng.randrange(5)
        if op == 0:
            a, b = rng.sample(users, 2)
            shares = pl.accounts.get(a, 0)
            if shares:
                P.transfer_shares(pl, a, b, rng.randrange(1, shares + 1))
        elif op == 1:
            u = rng.choice(users)
            P.submit(pl, u, rng.randrange(1, 5 * ETH))
        elif op == 2 and ch.validators:
            vid = rng.choice(list(ch.validators))
            amount = rng.randrange(1, 64 * ETH)
            pending_slash += C.apply_slash(ch, vid, amount)
        elif op == 3:
            r = C.process_epoch(ch)
            expected_chain_total -= r.slashed_gwei
            pending_slash -= r.slashed_gwei
        # op == 4: no-op epoch filler
    # settle outstanding slashes so the expectation is final
    r = C.process_epoch(ch)
    expected_chain_total -= r.slashed_gwei

    if ch.total_balance() != expected_chain_total:
        violations += 1
    if any(v.balance < 0 for v in ch.validators.values()):
        violations += 1
    if sum(pl.accounts.values()) != pl.total_shares:
        violations += 1
    holder_total = sum(P.balance_of(pl, u) for u in pl.accounts)
    if not (0 <= pl.total_pooled_eth - holder_total < len(pl.accounts) + 2):
        violations += 1
    return violations


def test_07_conservation_suite():
    rng = random.Random(777)
    start = time.monotonic()
    violations = 0
    n_sequences = 20_000  # 3-8 random operations each: >=10^5 operations total
    for _ in range(n_sequences):
        violations += _conservation_sequence(rng)

    # rebase proportionality on randomized rewards
    for _ in range(2_000):
        pl = P.PoolState(operator_fee_bps=0, treasury_fee_bps=0)
        holders = {f"h{i}": rng.randrange(1, 100 * ETH) for i in range(rng.randrange(1, 5))}
        for u, g in holders.items():
            P.submit(pl, u, g)
        before = {u: P.balance_of(pl, u) for u in holders}
        old = pl.total_pooled_eth
        reward = rng.randrange(0, 10 * ETH)
        prev = P.OracleReport(0, old, 1)
        pl.buffered_eth = 0
        pl.deposits_since_report = old  # everything "staked" for the report
        P.handle_oracle_report(pl, P.OracleReport(1, 2 * old + reward, 1), prev)
        for u in holders:
            scaled = before[u] * pl.total_pooled_eth // old
            if abs(P.balance_of(pl, u) - scaled) > 1:
                violations += 1
    elapsed = time.monotonic() - start
    print(f"  violations: {violations} ({n_sequences} sequences, {elapsed:.1f}s)")
    report("07 conservation suite zero violations", violations == 0)


def test_08_centralization_metrics():
    d = M.distribution_from_stakes({c: 25 * ETH for c in "abcd"})
    ok = (M.nakamoto_coefficient(d, 0.5) == 3
          and M.hhi(d) == pytest.approx(2500))
    rng = random.Random(4242)
    for _ in range(1000):
        stakes = {f"e{i}": rng.randrange(1, 10**9) for i in range(rng.randrange(2, 20))}
        d1 = M.distribution_from_stakes(stakes)
        keys = rng.sample(sorted(stakes), 2)
        stakes[keys[0]] += stakes.pop(keys[1])
        d2 = M.distribution_from_stakes(stakes)
        if M.hhi(d2) < M.hhi(d1) - 1e-9:
            ok = False
        if M.nakamoto_coefficient(d2) > M.nakamoto_coefficient(d1):
            ok = False
    report("08 centralization metrics + merge monotonicity", ok)


def test_09_determinism_and_runtime(tmp_path):
    demo = REPO_ROOT / "scenarios" / "demo.yaml"
    cfg = scenario.load_config(demo)
    start = time.monotonic()
    out1 = scenario.run_scenario(cfg)
    out2 = scenario.run_scenario(cfg)
    elapsed = time.monotonic() - start
    scenario.write_output(out1, tmp_path / "a")
    scenario.write_output(out2, tmp_path / "b")
    identical = all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
        for n in ("epochs.csv", "events.csv", "security.csv", "summary.txt")
    )
    print(f"  two demo runs in {elapsed:.2f}s, byte-identical: {identical}")
    report("09 demo determinism (<30s)", identical and elapsed < 30)
