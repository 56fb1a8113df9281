"""Scenario configuration and deterministic simulation runs.

A scenario is a YAML file with chain parameters, pool/restaking rosters
and a scripted timeline of actions keyed by epoch.  Running it produces
plot-ready CSVs (epoch series, events, security report) plus a text
summary; identical config and seed give byte-identical output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import chain as chain_mod
from . import metrics, pool as pool_mod, restaking
from .chain import GWEI_PER_ETH
from .errors import ConfigError

KNOWN_ACTIONS = (
    "deposit",
    "submit_to_pool",
    "delegate",
    "opt_in",
    "prove_misbehavior",
    "request_exit",
    "oracle_report",
    "restake_native",
)

EPOCH_CSV_HEADER = (
    chain_mod.EpochReport.CSV_HEADER
    + ",total_pooled_eth,total_shares,buffered_eth,nakamoto_coefficient,hhi,gini"
)


@dataclass(frozen=True)
class RestakeOperatorSpec:
    id: str
    home: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    run_epochs: int
    initial_active: int
    apr_bps: int = 380
    min_churn: int = chain_mod.MIN_CHURN
    churn_quotient: int = chain_mod.CHURN_QUOTIENT
    epochs_per_day: int = chain_mod.EPOCHS_PER_DAY
    operator_fee_bps: int = 500
    treasury_fee_bps: int = 500
    pool_operators: tuple[str, ...] = ()
    restake_operators: tuple[RestakeOperatorSpec, ...] = ()
    avs_modules: tuple[restaking.AVSModule, ...] = ()
    timeline: tuple[dict, ...] = ()


def _require(mapping, key, typ, where):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required field '{key}'")
    value = mapping[key]
    if typ is int and isinstance(value, bool) or not isinstance(value, typ):
        raise ConfigError(f"{where}.{key}: expected {typ.__name__}, got {value!r}")
    return value


def _eth_to_gwei(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number of ETH, got {value!r}")
    return int(round(value * GWEI_PER_ETH))


def load_config(path):
    """Parse and validate a scenario YAML file."""
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must hold a mapping at top level")
    return parse_config(raw)


def parse_config(raw):
    seed = _require(raw, "seed", int, "scenario")
    run_epochs = _require(raw, "run_epochs", int, "scenario")
    if run_epochs < 0:
        raise ConfigError("scenario.run_epochs must be non-negative")

    ch = raw.get("chain", {})
    if not isinstance(ch, dict):
        raise ConfigError("scenario.chain must be a mapping")
    initial_active = _require(ch, "initial_active", int, "chain")

    pl = raw.get("pool", {})
    if not isinstance(pl, dict):
        raise ConfigError("scenario.pool must be a mapping")
    pool_operators = tuple(pl.get("operators", []))
    if not all(isinstance(o, str) for o in pool_operators):
        raise ConfigError("pool.operators must be a list of names")

    rs = raw.get("restaking", {})
    if not isinstance(rs, dict):
        raise ConfigError("scenario.restaking must be a mapping")
    restake_ops = []
    for k, item in enumerate(rs.get("operators", [])):
        if not isinstance(item, dict):
            raise ConfigError(f"restaking.operators[{k}] must be a mapping")
        restake_ops.append(RestakeOperatorSpec(
            id=_require(item, "id", str, f"restaking.operators[{k}]"),
            home=bool(item.get("home", False)),
        ))
    avs_modules = []
    for k, item in enumerate(rs.get("avs", [])):
        where = f"restaking.avs[{k}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{where} must be a mapping")
        try:
            avs_modules.append(restaking.AVSModule(
                id=_require(item, "id", str, where),
                fee_bps_per_year=item.get("fee_bps", 0),
                slashing_fraction=float(item.get("slashing_fraction", 0.0)),
                profit_from_corruption=_eth_to_gwei(item.get("pfc_eth", 0), where + ".pfc_eth"),
                home_validators_only=bool(item.get("home_only", False)),
                own_stake=_eth_to_gwei(item.get("own_stake_eth", 0), where + ".own_stake_eth"),
            ))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc

    op_ids = {o.id for o in restake_ops}
    avs_ids = {a.id for a in avs_modules}

    timeline = raw.get("timeline", [])
    if not isinstance(timeline, list):
        raise ConfigError("scenario.timeline must be a list")
    checked = []
    for k, entry in enumerate(timeline):
        where = f"timeline[{k}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be a mapping")
        epoch = _require(entry, "epoch", int, where)
        if not 0 <= epoch < max(run_epochs, 1):
            raise ConfigError(f"{where}.epoch {epoch} outside run length {run_epochs}")
        action = _require(entry, "action", str, where)
        if action not in KNOWN_ACTIONS:
            raise ConfigError(f"{where}.action {action!r} not one of {KNOWN_ACTIONS}")
        if action in ("delegate", "opt_in", "prove_misbehavior", "restake_native"):
            op = _require(entry, "operator", str, where)
            if op not in op_ids:
                raise ConfigError(f"{where}.operator {op!r} not declared")
        if action in ("opt_in", "prove_misbehavior"):
            avs = _require(entry, "avs", str, where)
            if avs not in avs_ids:
                raise ConfigError(f"{where}.avs {avs!r} not declared")
        checked.append(dict(entry))

    return ScenarioConfig(
        seed=seed,
        run_epochs=run_epochs,
        initial_active=initial_active,
        apr_bps=ch.get("apr_bps", 380),
        min_churn=ch.get("min_churn", chain_mod.MIN_CHURN),
        churn_quotient=ch.get("churn_quotient", chain_mod.CHURN_QUOTIENT),
        epochs_per_day=ch.get("epochs_per_day", chain_mod.EPOCHS_PER_DAY),
        operator_fee_bps=pl.get("operator_fee_bps", 500),
        treasury_fee_bps=pl.get("treasury_fee_bps", 500),
        pool_operators=pool_operators,
        restake_operators=tuple(restake_ops),
        avs_modules=tuple(avs_modules),
        timeline=tuple(checked),
    )


@dataclass
class RunOutput:
    epoch_rows: list[str] = field(default_factory=list)
    event_rows: list[str] = field(default_factory=list)
    security_rows: list[str] = field(default_factory=list)
    summary: str = ""


def run_scenario(config, rng=None):
    """Execute the scripted timeline and return the CSV-ready output."""
    rng = rng if rng is not None else random.Random(config.seed)
    chain = chain_mod.bootstrap(
        config.initial_active,
        apr_bps=config.apr_bps,
        min_churn=config.min_churn,
        churn_quotient=config.churn_quotient,
        epochs_per_day=config.epochs_per_day,
    )
    pool = pool_mod.PoolState(
        operator_fee_bps=config.operator_fee_bps,
        treasury_fee_bps=config.treasury_fee_bps,
    )
    for name in config.pool_operators:
        pool_mod.add_operator(pool, name)
    restake = restaking.RestakeState()
    for spec in config.restake_operators:
        restaking.register_operator(restake, spec.id, home_validator=spec.home)
    for module in config.avs_modules:
        restaking.register_avs(restake, module)

    by_epoch = {}
    for entry in config.timeline:
        by_epoch.setdefault(entry["epoch"], []).append(entry)

    out = RunOutput()
    prev_report = pool_mod.OracleReport(epoch=-1, beacon_balance=0, beacon_validator_count=0)

    def log(kind, entity, gwei=0, shares=0):
        out.event_rows.append(f"{chain.epoch},{kind},{entity},{gwei},{shares}")

    for _ in range(config.run_epochs):
        for entry in by_epoch.get(chain.epoch, []):
            action = entry["action"]
            if action == "deposit":
                gwei = _eth_to_gwei(entry.get("eth", 32), "timeline.deposit.eth")
                vid = chain_mod.submit_deposit(chain, entry["entity"], gwei)
                log("deposit", entry["entity"], gwei)
            elif action == "submit_to_pool":
                gwei = _eth_to_gwei(entry["eth"], "timeline.submit_to_pool.eth")
                minted = pool_mod.submit(pool, entry["user"], gwei, epoch=chain.epoch)
                log("submit_to_pool", entry["user"], gwei, minted)
            elif action == "delegate":
                gwei = _eth_to_gwei(entry["eth"], "timeline.delegate.eth")
                restaking.delegate(restake, entry["staker"], entry["operator"], gwei)
                log("delegate", f"{entry['staker']}->{entry['operator']}", gwei)
            elif action == "opt_in":
                restaking.opt_in(restake, entry["operator"], entry["avs"])
                log("opt_in", f"{entry['operator']}->{entry['avs']}")
            elif action == "prove_misbehavior":
                event = restaking.prove_misbehavior(
                    restake, chain, entry["avs"], entry["operator"])
                log("prove_misbehavior", f"{entry['avs']}:{entry['operator']}",
                    event.slashed)
            elif action == "request_exit":
                chain_mod.request_exit(chain, int(entry["validator"]))
                log("request_exit", str(entry["validator"]))
            elif action == "restake_native":
                restaking.restake_native(
                    restake, chain, int(entry["validator"]), entry["operator"])
                log("restake_native", f"{entry['validator']}->{entry['operator']}")
            elif action == "oracle_report":
                balance, count = pool_mod.pool_beacon_balance(pool, chain)
                report = pool_mod.OracleReport(
                    epoch=chain.epoch, beacon_balance=balance,
                    beacon_validator_count=count)
                summary = pool_mod.handle_oracle_report(pool, report, prev_report)
                prev_report = report
                log("oracle_report", pool.entity, summary.reward,
                    summary.fee_shares_minted)

        if pool.operators and pool.buffered_eth >= chain_mod.DEPOSIT_GWEI:
            for vid in pool_mod.assign_stake_dvt(pool, chain):
                log("launch", pool.entity, chain_mod.DEPOSIT_GWEI)

        report = chain_mod.process_epoch(chain)
        pool_mod.finalize_withdrawals(pool, chain)
        restaking.settle_native_slashes(restake, chain)

        dist = metrics.stake_distribution(chain, pool, restake)
        if dist.entries:
            cr = metrics.centralization_report(dist)
            tail = f"{cr.nakamoto_coefficient},{cr.hhi:.6f},{cr.gini:.6f}"
        else:
            tail = "0,0.000000,0.000000"
        out.epoch_rows.append(
            f"{report.csv_row()},{pool.total_pooled_eth},{pool.total_shares},"
            f"{pool.buffered_eth},{tail}"
        )

    security = restaking.compute_security(restake)
    out.security_rows = security.csv_rows()

    lines = [
        f"seed: {config.seed}",
        f"epochs run: {config.run_epochs}",
        f"final epoch: {chain.epoch}",
        f"active validators: {chain.active_count()}",
        f"activation queue: {len(chain.activation_queue)}",
        f"exit queue: {len(chain.exit_queue)}",
        f"pool total_pooled_eth_gwei: {pool.total_pooled_eth}",
        f"pool total_shares: {pool.total_shares}",
        f"pool buffered_eth_gwei: {pool.buffered_eth}",
    ]
    for row in security.rows:
        lines.append(
            f"avs {row.avs_id}: coc_pooled={row.coc_pooled} pfc={row.pfc} "
            f"margin={row.margin_pooled}"
        )
    out.summary = "\n".join(lines) + "\n"
    return out


def write_output(out, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "epochs.csv").write_text(
        EPOCH_CSV_HEADER + "\n" + "\n".join(out.epoch_rows) + ("\n" if out.epoch_rows else ""),
        encoding="utf-8")
    (out_dir / "events.csv").write_text(
        pool_mod.EVENT_CSV_HEADER + "\n" + "\n".join(out.event_rows)
        + ("\n" if out.event_rows else ""),
        encoding="utf-8")
    (out_dir / "security.csv").write_text(
        restaking.SecurityReport.CSV_HEADER + "\n" + "\n".join(out.security_rows)
        + ("\n" if out.security_rows else ""),
        encoding="utf-8")
    (out_dir / "summary.txt").write_text(out.summary, encoding="utf-8")
