"""Discrete epoch-based simulator and analysis toolkit for proof-of-stake
staking economies: validator churn queues and wait-time estimation, a
liquid staking pool with a rebasing claim token, a restaking/delegation
layer with slashing, and stake-centralization analytics."""

from . import chain, cli, errors, metrics, pool, queue_wait, restaking, scenario

__all__ = [
    "chain",
    "cli",
    "errors",
    "metrics",
    "pool",
    "queue_wait",
    "restaking",
    "scenario",
]

__version__ = "0.1.0"
