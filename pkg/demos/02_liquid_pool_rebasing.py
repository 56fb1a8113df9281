"""Liquid staking pool walkthrough: deposits, validator launches spread
across node operators, an oracle rebase with the 5%/5%/90% split, and a
full withdrawal round trip."""

from stakesim import chain as C, pool as P
from stakesim.chain import GWEI_PER_ETH

ETH = GWEI_PER_ETH

ch = C.ChainState(apr_bps=0)
pl = P.PoolState(operator_fee_bps=500, treasury_fee_bps=500)
for name in ("operator_a", "operator_b"):
    P.add_operator(pl, name)

print("alice deposits 96 ETH, bob deposits 32 ETH")
P.submit(pl, "alice", 96 * ETH)
P.submit(pl, "bob", 32 * ETH)
launched = P.assign_stake_dvt(pl, ch)
print(f"launched {len(launched)} validators; per-operator load:",
      [(op.operator_id, op.assigned_stake // ETH) for op in pl.operators])

while ch.activation_queue:
    C.process_epoch(ch)

base, count = P.pool_beacon_balance(pl, ch)
baseline = P.OracleReport(ch.epoch, base, count)
P.handle_oracle_report(pl, baseline, P.OracleReport(-1, 0, 0))

print("\noracle reports 2 ETH of beacon rewards:")
summary = P.handle_oracle_report(
    pl, P.OracleReport(ch.epoch + 1, base + 2 * ETH, count), baseline)
print(f"  reward {summary.reward / 1e9} ETH -> operators {summary.operator_fee_gwei / 1e9},"
      f" treasury {summary.treasury_fee_gwei / 1e9}, holders the rest")
for who in ("alice", "bob", "operator_a", "operator_b", P.TREASURY):
    print(f"  balance[{who}] = {P.balance_of(pl, who) / 1e9:.6f} ETH")

print("\nbob withdraws everything:")
ticket = P.request_withdrawal(pl, ch, "bob", pl.accounts["bob"])
print(f"  claim fixed at {ticket.gwei / 1e9:.6f} ETH, claimable={ticket.claimable}")
while not ticket.claimable:
    C.process_epoch(ch)
    P.finalize_withdrawals(pl, ch)
print(f"  exit completed at epoch {ch.epoch}; paid {P.claim(pl, ticket) / 1e9:.6f} ETH")
