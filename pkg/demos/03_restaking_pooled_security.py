"""Pooled security via restaking: 13 operators with one stake unit each,
all opted into 13 services, versus each service defending itself alone.
Then a misbehavior proof freezes one operator and slashes its stake."""

from stakesim import chain as C, restaking as R
from stakesim.chain import GWEI_PER_ETH

ETH = GWEI_PER_ETH
UNIT = 1000 * ETH

st = R.RestakeState()
ch = C.bootstrap(13)

for i in range(13):
    R.register_avs(st, R.AVSModule(
        id=f"avs{i:02d}", fee_bps_per_year=50, slashing_fraction=0.5,
        profit_from_corruption=UNIT // 2, own_stake=UNIT))
for i in range(13):
    op = f"op{i:02d}"
    R.register_operator(st, op, home_validator=True)
    R.delegate(st, f"staker_{i}", op, UNIT)
    for j in range(13):
        R.opt_in(st, op, f"avs{j:02d}")

print("security report (stake units of 1000 ETH):")
for row in R.compute_security(st).rows[:3]:
    print(f"  {row.avs_id}: fragmented CoC {row.coc_fragmented // UNIT} unit, "
          f"pooled CoC {row.coc_pooled // UNIT} units, "
          f"margin {row.margin_pooled // UNIT * 2 / 2} units over PfC")
print("  ... (same for all 13 services)")

print("\na year of service fees accrues to the delegators:")
earned = R.accrue_fees(st, 225 * 365)
print(f"  op00 earned {earned['op00'] / 1e9:.3f} ETH; "
      f"staker_0 credited {st.fee_credits['staker_0'] / 1e9:.3f} ETH")

print("\nop07 is proven to misbehave on avs03 (50% slash):")
event = R.prove_misbehavior(st, ch, "avs03", "op07")
print(f"  slashed {event.slashed / 1e9} ETH, operator frozen="
      f"{st.operators['op07'].frozen}")
row = next(r for r in R.compute_security(st).rows if r.avs_id == "avs03")
print(f"  avs03 pooled CoC now {row.coc_pooled / UNIT:.1f} units")
