"""How long does a new validator wait in the activation queue?

Walks the analytic tier estimator over a grid of queue sizes and checks
it against the brute-force epoch simulation.
"""

from stakesim import queue_wait as qw

table = qw.build_churn_table(min_churn=4, churn_quotient=65536)

print("churn tiers (first six):")
for s, e, d in list(zip(table.scaling, table.epoch_churn, table.day_churn))[:6]:
    print(f"  active >= {s:>8,}  ->  {e} per epoch / {d} per day")

print("\nentry-queue wait at 600,000 active validators:")
print(f"{'queue':>10} {'est. days':>10} {'oracle days':>12} {'ave churn':>10}  wait")
for queue in (0, 1_000, 10_000, 50_000, 90_000, 200_000):
    est = qw.estimate_wait(600_000, queue, table)
    epochs = qw.simulate_queue(600_000, queue, table)
    print(f"{queue:>10,} {est.churn_time_days:>10.2f} {epochs / 225:>12.2f} "
          f"{est.ave_churn:>10.2f}  {est.wait_text}")

print("\nexit queues drain into lower-churn tiers, so they run slower:")
for queue in (10_000, 90_000):
    entry = qw.estimate_wait(600_000, queue, table, direction="entry")
    exit_ = qw.estimate_wait(600_000, queue, table, direction="exit")
    print(f"  queue {queue:>7,}: entry {entry.churn_time_days:6.2f} d, "
          f"exit {exit_.churn_time_days:6.2f} d")
