"""Scaling sweep: mean ticks, messages/n^2 and travel/(n*D) per n, plus linear fits.

    python3 scripts/sweep_scaling.py --ns 15 30 60 --seeds 4 --jobs 4
"""

import argparse

from swarm_array.experiments import fit_summary, mean_by_n, spread, sweep

p = argparse.ArgumentParser()
p.add_argument("--ns", type=int, nargs="+", default=list(range(15, 131, 5)))
p.add_argument("--seeds", type=int, default=8)
p.add_argument("--latency", type=int, default=1)
p.add_argument("--jobs", type=int, default=1)
args = p.parse_args()

results = sweep(args.ns, range(args.seeds), jobs=args.jobs, latency=args.latency)
rows = [r.metrics for r in results]
ticks = mean_by_n(rows, lambda m: m.ticks_total)
msgs = mean_by_n(rows, lambda m: m.messages_total / m.n**2)
travel = mean_by_n(rows, lambda m: m.travel_total / (m.n * m.D))
print(f"{'n':>4} {'ticks':>9} {'msg/n^2':>8} {'trav/nD':>8}")
for n in ticks:
    print(f"{n:>4} {ticks[n]:>9.1f} {msgs[n]:>8.3f} {travel[n]:>8.3f}")
print(fit_summary(rows), end="")
print(f"messages/n^2 max/min={spread(msgs.values()):.3f}  travel/(n*D) max/min={spread(travel.values()):.3f}")
failed = [(r.metrics.n, r.metrics.seed) for r in results if r.failures(0.05)]
print("failed runs:", failed or "none")
