"""Run one scenario and print per-phase ticks, messages and final accuracy.

    python3 scripts/run_scenario.py --n 60 --seed 3 --latency 2
"""

import argparse

from swarm_array.experiments import run_one

p = argparse.ArgumentParser()
p.add_argument("--n", type=int, default=30)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--latency", type=int, default=1)
p.add_argument("--collision", choices=("point", "disk"), default="point")
args = p.parse_args()

s = run_one(args.n, args.seed, latency=args.latency, collision=args.collision)
m = s.metrics
print(f"n={m.n} seed={m.seed} L={args.latency} D={m.D:.2f} m")
for phase in ("leader", "path", "contract_straighten", "sort"):
    print(f"  {phase:<20} ticks={getattr(m, 'ticks_' + phase):>6} messages={m.messages_by_phase[phase]:>7}")
print(f"  total ticks={m.ticks_total} messages={m.messages_total} (per n^2 {m.messages_total / m.n**2:.2f})")
print(f"  travel={m.travel_total:.2f} m (per n*D {m.travel_total / (m.n * m.D):.3f}), swaps={m.swaps_performed}")
print(f"  max target error={s.max_target_error:.2e} m, sorted={s.list_sorted}")
for f in s.failures(0.05):
    print("  FAIL:", f)
