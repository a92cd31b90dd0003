"""Run every oracle suite except the end-to-end one at a given latency bound."""

import sys

from swarm_array.suites import run_suite

latency = int(sys.argv[1]) if len(sys.argv) > 1 else 1
ok = True
for name in ("echo", "leader", "crossing", "wavesort"):
    for r in run_suite(name, latency=latency):
        print(r.line())
        ok &= r.passed
sys.exit(0 if ok else 3)
