import pytest

from swarm_array import generate_scenario, run_pipeline, target_positions
from swarm_array.experiments import run_one
from swarm_array.kernel import Phase, SimulationTimeout
from swarm_array.model import Scenario
from swarm_array.pipeline import default_budget


def test_two_robots_finish_without_moving():
    res = run_pipeline(Scenario(2, 1, [(0, 0), (0.8, 0)], [2, 1]))
    assert res.metrics.travel_total == 0.0
    assert all(r.phase is Phase.DONE for r in res.world.robots)


@pytest.mark.parametrize("n, seed", [(3, 0), (8, 2), (15, 0), (40, 3)])
def test_small_runs_reach_targets(n, seed):
    s = generate_scenario(n, seed)
    summary = run_one(n, seed, scenario=s)
    assert summary.failures(0.05) == []
    assert summary.metrics.ticks_total == sum(
        (
            summary.metrics.ticks_leader,
            summary.metrics.ticks_path,
            summary.metrics.ticks_contract_straighten,
            summary.metrics.ticks_sort,
        )
    )


def test_final_positions_match_targets_n60():
    s = generate_scenario(60, 7)
    res = run_pipeline(s)
    for r, t in zip(res.world.robots, target_positions(s)):
        assert (r.x, r.y) == pytest.approx(t, abs=0.05)


def test_disk_mode_completes():
    summary = run_one(15, 2, collision="disk")
    assert summary.failures(0.05) == []


def test_budget_exhaustion_raises():
    with pytest.raises(SimulationTimeout):
        run_pipeline(generate_scenario(15, 0), budget=50)
    assert default_budget(10) == 22000
