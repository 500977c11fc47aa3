import numpy as np
import pytest

from wingmate.bounds import lower_bound, mst_matching_bound
from wingmate.exact import brute_force_solve
from wingmate.instance import from_costs, from_points, generate_random


def test_hexagon_bounds(hexagon):
    rep = lower_bound(hexagon)
    assert rep.tsp_component == pytest.approx(6.0, abs=1e-9)
    assert rep.matching_component == pytest.approx(3.0, abs=1e-9)
    assert rep.tsp_matching_bound == pytest.approx(9.0, abs=1e-9)
    assert rep.mst_matching_bound == pytest.approx(7.0, abs=1e-9)
    assert rep.best == pytest.approx(9.0, abs=1e-9)
    assert rep.tsp_exact


def test_collinear_mst_bound(collinear6):
    assert mst_matching_bound(collinear6) == pytest.approx(7.0, abs=1e-9)


def test_report_invariants():
    for seed in range(5):
        rep = lower_bound(generate_random(30, seed), iterations=200)
        assert rep.tsp_matching_bound == pytest.approx(rep.tsp_component + rep.matching_component, abs=1e-9)
        assert rep.best == max(rep.tsp_matching_bound, rep.mst_matching_bound)
        assert not rep.tsp_exact


def test_bounds_below_optimum():
    for n in (6, 8):
        for seed in range(10):
            inst = generate_random(n, seed)
            opt = brute_force_solve(inst).solution.total_cost
            rep = lower_bound(inst)
            assert rep.best <= opt + 1e-9
            assert rep.mst_matching_bound <= opt + 1e-9


@pytest.mark.parametrize("lam", [0.5, 3.0, 17.25])
def test_scaling(lam):
    inst = generate_random(12, 2)
    scaled = from_points(np.asarray(inst.points) * lam)
    a, b = lower_bound(inst), lower_bound(scaled)
    assert b.best == pytest.approx(lam * a.best, rel=1e-9)
    assert b.mst_matching_bound == pytest.approx(lam * a.mst_matching_bound, rel=1e-9)
    costs_only = from_costs(inst.costs * lam)
    assert lower_bound(costs_only).best == pytest.approx(lam * a.best, rel=1e-9)
