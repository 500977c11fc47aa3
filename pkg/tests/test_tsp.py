import itertools
import math

import pytest

from wingmate.errors import InvalidArgumentError, SizeLimitError
from wingmate.instance import from_points, generate_random
from wingmate.tsp import (
    Tour,
    canonical_order,
    christofides,
    held_karp,
    improve_tour,
    minimum_spanning_tree,
    one_tree_bound,
    tour_cost,
    tsp_lower_bound,
)


def _spanning_tree_oracle(inst):
    n = inst.n_targets
    edges = list(itertools.combinations(range(n), 2))
    best = math.inf
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            best = min(best, sum(inst.costs[a, b] for a, b in subset))
    return best


def _tour_oracle(inst, vertices):
    first, *rest = vertices
    return min(tour_cost(inst.costs, (first, *p)) for p in itertools.permutations(rest))


def test_mst_hexagon(hexagon):
    edges, cost = minimum_spanning_tree(hexagon)
    assert cost == pytest.approx(5.0, abs=1e-9)
    assert len(edges) == 5
    assert cost == pytest.approx(_spanning_tree_oracle(hexagon), abs=1e-9)


def test_mst_collinear(collinear6):
    edges, cost = minimum_spanning_tree(collinear6)
    assert edges == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    assert cost == pytest.approx(5.0)


def test_mst_matches_oracle_random():
    for seed in range(3):
        inst = generate_random(6, seed)
        assert minimum_spanning_tree(inst)[1] == pytest.approx(_spanning_tree_oracle(inst), abs=1e-9)


def test_christofides_hexagon(hexagon):
    t = christofides(hexagon)
    assert t.order == (0, 1, 2, 3, 4, 5)
    assert t.cost == pytest.approx(6.0, abs=1e-9)


def test_christofides_collinear(collinear6):
    assert christofides(collinear6).cost == pytest.approx(10.0, abs=1e-9)


def test_christofides_guarantee():
    for seed in range(30):
        inst = generate_random(10, seed)
        t = christofides(inst)
        assert sorted(t.order) == list(range(10))
        assert t.cost == pytest.approx(tour_cost(inst.costs, t.order))
        opt = held_karp(inst).cost
        assert opt - 1e-9 <= t.cost <= 1.5 * opt + 1e-9
        assert minimum_spanning_tree(inst)[1] <= t.cost + 1e-9


def test_held_karp_square(hexagon):
    square = from_points([(0, 0), (1, 0), (1, 1), (0, 1), (5, 5), (6, 5)])
    assert held_karp(square, [0, 1, 2, 3]).cost == pytest.approx(4.0, abs=1e-9)
    assert held_karp(hexagon).cost == pytest.approx(6.0, abs=1e-9)


def test_held_karp_matches_enumeration():
    for seed in range(5):
        inst = generate_random(8, seed)
        t = held_karp(inst)
        assert t.cost == pytest.approx(_tour_oracle(inst, list(range(8))), abs=1e-9)
        sub = [1, 3, 4, 6, 7]
        assert held_karp(inst, sub).cost == pytest.approx(_tour_oracle(inst, sub), abs=1e-9)


def test_held_karp_size_limits():
    with pytest.raises(SizeLimitError):
        held_karp(generate_random(20, 1))
    with pytest.raises(SizeLimitError):
        held_karp(generate_random(6, 1), [0, 1])
    with pytest.raises(InvalidArgumentError):
        tsp_lower_bound(generate_random(6, 1), [0, 1])


def test_improve_tour_fixed_point(hexagon):
    t = Tour.from_order(hexagon, range(6))
    assert improve_tour(hexagon, t) == t


def test_improve_tour_uncrosses(hexagon):
    crossed = Tour.from_order(hexagon, (0, 3, 1, 2, 4, 5))
    better = improve_tour(hexagon, crossed)
    assert better.cost < crossed.cost - 1e-9
    assert better.cost == pytest.approx(6.0, abs=1e-9)


def test_improve_tour_sandwich():
    for seed in range(20):
        inst = generate_random(10, seed)
        start = christofides(inst)
        t = improve_tour(inst, start)
        assert held_karp(inst).cost - 1e-9 <= t.cost <= start.cost + 1e-9
        assert sorted(t.order) == list(range(10))


def test_improve_tour_budget():
    inst = generate_random(60, 3)
    start = Tour.from_order(inst, range(60))
    tiny = improve_tour(inst, start, budget=1)
    full = improve_tour(inst, start)
    assert tiny.cost <= start.cost + 1e-9
    assert full.cost < tiny.cost


def test_tsp_lower_bound_exact_path(hexagon):
    assert tsp_lower_bound(hexagon) == pytest.approx(6.0, abs=1e-9)


def test_tsp_lower_bound_valid_large():
    for seed in range(3):
        inst = generate_random(20, seed)
        lb = tsp_lower_bound(inst)
        ub = improve_tour(inst, christofides(inst)).cost
        assert 0 < lb <= ub + 1e-9
        assert lb >= minimum_spanning_tree(inst)[1] - 1e-9


def test_one_tree_path_below_optimum():
    for seed in range(5):
        inst = generate_random(12, seed)
        lb = tsp_lower_bound(inst, exact_limit=0)
        opt = held_karp(inst).cost
        assert lb <= opt + 1e-9
        assert lb >= 0.9 * opt
        assert one_tree_bound(inst, iterations=5) <= opt + 1e-9


def test_tour_invariants(hexagon):
    assert canonical_order((3, 2, 1, 0, 5, 4)) == (0, 1, 2, 3, 4, 5)
    assert canonical_order((2, 0, 5)) == (0, 2, 5)
    t = Tour.from_order(hexagon, (4, 5, 0, 1, 2, 3))
    assert t.order[0] == 0 and len(t) == 6
    assert len(t.edges()) == 6
    assert sum(hexagon.costs[a, b] for a, b in t.edges()) == pytest.approx(t.cost)
