import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wingmate import instance as inst_mod
from wingmate.errors import InstanceParseError, InstanceValidationError, InvalidArgumentError
from wingmate.instance import from_costs, from_points, generate_random, load, save

from conftest import hexagon_points


def test_generate_basic():
    inst = generate_random(6, 1, 500)
    assert inst.n_targets == 6
    assert inst.points.shape == (6, 2)
    assert np.all((inst.points >= 0) & (inst.points <= 500))
    assert np.array_equal(inst.costs, inst.costs.T)


def test_generate_deterministic():
    a, b = generate_random(8, 7, 500), generate_random(8, 7, 500)
    assert a == b
    assert a.points.tobytes() == b.points.tobytes()
    assert generate_random(8, 8, 500) != a


@pytest.mark.parametrize("n", [5, 4, 0, -2, 7])
def test_generate_rejects_bad_counts(n):
    with pytest.raises(InvalidArgumentError, match="n_targets"):
        generate_random(n, 1, 500)


def test_generate_rejects_bad_grid():
    with pytest.raises(InvalidArgumentError):
        generate_random(6, 1, 0.0)


def test_hexagon_sides_are_unit():
    inst = from_points(hexagon_points())
    for k in range(6):
        assert inst.costs[k, (k + 1) % 6] == pytest.approx(1.0, abs=1e-9)


def test_from_points_rejects_small_and_duplicates():
    with pytest.raises(InvalidArgumentError):
        from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
    pts = hexagon_points()
    pts[3] = pts[1]
    with pytest.raises(InvalidArgumentError, match="duplicate"):
        from_points(pts)


def test_instances_are_read_only():
    inst = generate_random(6, 1)
    with pytest.raises(ValueError):
        inst.costs[0, 1] = 3.0


def test_round_trip(tmp_path):
    inst = generate_random(6, 1, 500)
    save(inst, tmp_path / "i.json")
    again = load(tmp_path / "i.json")
    assert again == inst
    assert again.points.tobytes() == inst.points.tobytes()


def test_round_trip_costs_only(tmp_path):
    inst = from_costs(generate_random(8, 3).costs, id="metric")
    save(inst, tmp_path / "m.json")
    assert load(tmp_path / "m.json") == inst


def test_seventeen_digit_serialisation():
    text = inst_mod.dumps(generate_random(6, 11))
    data = json.loads(text)
    assert "costs" not in data
    for x, y in data["points"]:
        assert isinstance(x, float) and isinstance(y, float)


def _write(tmp_path, data):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    return p


def test_load_rejects_asymmetric(tmp_path):
    c = generate_random(6, 2).costs.copy()
    c[0, 1] += 1.0
    with pytest.raises(InstanceValidationError, match="symmetric"):
        load(_write(tmp_path, {"id": "x", "n_targets": 6, "costs": c.tolist()}))


def test_load_rejects_odd_count(tmp_path):
    pts = [[float(k), float(k * k)] for k in range(7)]
    with pytest.raises(InstanceValidationError, match="even"):
        load(_write(tmp_path, {"id": "x", "n_targets": 7, "points": pts}))


def test_load_rejects_triangle_violation(tmp_path):
    c = np.ones((6, 6)) - np.eye(6)
    c[0, 1] = c[1, 0] = 5.0
    with pytest.raises(InstanceValidationError, match="triangle"):
        load(_write(tmp_path, {"id": "x", "n_targets": 6, "costs": c.tolist()}))


def test_load_reports_parse_location(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "id": "x",\n  "n_targets": 6,\n  "points": [[0, 0],, ]\n}')
    with pytest.raises(InstanceParseError, match="line 4"):
        load(p)


def test_load_reports_bad_field(tmp_path):
    with pytest.raises(InstanceParseError, match="n_targets"):
        load(_write(tmp_path, {"id": "x", "n_targets": "six", "points": []}))
    with pytest.raises(InstanceParseError, match="points"):
        load(_write(tmp_path, {"id": "x", "n_targets": 6}))


def test_load_count_mismatch(tmp_path):
    pts = [list(p) for p in hexagon_points()]
    with pytest.raises(InstanceValidationError):
        load(_write(tmp_path, {"id": "x", "n_targets": 8, "points": pts}))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(m=st.integers(3, 50), seed=st.integers(0, 2**63 - 1))
def test_generated_instances_are_metric(m, seed):
    inst = generate_random(2 * m, seed)
    c = inst.costs
    n = inst.n_targets
    assert np.all(np.diag(c) == 0)
    assert np.all(c >= 0)
    assert np.array_equal(c, c.T)
    # c[i, j] <= c[i, k] + c[k, j] for every triple
    tri = c[:, :, None] <= c[:, None, :] + c[None, :, :] + 1e-9
    assert tri.all()
    assert inst_mod.check_costs(c) == []
    d = inst.points[:, None, :] - inst.points[None, :, :]
    assert np.allclose(c, np.sqrt((d**2).sum(-1)), atol=1e-9, rtol=0)
    assert n == 2 * m


def test_exhaustive_triangle_check_small():
    inst = generate_random(12, 99)
    c = inst.costs
    for i in range(12):
        for j in range(12):
            for k in range(12):
                assert c[i, j] <= c[i, k] + c[k, j] + 1e-9
    assert math.isclose(c[0, 1], math.dist(inst.points[0], inst.points[1]), abs_tol=1e-9)
