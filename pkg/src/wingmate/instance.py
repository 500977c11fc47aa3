"""Problem instances: 2m targets with a symmetric metric cost matrix.

Random instances use numpy's ``PCG64`` bit generator (numpy >= 1.17 stream
definition), seeded directly with the integer seed, so a given
``(n_targets, seed, grid_size)`` yields bit-identical coordinates everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InstanceParseError, InstanceValidationError, InvalidArgumentError

TOL = 1e-9
MIN_TARGETS = 6


def _check_count(n: int, exc=InvalidArgumentError) -> None:
    if n % 2 != 0:
        raise exc(f"n_targets must be even, got {n}")
    if n < MIN_TARGETS:
        raise exc(f"n_targets must be >= {MIN_TARGETS}, got {n}")


def euclidean_costs(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    costs = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(costs, 0.0)
    return costs


def check_costs(costs: np.ndarray, tol: float = TOL) -> list[str]:
    """Return a list of invariant violations of a cost matrix (empty if fine)."""
    problems = []
    n = costs.shape[0]
    if costs.shape != (n, n):
        return [f"cost matrix must be square, got shape {costs.shape}"]
    if not np.all(np.isfinite(costs)):
        problems.append("cost matrix has non-finite entries")
        return problems
    if np.any(np.abs(costs - costs.T) > tol):
        i, j = np.argwhere(np.abs(costs - costs.T) > tol)[0]
        problems.append(f"cost matrix is not symmetric at ({i}, {j})")
    if np.any(np.diag(costs) != 0.0):
        problems.append("cost matrix has a non-zero diagonal")
    if np.any(costs < 0):
        problems.append("cost matrix has negative entries")
    for k in range(n):
        via = costs[:, k, None] + costs[None, k, :]
        bad = costs > via + tol
        if bad.any():
            i, j = np.argwhere(bad)[0]
            problems.append(f"triangle inequality fails for ({i}, {j}) via {k}")
            break
    return problems


@dataclass(frozen=True, eq=False)
class Instance:
    """A read-only problem instance.

    ``costs`` is always present; ``points`` is ``None`` for pure metric
    instances loaded from a cost matrix.
    """

    id: str
    n_targets: int
    costs: np.ndarray
    points: np.ndarray | None = None

    def __post_init__(self):
        self.costs.setflags(write=False)
        if self.points is not None:
            self.points.setflags(write=False)

    @property
    def m(self) -> int:
        return self.n_targets // 2

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        if (self.id, self.n_targets) != (other.id, other.n_targets):
            return False
        if (self.points is None) != (other.points is None):
            return False
        if self.points is not None and not np.array_equal(self.points, other.points):
            return False
        return np.array_equal(self.costs, other.costs)

    __hash__ = None


def _build(id: str, points=None, costs=None, exc=InvalidArgumentError) -> Instance:
    if points is not None:
        pts = np.array(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise exc(f"points must be a list of [x, y] pairs, got shape {pts.shape}")
        _check_count(len(pts), exc)
        if not np.all(np.isfinite(pts)):
            raise exc("points must be finite")
        euclid = euclidean_costs(pts)
        off = euclid + np.eye(len(pts))
        if np.any(off < TOL):
            i, j = np.argwhere(off < TOL)[0]
            raise exc(f"duplicate points {i} and {j}")
        if costs is None:
            c = euclid
        else:
            c = np.array(costs, dtype=np.float64)
            if c.shape != euclid.shape or np.any(np.abs(c - euclid) > TOL):
                raise exc("costs do not match Euclidean distances between points")
    else:
        pts = None
        c = np.array(costs, dtype=np.float64)
        if c.ndim != 2:
            raise exc("costs must be a square matrix")
        _check_count(c.shape[0], exc)
    problems = check_costs(c)
    if problems:
        raise exc("; ".join(problems))
    return Instance(id=id, n_targets=len(c), costs=c, points=pts)


def from_points(points, id: str = "points") -> Instance:
    """Instance with Euclidean costs between ``points``."""
    return _build(id, points=points)


def from_costs(costs, id: str = "costs") -> Instance:
    """Instance over an explicit metric cost matrix."""
    return _build(id, costs=costs)


def generate_random(n_targets: int, seed: int, grid_size: float = 500.0) -> Instance:
    """Points drawn uniformly from ``[0, grid_size]^2`` with a PCG64 stream."""
    _check_count(n_targets)
    if not grid_size > 0:
        raise InvalidArgumentError(f"grid_size must be positive, got {grid_size}")
    rng = np.random.Generator(np.random.PCG64(seed))
    points = rng.uniform(0.0, grid_size, size=(n_targets, 2))
    return from_points(points, id=f"rand-{n_targets}-{seed}")


def _num(x: float) -> str:
    text = format(float(x), ".17g")
    # bare integers are valid JSON but keep them visibly floating point
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _matrix_json(rows) -> str:
    return "[\n    " + ",\n    ".join("[" + ", ".join(_num(v) for v in row) + "]" for row in rows) + "\n  ]"


def dumps(instance: Instance) -> str:
    parts = [f'  "id": {json.dumps(instance.id)}', f'  "n_targets": {instance.n_targets}']
    if instance.points is not None:
        parts.append(f'  "points": {_matrix_json(instance.points)}')
    else:
        parts.append(f'  "costs": {_matrix_json(instance.costs)}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, dict):
        raise InstanceParseError("instance file must hold a JSON object")
    for key in ("id", "n_targets"):
        if key not in data:
            raise InstanceParseError("missing required key", field=key)
    if not isinstance(data["id"], str):
        raise InstanceParseError("expected a string", field="id")
    n = data["n_targets"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InstanceParseError("expected an integer", field="n_targets")
    points, costs = data.get("points"), data.get("costs")
    if points is None and costs is None:
        raise InstanceParseError("one of 'points' or 'costs' is required", field="points")
    for key, value in (("points", points), ("costs", costs)):
        if value is None:
            continue
        if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
            raise InstanceParseError("expected an array of arrays", field=key)
        for r, row in enumerate(value):
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
                raise InstanceParseError(f"non-numeric entry in row {r}", field=key)
    _check_count(n, InstanceValidationError)
    declared = len(points) if points is not None else len(costs)
    if declared != n:
        raise InstanceValidationError(f"n_targets is {n} but {declared} targets are given")
    return _build(data["id"], points=points, costs=costs, exc=InstanceValidationError)


def save(instance: Instance, path) -> None:
    Path(path).write_text(dumps(instance))


def load(path) -> Instance:
    return loads(Path(path).read_text())
