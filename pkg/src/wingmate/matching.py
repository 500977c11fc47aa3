"""Minimum-weight perfect matching on complete metric graphs.

The optimum comes from the blossom implementation in networkx, run on exact
integer weights. Costs are rounded to ``COST_RESOLUTION`` and shifted above a
lexicographic penalty so that, among matchings of equal (rounded) cost, the
lexicographically smallest sorted pair list wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .errors import InvalidArgumentError, SizeLimitError
from .instance import TOL, Instance

COST_RESOLUTION = 1e-12
BRUTE_FORCE_LIMIT = 12


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    total_cost: float


def _prepare(vertices) -> list[int]:
    vs = sorted(int(v) for v in vertices)
    if len(set(vs)) != len(vs):
        raise InvalidArgumentError("vertex subset has repeated vertices")
    if len(vs) < 2 or len(vs) % 2:
        raise InvalidArgumentError(f"perfect matching needs an even number >= 2 of vertices, got {len(vs)}")
    return vs


def _make(instance: Instance, pairs) -> Matching:
    pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))
    return Matching(pairs, float(sum(instance.costs[a, b] for a, b in pairs)))


def min_weight_perfect_matching(instance: Instance, vertices=None) -> Matching:
    """Exact minimum-cost perfect matching on ``vertices`` (default: all)."""
    vs = _prepare(range(instance.n_targets) if vertices is None else vertices)
    n = len(vs)
    if n == 2:
        return _make(instance, [tuple(vs)])
    base = n + 1
    scale = base**n
    c = instance.costs
    g = nx.Graph()
    for r, a in enumerate(vs):
        digit = base ** (n - 1 - r)
        for s in range(r + 1, n):
            b = vs[s]
            g.add_edge(a, b, weight=round(c[a, b] / COST_RESOLUTION) * scale + s * digit)
    pairs = nx.min_weight_matching(g)
    if 2 * len(pairs) != n:
        raise RuntimeError("blossom matching returned a non-perfect matching")
    return _make(instance, pairs)


def brute_force_matching(instance: Instance, vertices=None) -> Matching:
    """Exhaustive minimum over all perfect matchings (at most 12 vertices)."""
    vs = _prepare(range(instance.n_targets) if vertices is None else vertices)
    if len(vs) > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force matching supports at most {BRUTE_FORCE_LIMIT} vertices, got {len(vs)}")
    c = instance.costs
    best_cost = float("inf")
    best = None

    # enumeration order is lexicographic in the sorted pair list, so keeping
    # only strict improvements returns the lexicographically smallest optimum
    def rec(rest, acc, cost):
        nonlocal best_cost, best
        if not rest:
            if cost < best_cost - TOL:
                best_cost, best = cost, list(acc)
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            acc.append((a, b))
            rec(rest[1:k] + rest[k + 1 :], acc, cost + c[a, b])
            acc.pop()

    rec(vs, [], 0.0)
    return _make(instance, best)
