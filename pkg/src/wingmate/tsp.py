"""Single-vehicle tours: MST, Christofides, Held-Karp, local search, bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SizeLimitError
from .instance import TOL, Instance
from .matching import min_weight_perfect_matching

HELD_KARP_LIMIT = 18
DEFAULT_BUDGET = 10_000_000
ONE_TREE_ITERATIONS = 1000


def tour_cost(costs: np.ndarray, order) -> float:
    """Cost of the closed walk through ``order`` (summed in visit order)."""
    total = 0.0
    k = len(order)
    if k < 2:
        return total
    for p in range(k):
        total += costs[order[p], order[(p + 1) % k]]
    return float(total)


def canonical_order(order) -> tuple[int, ...]:
    """Rotate so the smallest vertex leads, then orient toward its smaller neighbour."""
    order = [int(v) for v in order]
    if len(order) < 3:
        return tuple(sorted(order))
    p = order.index(min(order))
    rot = order[p:] + order[:p]
    if rot[-1] < rot[1]:
        rot = [rot[0]] + rot[:0:-1]
    return tuple(rot)


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    cost: float

    @classmethod
    def from_order(cls, instance: Instance, order) -> "Tour":
        order = canonical_order(order)
        return cls(order, tour_cost(instance.costs, order))

    def __len__(self):
        return len(self.order)

    def edges(self) -> list[tuple[int, int]]:
        k = len(self.order)
        if k < 2:
            return []
        if k == 2:
            a, b = self.order
            return [(a, b), (b, a)]
        return [(self.order[p], self.order[(p + 1) % k]) for p in range(k)]


def _vertex_list(instance: Instance, vertices) -> list[int]:
    if vertices is None:
        return list(range(instance.n_targets))
    vs = sorted(int(v) for v in vertices)
    if len(set(vs)) != len(vs):
        raise InvalidArgumentError("vertex subset has repeated vertices")
    if vs and not (0 <= vs[0] and vs[-1] < instance.n_targets):
        raise InvalidArgumentError("vertex index out of range")
    return vs


def _first_min(values: np.ndarray) -> int:
    """Index of the first entry within TOL of the minimum."""
    return int(np.flatnonzero(values <= values.min() + TOL)[0])


def _prim(w: np.ndarray) -> tuple[np.ndarray, float]:
    """Prim's algorithm on a dense matrix. Returns parent array and cost.

    Starts from node 0; among keys within TOL of the minimum the lowest node
    index is taken, and a key is replaced only on a strict (> TOL) improvement.
    """
    k = w.shape[0]
    parent = np.full(k, -1)
    key = w[0].astype(float).copy()
    parent[1:] = 0
    in_tree = np.zeros(k, dtype=bool)
    in_tree[0] = True
    key[0] = np.inf
    total = 0.0
    for _ in range(k - 1):
        cand = np.where(in_tree, np.inf, key)
        v = _first_min(cand)
        total += w[parent[v], v]
        in_tree[v] = True
        better = (~in_tree) & (w[v] < key - TOL)
        key[better] = w[v][better]
        parent[better] = v
    return parent, float(total)


def minimum_spanning_tree(instance: Instance, vertices=None) -> tuple[list[tuple[int, int]], float]:
    """Minimum spanning tree over the complete graph induced by ``vertices``."""
    vs = _vertex_list(instance, vertices)
    if len(vs) < 2:
        raise InvalidArgumentError("a spanning tree needs at least 2 vertices")
    w = instance.costs[np.ix_(vs, vs)]
    parent, _ = _prim(w)
    edges = sorted((min(vs[i], vs[p]), max(vs[i], vs[p])) for i, p in enumerate(parent) if p >= 0)
    return edges, float(sum(instance.costs[a, b] for a, b in edges))


def _euler_circuit(adj: dict[int, list[int]], start: int) -> list[int]:
    """Hierholzer's algorithm, always following the lowest-index neighbour."""
    adj = {v: sorted(ns) for v, ns in adj.items()}
    stack, circuit = [start], []
    while stack:
        v = stack[-1]
        if adj[v]:
            u = adj[v].pop(0)
            adj[u].remove(v)
            stack.append(u)
        else:
            circuit.append(stack.pop())
    return circuit[::-1]


def christofides(instance: Instance, vertices=None) -> Tour:
    """Christofides tour: MST + odd-vertex matching + Euler circuit + shortcuts."""
    vs = _vertex_list(instance, vertices)
    if len(vs) < 3:
        raise InvalidArgumentError("a tour needs at least 3 vertices")
    edges, _ = minimum_spanning_tree(instance, vs)
    adj: dict[int, list[int]] = {v: [] for v in vs}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    odd = [v for v in vs if len(adj[v]) % 2]
    if odd:
        for a, b in min_weight_perfect_matching(instance, odd).pairs:
            adj[a].append(b)
            adj[b].append(a)
    seen, order = set(), []
    for v in _euler_circuit(adj, vs[0]):
        if v not in seen:
            seen.add(v)
            order.append(v)
    return Tour.from_order(instance, order)


def held_karp(instance: Instance, vertices=None) -> Tour:
    """Exact optimal tour by bitmask dynamic programming (3 to 18 vertices)."""
    vs = _vertex_list(instance, vertices)
    k = len(vs)
    if not 3 <= k <= HELD_KARP_LIMIT:
        raise SizeLimitError(f"held_karp supports 3..{HELD_KARP_LIMIT} vertices, got {k}")
    c = instance.costs[np.ix_(vs, vs)]
    n = k - 1
    sub = c[1:, 1:]
    size = 1 << n
    dp = np.full((size, n), np.inf)
    for j in range(n):
        dp[1 << j, j] = c[0, j + 1]
    masks = np.arange(size)
    popcount = np.zeros(size, dtype=np.int64)
    for j in range(n):
        popcount += (masks >> j) & 1
    for layer in range(1, n):
        layer_masks = masks[popcount == layer]
        for lo in range(0, len(layer_masks), 4096):
            chunk = layer_masks[lo : lo + 4096]
            ext = (dp[chunk][:, :, None] + sub[None, :, :]).min(axis=1)
            for j in range(n):
                free = ((chunk >> j) & 1) == 0
                dp[chunk[free] | (1 << j), j] = ext[free, j]
    full = size - 1
    last = _first_min(dp[full] + c[1:, 0])
    path = [last]
    mask = full
    while mask != 1 << last:
        mask ^= 1 << last
        last = _first_min(dp[mask] + sub[:, last])
        path.append(last)
    order = [vs[0]] + [vs[j + 1] for j in reversed(path)]
    return Tour.from_order(instance, order)


def _two_opt_pass(c: np.ndarray, t: list[int], budget: int) -> tuple[bool, int]:
    n = len(t)
    improved, used = False, 0
    i = 0
    while i < n - 2 and used < budget:
        arr = np.asarray(t)
        js = np.arange(i + 2, n - 1 if i == 0 else n)
        js = js[: budget - used]
        if len(js) == 0:
            i += 1
            continue
        used += len(js)
        a, b = t[i], t[i + 1]
        cj, dj = arr[js], arr[(js + 1) % n]
        delta = c[a, cj] + c[b, dj] - c[a, b] - c[cj, dj]
        hits = np.flatnonzero(delta < -TOL)
        if len(hits):
            j = int(js[hits[0]])
            t[i + 1 : j + 1] = t[i + 1 : j + 1][::-1]
            improved = True
            continue
        i += 1
    return improved, used


def _or_opt_pass(c: np.ndarray, t: list[int], budget: int) -> tuple[bool, int]:
    n = len(t)
    improved, used = False, 0
    for seg_len in (1, 2, 3):
        if n - seg_len < 3:
            continue
        i = 0
        while i <= n - seg_len and used < budget:
            seg = t[i : i + seg_len]
            rest = t[:i] + t[i + seg_len :]
            p, q = t[i - 1], t[(i + seg_len) % n]
            s0, s1 = seg[0], seg[-1]
            gain = c[p, s0] + c[s1, q] - c[p, q]
            r = np.asarray(rest)
            u, v = r, np.roll(r, -1)
            keep = ~((u == p) & (v == q))
            js = np.flatnonzero(keep)[: max(0, (budget - used) // 2)]
            if len(js) == 0:
                break
            used += 2 * len(js)
            uj, vj = u[js], v[js]
            base = c[uj, vj] + gain
            fwd = c[uj, s0] + c[s1, vj] - base
            rev = c[uj, s1] + c[s0, vj] - base
            hit_f = np.flatnonzero(fwd < -TOL)
            hit_r = np.flatnonzero(rev < -TOL)
            first_f = hit_f[0] if len(hit_f) else len(js)
            first_r = hit_r[0] if len(hit_r) else len(js)
            if first_f == len(js) and first_r == len(js):
                i += 1
                continue
            if first_f <= first_r:
                j, piece = int(js[first_f]), seg
            else:
                j, piece = int(js[first_r]), seg[::-1]
            t[:] = rest[: j + 1] + piece + rest[j + 1 :]
            improved = True
        if used >= budget:
            break
    return improved, used


def improve_tour(instance: Instance, tour: Tour, budget: int = DEFAULT_BUDGET) -> Tour:
    """2-opt plus Or-opt (segments of 1-3, either orientation) local search.

    First improvement in a fixed scan order; stops at a local optimum of both
    neighbourhoods or after ``budget`` move evaluations.
    """
    t = list(tour.order)
    if len(set(t)) != len(t):
        raise InvalidArgumentError("tour visits a vertex twice")
    c = instance.costs
    used = 0
    while used < budget:
        moved, spent = _two_opt_pass(c, t, budget - used)
        used += spent
        if used >= budget:
            break
        shifted, spent = _or_opt_pass(c, t, budget - used)
        used += spent
        if not (moved or shifted):
            break
    result = Tour.from_order(instance, t)
    if result.cost > tour.cost:
        return tour
    return result


def one_tree_bound(instance: Instance, vertices=None, iterations: int = ONE_TREE_ITERATIONS, upper: float | None = None) -> float:
    """Held-Karp 1-tree bound with subgradient ascent on node penalties.

    Step size ``lam * (upper - L) / |g|^2`` with ``lam`` starting at 2 and
    halved after 20 iterations without a new best bound.
    """
    vs = _vertex_list(instance, vertices)
    k = len(vs)
    if k < 3:
        raise InvalidArgumentError("a tour needs at least 3 vertices")
    c = instance.costs[np.ix_(vs, vs)]
    if upper is None:
        upper = improve_tour(instance, christofides(instance, vs)).cost
    pi = np.zeros(k)
    best = -np.inf
    lam, stall, patience = 2.0, 0, 20
    for _ in range(iterations):
        w = c + pi[:, None] + pi[None, :]
        parent, tree_cost = _prim(w[1:, 1:])
        row = w[0, 1:]
        two = np.argsort(row, kind="stable")[:2]
        value = tree_cost + row[two].sum() - 2.0 * pi.sum()
        deg = np.zeros(k)
        deg[0] = 2
        deg[two + 1] += 1
        for child, par in enumerate(parent):
            if par >= 0:
                deg[child + 1] += 1
                deg[par + 1] += 1
        g = deg - 2
        if value > best + TOL:
            best, stall = value, 0
        else:
            stall += 1
        gap = upper - value
        if not g.any() or gap <= TOL:
            break
        if stall >= patience:
            lam, stall = lam / 2, 0
            if lam < 1e-6:
                break
        pi += lam * gap / float(g @ g) * g
    return float(min(best, upper))


def tsp_lower_bound(instance: Instance, vertices=None, iterations: int = ONE_TREE_ITERATIONS, exact_limit: int = HELD_KARP_LIMIT) -> float:
    """Lower bound on the optimal tour cost over ``vertices``.

    Exact (Held-Karp) up to ``exact_limit`` vertices, the 1-tree bound beyond.
    """
    vs = _vertex_list(instance, vertices)
    if len(vs) < 3:
        raise InvalidArgumentError("a tour needs at least 3 vertices")
    if len(vs) <= exact_limit:
        return held_karp(instance, vs).cost
    return one_tree_bound(instance, vs, iterations=iterations)
