"""Exact optimisation of the two-vehicle problem.

A feasible solution is a cycle of linked pairs ``(a_1, b_1), ..., (a_m, b_m)``:
vehicle 1 visits the a's in order, vehicle 2 the b's, and ``a_i`` talks to
``b_i``. Its cost is

    sum_i c(a_i, b_i) + c(a_i, a_{i+1}) + c(b_i, b_{i+1})

``exact_solve`` runs a Held-Karp style dynamic program over these pair
sequences: the state is (set of visited targets, last pair) for a fixed first
pair ``(0, s)``. Which vehicle an interior target belongs to never affects
later costs, so partitions are not enumerated. States whose cost plus an
admissible completion bound reaches the incumbent are pruned.

``brute_force_solve`` is the independent oracle: it enumerates partitions,
tour orders and alignments directly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from .bounds import lower_bound
from .duo import DuoSolution, approx_solve, assemble, heuristic_solve
from .errors import SizeLimitError
from .instance import TOL, Instance

BRUTE_FORCE_LIMIT = 12
EXACT_LIMIT = 18
CHUNK = 256


@dataclass
class ExactResult:
    solution: DuoSolution
    optimal: bool
    best_bound: float
    nodes_explored: int
    runtime: float
    # (elapsed seconds, incumbent cost, proven bound) at every change
    trace: list[tuple[float, float, float]] = field(default_factory=list)


def _cyclic_orders(vertices):
    """Each undirected cycle on ``vertices`` once: first vertex fixed, p[0] < p[-1]."""
    first, rest = vertices[0], vertices[1:]
    for p in permutations(rest):
        if len(p) < 2 or p[0] < p[-1]:
            yield (first,) + p


def brute_force_solve(instance: Instance) -> ExactResult:
    """Exhaustive optimum over partitions, tour orders and all 2m alignments."""
    n = instance.n_targets
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force supports at most {BRUTE_FORCE_LIMIT} targets, got {n}")
    t0 = time.perf_counter()
    m = n // 2
    c = instance.costs
    idx = np.arange(m)
    best_cost, best = np.inf, None
    evaluated = 0
    # target 0 always rides with vehicle 1: the two labels are interchangeable
    for rest in combinations(range(1, n), m - 1):
        v1 = (0,) + rest
        v2 = tuple(v for v in range(n) if v not in v1)
        a = np.array(list(_cyclic_orders(v1)))
        b_orders = np.array(list(_cyclic_orders(v2)))
        cost_a = c[a, np.roll(a, -1, axis=1)].sum(axis=1)
        cost_b = c[b_orders, np.roll(b_orders, -1, axis=1)].sum(axis=1)
        seqs, seq_cost = [], []
        for direction in (1, -1):
            for shift in range(m):
                seqs.append(b_orders[:, (direction * idx + shift) % m])
                seq_cost.append(cost_b)
        b = np.concatenate(seqs)
        cost_b_all = np.concatenate(seq_cost)
        links = c[a[:, None, :], b[None, :, :]].sum(axis=2)
        total = cost_a[:, None] + cost_b_all[None, :] + links
        evaluated += total.size
        i, j = np.unravel_index(np.argmin(total), total.shape)
        if total[i, j] < best_cost - TOL:
            best_cost = total[i, j]
            best = (a[i].tolist(), b[j].tolist())
    order1, order2 = best
    sol = assemble(instance, order1, order2, list(zip(order1, order2)))
    runtime = time.perf_counter() - t0
    return ExactResult(sol, True, sol.total_cost, evaluated, runtime, [(runtime, sol.total_cost, sol.total_cost)])


def _smallest_sums(costs: np.ndarray, k: int) -> np.ndarray:
    off = costs + np.diag(np.full(len(costs), np.inf))
    return np.sort(off, axis=1)[:, :k].sum(axis=1)


class _Search:
    """Pair-sequence dynamic program with incumbent pruning."""

    def __init__(self, instance: Instance, deadline: float):
        self.instance = instance
        self.c = instance.costs
        self.n = instance.n_targets
        self.m = self.n // 2
        self.deadline = deadline
        self.nodes = 0
        # every unvisited target still needs two tour edges and one link, to
        # three distinct neighbours; each edge is shared by two endpoints
        self.half3 = 0.5 * _smallest_sums(self.c, 3)
        self.half1 = 0.5 * _smallest_sums(self.c, 1)

    def start_bound(self, s: int) -> float:
        rest = [v for v in range(1, self.n) if v != s]
        return float(self.c[0, s] + self.half3[rest].sum() + 2 * (self.half1[0] + self.half1[s]))

    def completion(self, s, bits, masks):
        """Admissible bound on the cost still to pay, per mask and last pair."""
        free = (masks[:, None] & bits[None, :]) == 0
        free[:, 0] = False
        free[:, s] = False
        per_mask = free.astype(float) @ self.half3 + self.half1[0] + self.half1[s]
        return per_mask[:, None, None] + self.half1[None, :, None] + self.half1[None, None, :]

    def run_start(self, s: int, incumbent: float):
        """Best cycle whose first pair is (0, s); None if nothing beats ``incumbent``.

        Returns (cost, pair list) or raises TimeoutError.
        """
        n, c = self.n, self.c
        rest = [v for v in range(1, n) if v != s]
        bits = np.zeros(n, dtype=np.int64)
        for p, v in enumerate(rest):
            bits[v] = 1 << p
        full = (1 << len(rest)) - 1
        dp = np.full((full + 1, n, n), np.inf)
        dp[0, 0, s] = c[0, s]
        eye = np.eye(n, dtype=bool)
        layer = np.array([0], dtype=np.int64)
        for _ in range(self.m - 1):
            targets = []
            for lo in range(0, len(layer), CHUNK):
                if time.perf_counter() > self.deadline:
                    raise TimeoutError
                chunk = layer[lo : lo + CHUNK]
                d = dp[chunk]
                dead = d + self.completion(s, bits, chunk) >= incumbent - TOL
                if dead.any():
                    d[dead] = np.inf
                    dp[chunk] = d
                alive = np.isfinite(d).any(axis=(1, 2))
                if not alive.any():
                    continue
                chunk, d = chunk[alive], d[alive]
                self.nodes += int(np.isfinite(d).sum())
                # extend every (a, b) by a new pair (a2, b2):
                # d[a, b] + c[a, a2] + c[b, b2] + c[a2, b2]
                via_b = (d[:, :, :, None] + c[None, None, :, :]).min(axis=2)
                via_ab = (c[None, :, :, None] + via_b[:, None, :, :]).min(axis=2)
                value = via_ab + c[None, :, :]
                free = ((chunk[:, None] & bits[None, :]) == 0) & (bits[None, :] != 0)
                ok = free[:, :, None] & free[:, None, :] & ~eye[None]
                i, a2, b2 = np.nonzero(ok)
                tgt = chunk[i] | bits[a2] | bits[b2]
                dp[tgt, a2, b2] = value[i, a2, b2]
                targets.append(np.unique(tgt))
            if not targets:
                return None
            layer = np.unique(np.concatenate(targets))
        if time.perf_counter() > self.deadline:
            raise TimeoutError
        closing = dp[full] + c[:, 0][:, None] + c[:, s][None, :]
        a, b = np.unravel_index(np.argmin(closing), closing.shape)
        total = float(closing[a, b])
        if not total < incumbent - TOL:
            return None
        pairs = [(int(a), int(b))]
        mask = full
        while mask:
            mask ^= int(bits[a] | bits[b])
            back = dp[mask] + c[:, a][:, None] + c[:, b][None, :]
            a, b = np.unravel_index(np.argmin(back), back.shape)
            pairs.append((int(a), int(b)))
        pairs.reverse()
        return total, pairs


def exact_solve(instance: Instance, time_limit: float = 600.0) -> ExactResult:
    """Optimal solution, or the best incumbent with a proven bound on timeout."""
    n = instance.n_targets
    if n > EXACT_LIMIT:
        raise SizeLimitError(f"exact_solve supports at most {EXACT_LIMIT} targets, got {n}")
    t0 = time.perf_counter()
    search = _Search(instance, t0 + time_limit)
    best = min(
        (heuristic_solve(instance, align=True), approx_solve(instance, align=True)),
        key=lambda s: s.total_cost,
    )
    floor = lower_bound(instance).best
    starts = sorted(range(1, n), key=lambda s: (search.start_bound(s), s))
    pending = {s: search.start_bound(s) for s in starts}

    def proven():
        open_bound = min(pending.values(), default=np.inf)
        return min(best.total_cost, max(floor, min(open_bound, best.total_cost)))

    trace = [(time.perf_counter() - t0, best.total_cost, proven())]
    optimal = True
    for s in starts:
        if pending[s] >= best.total_cost - TOL:
            del pending[s]
            continue
        try:
            found = search.run_start(s, best.total_cost)
        except TimeoutError:
            optimal = False
            break
        del pending[s]
        if found is not None:
            _, pairs = found
            cand = assemble(instance, [a for a, _ in pairs], [b for _, b in pairs], pairs)
            if cand.total_cost < best.total_cost:
                best = cand
        bound = proven()
        if trace[-1][1:] != (best.total_cost, bound):
            trace.append((time.perf_counter() - t0, best.total_cost, bound))
    best_bound = best.total_cost if optimal else proven()
    if optimal and trace[-1][2] != best_bound:
        trace.append((time.perf_counter() - t0, best.total_cost, best_bound))
    return ExactResult(best, optimal, best_bound, search.nodes, time.perf_counter() - t0, trace)
