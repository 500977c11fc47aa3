"""Two-vehicle solutions: splitting, communication links, assembly, validation."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InstanceParseError, InvalidArgumentError
from .instance import TOL, Instance
from .tsp import DEFAULT_BUDGET, Tour, christofides, improve_tour, tour_cost

# constraint families reported by validate()
CARDINALITY = "cardinality"
TOUR_PARTITION = "tour-partition"
SUBTOUR = "subtour"
LINK_MULTIPLICITY = "link-multiplicity"
CROSS_PARTITION = "cross-partition"
ORDER_PRESERVATION = "order-preservation"
DEGREE = "degree-3"
COST = "cost"

FAMILIES = (CARDINALITY, TOUR_PARTITION, SUBTOUR, LINK_MULTIPLICITY, CROSS_PARTITION, ORDER_PRESERVATION, DEGREE, COST)


@dataclass(frozen=True)
class DuoSolution:
    """Partition, both vehicle tours and the communication links.

    ``assignment[v]`` is 1 or 2. ``base_tour`` is the single-vehicle tour the
    solution was derived from, when there is one.
    """

    assignment: tuple[int, ...]
    tour1: Tour
    tour2: Tour
    comm_links: tuple[tuple[int, int], ...]
    travel_cost: float
    comm_cost: float
    total_cost: float
    base_tour: Tour | None = None

    @property
    def m(self) -> int:
        return len(self.assignment) // 2


def link_cost(instance: Instance, links) -> float:
    total = 0.0
    for a, b in links:
        total += instance.costs[a, b]
    return float(total)


def solution_cost(instance: Instance, solution: DuoSolution) -> tuple[float, float, float]:
    """(travel, comm, total) recomputed from the instance costs."""
    travel = tour_cost(instance.costs, solution.tour1.order) + tour_cost(instance.costs, solution.tour2.order)
    comm = link_cost(instance, solution.comm_links)
    return travel, comm, travel + comm


def assemble(instance: Instance, order1, order2, links, base_tour: Tour | None = None) -> DuoSolution:
    """Build a DuoSolution from two visit orders and a link list."""
    tour1 = Tour.from_order(instance, order1)
    tour2 = Tour.from_order(instance, order2)
    side = {v: 1 for v in tour1.order}
    side.update({v: 2 for v in tour2.order})
    assignment = tuple(side.get(v, 0) for v in range(instance.n_targets))
    pos = {v: p for p, v in enumerate(tour1.order)}
    norm = []
    for a, b in links:
        a, b = int(a), int(b)
        if side.get(a) == 2 and side.get(b) == 1:
            a, b = b, a
        norm.append((a, b))
    norm.sort(key=lambda ab: (pos.get(ab[0], len(pos)), ab))
    comm = link_cost(instance, norm)
    travel = tour1.cost + tour2.cost
    return DuoSolution(assignment, tour1, tour2, tuple(norm), travel, comm, travel + comm, base_tour)


def split_tour(instance: Instance, tour: Tour, start_offset: int = 0) -> tuple[Tour, Tour]:
    """Two tours from alternate positions of ``tour``, starting at ``start_offset``."""
    order = list(tour.order)
    if sorted(order) != list(range(instance.n_targets)):
        raise InvalidArgumentError("tour must visit every target exactly once")
    if start_offset not in (0, 1):
        raise InvalidArgumentError("start_offset must be 0 or 1")
    first = order[start_offset::2]
    second = order[1 - start_offset :: 2]
    return Tour.from_order(instance, first), Tour.from_order(instance, second)


def alternating_classes(instance: Instance, tour: Tour):
    """The two alternating edge classes of an even tour, with their costs.

    Class A holds the edge leaving position 0.
    """
    order = tour.order
    k = len(order)
    if k % 2:
        raise InvalidArgumentError("alternating edge classes need an even tour")
    cls_a = [(order[p], order[p + 1]) for p in range(0, k, 2)]
    cls_b = [(order[p], order[(p + 1) % k]) for p in range(1, k, 2)]
    return (cls_a, link_cost(instance, cls_a)), (cls_b, link_cost(instance, cls_b))


def select_comm_links(instance: Instance, tour: Tour) -> tuple[list[tuple[int, int]], float]:
    """The cheaper alternating edge class of ``tour`` (class A on ties)."""
    if sorted(tour.order) != list(range(instance.n_targets)):
        raise InvalidArgumentError("tour must visit every target exactly once")
    (cls_a, cost_a), (cls_b, cost_b) = alternating_classes(instance, tour)
    if cost_a <= cost_b + TOL:
        return cls_a, cost_a
    return cls_b, cost_b


def alignments(tour1: Tour, tour2: Tour):
    """Yield (shift, direction, links) for every order-preserving alignment.

    Position i of tour1 is linked to position (direction * i + shift) mod m of
    tour2; direction +1 comes first, shifts ascend.
    """
    a, b = tour1.order, tour2.order
    m = len(a)
    for direction in (1, -1):
        for shift in range(m):
            yield shift, direction, [(a[i], b[(direction * i + shift) % m]) for i in range(m)]


def best_alignment(instance: Instance, tour1: Tour, tour2: Tour):
    """Cheapest order-preserving link set between two equal-length tours.

    Returns (shift, direction, links, cost); the first candidate in
    ``alignments`` order wins ties.
    """
    if len(tour1) != len(tour2):
        raise InvalidArgumentError("tours must have equal length")
    if set(tour1.order) & set(tour2.order):
        raise InvalidArgumentError("tours must cover disjoint vertex sets")
    best = None
    for shift, direction, links in alignments(tour1, tour2):
        cost = link_cost(instance, links)
        if best is None or cost < best[3] - TOL:
            best = (shift, direction, links, cost)
    return best


def realign(instance: Instance, solution: DuoSolution) -> DuoSolution:
    """Replace the links of ``solution`` by its best alignment."""
    _, _, links, cost = best_alignment(instance, solution.tour1, solution.tour2)
    if cost > solution.comm_cost - TOL:
        return solution
    return assemble(instance, solution.tour1.order, solution.tour2.order, links, solution.base_tour)


def solution_from_tour(instance: Instance, tour: Tour, align: bool = False) -> DuoSolution:
    """Split a spanning tour and link along its cheaper alternating class."""
    tour1, tour2 = split_tour(instance, tour, 0)
    links, _ = select_comm_links(instance, tour)
    sol = assemble(instance, tour1.order, tour2.order, links, base_tour=tour)
    return realign(instance, sol) if align else sol


def approx_solve(instance: Instance, align: bool = False) -> DuoSolution:
    """Christofides tour, split into alternate vertices, cheaper alternating links."""
    return solution_from_tour(instance, christofides(instance), align)


def heuristic_solve(instance: Instance, align: bool = False, budget: int = DEFAULT_BUDGET) -> DuoSolution:
    """As approx_solve, with the Christofides tour improved by local search first."""
    tour = improve_tour(instance, christofides(instance), budget)
    return solution_from_tour(instance, tour, align)


@dataclass
class Violation:
    family: str
    detail: str
    indices: tuple = ()


@dataclass
class FeasibilityReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.family for v in self.violations}

    def add(self, family, detail, indices=()):
        self.violations.append(Violation(family, detail, tuple(indices)))

    def __str__(self):
        if self.feasible:
            return "feasible"
        return "\n".join(f"[{v.family}] {v.detail}" for v in self.violations)


def _cycle_edges(order) -> list[tuple[int, int]]:
    k = len(order)
    if k < 2:
        return []
    return [(order[p], order[(p + 1) % k]) for p in range(k)]


def _components(vertices, edges) -> list[set[int]]:
    adj = defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    left, comps = set(vertices), []
    while left:
        stack = [min(left)]
        comp = set()
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adj[v] - comp)
        left -= comp
        comps.append(comp)
    return comps


def validate_edges(instance: Instance, assignment, x_edges, y_edges, z_edges, report: FeasibilityReport | None = None) -> FeasibilityReport:
    """Check a candidate given as edge lists against every constraint family.

    ``x_edges``/``y_edges`` are the travel edges of vehicles 1/2 and
    ``z_edges`` the communication links, all as unordered pairs.
    """
    report = report if report is not None else FeasibilityReport()
    n = instance.n_targets
    m = n // 2
    assignment = list(assignment)
    if len(assignment) != n or any(lbl not in (1, 2) for lbl in assignment):
        report.add(CARDINALITY, f"assignment must give each of the {n} targets a label in {{1, 2}}")
        assignment = (assignment + [0] * n)[:n]
    v1 = [v for v in range(n) if assignment[v] == 1]
    v2 = [v for v in range(n) if assignment[v] == 2]
    if len(v1) != m or len(v2) != m:
        report.add(CARDINALITY, f"vehicle 1 has {len(v1)} targets and vehicle 2 has {len(v2)}, expected {m} each")

    for name, edges, own, label in (("tour1", x_edges, v1, 1), ("tour2", y_edges, v2, 2)):
        deg = defaultdict(int)
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                report.add(TOUR_PARTITION, f"{name} has an invalid edge ({a}, {b})", (a, b))
                continue
            deg[a] += 1
            deg[b] += 1
            if assignment[a] != label or assignment[b] != label:
                report.add(TOUR_PARTITION, f"{name} edge ({a}, {b}) leaves the vehicle's targets", (a, b))
        bad = sorted(v for v in set(own) | set(deg) if deg[v] != (2 if assignment[v] == label else 0))
        if bad:
            report.add(TOUR_PARTITION, f"{name} degree is not 2 at vertices {bad}", bad)
        if len(own) > 1:
            comps = _components(own, [(a, b) for a, b in edges if a in own and b in own])
            if len(comps) > 1:
                report.add(SUBTOUR, f"{name} splits into {len(comps)} subtours", sorted(min(c) for c in comps))

    partner: dict[int, list[int]] = defaultdict(list)
    for a, b in z_edges:
        if not (0 <= a < n and 0 <= b < n) or a == b:
            report.add(LINK_MULTIPLICITY, f"invalid link ({a}, {b})", (a, b))
            continue
        partner[a].append(b)
        partner[b].append(a)
        if assignment[a] == assignment[b]:
            report.add(CROSS_PARTITION, f"link ({a}, {b}) joins two targets of the same vehicle", (a, b))
    multi = sorted(v for v, ps in partner.items() if len(ps) > 1)
    if multi:
        report.add(LINK_MULTIPLICITY, f"vertices {multi} carry more than one link", multi)
    if len(z_edges) != m:
        report.add(LINK_MULTIPLICITY, f"{len(z_edges)} links given, expected {m}")
    unlinked = sorted(set(range(n)) - set(partner))
    if unlinked and len(z_edges) == m and not multi:
        report.add(LINK_MULTIPLICITY, f"vertices {unlinked} have no link", unlinked)

    # order preservation, checked pair by pair on the raw edge sets:
    # exists j: (i,j) in x and (j,l) in z  <=>  exists k: (i,k) in z and (k,l) in y
    x_adj, y_adj = defaultdict(set), defaultdict(set)
    for a, b in x_edges:
        x_adj[a].add(b)
        x_adj[b].add(a)
    for a, b in y_edges:
        y_adj[a].add(b)
        y_adj[b].add(a)
    z_adj = {v: set(ps) for v, ps in partner.items()}
    broken = []
    for i in range(n):
        left = {l for j in x_adj[i] for l in z_adj.get(j, ())} - {i}
        right = {l for k in z_adj.get(i, ()) for l in y_adj[k]} - {i}
        for l in sorted(left ^ right):
            broken.append((i, l))
    if broken:
        report.add(ORDER_PRESERVATION, f"{len(broken)} ordered pairs break order preservation, first {broken[0]}", broken[0])

    deg = defaultdict(int)
    all_edges = list(x_edges) + list(y_edges) + list(z_edges)
    for a, b in all_edges:
        deg[a] += 1
        deg[b] += 1
    off = sorted(v for v in range(n) if deg[v] != 3)
    if off:
        report.add(DEGREE, f"union graph degree is not 3 at vertices {off}", off)
    comps = _components(range(n), [(a, b) for a, b in all_edges if 0 <= a < n and 0 <= b < n])
    if len(comps) > 1:
        report.add(DEGREE, f"union graph has {len(comps)} components", sorted(min(c) for c in comps))
    return report


def validate(instance: Instance, solution: DuoSolution) -> FeasibilityReport:
    """Report every violated constraint family of ``solution`` (empty if feasible)."""
    report = FeasibilityReport()
    n = instance.n_targets
    for name, tour, label in (("tour1", solution.tour1, 1), ("tour2", solution.tour2, 2)):
        order = list(tour.order)
        if len(set(order)) != len(order):
            report.add(TOUR_PARTITION, f"{name} repeats a vertex", sorted({v for v in order if order.count(v) > 1}))
        own = {v for v in range(min(n, len(solution.assignment))) if solution.assignment[v] == label}
        if set(order) != own:
            report.add(TOUR_PARTITION, f"{name} vertex set differs from the vehicle's assigned targets", sorted(set(order) ^ own))
    validate_edges(
        instance,
        solution.assignment,
        _cycle_edges(solution.tour1.order),
        _cycle_edges(solution.tour2.order),
        list(solution.comm_links),
        report,
    )
    try:
        travel, comm, total = solution_cost(instance, solution)
    except IndexError:
        report.add(COST, "solution references vertices outside the instance")
        return report
    for name, stored, actual in (
        ("travel", solution.travel_cost, travel),
        ("comm", solution.comm_cost, comm),
        ("total", solution.total_cost, total),
    ):
        if abs(stored - actual) > TOL * max(1.0, abs(actual)):
            report.add(COST, f"stored {name} cost {stored!r} differs from recomputed {actual!r}")
    return report


def to_dict(solution: DuoSolution) -> dict:
    data = {
        "assignment": list(solution.assignment),
        "tour1": list(solution.tour1.order),
        "tour2": list(solution.tour2.order),
        "comm_links": [list(p) for p in solution.comm_links],
        "costs": {"travel": solution.travel_cost, "comm": solution.comm_cost, "total": solution.total_cost},
    }
    if solution.base_tour is not None:
        data["base_tour"] = list(solution.base_tour.order)
    return data


def from_dict(instance: Instance, data: dict) -> DuoSolution:
    """Rebuild a solution exactly as stored; malformed content is left for validate()."""
    for key in ("assignment", "tour1", "tour2", "comm_links", "costs"):
        if key not in data:
            raise InstanceParseError("missing required key", field=key)
    for key in ("assignment", "tour1", "tour2"):
        if not isinstance(data[key], list) or not all(isinstance(v, int) for v in data[key]):
            raise InstanceParseError("expected an array of integers", field=key)
    links = data["comm_links"]
    if not isinstance(links, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(v, int) for v in p) for p in links
    ):
        raise InstanceParseError("expected an array of [i, j] pairs", field="comm_links")
    costs = data["costs"]
    if not isinstance(costs, dict) or any(not isinstance(costs.get(k), (int, float)) for k in ("travel", "comm", "total")):
        raise InstanceParseError("expected {travel, comm, total} numbers", field="costs")
    n = instance.n_targets

    def raw_tour(order):
        inside = all(0 <= v < n for v in order)
        return Tour(tuple(order), tour_cost(instance.costs, order) if inside else float("nan"))

    base = data.get("base_tour")
    return DuoSolution(
        assignment=tuple(data["assignment"]),
        tour1=raw_tour(data["tour1"]),
        tour2=raw_tour(data["tour2"]),
        comm_links=tuple((a, b) for a, b in links),
        travel_cost=float(costs["travel"]),
        comm_cost=float(costs["comm"]),
        total_cost=float(costs["total"]),
        base_tour=raw_tour(base) if isinstance(base, list) else None,
    )


def save_solution(solution: DuoSolution, path) -> None:
    Path(path).write_text(json.dumps(to_dict(solution), indent=2) + "\n")


def load_solution(instance: Instance, path) -> DuoSolution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, dict):
        raise InstanceParseError("solution file must hold a JSON object")
    return from_dict(instance, data)
