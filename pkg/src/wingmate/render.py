"""SVG drawings of two-vehicle solutions."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .duo import FeasibilityReport, DuoSolution, validate
from .errors import InvalidArgumentError
from .instance import Instance

CANVAS = 800
MARGIN = 0.05


def _project(points: np.ndarray) -> np.ndarray:
    lo = points.min(axis=0)
    extent = float((points.max(axis=0) - lo).max()) or 1.0
    inner = CANVAS * (1 - 2 * MARGIN)
    xy = (points - lo) / extent * inner + CANVAS * MARGIN
    xy[:, 1] = CANVAS - xy[:, 1]
    return xy


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def svg_text(instance: Instance, solution: DuoSolution) -> str:
    if instance.points is None:
        raise InvalidArgumentError("rendering needs target coordinates")
    xy = _project(np.asarray(instance.points))

    def path(order, colour, name):
        d = " ".join(("M" if k == 0 else "L") + f" {_fmt(xy[v, 0])} {_fmt(xy[v, 1])}" for k, v in enumerate(order))
        return f'  <path id="{name}" d="{d} Z" fill="none" stroke="{colour}" stroke-width="2"/>'

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">',
        f'  <rect width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        '  <g id="links" stroke="green" stroke-width="1.5" stroke-dasharray="6,4">',
    ]
    for a, b in solution.comm_links:
        lines.append(
            f'    <line x1="{_fmt(xy[a, 0])}" y1="{_fmt(xy[a, 1])}" x2="{_fmt(xy[b, 0])}" y2="{_fmt(xy[b, 1])}"/>'
        )
    lines.append("  </g>")
    lines.append(path(solution.tour1.order, "blue", "tour1"))
    lines.append(path(solution.tour2.order, "red", "tour2"))
    lines.append('  <g id="targets" fill="black">')
    for v in range(instance.n_targets):
        lines.append(f'    <circle cx="{_fmt(xy[v, 0])}" cy="{_fmt(xy[v, 1])}" r="4"/>')
    lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_solution(instance: Instance, solution: DuoSolution, path) -> FeasibilityReport:
    """Write ``solution`` as SVG; an infeasible solution is not drawn.

    Targets are black dots, tour 1 blue, tour 2 red, links dashed green.
    """
    report = validate(instance, solution)
    if report.feasible:
        Path(path).write_text(svg_text(instance, solution))
    return report
