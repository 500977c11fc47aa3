"""Leader/wingmate cooperative coverage routing: exact, approximate and heuristic solvers."""

__version__ = "0.1.0"
