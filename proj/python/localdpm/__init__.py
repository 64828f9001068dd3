"""Python access to the localdpm solver.

Settings use the command-line keys without dashes, e.g.
``run({"preset": "ellipse-dirichlet", "order": 4, "nmax": 128, "mode": "solve"})``.
"""

from ._core import (
    DpmError,
    d2phi,
    dphi,
    eigenvalue,
    phi,
    presets,
    run,
    solve,
    solve_1d,
)

__all__ = [
    "DpmError",
    "d2phi",
    "dphi",
    "eigenvalue",
    "phi",
    "presets",
    "run",
    "solve",
    "solve_1d",
]
