"""Closed forms for two lines through the origin of the plane.

U is the horizontal axis and V the line at angle theta.  The
Douglas-Rachford operator is then ``cos(theta) R_theta`` with ``R_theta``
the counter-clockwise rotation, so every quantity of interest has an
explicit formula.  These are used as an oracle for the general
machinery and to produce the curve and surface data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .subspace_core import Subspace, line

__all__ = [
    "PlaneConfig",
    "Norms",
    "rotation",
    "unit",
    "closed_form_dr_power",
    "closed_form_shadow_power",
    "closed_form_map_power",
    "closed_form_norms",
    "cubic_angle",
    "SURFACE_QUANTITIES",
    "figure_surface",
    "curve_data",
    "write_columns",
    "read_columns",
]


@dataclass(frozen=True)
class PlaneConfig:
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in (0, pi/2], got {self.theta!r}")

    @classmethod
    def from_fraction(cls, num: int, den: int) -> "PlaneConfig":
        """Angle ``num/den * pi``; avoids typing pi in decimal."""
        if den == 0:
            raise ValueError("denominator must be nonzero")
        return cls(math.pi * num / den)

    def subspaces(self) -> tuple[Subspace, Subspace]:
        return line(unit(0.0)), line(unit(self.theta))


class Norms(NamedTuple):
    dr_norm: float
    shadow_norm: float
    map_norm: float


def unit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def closed_form_dr_power(cfg: PlaneConfig, n: int) -> np.ndarray:
    """T^n = cos^n(theta) R_{n theta}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.cos(cfg.theta) ** n * rotation(n * cfg.theta)


def closed_form_shadow_power(cfg: PlaneConfig, n: int) -> np.ndarray:
    """P_U T^n: the first row of T^n, second row zero."""
    th = cfg.theta
    return math.cos(th) ** n * np.array([[math.cos(n * th), -math.sin(n * th)], [0.0, 0.0]])


def closed_form_map_power(cfg: PlaneConfig, n: int) -> np.ndarray:
    """(P_V P_U)^n = cos^{2n-1}(theta) [[cos, 0], [sin, 0]] for n >= 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    th = cfg.theta
    return math.cos(th) ** (2 * n - 1) * np.array([[math.cos(th), 0.0], [math.sin(th), 0.0]])


def _norms(theta: float, x1: float, x2: float, n):
    c = np.cos(theta)
    r = math.hypot(x1, x2)
    dr = c**n * r
    shadow = c**n * np.abs(np.cos(n * theta) * x1 - np.sin(n * theta) * x2)
    mp = c ** (2 * n - 1) * abs(x1)
    return dr, shadow, mp


def closed_form_norms(cfg: PlaneConfig, x, n: int) -> Norms:
    """``||T^n x||``, ``||P_U T^n x||`` and ``||(P_V P_U)^n x||`` for n >= 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x1, x2 = (float(v) for v in np.asarray(x, dtype=float).ravel())
    return Norms(*(float(v) for v in _norms(cfg.theta, x1, x2, n)))


def cubic_angle(t):
    """theta(t) = (pi/2) t^3, which spreads small angles over more of [0, 1]."""
    return 0.5 * np.pi * np.asarray(t, dtype=float) ** 3


SURFACE_QUANTITIES = ("DR", "SHADOW", "MAP")


def figure_surface(t_grid, n_grid, quantity: str,
                   param_curve: Callable = cubic_angle) -> np.ndarray:
    """Closed-form norms with x = e0 over a (t, n) grid.

    Returns an array of shape ``(len(t_grid), len(n_grid))``.  ``t`` is
    mapped to an angle through ``param_curve``; an angle of 0 (identical
    lines) is evaluated by the same formulas and gives 1 for every n.
    """
    if quantity not in SURFACE_QUANTITIES:
        raise ValueError(f"quantity must be one of {SURFACE_QUANTITIES}")
    t = np.asarray(t_grid, dtype=float)
    n = np.asarray(n_grid, dtype=float)
    if t.size == 0 or n.size == 0:
        raise ValueError("grids must be nonempty")
    theta = param_curve(t)[:, None]
    dr, shadow, mp = _norms(theta, 1.0, 0.0, n[None, :])
    out = {"DR": dr, "SHADOW": shadow, "MAP": mp}[quantity]
    return np.broadcast_to(out, (t.size, n.size)).astype(float)


def curve_data(cfg: PlaneConfig, x, n_max: int) -> dict[str, np.ndarray]:
    """The three norm sequences for ``n = 1..n_max``."""
    x1, x2 = (float(v) for v in np.asarray(x, dtype=float).ravel())
    n = np.arange(1, n_max + 1, dtype=float)
    dr, shadow, mp = _norms(cfg.theta, x1, x2, n)
    return {"DR": dr, "SHADOW": shadow, "MAP": mp}


COLUMNS_HEADER = "# quantity theta_param n value"


def write_columns(path, rows) -> Path:
    """Write ``(quantity, theta_param, n, value)`` rows as whitespace columns."""
    path = Path(path)
    lines = [COLUMNS_HEADER]
    for q, param, n, value in rows:
        lines.append(f"{q} {float(param)!r} {int(n)} {float(value)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def read_columns(path) -> list[tuple[str, float, int, float]]:
    out = []
    for raw in Path(path).read_text(encoding="ascii").splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        q, param, n, value = raw.split()
        out.append((q, float(param), int(n), float(value)))
    return out


def surface_rows(quantity: str, t_grid, n_grid, values):
    for i, t in enumerate(t_grid):
        for j, n in enumerate(n_grid):
            yield quantity, t, n, values[i, j]
