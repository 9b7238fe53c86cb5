"""Measured operator-norm decay against the exact Friedrichs-angle rates.

Each tracked quantity is the spectral norm of a power of an operator
minus its limit projector.  Because the limit projector commutes with
the operator and is absorbed by it, the difference of powers equals the
power of the deflated operator, e.g. ``T^n - P_Fix = (T - P_Fix)^n``.
Powers are formed from the deflated operators so the measured norms keep
their relative accuracy even when they are far below machine epsilon
times the norm of the undeflated operator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .operators import ProjectorSet, operator_norm
from .subspace_core import DimensionMismatchError, Subspace, principal_angles

__all__ = [
    "Quantity",
    "RateRow",
    "RateReport",
    "DimensionLimitError",
    "DEFAULT_DIM_LIMIT",
    "rate_report",
    "pointwise_bound_check",
    "fitted_log_slope",
]

DEFAULT_DIM_LIMIT = 400
RELATIVE_FLOOR = 1e-10


class Quantity(str, enum.Enum):
    DR_POWER = "DR_POWER"          # ||T^n - P_Fix||           = c^n
    DR_SHADOW_U = "DR_SHADOW_U"    # ||P_U T^n - P_{U∩V}||     = c^n
    DR_SHADOW_V = "DR_SHADOW_V"    # ||P_V T^n - P_{U∩V}||     = c^n
    TTSTAR_POWER = "TTSTAR_POWER"  # ||(TT*)^n - P_Fix||       = c^2n
    MAP_EVEN = "MAP_EVEN"          # ||(P_V P_U)^n - P_{U∩V}|| = c^(2n-1)
    MAP_ODD = "MAP_ODD"            # ||P_U (P_V P_U)^n - P_{U∩V}|| = c^2n


class DimensionLimitError(ValueError):
    """Dense materialization refused because the dimension is too large."""


@dataclass(frozen=True)
class RateRow:
    n: int
    quantity: Quantity
    measured: float
    predicted: float

    @property
    def relative_error(self) -> float:
        if self.predicted < RELATIVE_FLOOR:
            return float("nan")
        return abs(self.measured - self.predicted) / self.predicted


@dataclass
class RateReport:
    """Measured-vs-predicted decay for all tracked quantities.

    ``max_relative_error`` is taken over rows whose prediction is at
    least ``1e-10``; the remaining rows are judged by
    ``max_small_abs_error`` instead.
    """

    c_f: float
    rows: list[RateRow] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        errs = [r.relative_error for r in self.rows if r.predicted >= RELATIVE_FLOOR]
        return max(errs, default=0.0)

    @property
    def max_small_abs_error(self) -> float:
        errs = [abs(r.measured - r.predicted) for r in self.rows if r.predicted < RELATIVE_FLOOR]
        return max(errs, default=0.0)

    def series(self, quantity: Quantity | str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(n, measured, predicted)`` arrays for one quantity."""
        q = Quantity(quantity)
        sel = [r for r in self.rows if r.quantity is q]
        return (
            np.array([r.n for r in sel]),
            np.array([r.measured for r in sel]),
            np.array([r.predicted for r in sel]),
        )


def _predicted(q: Quantity, c: float, n: int) -> float:
    if q in (Quantity.DR_POWER, Quantity.DR_SHADOW_U, Quantity.DR_SHADOW_V):
        return c**n
    if q is Quantity.MAP_EVEN:
        return c ** (2 * n - 1)
    return c ** (2 * n)


def rate_report(U: Subspace, V: Subspace, n_max: int = 20,
                dim_limit: int = DEFAULT_DIM_LIMIT) -> RateReport:
    """Spectral norms of the six tracked quantities for ``n = 1..n_max``.

    Raises
    ------
    DimensionLimitError
        If the ambient dimension exceeds ``dim_limit``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in R^{U.ambient_dim} and R^{V.ambient_dim}"
        )
    if U.ambient_dim > dim_limit:
        raise DimensionLimitError(
            f"ambient dimension {U.ambient_dim} exceeds the dense limit {dim_limit}"
        )
    c = principal_angles(U, V).friedrichs_cos
    p = ProjectorSet(U, V)

    # deflated operators: their powers are the differences being measured
    T0 = p.T - p.P_fix
    TT0 = p.T @ p.Ts - p.P_fix
    M0 = p.P_V @ p.P_U - p.P_UV

    report = RateReport(c_f=c)
    Tn, TTn, Mn = np.eye(U.ambient_dim), np.eye(U.ambient_dim), np.eye(U.ambient_dim)
    for n in range(1, n_max + 1):
        Tn = Tn @ T0
        TTn = TTn @ TT0
        Mn = Mn @ M0
        measured = {
            Quantity.DR_POWER: operator_norm(Tn),
            Quantity.DR_SHADOW_U: operator_norm(p.P_U @ Tn),
            Quantity.DR_SHADOW_V: operator_norm(p.P_V @ Tn),
            Quantity.TTSTAR_POWER: operator_norm(TTn),
            Quantity.MAP_EVEN: operator_norm(Mn),
            Quantity.MAP_ODD: operator_norm(p.P_U @ Mn),
        }
        for q in Quantity:
            report.rows.append(RateRow(n, q, measured[q], _predicted(q, c, n)))
    return report


def pointwise_bound_check(U: Subspace, V: Subspace, x0, n_max: int) -> float:
    """Worst slack of ``||T^n x0 - P_Fix x0|| <= c^n ||x0 - P_Fix x0||`` over n.

    Returns ``min_n (c^n ||x0 - P_Fix x0|| - ||T^n x0 - P_Fix x0||)`` for
    ``n = 0..n_max``; the bound holds when the result is nonnegative up
    to rounding.
    """
    p = ProjectorSet(U, V)
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != U.ambient_dim:
        raise DimensionMismatchError(f"start has length {x0.shape[0]}, expected {U.ambient_dim}")
    c = principal_angles(U, V).friedrichs_cos
    fixed = p.P_fix @ x0
    r0 = float(np.linalg.norm(x0 - fixed))
    x = x0.copy()
    worst = 0.0
    for n in range(1, n_max + 1):
        x = p.T @ x
        worst = min(worst, c**n * r0 - float(np.linalg.norm(x - fixed)))
    return worst


def fitted_log_slope(n: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of ``log(values)`` against ``n``."""
    n = np.asarray(n, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    slope, _ = np.polyfit(n, y, 1)
    return float(slope)
