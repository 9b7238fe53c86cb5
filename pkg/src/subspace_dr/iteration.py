"""Douglas-Rachford and alternating-projection iterations with stopping rules.

Both drivers apply their operator in composition form (projections plus
vector arithmetic).  The sequence tested against the stopping rule is
the shadow ``P_U T^n x0`` for Douglas-Rachford and ``(P_V P_U)^n x0``
for alternating projections.  ``n`` counts operator applications, and
the start (``n = 0``) is tested before the first application.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .subspace_core import (
    AffineSubspace,
    DimensionMismatchError,
    Subspace,
    distance_to,
    intersect,
    principal_angles,
    project,
)

__all__ = [
    "DEFAULT_CAP",
    "Method",
    "RuleKind",
    "Termination",
    "StoppingRule",
    "TrueError",
    "MaxDistance",
    "FixedCount",
    "StepRecord",
    "IterationTrace",
    "EmptyIntersectionError",
    "evaluate_rule",
    "dr_step",
    "map_step",
    "run_dr",
    "run_map",
    "run_dr_affine",
    "run_map_affine",
    "affine_intersection_point",
    "BatchResult",
    "run_batch",
]

DEFAULT_CAP = 1_000_000
AFFINE_FEASIBILITY_TOL = 1e-8


class Method(str, enum.Enum):
    DR = "DR"
    MAP = "MAP"


class RuleKind(str, enum.Enum):
    TRUE_ERROR = "TrueError"
    MAX_DISTANCE = "MaxDistance"
    FIXED_COUNT = "FixedCount"


class Termination(str, enum.Enum):
    TRUE_ERROR = "TrueError"
    MAX_DISTANCE = "MaxDistance"
    FIXED_COUNT = "FixedCount"
    CAP_EXHAUSTED = "CapExhausted"


class EmptyIntersectionError(ValueError):
    """The two affine subspaces do not meet."""


@dataclass(frozen=True)
class StoppingRule:
    kind: RuleKind
    eps: float | None = None
    count: int | None = None

    def __post_init__(self):
        if self.kind is RuleKind.FIXED_COUNT:
            if self.count is None or self.count < 1:
                raise ValueError("FixedCount needs a positive count")
            if self.eps is not None:
                raise ValueError("FixedCount takes no tolerance")
        else:
            if self.eps is None or not self.eps > 0:
                raise ValueError("tolerance must be positive")
            if self.count is not None:
                raise ValueError("tolerance rules take no count")

    def __str__(self):
        if self.kind is RuleKind.FIXED_COUNT:
            return f"FixedCount({self.count})"
        return f"{self.kind.value}({self.eps:g})"


def TrueError(eps: float) -> StoppingRule:
    """Stop once the distance of the monitored point to U ∩ V drops below ``eps``."""
    return StoppingRule(RuleKind.TRUE_ERROR, eps=eps)


def MaxDistance(eps: float) -> StoppingRule:
    """Stop once ``max(d_U(z), d_V(z)) < eps`` for the monitored point ``z``."""
    return StoppingRule(RuleKind.MAX_DISTANCE, eps=eps)


def FixedCount(count: int) -> StoppingRule:
    return StoppingRule(RuleKind.FIXED_COUNT, count=count)


def _dist(proj: Callable[[np.ndarray], np.ndarray], z: np.ndarray) -> float:
    return float(np.linalg.norm(z - proj(z)))


def evaluate_rule(rule: StoppingRule, U, V, UcapV, z) -> bool:
    """Whether a tolerance rule accepts the point ``z``.

    ``U``, ``V`` and ``UcapV`` may be linear or affine subspaces.
    ``FixedCount`` never fires here; the drivers count steps themselves.
    """
    z = np.asarray(z, dtype=float)
    if rule.kind is RuleKind.TRUE_ERROR:
        return distance_to(UcapV, z) < rule.eps
    if rule.kind is RuleKind.MAX_DISTANCE:
        return max(distance_to(U, z), distance_to(V, z)) < rule.eps
    return False


@dataclass(slots=True)
class StepRecord:
    n: int
    true_error: float
    dist_u: float
    dist_v: float
    iterate_norm: float
    shadow_v_error: float
    iterate: np.ndarray | None = None
    shadow_u: np.ndarray | None = None
    shadow_v: np.ndarray | None = None


@dataclass
class IterationTrace:
    """Everything recorded along one run.

    ``solution`` is the projection of the start onto U ∩ V, the limit of
    the monitored sequence.  ``rate`` is the Friedrichs cosine of the
    (direction) subspaces.  Vectors are only kept on the step records
    when the driver was called with ``store_vectors=True``.
    """

    method: Method
    rule: StoppingRule
    steps: list[StepRecord] = field(default_factory=list)
    terminated_by: Termination = Termination.CAP_EXHAUSTED
    solution: np.ndarray | None = None
    rate: float | None = None

    @property
    def iterations(self) -> int:
        return self.steps[-1].n

    @property
    def final_true_error(self) -> float:
        return self.steps[-1].true_error

    @property
    def capped(self) -> bool:
        return self.terminated_by is Termination.CAP_EXHAUSTED

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps])


def dr_step(proj_u, proj_v, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One application of T = P_V(2P_U - I) + I - P_U.

    Returns ``(T x, P_U x)``; the second item saves a projection for
    callers that also monitor the shadow.
    """
    pu = proj_u(x)
    return proj_v(2.0 * pu - x) + x - pu, pu


def map_step(proj_u, proj_v, z: np.ndarray) -> np.ndarray:
    return proj_v(proj_u(z))


def _rule_fires(rule: StoppingRule, true_error: float, du: float, dv: float) -> bool:
    if rule.kind is RuleKind.TRUE_ERROR:
        return true_error < rule.eps
    if rule.kind is RuleKind.MAX_DISTANCE:
        return max(du, dv) < rule.eps
    return False


def _termination(rule: StoppingRule) -> Termination:
    return Termination(rule.kind.value)


def _drive(method, proj_u, proj_v, proj_uv, x0, rule, cap, store_vectors, rate):
    if cap < 1:
        raise ValueError("cap must be at least 1")
    solution = proj_uv(x0)
    trace = IterationTrace(method=Method(method), rule=rule, solution=solution, rate=rate)
    limit = cap if rule.kind is not RuleKind.FIXED_COUNT else min(cap, rule.count)
    x = x0.copy()
    n = 0
    while True:
        if method is Method.DR:
            shadow_u = proj_u(x)
            shadow_v = proj_v(x)
            z = shadow_u
        else:
            z = x
            shadow_u = proj_u(x)
            shadow_v = proj_v(x)
        true_error = float(np.linalg.norm(z - solution))
        du, dv = _dist(proj_u, z), _dist(proj_v, z)
        rec = StepRecord(
            n=n,
            true_error=true_error,
            dist_u=du,
            dist_v=dv,
            iterate_norm=float(np.linalg.norm(x)),
            shadow_v_error=float(np.linalg.norm(shadow_v - solution)),
        )
        if store_vectors:
            rec.iterate, rec.shadow_u, rec.shadow_v = x.copy(), shadow_u, shadow_v
        trace.steps.append(rec)

        if _rule_fires(rule, true_error, du, dv):
            trace.terminated_by = _termination(rule)
            return trace
        if n >= limit:
            if rule.kind is RuleKind.FIXED_COUNT and n == rule.count:
                trace.terminated_by = Termination.FIXED_COUNT
            else:
                trace.terminated_by = Termination.CAP_EXHAUSTED
            return trace
        if method is Method.DR:
            # shadow_u is P_U x, so this is exactly one dr_step
            x = proj_v(2.0 * shadow_u - x) + x - shadow_u
        else:
            x = map_step(proj_u, proj_v, x)
        n += 1


def _vector(x0, d: int) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != d:
        raise DimensionMismatchError(f"start has length {x0.shape[0]}, expected {d}")
    return x0


def _linear_run(method, U, V, x0, rule, cap, store_vectors):
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in R^{U.ambient_dim} and R^{V.ambient_dim}"
        )
    x0 = _vector(x0, U.ambient_dim)
    UV = intersect(U, V)
    rate = principal_angles(U, V).friedrichs_cos
    return _drive(
        Method(method),
        lambda x: project(U, x),
        lambda x: project(V, x),
        lambda x: project(UV, x),
        x0, rule, cap, store_vectors, rate,
    )


def run_dr(U: Subspace, V: Subspace, x0, rule: StoppingRule,
           cap: int = DEFAULT_CAP, store_vectors: bool = False) -> IterationTrace:
    """Douglas-Rachford iteration ``x_{n+1} = T x_n`` monitored through ``P_U x_n``.

    Parameters
    ----------
    U, V : Subspace
    x0 : array_like
        Starting point.
    rule : StoppingRule
        Tested on ``P_U T^n x0`` for ``n = 0, 1, ...``.
    cap : int
        Hard ceiling on the number of applications of T.  Hitting it is
        reported as ``Termination.CAP_EXHAUSTED``, not raised.
    store_vectors : bool
        Keep ``T^n x0``, ``P_U T^n x0`` and ``P_V T^n x0`` on every step.
    """
    return _linear_run(Method.DR, U, V, x0, rule, cap, store_vectors)


def run_map(U: Subspace, V: Subspace, x0, rule: StoppingRule,
            cap: int = DEFAULT_CAP, store_vectors: bool = False) -> IterationTrace:
    """Alternating projections ``z_{n+1} = P_V P_U z_n`` with ``z_0 = x0``."""
    return _linear_run(Method.MAP, U, V, x0, rule, cap, store_vectors)


def affine_intersection_point(Ua: AffineSubspace, Va: AffineSubspace) -> np.ndarray:
    """A point of ``Ua ∩ Va``.

    Solves ``a_U + Q_U s = a_V + Q_V t`` in the least-squares sense and
    rejects the pair when the residual exceeds ``1e-8`` (scaled by the
    anchor sizes).
    """
    if Ua.ambient_dim != Va.ambient_dim:
        raise DimensionMismatchError(
            f"affine subspaces live in R^{Ua.ambient_dim} and R^{Va.ambient_dim}"
        )
    diff = Va.anchor - Ua.anchor
    A = np.hstack([Ua.direction.basis, -Va.direction.basis])
    if A.shape[1] == 0:
        coef = np.zeros(0)
    else:
        coef = np.linalg.lstsq(A, diff, rcond=None)[0]
    residual = np.linalg.norm(A @ coef - diff) if A.shape[1] else np.linalg.norm(diff)
    scale = max(1.0, np.linalg.norm(Ua.anchor), np.linalg.norm(Va.anchor))
    if residual > AFFINE_FEASIBILITY_TOL * scale:
        raise EmptyIntersectionError(
            f"affine subspaces do not intersect (residual {residual:.3e})"
        )
    k = Ua.direction.dim
    return Ua.anchor + Ua.direction.basis @ coef[:k]


def _affine_run(method, Ua, Va, x0, rule, cap, store_vectors):
    p = affine_intersection_point(Ua, Va)
    x0 = _vector(x0, Ua.ambient_dim)
    U, V = Ua.direction, Va.direction
    W = intersect(U, V)
    rate = principal_angles(U, V).friedrichs_cos
    return _drive(
        Method(method),
        Ua.project,
        Va.project,
        lambda x: p + project(W, x - p),
        x0, rule, cap, store_vectors, rate,
    )


def run_dr_affine(Ua: AffineSubspace, Va: AffineSubspace, x0, rule: StoppingRule,
                  cap: int = DEFAULT_CAP, store_vectors: bool = False) -> IterationTrace:
    """Douglas-Rachford for two intersecting affine subspaces.

    The affine projectors ``a + P(x - a)`` replace the linear ones; the
    reported rate is the Friedrichs cosine of the direction subspaces.
    Raises :class:`EmptyIntersectionError` if the subspaces do not meet.
    """
    return _affine_run(Method.DR, Ua, Va, x0, rule, cap, store_vectors)


def run_map_affine(Ua: AffineSubspace, Va: AffineSubspace, x0, rule: StoppingRule,
                   cap: int = DEFAULT_CAP, store_vectors: bool = False) -> IterationTrace:
    return _affine_run(Method.MAP, Ua, Va, x0, rule, cap, store_vectors)


@dataclass
class BatchResult:
    """First hitting indices of both tolerance rules for a block of starts.

    Arrays are indexed by start (column of the input block).
    """

    true_error_iters: np.ndarray
    true_error_final: np.ndarray
    true_error_capped: np.ndarray
    max_distance_iters: np.ndarray
    max_distance_final: np.ndarray
    max_distance_capped: np.ndarray


def run_batch(U: Subspace, V: Subspace, X0: np.ndarray, method: Method | str,
              eps: float, cap: int = DEFAULT_CAP) -> BatchResult:
    """Run one method from many starts at once, tracking both tolerance rules.

    ``X0`` is d x m, one start per column.  Each step costs a handful of
    d x k matrix products for the whole block.  The loop ends when every
    column has met both rules or ``cap`` applications have been made.
    ``*_final`` holds the true error of the monitored point at the
    reported index.
    """
    method = Method(method)
    if not eps > 0:
        raise ValueError("tolerance must be positive")
    X0 = np.asarray(X0, dtype=float)
    if X0.ndim == 1:
        X0 = X0[:, None]
    if X0.shape[0] != U.ambient_dim or U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError("starts and subspaces must share the ambient dimension")
    QU, QV = U.basis, V.basis
    QW = intersect(U, V).basis
    m = X0.shape[1]
    sol = QW @ (QW.T @ X0)

    it_t = np.full(m, -1, dtype=np.int64)
    it_m = np.full(m, -1, dtype=np.int64)
    fin_t = np.zeros(m)
    fin_m = np.zeros(m)
    X = X0.copy()
    n = 0
    while True:
        if method is Method.DR:
            PU = QU @ (QU.T @ X)
            Z = PU
        else:
            Z = X
        err = np.linalg.norm(Z - sol, axis=0)
        du = np.linalg.norm(Z - QU @ (QU.T @ Z), axis=0)
        dv = np.linalg.norm(Z - QV @ (QV.T @ Z), axis=0)
        hit = (it_t < 0) & (err < eps)
        it_t[hit] = n
        fin_t[hit] = err[hit]
        hit = (it_m < 0) & (np.maximum(du, dv) < eps)
        it_m[hit] = n
        fin_m[hit] = err[hit]
        if (it_t >= 0).all() and (it_m >= 0).all():
            break
        if n >= cap:
            miss = it_t < 0
            fin_t[miss] = err[miss]
            it_t[miss] = n
            miss_m = it_m < 0
            fin_m[miss_m] = err[miss_m]
            it_m[miss_m] = n
            return BatchResult(it_t, fin_t, miss, it_m, fin_m, miss_m)
        if method is Method.DR:
            X = QV @ (QV.T @ (2.0 * PU - X)) + X - PU
        else:
            X = QV @ (QV.T @ (QU @ (QU.T @ X)))
        n += 1
    none = np.zeros(m, dtype=bool)
    return BatchResult(it_t, fin_t, none, it_m, fin_m, none.copy())
