"""Dense linear maps for the Douglas-Rachford and alternating-projection operators.

The operators are materialized as d x d matrices so spectral norms of
their powers can be measured directly.  The iteration drivers in
:mod:`subspace_dr.iteration` never use these matrices; they apply the
same maps in composition form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .subspace_core import (
    DimensionMismatchError,
    Subspace,
    complement,
    intersect,
    projector_matrix,
    reflector_matrix,
)

__all__ = [
    "LinearMap",
    "IdentityReport",
    "dr_operator",
    "dr_adjoint",
    "map_operator",
    "fix_projector",
    "operator_norm",
    "verify_identities",
    "ProjectorSet",
]


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Square real matrix acting on R^dim."""

    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @classmethod
    def identity(cls, dim: int) -> "LinearMap":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.dim:
            raise DimensionMismatchError(f"vector has length {x.shape[0]}, expected {self.dim}")
        return self.matrix @ x

    __call__ = apply

    def _other(self, other: "LinearMap") -> np.ndarray:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"maps act on R^{self.dim} and R^{other.dim}")
        return other.matrix

    def compose(self, other: "LinearMap") -> "LinearMap":
        """``self ∘ other``, i.e. ``other`` is applied first."""
        return LinearMap(self.matrix @ self._other(other))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return self.compose(other)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix + self._other(other))

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix - self._other(other))

    def __rmul__(self, scalar: float) -> "LinearMap":
        return LinearMap(float(scalar) * self.matrix)

    def adjoint(self) -> "LinearMap":
        return LinearMap(self.matrix.T)

    def power(self, n: int) -> "LinearMap":
        if n < 0:
            raise ValueError("negative powers are not supported")
        return LinearMap(np.linalg.matrix_power(self.matrix, n))

    def norm(self) -> float:
        return operator_norm(self)


def operator_norm(A: LinearMap | np.ndarray) -> float:
    """Spectral norm (largest singular value) from a full SVD."""
    M = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _check(U: Subspace, V: Subspace) -> None:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in R^{U.ambient_dim} and R^{V.ambient_dim}"
        )


def dr_operator(U: Subspace, V: Subspace) -> LinearMap:
    """T = P_V (2 P_U - I) + I - P_U."""
    _check(U, V)
    P_U, P_V = projector_matrix(U), projector_matrix(V)
    I = np.eye(U.ambient_dim)
    return LinearMap(P_V @ (2.0 * P_U - I) + I - P_U)


def dr_adjoint(U: Subspace, V: Subspace) -> LinearMap:
    """Adjoint of :func:`dr_operator`, which is the operator with U and V swapped."""
    return dr_operator(V, U)


def map_operator(U: Subspace, V: Subspace) -> LinearMap:
    """One sweep of alternating projections, P_V P_U."""
    _check(U, V)
    return LinearMap(projector_matrix(V) @ projector_matrix(U))


def fix_projector(U: Subspace, V: Subspace) -> LinearMap:
    """Projector onto Fix T = (U ∩ V) ⊕ (U⊥ ∩ V⊥)."""
    _check(U, V)
    UV = intersect(U, V)
    UV_perp = intersect(complement(U), complement(V))
    return LinearMap(projector_matrix(UV) + projector_matrix(UV_perp))


class ProjectorSet:
    """All dense projectors and reflectors attached to a pair (U, V)."""

    def __init__(self, U: Subspace, V: Subspace):
        _check(U, V)
        self.U, self.V = U, V
        d = U.ambient_dim
        self.I = np.eye(d)
        self.P_U = projector_matrix(U)
        self.P_V = projector_matrix(V)
        self.Q_U = self.I - self.P_U
        self.Q_V = self.I - self.P_V
        self.R_U = reflector_matrix(U)
        self.R_V = reflector_matrix(V)
        self.UV = intersect(U, V)
        self.UV_perp = intersect(complement(U), complement(V))
        self.P_UV = projector_matrix(self.UV)
        self.P_fix = self.P_UV + projector_matrix(self.UV_perp)
        self.T = dr_operator(U, V).matrix
        self.Ts = dr_adjoint(U, V).matrix


@dataclass
class IdentityReport:
    """Residuals ``||LHS - RHS||_2`` for a catalogue of operator identities."""

    entries: list[tuple[str, float]] = field(default_factory=list)

    def add(self, name: str, lhs, rhs) -> None:
        self.entries.append((name, operator_norm(np.asarray(lhs) - np.asarray(rhs))))

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.entries), default=0.0)

    def worst(self) -> tuple[str, float]:
        return max(self.entries, key=lambda e: e[1])

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def verify_identities(U: Subspace, V: Subspace, n_max: int) -> IdentityReport:
    """Evaluate the Douglas-Rachford operator identities on a concrete pair.

    Covers the alternative forms of T and T*, the reflector relations,
    normality, ``2TT* = T + T*``, the structure of Fix T and the
    power factorizations of T^{2n} and T^{2n+1} for ``1 <= n <= n_max``.
    The rank of the fixed-point projector is compared against
    ``dim(U ∩ V) + dim(U⊥ ∩ V⊥)`` and reported as an absolute mismatch.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    p = ProjectorSet(U, V)
    I, P_U, P_V, Q_U, Q_V = p.I, p.P_U, p.P_V, p.Q_U, p.Q_V
    R_U, R_V, T, Ts, P_UV, P_fix = p.R_U, p.R_V, p.T, p.Ts, p.P_UV, p.P_fix
    rep = IdentityReport()

    # reformulations of T and its adjoint
    rep.add("T = P_V P_U + P_V⊥ P_U⊥", T, P_V @ P_U + Q_V @ Q_U)
    rep.add("T = I/2 + R_V R_U/2", T, 0.5 * I + 0.5 * R_V @ R_U)
    rep.add("T = P_V R_U + I - P_U", T, P_V @ R_U + I - P_U)
    rep.add("T* = T^t", Ts, T.T)
    rep.add("T* = P_U P_V + P_U⊥ P_V⊥", Ts, P_U @ P_V + Q_U @ Q_V)
    rep.add("T_{V,U} = T_{V⊥,U⊥}", T, dr_operator(complement(U), complement(V)).matrix)

    # reflector relations
    S = P_U + P_V - I
    rep.add("R_U T* = P_U + P_V - I", R_U @ Ts, S)
    rep.add("T R_U = P_U + P_V - I", T @ R_U, S)
    rep.add("T* R_V = P_U + P_V - I", Ts @ R_V, S)
    rep.add("R_V T = P_U + P_V - I", R_V @ T, S)
    rep.add("T R_U symmetric", T @ R_U, (T @ R_U).T)
    RVRU, RURV = R_V @ R_U, R_U @ R_V
    rep.add("T* R_V R_U = T", Ts @ RVRU, T)
    rep.add("R_V R_U T* = T", RVRU @ Ts, T)
    rep.add("T R_U R_V = T*", T @ RURV, Ts)
    rep.add("R_U R_V T = T*", RURV @ T, Ts)
    rep.add("R_U = R_U^t = R_U^-1", R_U @ R_U, I)

    # normality and the self-adjoint part
    TTs = T @ Ts
    rep.add("T T* = T* T", TTs, Ts @ T)
    rep.add("2 T T* = T + T*", 2.0 * TTs, T + Ts)
    rep.add("T T* = P_V P_U P_V + P_V⊥ P_U⊥ P_V⊥", TTs, P_V @ P_U @ P_V + Q_V @ Q_U @ Q_V)
    rep.add("T T* = P_V P_U + P_U P_V - P_U - P_V + I", TTs, P_V @ P_U + P_U @ P_V - P_U - P_V + I)
    rep.add("T T* = P_U P_V P_U + P_U⊥ P_V⊥ P_U⊥", TTs, P_U @ P_V @ P_U + Q_U @ Q_V @ Q_U)

    # fixed-point set
    rep.add("P_Fix idempotent", P_fix @ P_fix, P_fix)
    rep.add("P_Fix symmetric", P_fix, P_fix.T)
    rep.add("T P_Fix = P_Fix", T @ P_fix, P_fix)
    rep.add("P_Fix T = P_Fix", P_fix @ T, P_fix)
    rep.add("T* P_Fix = P_Fix", Ts @ P_fix, P_fix)
    rep.add("P_U P_Fix = P_{U∩V}", P_U @ P_fix, P_UV)
    rep.add("P_V P_Fix = P_{U∩V}", P_V @ P_fix, P_UV)
    rep.add("P_{U∩V} P_Fix = P_{U∩V}", P_UV @ P_fix, P_UV)
    rank = int(np.linalg.matrix_rank(P_fix, tol=1e-8))
    expected = p.UV.dim + p.UV_perp.dim
    rep.entries.append(("rank P_Fix = dim(U∩V) + dim(U⊥∩V⊥)", float(abs(rank - expected))))

    # powers
    PUPV, PVPU = P_U @ P_V, P_V @ P_U
    QUQV, QVQU = Q_U @ Q_V, Q_V @ Q_U
    PUPVPU, QUQVQU = P_U @ P_V @ P_U, Q_U @ Q_V @ Q_U
    PVPUPV, QVQUQV = P_V @ P_U @ P_V, Q_V @ Q_U @ Q_V

    Tn = I.copy()  # T^n, kept in step with n below
    TTs_n = I.copy()
    RVRU_n = I.copy()
    PUPV_n, PVPU_n = I.copy(), I.copy()
    QUQV_n, QVQU_n = I.copy(), I.copy()
    PUPVPU_n, QUQVQU_n = I.copy(), I.copy()
    PVPUPV_n, QVQUQV_n = I.copy(), I.copy()
    T2n = I.copy()
    for n in range(1, n_max + 1):
        Tn = Tn @ T
        TTs_n = TTs_n @ TTs
        RVRU_n = RVRU_n @ RVRU
        PUPV_n, PVPU_n = PUPV_n @ PUPV, PVPU_n @ PVPU
        QUQV_n, QVQU_n = QUQV_n @ QUQV, QVQU_n @ QVQU
        PUPVPU_n, QUQVQU_n = PUPVPU_n @ PUPVPU, QUQVQU_n @ QUQVQU
        PVPUPV_n, QVQUQV_n = PVPUPV_n @ PVPUPV, QVQUQV_n @ QVQUQV
        T2n = T2n @ T @ T
        T2n1 = T2n @ T
        tag = f"[n={n}]"

        rep.add(f"(TT*)^n = (T*T)^n {tag}", TTs_n, np.linalg.matrix_power(Ts @ T, n))
        rep.add(f"(TT*)^n = (P_U P_V P_U)^n + (P_U⊥ P_V⊥ P_U⊥)^n {tag}", TTs_n, PUPVPU_n + QUQVQU_n)
        rep.add(f"(TT*)^n = (P_V P_U P_V)^n + (P_V⊥ P_U⊥ P_V⊥)^n {tag}", TTs_n, PVPUPV_n + QVQUQV_n)
        rep.add(f"P_U (TT*)^n = (P_U P_V)^n P_U {tag}", P_U @ TTs_n, PUPV_n @ P_U)
        rep.add(f"(TT*)^n P_U = (P_U P_V)^n P_U {tag}", TTs_n @ P_U, PUPV_n @ P_U)
        rep.add(f"P_V (TT*)^n = (P_V P_U)^n P_V {tag}", P_V @ TTs_n, PVPU_n @ P_V)
        rep.add(f"T^2n = (TT*)^n (R_V R_U)^n {tag}", T2n, TTs_n @ RVRU_n)
        rep.add(f"T^(2n+1) = (TT*)^n T (R_V R_U)^n {tag}", T2n1, TTs_n @ T @ RVRU_n)
        rep.add(f"T^(2n+1) = (TT*)^n T* (R_V R_U)^(n+1) {tag}", T2n1, TTs_n @ Ts @ RVRU_n @ RVRU)
        rep.add(
            f"T^2n = ((P_U P_V)^n P_U + (P_U⊥ P_V⊥)^n P_U⊥)(R_V R_U)^n {tag}",
            T2n,
            (PUPV_n @ P_U + QUQV_n @ Q_U) @ RVRU_n,
        )
        rep.add(
            f"T^2n = ((P_V P_U)^n P_V + (P_V⊥ P_U⊥)^n P_V⊥)(R_V R_U)^n {tag}",
            T2n,
            (PVPU_n @ P_V + QVQU_n @ Q_V) @ RVRU_n,
        )
        rep.add(
            f"T^(2n+1) = ((P_U P_V)^(n+1) + (P_U⊥ P_V⊥)^(n+1))(R_V R_U)^(n+1) {tag}",
            T2n1,
            (PUPV_n @ PUPV + QUQV_n @ QUQV) @ RVRU_n @ RVRU,
        )
        rep.add(
            f"T^(2n+1) = ((P_V P_U)^(n+1) + (P_V⊥ P_U⊥)^(n+1))(R_V R_U)^n {tag}",
            T2n1,
            (PVPU_n @ PVPU + QVQU_n @ QVQU) @ RVRU_n,
        )
        rep.add(f"P_{{U∩V}} T^n = P_{{U∩V}} {tag}", P_UV @ Tn, P_UV)
    return rep

