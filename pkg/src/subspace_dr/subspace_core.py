"""Finite-dimensional subspace algebra.

Subspaces are stored as orthonormal basis matrices.  Everything else
(projection, reflection, complements, intersections, principal angles)
is computed from those bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ORTHO_TOL",
    "ANGLE_ONE_TOL",
    "DimensionMismatchError",
    "Subspace",
    "AffineSubspace",
    "AngleSpectrum",
    "orthonormalize",
    "project",
    "reflect",
    "complement",
    "intersect",
    "principal_angles",
    "distance_to",
    "projector_matrix",
    "reflector_matrix",
    "line",
    "coordinate_subspace",
]

ORTHO_TOL = 1e-10
ANGLE_ONE_TOL = 1e-8


class DimensionMismatchError(ValueError):
    """Raised when vectors and subspaces live in different ambient spaces."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^d given by a d x k orthonormal basis.

    ``k == 0`` is the trivial subspace {0}.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be positive")
        basis = np.asarray(self.basis, dtype=float)
        if basis.size == 0:
            basis = np.zeros((self.ambient_dim, 0))
        if basis.ndim != 2 or basis.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"basis has shape {basis.shape}, expected {self.ambient_dim} rows"
            )
        k = basis.shape[1]
        if k > self.ambient_dim:
            raise ValueError("more basis vectors than the ambient dimension")
        if k and np.max(np.abs(basis.T @ basis - np.eye(k))) > ORTHO_TOL:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", _frozen(basis))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return projector_matrix(self)

    def contains(self, x, tol: float = 1e-10) -> bool:
        x = _as_vector(x, self.ambient_dim)
        return distance_to(self, x) <= tol * max(1.0, np.linalg.norm(x))

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """Translate ``anchor + direction`` of a linear subspace."""

    anchor: np.ndarray
    direction: Subspace

    def __post_init__(self):
        anchor = np.asarray(self.anchor, dtype=float).ravel()
        if anchor.shape[0] != self.direction.ambient_dim:
            raise DimensionMismatchError(
                f"anchor has length {anchor.shape[0]}, direction lives in "
                f"R^{self.direction.ambient_dim}"
            )
        object.__setattr__(self, "anchor", _frozen(anchor))

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.ambient_dim)
        return self.anchor + project(self.direction, x - self.anchor)


@dataclass(frozen=True)
class AngleSpectrum:
    """Principal cosines between two subspaces, in non-increasing order.

    ``intersection_dim`` counts the cosines numerically equal to one and
    ``friedrichs_cos`` is the first cosine after them (0 if none is left).
    """

    cosines: tuple[float, ...]
    intersection_dim: int
    friedrichs_cos: float

    @property
    def friedrichs_angle(self) -> float:
        return float(np.arccos(self.friedrichs_cos))


def _as_vector(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != d:
        raise DimensionMismatchError(f"vector has length {x.shape[0]}, expected {d}")
    return x


def _check_same_space(U: Subspace, V: Subspace) -> None:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in R^{U.ambient_dim} and R^{V.ambient_dim}"
        )


def orthonormalize(spanning, ambient_dim: int) -> Subspace:
    """Orthonormal basis for the span of ``spanning``.

    Uses a column-pivoted QR factorization.  A diagonal entry of R counts
    towards the rank when it exceeds ``d * eps * max column norm``.

    Parameters
    ----------
    spanning : sequence of array_like or ndarray
        Either a list of vectors of length ``ambient_dim`` or a
        ``ambient_dim x m`` matrix whose columns span the subspace.
    ambient_dim : int
        Dimension d of the ambient space.

    Returns
    -------
    Subspace
    """
    if ambient_dim < 1:
        raise ValueError("ambient dimension must be positive")
    if isinstance(spanning, np.ndarray) and spanning.ndim == 2:
        A = np.array(spanning, dtype=float)
        if A.shape[0] != ambient_dim:
            raise DimensionMismatchError(
                f"matrix has {A.shape[0]} rows, expected {ambient_dim}"
            )
    else:
        vectors = [np.asarray(v, dtype=float).ravel() for v in spanning]
        for v in vectors:
            if v.shape[0] != ambient_dim:
                raise DimensionMismatchError(
                    f"vector has length {v.shape[0]}, expected {ambient_dim}"
                )
        if not vectors:
            return Subspace(ambient_dim, np.zeros((ambient_dim, 0)))
        A = np.column_stack(vectors)
    if A.shape[1] == 0:
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0)))

    col_norm = np.max(np.linalg.norm(A, axis=0))
    if col_norm == 0.0:
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0)))
    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    tol = ambient_dim * np.finfo(float).eps * col_norm
    rank = int(np.sum(np.abs(np.diag(R)) > tol))
    return Subspace(ambient_dim, Q[:, :rank])


def project(S: Subspace, x) -> np.ndarray:
    """Orthogonal projection Q (Q^T x) onto ``S``.

    ``x`` may also be a d x m matrix; columns are projected independently.
    """
    x = _as_vector(x, S.ambient_dim)
    Q = S.basis
    return Q @ (Q.T @ x)


def reflect(S: Subspace, x) -> np.ndarray:
    """Reflection 2 P_S x - x across ``S``."""
    x = _as_vector(x, S.ambient_dim)
    return 2.0 * project(S, x) - x


def complement(S: Subspace) -> Subspace:
    """Orthogonal complement of ``S`` in its ambient space."""
    d, k = S.ambient_dim, S.dim
    if k == 0:
        return Subspace(d, np.eye(d))
    if k == d:
        return Subspace(d, np.zeros((d, 0)))
    # full QR of an orthonormal basis: trailing columns span the complement
    Q, _ = np.linalg.qr(S.basis, mode="complete")
    W = Q[:, k:]
    # one projection sweep removes residual components along S
    W = W - S.basis @ (S.basis.T @ W)
    W, _ = np.linalg.qr(W)
    return Subspace(d, W)


def _angle_svd(U: Subspace, V: Subspace):
    M = U.basis.T @ V.basis
    if M.size == 0:
        return np.zeros((U.dim, 0)), np.zeros(0), np.zeros((0, V.dim))
    Y, s, Zt = np.linalg.svd(M)
    return Y, np.clip(s, 0.0, 1.0), Zt


def principal_angles(U: Subspace, V: Subspace) -> AngleSpectrum:
    """Cosines of the principal angles between ``U`` and ``V``.

    The Friedrichs cosine is the largest cosine left once the directions
    in U and V shared to within ``ANGLE_ONE_TOL`` are removed; it is 0
    when nothing remains (for instance when one subspace contains the
    other).
    """
    _check_same_space(U, V)
    _, s, _ = _angle_svd(U, V)
    m = int(np.sum(s >= 1.0 - ANGLE_ONE_TOL))
    c_f = float(s[m]) if m < s.size else 0.0
    return AngleSpectrum(tuple(float(c) for c in s), m, c_f)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    """Orthonormal basis of U ∩ V from the principal vectors with cosine one."""
    _check_same_space(U, V)
    Y, s, Zt = _angle_svd(U, V)
    m = int(np.sum(s >= 1.0 - ANGLE_ONE_TOL))
    if m == 0:
        return Subspace(U.ambient_dim, np.zeros((U.ambient_dim, 0)))
    left = U.basis @ Y[:, :m]
    right = V.basis @ Zt[:m].T
    # averaging the paired principal vectors balances the residual between U and V
    W, _ = np.linalg.qr(0.5 * (left + right))
    return Subspace(U.ambient_dim, W)


def distance_to(S: Subspace | AffineSubspace, x) -> float:
    """Euclidean distance from ``x`` to a linear or affine subspace."""
    if isinstance(S, AffineSubspace):
        x = _as_vector(x, S.ambient_dim)
        return float(np.linalg.norm(x - S.project(x)))
    x = _as_vector(x, S.ambient_dim)
    return float(np.linalg.norm(x - project(S, x)))


def projector_matrix(S: Subspace) -> np.ndarray:
    """Dense d x d matrix of the orthogonal projector onto ``S``."""
    return S.basis @ S.basis.T


def reflector_matrix(S: Subspace) -> np.ndarray:
    return 2.0 * projector_matrix(S) - np.eye(S.ambient_dim)


def line(direction, ambient_dim: int | None = None) -> Subspace:
    """One-dimensional subspace spanned by a nonzero vector."""
    v = np.asarray(direction, dtype=float).ravel()
    return orthonormalize([v], ambient_dim or v.shape[0])


def coordinate_subspace(indices, ambient_dim: int) -> Subspace:
    """Span of the standard basis vectors with the given indices."""
    cols = np.eye(ambient_dim)[:, list(indices)]
    return Subspace(ambient_dim, cols)
