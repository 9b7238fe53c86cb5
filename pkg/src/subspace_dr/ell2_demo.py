"""Truncated block model: convergence of T^n x with no linear rate.

The space is a direct sum of planes.  In block k, U is the horizontal
axis and V the line at angle ``theta_k``, so T acts on block k as
``cos(theta_k) R_{theta_k}``.  Letting ``theta_k -> 0`` drives the
Friedrichs cosine of the infinite sum to 1.  A finite truncation keeps
it below 1, so the demo works with witnesses: for a rate ``gamma`` it
finds a block whose cosine exceeds ``gamma`` and shows the scaled norms
``gamma^-n ||T^n x||`` blowing up.

All block computations use the planar closed form; nothing of size
2M x 2M is formed except in :func:`build_truncated`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .subspace_core import Subspace

__all__ = [
    "BlockModel",
    "NoWitnessError",
    "GrowthTable",
    "canonical_angle",
    "canonical_model",
    "canonical_start",
    "build_truncated",
    "blockwise_power",
    "blockwise_shadow",
    "sublinearity_certificate",
    "shadow_sublinearity",
    "write_growth_table",
]


def canonical_angle(k: int) -> float:
    """pi/3 for the first block, pi/(4k) afterwards."""
    return math.pi / 3 if k == 0 else math.pi / (4 * k)


@dataclass(frozen=True, eq=False)
class BlockModel:
    """Angles ``theta_0..theta_{M-1}`` of a truncated block model.

    ``generator`` (optional) produces the angle of any block index and
    is used to suggest a larger truncation when the current one is too
    short.
    """

    angles: np.ndarray
    generator: Callable[[int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).ravel()
        if a.size < 1:
            raise ValueError("need at least one block")
        if not np.all((a > 0.0) & (a < math.pi / 2)):
            raise ValueError("block angles must lie strictly inside (0, pi/2)")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def M(self) -> int:
        return self.angles.size

    @property
    def cosines(self) -> np.ndarray:
        return np.cos(self.angles)

    @property
    def is_canonical(self) -> bool:
        ref = np.array([canonical_angle(k) for k in range(self.M)])
        return bool(np.allclose(self.angles, ref, rtol=0, atol=1e-15))

    def smallest_usable_m(self, gamma: float, search_limit: int = 10**7) -> int | None:
        """Smallest truncation containing a block with cosine above ``gamma``."""
        cos = self.cosines
        hits = np.nonzero(cos > gamma)[0]
        if hits.size:
            return int(hits[0]) + 1
        if self.generator is None:
            return None
        if self.generator is canonical_angle and gamma > 0.5:
            # cos(pi/(4k)) > gamma  <=>  k > pi / (4 arccos gamma)
            k = math.floor(math.pi / (4.0 * math.acos(gamma))) + 1
            while math.cos(canonical_angle(k)) <= gamma:
                k += 1
            return k + 1
        for k in range(self.M, search_limit):
            if math.cos(self.generator(k)) > gamma:
                return k + 1
        return None


def canonical_model(M: int) -> BlockModel:
    if M < 1:
        raise ValueError("M must be at least 1")
    return BlockModel(np.array([canonical_angle(k) for k in range(M)]), canonical_angle)


def canonical_start(M: int) -> np.ndarray:
    """x_i = 1/(i+1) for the 2M coordinates."""
    return 1.0 / np.arange(1, 2 * M + 1, dtype=float)


class NoWitnessError(ValueError):
    """No block of the truncation can witness the failure of rate gamma."""

    def __init__(self, gamma: float, smallest_usable_m: int | None):
        self.gamma = gamma
        self.smallest_usable_m = smallest_usable_m
        if smallest_usable_m is None:
            hint = "no truncation of this model has a block cosine above it"
        else:
            hint = f"use a truncation with M >= {smallest_usable_m}"
        super().__init__(f"no block with nonzero start and cosine > gamma={gamma}; {hint}")


def build_truncated(model: BlockModel) -> tuple[Subspace, Subspace]:
    """Dense U = R e0 x ... x R e0 and V = R e_{theta_0} x ... in R^{2M}."""
    M = model.M
    d = 2 * M
    BU = np.zeros((d, M))
    BV = np.zeros((d, M))
    idx = np.arange(M)
    BU[2 * idx, idx] = 1.0
    BV[2 * idx, idx] = np.cos(model.angles)
    BV[2 * idx + 1, idx] = np.sin(model.angles)
    return Subspace(d, BU), Subspace(d, BV)


def _blocks(model: BlockModel, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != 2 * model.M:
        raise ValueError(f"start has length {x.size}, expected {2 * model.M}")
    return x[0::2], x[1::2]


def blockwise_power(model: BlockModel, x, n: int) -> np.ndarray:
    """T^n x from ``cos^n(theta_k) R_{n theta_k}`` applied to each block."""
    a, b = _blocks(model, x)
    th = model.angles
    scale = np.cos(th) ** n
    c, s = np.cos(n * th), np.sin(n * th)
    out = np.empty(2 * model.M)
    out[0::2] = scale * (c * a - s * b)
    out[1::2] = scale * (s * a + c * b)
    return out


def blockwise_shadow(model: BlockModel, x, n: int) -> np.ndarray:
    """P_U T^n x: only the first coordinate of each block survives."""
    y = blockwise_power(model, x, n)
    y[1::2] = 0.0
    return y


@dataclass
class GrowthTable:
    """Scaled norms ``gamma^-n ||.||`` with a lower bound column.

    ``witness`` is the block index used for the bound and ``delta`` the
    per-step growth factor of the bound (when it has one).  ``bound``
    entries are NaN where the bound is not available at that n.
    """

    gamma: float
    witness: int
    n: np.ndarray
    measured: np.ndarray
    bound: np.ndarray
    raw_norms: np.ndarray
    delta: float | None = None

    def first_exceeding(self, threshold: float, column: str = "measured") -> int | None:
        vals = getattr(self, column)
        hits = np.nonzero(vals > threshold)[0]
        return int(self.n[hits[0]]) if hits.size else None


def _scaled(gamma: float, n: np.ndarray, values: np.ndarray) -> np.ndarray:
    # gamma^-n * value in log space, so the scale factor never overflows on its own
    with np.errstate(divide="ignore"):
        return np.exp(np.log(values) - n * math.log(gamma))


def _norm_table(model, x, n_max, shadow):
    a, b = _blocks(model, x)
    th = model.angles
    logc = np.log(np.cos(th))
    norms = np.empty(n_max + 1)
    for n in range(n_max + 1):
        scale = np.exp(n * logc)
        if shadow:
            blk = scale * (np.cos(n * th) * a - np.sin(n * th) * b)
            norms[n] = math.sqrt(float(blk @ blk))
        else:
            norms[n] = math.sqrt(float(np.sum(scale**2 * (a * a + b * b))))
    return norms


def sublinearity_certificate(model: BlockModel, x0, gamma: float, n_max: int) -> GrowthTable:
    """Table of ``gamma^-n ||T^n x0||`` against a single-block lower bound.

    The witness is the block with the largest cosine among those where
    ``x0`` is nonzero; its cosine must exceed ``gamma``.  The bound
    column is ``gamma^-n c_N^n ||(x_{2N}, x_{2N+1})||``, which grows like
    ``(c_N/gamma)^n``.

    Raises
    ------
    NoWitnessError
        If no block qualifies; the error names the smallest truncation
        length that would contain one (when the model can say).
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    a, b = _blocks(model, x0)
    r = np.hypot(a, b)
    cos = model.cosines
    ok = (r > 0) & (cos > gamma)
    if not ok.any():
        raise NoWitnessError(gamma, model.smallest_usable_m(gamma))
    N = int(np.argmax(np.where(ok, cos, -np.inf)))
    n = np.arange(n_max + 1)
    norms = _norm_table(model, x0, n_max, shadow=False)
    measured = _scaled(gamma, n, norms)
    bound = _scaled(gamma, n, cos[N] ** n * r[N])
    return GrowthTable(gamma, N, n, measured, bound, norms, delta=float(cos[N] / gamma))


def shadow_sublinearity(model: BlockModel, gamma: float, n_max: int) -> GrowthTable:
    """Table of ``gamma^-n ||P_U T^n x||`` on the canonical instance.

    With ``theta_n = pi/(4n)`` and ``x_i = 1/(i+1)``, block n alone gives
    ``gamma^-n ||P_U T^n x|| >= delta^n / (2^{3/2} (n+1)(2n+1))`` for
    ``n >= N``, where N is the first block index >= 1 with
    ``cos(theta_N) > gamma`` and ``delta = min_{N <= k < M} cos(theta_k)/gamma``.
    The bound column is NaN outside ``N <= n < M`` because block n must
    exist in the truncation.
    """
    if not model.is_canonical:
        raise ValueError("the shadow bound is specific to the canonical block model")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    cos = model.cosines
    cand = np.nonzero((np.arange(model.M) >= 1) & (cos > gamma))[0]
    if cand.size == 0:
        raise NoWitnessError(gamma, model.smallest_usable_m(gamma))
    N = int(cand[0])
    delta = float(np.min(cos[N:]) / gamma)
    x = canonical_start(model.M)
    n = np.arange(n_max + 1)
    norms = _norm_table(model, x, n_max, shadow=True)
    measured = _scaled(gamma, n, norms)
    bound = np.full(n_max + 1, np.nan)
    valid = (n >= N) & (n < model.M)
    nv = n[valid].astype(float)
    bound[valid] = np.exp(nv * math.log(delta)) / (2**1.5 * (nv + 1) * (2 * nv + 1))
    return GrowthTable(gamma, N, n, measured, bound, norms, delta=delta)


def write_growth_table(path, table: GrowthTable) -> Path:
    path = Path(path)
    lines = ["# n measured bound"]
    for n, m, b in zip(table.n, table.measured, table.bound):
        lines.append(f"{int(n)} {float(m)!r} {float(b)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path
