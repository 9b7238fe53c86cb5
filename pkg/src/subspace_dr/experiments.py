"""Douglas-Rachford vs. alternating projections on random subspace pairs.

Random model
------------
For each pair an intersection dimension k and subspace dimensions
``dim U``, ``dim V`` are drawn uniformly from the configured ranges,
rejecting draws with ``dim U + dim V - k > d``.  Subspace dimensions
are drawn above k whenever the range allows it, so neither subspace
contains the other.  A shared block W of k
standard Gaussian columns is drawn, then U and V are completed with
fresh Gaussian columns and orthonormalized.  The pair is redrawn if the
principal angles do not show exactly k unit cosines.

Randomness comes from numpy's Philox (counter-based) generator.  Pair i
uses the stream ``SeedSequence(seed, spawn_key=(i,))``, so a pair and its
starts do not depend on how many workers run the benchmark.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .iteration import DEFAULT_CAP, Method, RuleKind, run_batch
from .subspace_core import Subspace, orthonormalize, principal_angles

__all__ = [
    "ExperimentConfig",
    "BenchRecord",
    "MedianRow",
    "CRITERIA",
    "CSV_HEADER",
    "make_rng",
    "random_subspace_pair",
    "random_start",
    "generate_instance",
    "run_benchmark",
    "aggregate_median",
    "emit_csv",
    "read_csv",
    "emit_medians_csv",
]

CRITERIA = (RuleKind.TRUE_ERROR, RuleKind.MAX_DISTANCE)
CSV_HEADER = [
    "pair_id",
    "start_id",
    "method",
    "criterion",
    "friedrichs_angle",
    "iterations",
    "final_true_error",
    "capped",
]
_MAX_REDRAWS = 100


@dataclass(frozen=True)
class ExperimentConfig:
    """Benchmark settings; the defaults give 100 pairs x 10 starts in R^50."""

    ambient_dim: int = 50
    num_pairs: int = 100
    starts_per_pair: int = 10
    start_norm: float = 10.0
    epsilon: float = 1e-3
    seed: int = 0
    cap: int = DEFAULT_CAP
    intersection_dims: tuple[int, int] = (1, 5)
    subspace_dims: tuple[int, int] = (5, 30)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        if self.num_pairs < 0 or self.starts_per_pair < 0:
            raise ValueError("counts must be nonnegative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.start_norm > 0:
            raise ValueError("start_norm must be positive")
        if self.cap < 1:
            raise ValueError("cap must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        k_lo, k_hi = self.intersection_dims
        s_lo, s_hi = self.subspace_dims
        if not 1 <= k_lo <= k_hi:
            raise ValueError("intersection dimensions must satisfy 1 <= lo <= hi")
        if not 1 <= s_lo <= s_hi:
            raise ValueError("subspace dimensions must satisfy 1 <= lo <= hi")
        if k_lo > s_hi:
            raise ValueError("intersection cannot be larger than both subspaces")
        # the smallest admissible draw must fit in the ambient space
        m = max(s_lo, k_lo)
        if 2 * m - k_lo > self.ambient_dim:
            raise ValueError(
                "no combination of the configured dimensions fits in "
                f"R^{self.ambient_dim}"
            )

    @classmethod
    def scaled(cls, ambient_dim: int, **kw) -> "ExperimentConfig":
        """Dimension ranges proportional to ``ambient_dim`` (the defaults at d = 50)."""
        k_hi = max(1, ambient_dim // 10)
        s_lo = max(1, ambient_dim // 10)
        s_hi = max(s_lo, (3 * ambient_dim) // 5)
        kw.setdefault("intersection_dims", (1, k_hi))
        kw.setdefault("subspace_dims", (s_lo, s_hi))
        return cls(ambient_dim=ambient_dim, **kw)


@dataclass(frozen=True)
class BenchRecord:
    pair_id: int
    start_id: int
    method: str
    criterion: str
    friedrichs_angle: float
    iterations: int
    final_true_error: float
    capped: bool


@dataclass(frozen=True)
class MedianRow:
    bin_index: int
    angle_lo: float
    angle_hi: float
    method: str
    criterion: str
    count: int
    median_iterations: float

    @property
    def angle_mid(self) -> float:
        return 0.5 * (self.angle_lo + self.angle_hi)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``seed`` and an optional spawn key."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def _draw_dims(config: ExperimentConfig, rng: np.random.Generator) -> tuple[int, int, int]:
    k_lo, k_hi = config.intersection_dims
    s_lo, s_hi = config.subspace_dims
    d = config.ambient_dim
    while True:
        k = int(rng.integers(k_lo, k_hi + 1))
        # extend W in both subspaces when the ranges allow it, so that
        # neither contains the other and 0 < c_F < 1
        lo = max(s_lo, k + 1) if k < s_hi else k
        if lo > s_hi:
            continue
        du = int(rng.integers(lo, s_hi + 1))
        dv = int(rng.integers(lo, s_hi + 1))
        if du + dv - k <= d:
            return k, du, dv


def random_subspace_pair(config: ExperimentConfig,
                         rng: np.random.Generator) -> tuple[Subspace, Subspace]:
    """Random pair with an intersection of the drawn dimension (see module doc)."""
    d = config.ambient_dim
    for _ in range(_MAX_REDRAWS):
        k, du, dv = _draw_dims(config, rng)
        W = rng.standard_normal((d, k))
        U = orthonormalize(np.hstack([W, rng.standard_normal((d, du - k))]), d)
        V = orthonormalize(np.hstack([W, rng.standard_normal((d, dv - k))]), d)
        if U.dim == du and V.dim == dv and principal_angles(U, V).intersection_dim == k:
            return U, V
    raise RuntimeError("could not draw a subspace pair with the requested intersection")


def random_start(dim: int, norm: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian direction rescaled to Euclidean norm ``norm``."""
    if not norm > 0:
        raise ValueError("norm must be positive")
    while True:
        x = rng.standard_normal(dim)
        r = np.linalg.norm(x)
        if r > 0:
            return x * (norm / r)


def generate_instance(config: ExperimentConfig, pair_id: int):
    """``(U, V, starts)`` for one pair, with starts as a d x m matrix."""
    rng = make_rng(config.seed, pair_id)
    U, V = random_subspace_pair(config, rng)
    starts = np.column_stack(
        [random_start(config.ambient_dim, config.start_norm, rng)
         for _ in range(config.starts_per_pair)]
    ) if config.starts_per_pair else np.zeros((config.ambient_dim, 0))
    return U, V, starts


def _run_pair(args) -> list[BenchRecord]:
    config, pair_id = args
    U, V, X0 = generate_instance(config, pair_id)
    angle = principal_angles(U, V).friedrichs_angle
    out = []
    if X0.shape[1] == 0:
        return out
    for method in (Method.DR, Method.MAP):
        res = run_batch(U, V, X0, method, config.epsilon, config.cap)
        for j in range(X0.shape[1]):
            out.append(BenchRecord(pair_id, j, method.value, RuleKind.TRUE_ERROR.value, angle,
                                   int(res.true_error_iters[j]), float(res.true_error_final[j]),
                                   bool(res.true_error_capped[j])))
            out.append(BenchRecord(pair_id, j, method.value, RuleKind.MAX_DISTANCE.value, angle,
                                   int(res.max_distance_iters[j]), float(res.max_distance_final[j]),
                                   bool(res.max_distance_capped[j])))
    return out


_METHOD_ORDER = {m.value: i for i, m in enumerate(Method)}
_CRITERION_ORDER = {c.value: i for i, c in enumerate(CRITERIA)}


def _sort_key(r: BenchRecord):
    return (r.pair_id, r.start_id, _METHOD_ORDER[r.method], _CRITERION_ORDER[r.criterion])


def run_benchmark(config: ExperimentConfig, workers: int = 1) -> list[BenchRecord]:
    """All records for the configured pairs and starts, in canonical order.

    Every (pair, start) instance yields four records: both methods under
    both tolerance rules.  ``iterations`` is the first n at which the rule
    holds for the monitored sequence.  Records that ran into the cap are
    flagged instead of raising.  With ``workers > 1`` pairs are spread
    over a process pool; the output does not depend on ``workers``.
    """
    jobs = [(config, i) for i in range(config.num_pairs)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_pair, jobs))
    else:
        chunks = [_run_pair(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=_sort_key)
    return records


def aggregate_median(records, bins: int = 32) -> list[MedianRow]:
    """Median iterations per Friedrichs-angle bin, per method and criterion.

    The bins split (0, pi/2] into ``bins`` equal widths; empty bins are
    left out.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    if bins < 1:
        raise ValueError("bins must be positive")
    width = (math.pi / 2) / bins
    groups: dict[tuple[str, str, int], list[int]] = {}
    for r in records:
        b = min(int(r.friedrichs_angle / width), bins - 1)
        groups.setdefault((r.method, r.criterion, b), []).append(r.iterations)
    rows = [
        MedianRow(b, b * width, (b + 1) * width, m, c, len(v), float(np.median(v)))
        for (m, c, b), v in groups.items()
    ]
    rows.sort(key=lambda r: (_METHOD_ORDER[r.method], _CRITERION_ORDER[r.criterion], r.bin_index))
    return rows


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records, path) -> Path:
    """Write records with the fixed header; floats use the shortest round-trip form."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in sorted(records, key=_sort_key):
                w.writerow([_format(getattr(r, k)) for k in CSV_HEADER])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> list[BenchRecord]:
    path = Path(path)
    with path.open(newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        out = []
        for row in reader:
            d = dict(zip(header, row))
            out.append(BenchRecord(
                pair_id=int(d["pair_id"]),
                start_id=int(d["start_id"]),
                method=d["method"],
                criterion=d["criterion"],
                friedrichs_angle=float(d["friedrichs_angle"]),
                iterations=int(d["iterations"]),
                final_true_error=float(d["final_true_error"]),
                capped=d["capped"] == "true",
            ))
    return out


def emit_medians_csv(rows, path) -> Path:
    path = Path(path)
    names = [f.name for f in fields(MedianRow)]
    try:
        with path.open("w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for r in rows:
                w.writerow([_format(v) for v in asdict(r).values()])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
