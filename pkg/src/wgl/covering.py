"""Covering numbers, box dimensions and neighbourhood volumes of point clouds.

Covering numbers are counted with axis-aligned half-open cubes of side
``eps`` anchored at the cloud's bounding-box corner.  A ball of radius ``r``
contains a cube of side ``2r/sqrt(m)`` and is contained in one of side ``2r``,
so cube counts and ball counts differ by bounded factors and give the same
exponents.
"""

import csv
from dataclasses import dataclass, field
import math
import warnings
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import linregress

from ._numerics import TWO_PI, MemoryBudgetError, memory_budget_bytes, stable_sum

__all__ = [
    "PointCloud",
    "BoxCountCurve",
    "ExponentFit",
    "sample_curve",
    "box_count",
    "dimension_fit",
    "power_fit",
    "covering_bound",
    "neighborhood_measure",
    "unit_ball_volume",
    "dyadic_epsilons",
]


@dataclass(frozen=True)
class PointCloud:
    """Finite point set in ``R^m``.

    ``spacing`` is the largest distance between consecutive curve samples
    (``None`` when the cloud did not come from a curve).  ``ordered`` marks
    samples of a closed curve listed in parameter order, so box counting may
    fill in the segments between neighbours.
    """

    points: np.ndarray
    source: dict = field(default_factory=dict)
    spacing: Optional[float] = None
    ordered: bool = False

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2 or p.shape[0] == 0:
            raise ValueError("point cloud must be a nonempty (M, m) array")
        if not np.all(np.isfinite(p)):
            raise ValueError("point cloud coordinates must be finite")
        p.flags.writeable = False
        object.__setattr__(self, "points", p)

    @property
    def m(self):
        return self.points.shape[1]

    @property
    def bbox(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    @property
    def diameter_bound(self):
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    def scaled(self, c):
        return PointCloud(self.points * c, {**self.source, "scale": c},
                          None if self.spacing is None else abs(c) * self.spacing, self.ordered)

    def translated(self, v):
        return PointCloud(self.points + np.asarray(v, dtype=np.float64), dict(self.source),
                          self.spacing, self.ordered)


@dataclass(frozen=True)
class BoxCountCurve:
    """``(epsilon, count)`` pairs with strictly decreasing epsilons."""

    epsilons: np.ndarray
    counts: np.ndarray
    under_resolved: bool = False

    def __len__(self):
        return len(self.epsilons)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epsilon", "count"])
            for e, c in zip(self.epsilons, self.counts):
                w.writerow([format(float(e), ".17g"), int(c)])


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares line through log-log data.

    ``range_used`` is the ``(first, last)`` index, inclusive, of the entries
    entering the fit.  ``ratio_band`` is only set by the logarithmic growth
    model and holds ``max(y / log x) / min(y / log x)``.
    """

    slope: float
    intercept: float
    stderr: float
    r2: float
    range_used: tuple
    degenerate: bool = False
    ratio_band: Optional[float] = None


def unit_ball_volume(m):
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


def dyadic_epsilons(first, last):
    """``[2^-first, ..., 2^-last]``."""
    return [2.0**-j for j in range(first, last + 1)]


def sample_curve(a, M, mem_gib=None):
    """Evaluate ``a`` on the uniform grid of ``[-pi, pi)^k`` with ``M`` points per axis."""
    if M < 2:
        raise ValueError("need at least two samples per axis")
    total = M**a.k
    if total * (a.k + a.m) * 8 > memory_budget_bytes(mem_gib):
        raise MemoryBudgetError(f"{total} samples of a {a.k}->{a.m} map exceed the memory budget")
    t = -math.pi + TWO_PI * np.arange(M) / M
    if a.k == 1:
        pts = a(t)
        gaps = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
        spacing = float(gaps.max())
    else:
        mesh = np.meshgrid(*([t] * a.k), indexing="ij")
        pts = a(np.stack([g.ravel() for g in mesh], axis=-1))
        grid_pts = pts.reshape((M,) * a.k + (a.m,))
        spacing = 0.0
        for ax in range(a.k):
            d = np.diff(grid_pts, axis=ax, append=np.take(grid_pts, [0], axis=ax))
            spacing = max(spacing, float(np.linalg.norm(d, axis=-1).max()))
    return PointCloud(pts, {"curve": a.name, "params": dict(a.params), "samples": M}, spacing,
                      ordered=a.k == 1)


def _densify(points, eps, chunk=1 << 18):
    """Yield points along the closed polyline through ``points``, at most ``eps/2`` apart per axis."""
    nxt = np.roll(points, -1, axis=0)
    for start in range(0, points.shape[0], chunk):
        p = points[start:start + chunk]
        d = nxt[start:start + chunk] - p
        n = np.maximum(1, np.ceil(np.abs(d).max(axis=1) / (0.5 * eps))).astype(np.int64)
        seg = np.repeat(np.arange(p.shape[0]), n)
        frac = (np.arange(seg.size) - np.repeat(np.cumsum(n) - n, n)) / n[seg]
        yield p[seg] + frac[:, None] * d[seg]


def _cell_keys(points, corner, eps, span):
    idx = np.floor((points - corner) / eps).astype(np.int64)
    np.clip(idx, 0, span - 1, out=idx)
    if idx.shape[1] == 1:
        return idx[:, 0]
    if idx.shape[1] > 3:
        return idx
    # pack up to three nonnegative int columns into one int64 key
    key = idx[:, 0].copy()
    for j in range(1, idx.shape[1]):
        key = key * span[j] + idx[:, j]
    return key


def _count_cells(cloud, corner, eps, connect):
    lo, hi = cloud.bbox
    span = np.floor((hi - corner) / eps).astype(np.int64) + 1
    if not connect:
        keys = _cell_keys(cloud.points, corner, eps, span)
        return int(np.unique(keys, axis=0 if keys.ndim > 1 else None).shape[0])
    found = None
    for part in _densify(cloud.points, eps):
        keys = np.unique(_cell_keys(part, corner, eps, span), axis=0 if part.shape[1] > 3 else None)
        found = keys if found is None else np.unique(np.concatenate([found, keys]),
                                                     axis=0 if part.shape[1] > 3 else None)
    return int(found.shape[0])


def box_count(cloud, epsilons, connect=None):
    """Number of occupied half-open cubes of side ``eps`` for each ``eps``.

    Cubes are anchored at the lower corner of the bounding box.  The result
    is flagged ``under_resolved`` (with a warning) when the smallest ``eps``
    is below twice the cloud's sample spacing.

    Parameters
    ----------
    connect : bool, optional
        Count the cells met by the closed polyline through the samples rather
        than the samples alone.  Defaults to ``cloud.ordered``.  The polyline
        is resampled at steps of at most ``eps/2`` per axis.
    """
    eps = np.asarray(epsilons, dtype=np.float64)
    if eps.ndim != 1 or eps.size == 0 or np.any(eps <= 0):
        raise ValueError("epsilons must be a nonempty list of positive reals")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be strictly decreasing")
    if connect is None:
        connect = cloud.ordered
    corner = cloud.bbox[0]
    counts = np.array([_count_cells(cloud, corner, e, connect) for e in eps], dtype=np.int64)
    flag = cloud.spacing is not None and eps[-1] < 2.0 * cloud.spacing
    if flag:
        warnings.warn(f"smallest epsilon {eps[-1]:.3g} is below twice the sample spacing {cloud.spacing:.3g}")
    return BoxCountCurve(eps, counts, under_resolved=bool(flag))


def _fit(x, y, range_used):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2:
        raise ValueError("a fit needs at least two points")
    if np.all(y == y[0]):
        return ExponentFit(0.0, float(y[0]), 0.0, 0.0, range_used, degenerate=True)
    res = linregress(x, y)
    stderr = float(res.stderr) if x.size > 2 else 0.0
    return ExponentFit(float(res.slope), float(res.intercept), stderr, float(res.rvalue**2), range_used)


def power_fit(x, y, first=0):
    """Fit ``log y = slope log x + intercept`` over entries ``first..end``."""
    x = np.asarray(x, dtype=np.float64)[first:]
    y = np.asarray(y, dtype=np.float64)[first:]
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power fits need positive data")
    return _fit(np.log(x), np.log(y), (first, first + x.size - 1))


def dimension_fit(curve):
    """Slope of ``log count`` against ``log(1/eps)`` over the finest half of the entries."""
    n = len(curve)
    if n < 4:
        raise ValueError(f"dimension fit needs at least 4 entries, got {n}")
    first = n // 2
    return power_fit(1.0 / curve.epsilons, curve.counts, first)


def covering_bound(cloud, lam):
    """Cube count of ``cloud`` at ``eps = 1/|lam|``."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    return int(box_count(cloud, [1.0 / abs(lam)]).counts[0])


def neighborhood_measure(cloud, epsilon, grid_resolution=64, chunk=1 << 20):
    """Volume of ``{t : dist(t, cloud) <= epsilon}``.

    The bounding box padded by ``epsilon`` is cut into cells of side
    ``epsilon / grid_resolution``; cells whose centers lie within
    ``epsilon`` of a cloud point are counted.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if grid_resolution < 16:
        raise ValueError(f"grid resolution {grid_resolution} per epsilon is too coarse; need >= 16")
    h = epsilon / grid_resolution
    lo, hi = cloud.bbox
    lo = lo - epsilon - h
    hi = hi + epsilon + h
    shape = np.ceil((hi - lo) / h).astype(np.int64)
    total = int(np.prod(shape))
    tree = cKDTree(cloud.points)
    hits = []
    order = np.arange(total, dtype=np.int64)
    for start in range(0, total, chunk):
        flat = order[start:start + chunk]
        idx = np.stack(np.unravel_index(flat, shape), axis=-1)
        centers = lo + (idx + 0.5) * h
        dist, _ = tree.query(centers, k=1, distance_upper_bound=epsilon * (1 + 1e-12))
        hits.append(float(np.count_nonzero(dist <= epsilon)))
    return stable_sum(hits) * h**cloud.m
