"""Statistic kernels for the paired multi-channel mean test.

Three families are implemented on the differenced data z (n x K x T):

* proposed: per channel, a discretized squared L2 norm of the normalized
  mean difference, (n/T) sum_l (zbar_{k,l})^2; globally, the max over
  channels.
* max: sqrt(n) max_l |zbar_{k,l}| per channel (max-max type globally).
* projection: (sqrt(n)/sqrt(T)) max over a pre-specified set of unit
  vectors v of |sum_l v_l zbar_{k,l}| per channel.

All kernels are pure functions of immutable inputs; evaluation order across
channels never affects the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import basis_matrix
from .errors import BasisError, DomainError
from .sample import DifferenceMatrix, InterpolatedCurve, PairedFunctionalSample


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel statistic values and their maximum."""

    per_channel: np.ndarray
    global_stat: float

    @classmethod
    def from_per_channel(cls, per_channel: np.ndarray) -> "ChannelStats":
        per_channel = np.asarray(per_channel, dtype=np.float64)
        return cls(per_channel=per_channel, global_stat=float(per_channel.max()))


@dataclass(frozen=True)
class ProjectionBasis:
    """Unit vectors (rows) spanning the directions scanned by the
    projection statistic."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1:
            raise BasisError("basis must be a non-empty 2-d array of rows")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise BasisError("every basis row must have unit Euclidean norm")
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    @property
    def R(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class StatisticKind:
    """Identity of a statistic family; projection carries its basis."""

    tag: str
    basis: ProjectionBasis | None = None

    def __post_init__(self):
        if self.tag not in ("proposed", "max", "projection"):
            raise ValueError(f"unknown statistic tag {self.tag!r}")
        if self.tag == "projection" and self.basis is None:
            raise BasisError("projection statistic requires a basis")

    @classmethod
    def proposed(cls) -> "StatisticKind":
        return cls("proposed")

    @classmethod
    def maximum(cls) -> "StatisticKind":
        return cls("max")

    @classmethod
    def projection(cls, basis: ProjectionBasis) -> "StatisticKind":
        return cls("projection", basis)


def default_projection_basis(T: int, R: int = 10) -> ProjectionBasis:
    """First R Fourier-type basis functions sampled at l/T and renormalized
    to unit Euclidean norm."""
    if not 1 <= R <= T:
        raise BasisError(f"need 1 <= R <= T, got R={R}, T={T}")
    points = np.arange(1, T + 1, dtype=np.float64) / T
    rows = basis_matrix(points, count=R)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return ProjectionBasis(rows)


def stats_from_mean(mean: np.ndarray, n: int, kind: StatisticKind) -> ChannelStats:
    """Evaluate a statistic family given only the per-(k, l) mean of z.

    All three families depend on the data through zbar alone, which lets a
    power sweep reuse one generated data set across signal sizes.
    """
    mean = np.asarray(mean, dtype=np.float64)
    T = mean.shape[1]
    if kind.tag == "proposed":
        per = (n / T) * np.einsum("kt,kt->k", mean, mean)
    elif kind.tag == "max":
        per = np.sqrt(n) * np.abs(mean).max(axis=1)
    else:
        if kind.basis.vectors.shape[1] != T:
            raise BasisError(
                f"basis rows have length {kind.basis.vectors.shape[1]}, data has T={T}"
            )
        proj = mean @ kind.basis.vectors.T
        per = np.sqrt(n / T) * np.abs(proj).max(axis=1)
    return ChannelStats.from_per_channel(per)


def channel_stat(z: DifferenceMatrix, k: int) -> float:
    """Proposed statistic for channel k (1-based): (n/T) sum_l (zbar_{k,l})^2."""
    if not 1 <= k <= z.K:
        raise IndexError(f"channel index {k} outside 1..{z.K}")
    m = z.mean[k - 1]
    return float(z.n / z.T * np.dot(m, m))


def proposed_stats(z: DifferenceMatrix) -> ChannelStats:
    return stats_from_mean(z.mean, z.n, StatisticKind.proposed())


def max_stat(z: DifferenceMatrix) -> ChannelStats:
    return stats_from_mean(z.mean, z.n, StatisticKind.maximum())


def projection_stat(z: DifferenceMatrix, basis: ProjectionBasis) -> ChannelStats:
    return stats_from_mean(z.mean, z.n, StatisticKind.projection(basis))


def compute_stats(z: DifferenceMatrix, kind: StatisticKind) -> ChannelStats:
    """Dispatch on the statistic kind."""
    return stats_from_mean(z.mean, z.n, kind)


def integrate_squared_piecewise_linear(points: np.ndarray, values: np.ndarray) -> float:
    """Exact integral over [0, 1] of the square of the piecewise-linear
    function through (points, values), extended as a constant outside the
    breakpoint span.

    On each interval the integrand is quadratic, so each piece is
    h * (w0^2 + w0*w1 + w1^2) / 3 in closed form.
    """
    t = np.asarray(points, dtype=np.float64)
    w = np.asarray(values, dtype=np.float64)
    h = np.diff(t)
    w0, w1 = w[:-1], w[1:]
    inner = float(np.sum(h * (w0 * w0 + w0 * w1 + w1 * w1)) / 3.0)
    left = float(t[0] * w[0] * w[0])
    right = float((1.0 - t[-1]) * w[-1] * w[-1])
    return inner + left + right


def merged_grid(grid_a, grid_b) -> np.ndarray:
    return np.union1d(grid_a.points, grid_b.points)


def async_channel_stat(x_curves, y_curves) -> float:
    """Integrated squared normalized mean difference of interpolated curves.

    Computes the integral over [0, 1] of ((1/sqrt(n)) sum_i (y_i(t) - x_i(t)))^2
    exactly: the mean difference is piecewise linear on the union of all
    breakpoints, so the integrand is piecewise quadratic.
    """
    x_curves = list(x_curves)
    y_curves = list(y_curves)
    if len(x_curves) == 0 or len(x_curves) != len(y_curves):
        raise DomainError("need equally many (and at least one) curves per group")
    pts = x_curves[0].breakpoints.points
    for c in x_curves[1:] + y_curves[:0]:
        if not np.array_equal(c.breakpoints.points, pts):
            raise DomainError("all x curves must share one grid")
    pts_y = y_curves[0].breakpoints.points
    for c in y_curves[1:]:
        if not np.array_equal(c.breakpoints.points, pts_y):
            raise DomainError("all y curves must share one grid")
    grid = np.union1d(pts, pts_y)
    n = len(x_curves)
    acc = np.zeros_like(grid)
    for xc, yc in zip(x_curves, y_curves):
        acc += yc(grid) - xc(grid)
    acc /= np.sqrt(n)
    return integrate_squared_piecewise_linear(grid, acc)


def async_difference_values(sample: PairedFunctionalSample):
    """Merged breakpoints and interpolated per-subject differences.

    Returns (grid, d) with grid of length M spanning the union of the two
    group grids and d of shape (n, K, M), d[i, k] = y_i^k - x_i^k evaluated
    at the merged points.  Between merged points every subject difference is
    linear, so integrals of squared sums are exact via the closed form.
    """
    grid = merged_grid(sample.grid_x, sample.grid_y)
    gx, gy = sample.grid_x.points, sample.grid_y.points
    n, K = sample.n, sample.K
    d = np.empty((n, K, grid.size))
    for i in range(n):
        for k in range(K):
            d[i, k] = np.interp(grid, gy, sample.y[i, k]) - np.interp(
                grid, gx, sample.x[i, k]
            )
    return grid, d


def async_stats(sample: PairedFunctionalSample) -> ChannelStats:
    """Per-channel interpolated statistics and their maximum for the
    asynchronous two-grid case (proposed family only)."""
    grid, d = async_difference_values(sample)
    m = d.sum(axis=0) / np.sqrt(sample.n)  # (K, M)
    per = np.array(
        [integrate_squared_piecewise_linear(grid, m[k]) for k in range(sample.K)]
    )
    return ChannelStats.from_per_channel(per)
