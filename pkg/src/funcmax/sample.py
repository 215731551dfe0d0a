"""Data model for paired multi-channel functional recordings.

Arrays are laid out as (subject, channel, time).  All values are float64 and
all containers are frozen after construction, so instances can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import GridError, GridMismatch, IngestError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Ordered observation times in [0, 1].

    kind is "uniform" for the canonical right-endpoint grid t_l = l/T, or
    "explicit" for user-supplied times.
    """

    points: np.ndarray
    kind: str = "explicit"

    def __post_init__(self):
        pts = _frozen(np.atleast_1d(self.points))
        if pts.ndim != 1 or pts.size < 1:
            raise GridError("grid must be a non-empty 1-d array")
        if np.any(np.diff(pts) <= 0):
            raise GridError("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise GridError("grid points must lie in [0, 1]")
        if self.kind not in ("uniform", "explicit"):
            raise GridError(f"unknown grid kind {self.kind!r}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, T: int) -> "TimeGrid":
        """The grid t_l = l/T for l = 1..T."""
        if T < 1:
            raise GridError("uniform grid needs T >= 1")
        return cls(np.arange(1, T + 1, dtype=np.float64) / T, kind="uniform")

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeGrid):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )


@dataclass(frozen=True)
class PairedFunctionalSample:
    """Paired recordings (x, y) over subjects x channels x time points."""

    x: np.ndarray
    y: np.ndarray
    grid_x: TimeGrid
    grid_y: TimeGrid
    channel_labels: tuple[str, ...] | None = None
    subject_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        x = _frozen(self.x)
        y = _frozen(self.y)
        if x.ndim != 3 or y.ndim != 3:
            raise ValueError("x and y must have shape (n, K, T)")
        if x.shape[:2] != y.shape[:2]:
            raise ValueError("x and y must agree in subjects and channels")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("need at least one subject and one channel")
        if x.shape[2] != len(self.grid_x) or y.shape[2] != len(self.grid_y):
            raise ValueError("grid length must match the time dimension")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("sample values must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def K(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class DifferenceMatrix:
    """Per-subject differences z = y - x with their mean and centered residuals."""

    z: np.ndarray
    mean: np.ndarray
    centered: np.ndarray

    @classmethod
    def from_z(cls, z: np.ndarray) -> "DifferenceMatrix":
        z = _frozen(z)
        if z.ndim != 3:
            raise ValueError("z must have shape (n, K, T)")
        mean = z.mean(axis=0)
        centered = z - mean
        return cls(z=z, mean=_frozen(mean), centered=_frozen(centered))

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def K(self) -> int:
        return self.z.shape[1]

    @property
    def T(self) -> int:
        return self.z.shape[2]


@dataclass(frozen=True)
class InterpolatedCurve:
    """Piecewise-linear interpolant of values on a grid, extended as a
    constant beyond the first and last breakpoint."""

    breakpoints: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(np.atleast_1d(self.values))
        if vals.size != len(self.breakpoints):
            raise GridError("one value per breakpoint required")
        object.__setattr__(self, "values", vals)

    def __call__(self, t) -> np.ndarray | float:
        # np.interp clamps outside the breakpoint span, which is exactly the
        # constant-extension convention.
        return np.interp(t, self.breakpoints.points, self.values)


def interpolate(values: np.ndarray, grid: TimeGrid) -> InterpolatedCurve:
    """Piecewise-linear interpolant of (grid, values)."""
    return InterpolatedCurve(breakpoints=grid, values=values)


def difference(sample: PairedFunctionalSample) -> DifferenceMatrix:
    """Subject-wise differences y - x for synchronized grids."""
    if sample.grid_x != sample.grid_y:
        raise GridMismatch(
            "x and y grids differ; use the asynchronous (interpolated) path"
        )
    return DifferenceMatrix.from_z(sample.y - sample.x)


@dataclass(frozen=True)
class CsvSchema:
    """Column names of the long-format panel CSV."""

    subject: str = "subject"
    channel: str = "channel"
    time_index: str = "time_index"
    value: str = "value"
    time: str = "time"

    @property
    def required(self) -> tuple[str, ...]:
        return (self.subject, self.channel, self.time_index, self.value)


DEFAULT_SCHEMA = CsvSchema()


def _read_panel(path, schema: CsvSchema):
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError, pd.errors.ParserError) as exc:
        raise IngestError(f"{path}: cannot parse CSV ({exc})") from exc
    missing = [c for c in schema.required if c not in df.columns]
    if missing:
        raise IngestError(f"{path}: missing columns {missing}")

    subjects = pd.unique(df[schema.subject].astype(str))
    channels = pd.unique(df[schema.channel].astype(str))
    n, K = len(subjects), len(channels)
    try:
        tidx = df[schema.time_index].to_numpy(dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise IngestError(f"{path}: non-integer time_index") from exc
    if tidx.size == 0:
        raise IngestError(f"{path}: empty panel")
    T = int(tidx.max())
    if tidx.min() < 1:
        raise IngestError(f"{path}: time_index must be 1-based")

    values = df[schema.value].to_numpy(dtype=np.float64)
    sub_codes = pd.Categorical(
        df[schema.subject].astype(str), categories=subjects
    ).codes.astype(np.int64)
    ch_codes = pd.Categorical(
        df[schema.channel].astype(str), categories=channels
    ).codes.astype(np.int64)

    data = np.full((n, K, T), np.nan)
    flat = (sub_codes * K + ch_codes) * T + (tidx - 1)
    if np.unique(flat).size != flat.size:
        dup = np.sort(flat)[np.nonzero(np.diff(np.sort(flat)) == 0)[0][0]]
        s, c, t = dup // (K * T), (dup // T) % K, dup % T + 1
        raise IngestError(f"{path}: {subjects[s]}/{channels[c]}/t{t} duplicated")
    data.reshape(-1)[flat] = values

    hole = np.isnan(data)
    if hole.any():
        s, c, t = np.argwhere(hole)[0]
        raise IngestError(f"{path}: {subjects[s]}/{channels[c]}/t{t + 1} missing")
    if not np.all(np.isfinite(values)):
        bad = np.nonzero(~np.isfinite(values))[0][0]
        raise IngestError(
            f"{path}: non-finite value at "
            f"{df[schema.subject].iloc[bad]}/{df[schema.channel].iloc[bad]}"
            f"/t{tidx[bad]}"
        )

    if schema.time in df.columns:
        times = np.full(T, np.nan)
        times[tidx - 1] = df[schema.time].to_numpy(dtype=np.float64)
        # the time column must be a function of time_index alone
        recon = np.empty(flat.size)
        recon = times[tidx - 1]
        if not np.array_equal(recon, df[schema.time].to_numpy(dtype=np.float64)):
            raise IngestError(f"{path}: time column inconsistent with time_index")
        grid = TimeGrid(times, kind="explicit")
    else:
        grid = TimeGrid.uniform(T)
    return data, grid, tuple(subjects), tuple(channels)


def ingest_csv(path_x, path_y, schema: CsvSchema = DEFAULT_SCHEMA) -> PairedFunctionalSample:
    """Assemble a paired sample from two long-format CSV panels.

    Both files must contain the same subjects and channels (in any order);
    every (subject, channel) must cover contiguous time indices 1..T.
    """
    x, grid_x, subs_x, chans_x = _read_panel(path_x, schema)
    y, grid_y, subs_y, chans_y = _read_panel(path_y, schema)
    if set(subs_x) != set(subs_y):
        raise IngestError("subject sets differ between the two panels")
    if set(chans_x) != set(chans_y):
        raise IngestError("channel sets differ between the two panels")
    # align the y panel to the x panel's ordering
    if subs_y != subs_x or chans_y != chans_x:
        sidx = [subs_y.index(s) for s in subs_x]
        cidx = [chans_y.index(c) for c in chans_x]
        y = y[np.ix_(sidx, cidx)]
    return PairedFunctionalSample(
        x=x, y=y, grid_x=grid_x, grid_y=grid_y,
        channel_labels=chans_x, subject_ids=subs_x,
    )


def _write_panel(data, grid: TimeGrid, subjects, channels, path, schema: CsvSchema):
    n, K, T = data.shape
    df = pd.DataFrame(
        {
            schema.subject: np.repeat(subjects, K * T),
            schema.channel: np.tile(np.repeat(channels, T), n),
            schema.time_index: np.tile(np.arange(1, T + 1), n * K),
            schema.value: data.reshape(-1),
        }
    )
    if grid.kind == "explicit":
        df[schema.time] = np.tile(grid.points, n * K)
    df.to_csv(path, index=False, float_format="%.17g")


def export_csv(sample: PairedFunctionalSample, path_x, path_y,
               schema: CsvSchema = DEFAULT_SCHEMA) -> None:
    """Write the two panels in the same long CSV format ingest_csv reads.

    Values are printed with 17 significant digits, so a write/read round
    trip reproduces every float64 exactly.
    """
    subjects = sample.subject_ids or tuple(f"s{i + 1}" for i in range(sample.n))
    channels = sample.channel_labels or tuple(f"ch{k + 1}" for k in range(sample.K))
    _write_panel(sample.x, sample.grid_x, subjects, channels, path_x, schema)
    _write_panel(sample.y, sample.grid_y, subjects, channels, path_y, schema)
