"""Uniform grids, sampled functions, and prefix-sum tables.

Functions are represented by their samples on a uniform grid in one or two
dimensions and are treated as identically zero outside the grid hull, so
every operator downstream acts on compactly supported data.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SamplingError",
    "UniformGrid",
    "SampledFunction",
    "PrefixTable",
    "build_grid",
    "sample",
    "prefix_table",
    "interval_sum",
    "interpolate",
    "write_function_csv",
    "read_function_csv",
    "format_float",
]


def format_float(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


class SamplingError(ValueError):
    """An evaluator produced a non-finite value at a grid node."""


@dataclass(frozen=True)
class UniformGrid:
    """Axis-aligned uniform grid with equal spacing on every axis.

    Node ``(i_1, ..., i_d)`` sits at ``origin + spacing * (i_1, ..., i_d)``.
    Coordinates are always recomputed from indices, so they are reproducible
    bit for bit.
    """

    origin: tuple[float, ...]
    spacing: float
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.origin) != len(self.counts):
            raise ValueError(
                f"origin has {len(self.origin)} components but counts has "
                f"{len(self.counts)}"
            )
        if self.dim not in (1, 2):
            raise ValueError(f"grid dimension must be 1 or 2, got {self.dim}")
        if not (self.spacing > 0 and np.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive and finite, got {self.spacing}")
        if any(c < 2 for c in self.counts):
            raise ValueError(f"need at least 2 nodes per axis, got counts={self.counts}")
        if not all(np.isfinite(o) for o in self.origin):
            raise ValueError(f"origin must be finite, got {self.origin}")

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    def axis_coords(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis."""
        return self.origin[axis] + self.spacing * np.arange(self.counts[axis])

    def hull(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Closed bounding box ``(lo, hi)`` spanned by the nodes."""
        lo = self.origin
        hi = tuple(
            self.origin[a] + self.spacing * (self.counts[a] - 1)
            for a in range(self.dim)
        )
        return lo, hi

    def nodes(self) -> np.ndarray:
        """All node coordinates, row-major, shape ``(size, dim)``."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def node(self, index: int | tuple[int, ...]) -> np.ndarray:
        """Coordinates of a single node given its (multi-)index."""
        idx = (index,) if np.isscalar(index) else tuple(index)
        if len(idx) != self.dim:
            raise ValueError(f"index {index} does not match dimension {self.dim}")
        for a, i in enumerate(idx):
            if not 0 <= i < self.counts[a]:
                raise ValueError(f"index {index} out of range for counts {self.counts}")
        return np.array(
            [self.origin[a] + self.spacing * idx[a] for a in range(self.dim)]
        )

    def index_of(self, point: Sequence[float] | float) -> tuple[int, ...]:
        """Multi-index of the node at ``point``.

        The point must coincide with a node up to a 1e-6 * spacing slack;
        otherwise the caller asked for an off-grid location.
        """
        pt = np.atleast_1d(np.asarray(point, dtype=float))
        if pt.shape != (self.dim,):
            raise ValueError(f"point {point} does not match dimension {self.dim}")
        idx = []
        for a in range(self.dim):
            raw = (pt[a] - self.origin[a]) / self.spacing
            i = int(np.rint(raw))
            if abs(raw - i) > 1e-6 or not 0 <= i < self.counts[a]:
                raise ValueError(f"point {point} is not a node of the grid")
            idx.append(i)
        return tuple(idx)

    def interior_mask(self, reach: float) -> np.ndarray:
        """Boolean array marking nodes at least ``reach`` from the hull faces."""
        lo, hi = self.hull()
        masks = []
        for a in range(self.dim):
            c = self.axis_coords(a)
            masks.append((c - lo[a] >= reach) & (hi[a] - c >= reach))
        if self.dim == 1:
            return masks[0]
        return masks[0][:, None] & masks[1][None, :]


@dataclass(frozen=True)
class SampledFunction:
    """Grid samples of a real function, zero-extended outside the hull."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"values shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(v)):
            bad = tuple(int(i) for i in np.argwhere(~np.isfinite(v))[0])
            raise ValueError(f"non-finite sample at node index {bad}")
        object.__setattr__(self, "values", v)

    @property
    def h(self) -> float:
        return self.grid.spacing

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.grid, np.abs(self.values))


@dataclass(frozen=True)
class PrefixTable:
    """Cumulative sums of |values| for O(1) sums over index boxes.

    Sums are accumulated in extended precision so a reconstructed box sum
    stays within 1e-12 relative of direct summation even on long rows.
    """

    grid: UniformGrid
    table: np.ndarray

    def box_sum(self, lo: tuple[int, ...], hi: tuple[int, ...]) -> float:
        return interval_sum(self, lo, hi)


def build_grid(
    origin: Sequence[float] | float,
    spacing: float,
    counts: Sequence[int] | int,
) -> UniformGrid:
    """Construct a validated UniformGrid from plain scalars or sequences."""
    org = (float(origin),) if np.isscalar(origin) else tuple(float(o) for o in origin)
    cnt = (int(counts),) if np.isscalar(counts) else tuple(int(c) for c in counts)
    return UniformGrid(org, float(spacing), cnt)


def sample(evaluator: Callable, grid: UniformGrid) -> SampledFunction:
    """Sample a callable on every grid node.

    The evaluator receives coordinate arrays (one per axis, broadcastable)
    and must return finite values; a non-finite result raises SamplingError
    naming the offending node.
    """
    axes = [grid.axis_coords(a) for a in range(grid.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    try:
        raw = evaluator(*mesh)
    except (TypeError, ValueError):
        # scalar-only callable: evaluate node by node
        flat = np.array(
            [float(evaluator(*pt)) for pt in np.stack([m.ravel() for m in mesh], axis=-1)]
        )
        raw = flat.reshape(grid.shape)
    vals = np.broadcast_to(np.asarray(raw, dtype=float), grid.shape).copy()
    if not np.all(np.isfinite(vals)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(vals))[0])
        coords = tuple(float(c) for c in grid.node(bad))
        raise SamplingError(
            f"evaluator returned a non-finite value at node {bad} "
            f"(coordinates {coords})"
        )
    return SampledFunction(grid, vals)


def prefix_table(f: SampledFunction) -> PrefixTable:
    """Cumulative-sum table of |f| (running sums in 1D, summed-area in 2D).

    Absolute values are taken here once; every downstream average is an
    average of |f|.
    """
    a = np.abs(f.values).astype(np.longdouble)
    if f.grid.dim == 1:
        t = np.zeros(a.shape[0] + 1, dtype=np.longdouble)
        np.cumsum(a, out=t[1:])
    else:
        t = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.longdouble)
        t[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    return PrefixTable(f.grid, t)


def interval_sum(
    table: PrefixTable,
    lo_index: int | tuple[int, ...],
    hi_index: int | tuple[int, ...],
) -> float:
    """Sum of |f| over the inclusive index box ``[lo_index, hi_index]``."""
    lo = (lo_index,) if np.isscalar(lo_index) else tuple(lo_index)
    hi = (hi_index,) if np.isscalar(hi_index) else tuple(hi_index)
    dim = table.grid.dim
    if len(lo) != dim or len(hi) != dim:
        raise ValueError(f"index box {lo}..{hi} does not match dimension {dim}")
    for a in range(dim):
        if not (0 <= lo[a] <= hi[a] < table.grid.counts[a]):
            raise ValueError(
                f"index box {lo}..{hi} out of range for counts {table.grid.counts}"
            )
    t = table.table
    if dim == 1:
        return float(t[hi[0] + 1] - t[lo[0]])
    (i0, j0), (i1, j1) = lo, hi
    s = t[i1 + 1, j1 + 1] - t[i0, j1 + 1] - t[i1 + 1, j0] + t[i0, j0]
    return float(s)


def interpolate(f: SampledFunction, point: Sequence[float] | float) -> float:
    """Multilinear interpolation of f at a point, zero outside the hull.

    Exact at nodes; on hull faces it reduces to the boundary samples.
    """
    grid = f.grid
    pt = np.atleast_1d(np.asarray(point, dtype=float))
    if pt.shape != (grid.dim,):
        raise ValueError(f"point {point} does not match dimension {grid.dim}")
    cells = []
    for a in range(grid.dim):
        raw = (pt[a] - grid.origin[a]) / grid.spacing
        n = grid.counts[a]
        if raw < 0.0 or raw > n - 1:
            return 0.0
        i0 = int(np.floor(raw))
        if i0 >= n - 1:  # point at (or within rounding of) the last node
            i0 = n - 2
        cells.append((i0, raw - i0))
    if grid.dim == 1:
        (i0, w), = cells
        v = f.values
        return float((1.0 - w) * v[i0] + w * v[i0 + 1])
    (i0, wi), (j0, wj) = cells
    v = f.values
    return float(
        (1.0 - wi) * ((1.0 - wj) * v[i0, j0] + wj * v[i0, j0 + 1])
        + wi * ((1.0 - wj) * v[i0 + 1, j0] + wj * v[i0 + 1, j0 + 1])
    )


def _csv_header(dim: int) -> list[str]:
    return ["x", "value"] if dim == 1 else ["x", "y", "value"]


def write_function_csv(f: SampledFunction, path_or_buffer) -> None:
    """Write node coordinates and values as CSV, row-major node order."""
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_csv_header(f.grid.dim))
        coords = f.grid.nodes()
        flat = f.values.ravel()
        for row, val in zip(coords, flat):
            w.writerow([format_float(c) for c in row] + [format_float(val)])
    finally:
        if own:
            fh.close()


def read_function_csv(path_or_buffer) -> SampledFunction:
    """Read a function CSV back into a SampledFunction.

    The node coordinates must form a uniform grid in row-major order; the
    grid is reconstructed from them.
    """
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    fh = open(path_or_buffer, "r", newline="") if own else path_or_buffer
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    if not rows:
        raise ValueError("empty CSV")
    header = [c.strip() for c in rows[0]]
    if header == _csv_header(1):
        dim = 1
    elif header == _csv_header(2):
        dim = 2
    else:
        raise ValueError(f"unrecognized CSV header {header}")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError("CSV contains no data rows")
    coords, vals = data[:, :dim], data[:, dim]
    if dim == 1:
        n = coords.shape[0]
        counts = (n,)
    else:
        ny = int(np.flatnonzero(np.diff(coords[:, 0]) != 0)[0]) + 1 \
            if coords.shape[0] > 1 and np.any(np.diff(coords[:, 0]) != 0) else coords.shape[0]
        if coords.shape[0] % ny != 0:
            raise ValueError("CSV rows do not form a full 2D grid")
        counts = (coords.shape[0] // ny, ny)
    steps = []
    for a in range(dim):
        c = coords[:, a].reshape(counts)
        axis_vals = c[(0,) * a + (slice(None),) + (0,) * (dim - 1 - a)]
        d = np.diff(axis_vals)
        if len(d) == 0 or not np.allclose(d, d[0], rtol=1e-9, atol=0):
            raise ValueError(f"CSV coordinates are not uniformly spaced on axis {a}")
        steps.append(float(d[0]))
    if dim == 2 and not np.isclose(steps[0], steps[1], rtol=1e-9):
        raise ValueError(f"axis spacings differ: {steps}")
    grid = build_grid(tuple(coords[0, :dim]), steps[0], counts)
    return SampledFunction(grid, vals.reshape(counts))
