"""Difference quotients, gradients, Lebesgue/Sobolev norms, and set distances."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .grid import SampledFunction, UniformGrid, format_float

__all__ = [
    "VectorField",
    "diff_quotient",
    "translate",
    "gradient",
    "lp_norm",
    "sobolev_norm",
    "inner_product",
    "set_distance",
    "dilate",
    "hausdorff_distance",
    "write_vector_csv",
]


@dataclass(frozen=True)
class VectorField:
    """One vector per grid node; components stacked on the last axis."""

    grid: UniformGrid
    components: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.components, dtype=float)
        if c.shape != self.grid.shape + (self.grid.dim,):
            raise ValueError(
                f"components shape {c.shape} != grid shape "
                f"{self.grid.shape + (self.grid.dim,)}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("vector field components must be finite")
        object.__setattr__(self, "components", c)

    def magnitude(self) -> SampledFunction:
        """Euclidean length of the vector at each node, as a scalar field."""
        mag = np.sqrt(np.sum(self.components**2, axis=-1))
        return SampledFunction(self.grid, mag)

    def component(self, axis: int) -> SampledFunction:
        return SampledFunction(self.grid, self.components[..., axis])


def _shift_values(values: np.ndarray, axis: int, steps: int) -> np.ndarray:
    """values read at index + steps along one axis, zero outside."""
    out = np.zeros_like(values)
    n = values.shape[axis]
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if steps >= 0:
        dst[axis] = slice(0, n - steps)
        src[axis] = slice(steps, n)
    else:
        dst[axis] = slice(-steps, n)
        src[axis] = slice(0, n + steps)
    out[tuple(dst)] = values[tuple(src)]
    return out


def _check_axis(grid: UniformGrid, axis: int) -> None:
    if not 0 <= axis < grid.dim:
        raise ValueError(f"axis {axis} out of range for dimension {grid.dim}")


def diff_quotient(f: SampledFunction, axis: int, m: int = 1) -> SampledFunction:
    """Forward difference quotient (f(x + m h e_axis) - f(x)) / (m h).

    Reads beyond the hull are zero (compact-support convention).
    """
    _check_axis(f.grid, axis)
    m = int(m)
    if not 1 <= m <= f.grid.counts[axis] - 1:
        raise ValueError(
            f"step {m} out of range 1..{f.grid.counts[axis] - 1} on axis {axis}"
        )
    shifted = _shift_values(f.values, axis, m)
    return SampledFunction(f.grid, (shifted - f.values) / (m * f.grid.spacing))


def translate(f: SampledFunction, axis: int, m: int) -> SampledFunction:
    """Samples of x -> f(x - m h e_axis): positive m moves support forward."""
    _check_axis(f.grid, axis)
    m = int(m)
    if abs(m) > f.grid.counts[axis] - 1:
        raise ValueError(
            f"translation {m} exceeds the grid extent on axis {axis}"
        )
    return SampledFunction(f.grid, _shift_values(f.values, axis, -m))


def gradient(f: SampledFunction) -> VectorField:
    """Centered differences in the interior, one-sided at the hull faces."""
    grid = f.grid
    if any(c < 3 for c in grid.counts):
        raise ValueError(f"gradient needs at least 3 nodes per axis, got {grid.counts}")
    h = grid.spacing
    comps = np.empty(grid.shape + (grid.dim,))
    for a in range(grid.dim):
        v = f.values
        d = np.empty_like(v)
        interior = [slice(None)] * grid.dim
        upper = [slice(None)] * grid.dim
        lower = [slice(None)] * grid.dim
        interior[a] = slice(1, -1)
        upper[a] = slice(2, None)
        lower[a] = slice(None, -2)
        d[tuple(interior)] = (v[tuple(upper)] - v[tuple(lower)]) / (2.0 * h)
        first = [slice(None)] * grid.dim
        second = [slice(None)] * grid.dim
        first[a] = 0
        second[a] = 1
        d[tuple(first)] = (v[tuple(second)] - v[tuple(first)]) / h
        last = [slice(None)] * grid.dim
        penult = [slice(None)] * grid.dim
        last[a] = -1
        penult[a] = -2
        d[tuple(last)] = (v[tuple(last)] - v[tuple(penult)]) / h
        comps[..., a] = d
    return VectorField(grid, comps)


def lp_norm(f: SampledFunction, p: float, mask: np.ndarray | None = None) -> float:
    """Discrete L^p norm (sum |f|^p h^dim)^(1/p), optionally over a node mask."""
    if p < 1.0:
        raise ValueError(f"exponent must be >= 1, got {p}")
    v = np.abs(f.values)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != f.grid.shape:
            raise ValueError(f"mask shape {mask.shape} != grid shape {f.grid.shape}")
        v = v[mask]
    cell = f.grid.spacing**f.grid.dim
    return float((v**p).sum() * cell) ** (1.0 / p)


def sobolev_norm(f: SampledFunction, p: float) -> float:
    """||f||_p plus the L^p norm of the gradient magnitude."""
    return lp_norm(f, p) + lp_norm(gradient(f).magnitude(), p)


def inner_product(
    f: SampledFunction, g: SampledFunction, mask: np.ndarray | None = None
) -> float:
    """Discrete pairing sum f*g*h^dim, optionally over a node mask."""
    if f.grid != g.grid:
        raise ValueError("inner product requires both functions on one grid")
    prod = f.values * g.values
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != f.grid.shape:
            raise ValueError(f"mask shape {mask.shape} != grid shape {f.grid.shape}")
        prod = prod[mask]
    return float(prod.sum() * f.grid.spacing**f.grid.dim)


def _as_points(a: np.ndarray) -> np.ndarray:
    pts = np.asarray(a, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("point set must be a nonempty (m, dim) array")
    return pts


def set_distance(x, points: np.ndarray) -> float:
    """Euclidean distance from a point to a finite point set."""
    pts = _as_points(points)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if xv.shape != (pts.shape[1],):
        raise ValueError(f"point {x} does not match set dimension {pts.shape[1]}")
    return float(np.sqrt(((pts - xv) ** 2).sum(axis=1)).min())


def dilate(points: np.ndarray, factor: float) -> np.ndarray:
    """Scale a point set about the origin."""
    if not np.isfinite(factor):
        raise ValueError(f"dilation factor must be finite, got {factor}")
    return _as_points(points) * factor


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    pa, pb = _as_points(a), _as_points(b)
    if pa.shape[1] != pb.shape[1]:
        raise ValueError("point sets must share one dimension")
    d = cdist(pa, pb)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def write_vector_csv(vf: VectorField, path_or_buffer) -> None:
    """Write node coordinates and vector components as CSV, row-major."""
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        w = csv.writer(fh, lineterminator="\n")
        dim = vf.grid.dim
        head = (["x"] if dim == 1 else ["x", "y"]) + [f"d{a + 1}" for a in range(dim)]
        w.writerow(head)
        coords = vf.grid.nodes()
        flat = vf.components.reshape(-1, dim)
        for row, comp in zip(coords, flat):
            w.writerow([format_float(c) for c in row] + [format_float(c) for c in comp])
    finally:
        if own:
            fh.close()
