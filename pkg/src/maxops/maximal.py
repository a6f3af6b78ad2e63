"""Discrete Hardy-Littlewood and bilinear maximal operators on uniform grids.

All operators take a maximum of ball averages of |f| over a finite grid of
radii.  The global operator averages over the grid nodes inside each closed
ball and divides by the number of such nodes, so the average of a constant
is exactly that constant.  The bilinear operator averages the pair product
over lattice offsets inside the ball around the origin, with zero extension
outside the hull, so it degenerates continuously to the pointwise product
|f(x)g(x)| as the radius shrinks to zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import distance_transform_edt

from .grid import (
    PrefixTable,
    SampledFunction,
    UniformGrid,
    format_float,
    prefix_table,
)

__all__ = [
    "DEFAULT_GOOD_TOL",
    "RadiusGrid",
    "MaximalField",
    "ball_average",
    "bilinear_average",
    "hl_maximal",
    "local_maximal",
    "bilinear_maximal",
    "good_radii",
    "holder_envelope",
    "write_field_csv",
]

DEFAULT_GOOD_TOL = 1e-9

# Relative inflation applied before flooring r/h, so a radius that equals a
# lattice distance up to float rounding lands inside the closed ball.
_TIE = 1e-12


@dataclass(frozen=True)
class RadiusGrid:
    """Strictly increasing candidate radii; may start at zero.

    A leading zero opts into the point-value candidate |f(x)| (or
    |f(x)g(x)| for the bilinear operator), the limit of ball averages as
    the radius shrinks.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("radius grid must be a nonempty 1D array")
        if not np.all(np.isfinite(v)) or v[0] < 0:
            raise ValueError("radii must be finite and nonnegative")
        if np.any(np.diff(v) <= 0):
            raise ValueError("radii must be strictly increasing")
        if v[-1] <= 0:
            raise ValueError("radius grid needs at least one positive entry")
        object.__setattr__(self, "values", v)

    @classmethod
    def linear(cls, h: float, count: int, include_zero: bool = False) -> "RadiusGrid":
        """Radii ``j*h`` for ``j = 1..count``, optionally preceded by zero."""
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        r = h * np.arange(1, count + 1, dtype=float)
        if include_zero:
            r = np.concatenate([[0.0], r])
        return cls(r)

    @property
    def include_zero(self) -> bool:
        return bool(self.values[0] == 0.0)

    @property
    def positive(self) -> np.ndarray:
        return self.values[1:] if self.include_zero else self.values

    @property
    def r_max(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class MaximalField:
    """Values of a maximal operator plus the radii that attain them.

    ``good_radii`` holds, per node (row-major), the radii whose average
    reaches ``(1 - tolerance) * max``; it is ``None`` when tracking was
    switched off for large runs.  ``boundary_hits`` flags nodes whose
    maximum is attained at the largest candidate radius, a sign the radius
    grid truncated the search.  Local fields carry their domain mask and
    hold zeros off it.
    """

    grid: UniformGrid
    values: np.ndarray
    radii: RadiusGrid
    tolerance: float
    good_radii: list | None
    boundary_hits: np.ndarray
    domain_mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("maximal field values must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    def good_radii_at(self, index: int | tuple[int, ...]) -> np.ndarray:
        if self.good_radii is None:
            raise ValueError("good radii were not tracked for this field")
        flat = index if np.isscalar(index) else int(np.ravel_multi_index(index, self.grid.shape))
        return self.good_radii[flat]

    def good_counts(self) -> np.ndarray:
        if self.good_radii is None:
            raise ValueError("good radii were not tracked for this field")
        return np.array([len(g) for g in self.good_radii]).reshape(self.grid.shape)

    def smallest_good_radii(self) -> np.ndarray:
        """Smallest good radius per node; NaN where the good set is empty."""
        if self.good_radii is None:
            raise ValueError("good radii were not tracked for this field")
        out = np.array([g[0] if len(g) else np.nan for g in self.good_radii])
        return out.reshape(self.grid.shape)


def _isqrt_leq(qq: float, c: float) -> int:
    """Largest integer w >= 0 with c + w*w <= qq, or -1 if none."""
    rem = qq - c
    if rem < 0.0:
        return -1
    w = int(np.sqrt(rem))
    while c + (w + 1) * (w + 1) <= qq:
        w += 1
    while w >= 0 and c + w * w > qq:
        w -= 1
    return w


def _ball_qq(r: float, h: float) -> float:
    q = r / h
    return q * q * (1.0 + 2.5 * _TIE) + 2.5 * _TIE


def _steps(r: float, h: float) -> int:
    """Lattice steps inside the closed 1D ball of radius r (at least 1)."""
    return max(1, _isqrt_leq(_ball_qq(r, h), 0.0))


def _halfwidths(r: float, h: float) -> np.ndarray:
    """Per-row half-widths of the closed lattice disc of radius r."""
    qq = _ball_qq(r, h)
    k = _steps(r, h)
    return np.array([_isqrt_leq(qq, di * di) for di in range(k + 1)], dtype=np.int64)


def _check_positive_radii(radii: RadiusGrid, h: float) -> None:
    rp = radii.positive
    if rp.size == 0:
        raise ValueError("radius grid needs at least one positive entry")
    if rp[0] < h * (1.0 - 1e-9):
        raise ValueError(
            f"smallest positive radius {rp[0]} is below the grid spacing {h}"
        )


def _shift1(arr: np.ndarray, s: int) -> np.ndarray:
    """arr evaluated at index + s, zero outside the array."""
    out = np.zeros_like(arr)
    n = arr.shape[0]
    if s >= 0:
        if s < n:
            out[: n - s] = arr[s:]
    else:
        if -s < n:
            out[-s:] = arr[: n + s]
    return out


def _shift2(arr: np.ndarray, si: int, sj: int) -> np.ndarray:
    """arr evaluated at index + (si, sj), zero outside the array."""
    out = np.zeros_like(arr)
    nx, ny = arr.shape
    i0, i1 = max(0, -si), min(nx, nx - si)
    j0, j1 = max(0, -sj), min(ny, ny - sj)
    if i0 < i1 and j0 < j1:
        out[i0:i1, j0:j1] = arr[i0 + si : i1 + si, j0 + sj : j1 + sj]
    return out


def _frac_shift(values: np.ndarray, t: Sequence[float]) -> np.ndarray:
    """values read at index + t (fractional), multilinear, zero outside."""
    if values.ndim == 1:
        (tx,) = t
        b = int(np.floor(tx))
        w = tx - b
        if w == 0.0:
            return _shift1(values, b)
        return (1.0 - w) * _shift1(values, b) + w * _shift1(values, b + 1)
    tx, ty = t
    bi, bj = int(np.floor(tx)), int(np.floor(ty))
    wi, wj = tx - bi, ty - bj
    out = None
    for di, fi in ((0, 1.0 - wi), (1, wi)):
        for dj, fj in ((0, 1.0 - wj), (1, wj)):
            if fi * fj == 0.0:
                continue
            term = fi * fj * _shift2(values, bi + di, bj + dj)
            out = term if out is None else out + term
    return out if out is not None else np.zeros_like(values)


# ---------------------------------------------------------------------------
# average streams: yield (radius, average array, admissible mask or None)
# ---------------------------------------------------------------------------


def _hl_stream_prefix(
    f: SampledFunction, radii_pos: np.ndarray
) -> Iterator[tuple[float, np.ndarray, None]]:
    h = f.grid.spacing
    table = prefix_table(f).table
    if f.grid.dim == 1:
        n = f.grid.counts[0]
        # one extended-precision accumulation pass, then radii stream as
        # contiguous float64 slice differences; centering before rounding
        # keeps the lost bits below eps * half-mass per window sum, far
        # below the field tolerance
        pf = (table - table[n] * 0.5).astype(float)
        ks = [_steps(r, h) for r in radii_pos]
        kmax = max(ks, default=1)
        padded = np.concatenate([np.full(kmax, pf[0]), pf, np.full(kmax, pf[n])])
        idx = np.arange(n)
        for r, k in zip(radii_pos, ks):
            s = padded[kmax + k + 1 : kmax + k + 1 + n] - padded[kmax - k : kmax - k + n]
            cnt = np.minimum(idx + k, n - 1) - np.maximum(idx - k, 0) + 1
            yield float(r), s / cnt, None
    else:
        vals = np.abs(f.values).astype(np.longdouble)
        acc = np.zeros((vals.shape[0], vals.shape[1] + 1), dtype=np.longdouble)
        np.cumsum(vals, axis=1, out=acc[:, 1:])
        rowpref = acc.astype(float)
        nx, ny = f.grid.counts
        j = np.arange(ny)
        for r in radii_pos:
            w = _halfwidths(r, h)
            kmax = len(w) - 1
            s = np.zeros((nx, ny))
            cnt = np.zeros((nx, ny), dtype=np.int64)
            for di in range(-kmax, kmax + 1):
                ww = int(w[abs(di)])
                lo = np.maximum(j - ww, 0)
                hi = np.minimum(j + ww, ny - 1)
                r0, r1 = max(0, -di), min(nx, nx - di)
                if r0 >= r1:
                    continue
                s[r0:r1, :] += rowpref[r0 + di : r1 + di, hi + 1] - rowpref[r0 + di : r1 + di, lo]
                cnt[r0:r1, :] += hi - lo + 1
            yield float(r), s / cnt, None


def _hl_stream_naive(
    f: SampledFunction, radii_pos: np.ndarray
) -> Iterator[tuple[float, np.ndarray, None]]:
    """Direct per-ball summation; the reference path for benchmarks."""
    h = f.grid.spacing
    a = np.abs(f.values)
    if f.grid.dim == 1:
        n = a.shape[0]
        idx = np.arange(n)
        for r in radii_pos:
            k = _steps(r, h)
            padded = np.concatenate([np.zeros(k), a, np.zeros(k)])
            s = sliding_window_view(padded, 2 * k + 1).sum(axis=-1)
            cnt = np.minimum(idx + k, n - 1) - np.maximum(idx - k, 0) + 1
            yield float(r), s / cnt, None
    else:
        ones = np.ones_like(a)
        for r in radii_pos:
            w = _halfwidths(r, h)
            s = np.zeros_like(a)
            cnt = np.zeros_like(a)
            for di in range(-(len(w) - 1), len(w)):
                ww = int(w[abs(di)])
                for dj in range(-ww, ww + 1):
                    s += _shift2(a, di, dj)
                    cnt += _shift2(ones, di, dj)
            yield float(r), s / cnt, None


def _bilinear_stream(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    radii_pos: np.ndarray,
) -> Iterator[tuple[float, np.ndarray, None]]:
    """Running averages of |f(x - alpha z) g(x - z)| over growing balls.

    Offsets z live on the lattice around the origin; the ball count is the
    full lattice count, with both factors zero-extended off the hull.
    """
    h = f.grid.spacing
    fv, gv = f.values, g.values
    if f.grid.dim == 1:
        acc = np.abs(fv * gv)  # offset zero
        cnt = 1
        kprev = 0
        for r in radii_pos:
            k = _steps(r, h)
            for j in range(kprev + 1, k + 1):
                for jj in (j, -j):
                    fpart = _frac_shift(fv, (-alpha * jj,))
                    gpart = _shift1(gv, -jj)
                    acc = acc + np.abs(fpart * gpart)
                    cnt += 1
            kprev = max(kprev, k)
            yield float(r), acc / cnt, None
    else:
        acc = np.abs(fv * gv)
        cnt = 1
        wprev = {0: 0}  # halfwidth already covered per |di|
        for r in radii_pos:
            w = _halfwidths(r, h)
            for di in range(-(len(w) - 1), len(w)):
                ww = int(w[abs(di)])
                # rows tracked by signed di so each (di, dj) enters exactly once
                start = wprev.get(di, -1)
                for dj in range(start + 1, ww + 1):
                    cols = (dj,) if dj == 0 else (dj, -dj)
                    for jj in cols:
                        if di == 0 and jj == 0:
                            continue
                        fpart = _frac_shift(fv, (-alpha * di, -alpha * jj))
                        gpart = _shift2(gv, -di, -jj)
                        acc = acc + np.abs(fpart * gpart)
                        cnt += 1
                wprev[di] = max(wprev.get(di, -1), ww)
            yield float(r), acc / cnt, None


def _derivative_pair_stream(
    df: SampledFunction,
    g: SampledFunction,
    f: SampledFunction,
    dg: SampledFunction,
    alpha: float,
    radii_pos: np.ndarray,
) -> Iterator[tuple[float, np.ndarray]]:
    """Ball averages of df(x - alpha z) g(x - z) + f(x - alpha z) dg(x - z)."""
    h = f.grid.spacing
    if f.grid.dim != 1:
        raise ValueError("derivative pair averages are implemented in 1D")
    fv, gv, dfv, dgv = f.values, g.values, df.values, dg.values
    acc = dfv * gv + fv * dgv
    cnt = 1
    kprev = 0
    for r in radii_pos:
        k = _steps(r, h)
        for j in range(kprev + 1, k + 1):
            for jj in (j, -j):
                t = (-alpha * jj,)
                gs = _shift1(gv, -jj)
                dgs = _shift1(dgv, -jj)
                acc = acc + _frac_shift(dfv, t) * gs + _frac_shift(fv, t) * dgs
                cnt += 1
        kprev = max(kprev, k)
        yield float(r), acc / cnt


# ---------------------------------------------------------------------------
# field assembly
# ---------------------------------------------------------------------------


def _collect_field(
    grid: UniformGrid,
    radii: RadiusGrid,
    tol: float,
    track: bool,
    stream_factory: Callable[[], Iterator[tuple[float, np.ndarray, np.ndarray | None]]],
    point_values: np.ndarray | None,
    point_mask: np.ndarray | None,
    node_mask: np.ndarray | None,
) -> MaximalField:
    if not 0.0 < tol <= 0.1:
        raise ValueError(f"good-radius tolerance must be in (0, 0.1], got {tol}")
    shape = grid.shape
    r_last = radii.positive[-1]
    best = np.full(shape, -np.inf)
    last_avg = None
    for r, avg, adm in stream_factory():
        cand = avg if adm is None else np.where(adm, avg, -np.inf)
        np.maximum(best, cand, out=best)
        if r == r_last:
            last_avg = cand
    if point_values is not None:
        pv = point_values if point_mask is None else np.where(point_mask, point_values, -np.inf)
        np.maximum(best, pv, out=best)
    if node_mask is not None:
        best = np.where(node_mask, best, 0.0)
    if np.any(np.isneginf(best)):
        raise ValueError("some node has no candidate radius and no point value")

    thresh = (1.0 - tol) * best
    boundary = np.zeros(shape, dtype=bool)
    if last_avg is not None:
        boundary = last_avg >= thresh
        if node_mask is not None:
            boundary &= node_mask

    goods: list | None = None
    if track:
        lists: list[list[float]] = [[] for _ in range(grid.size)]
        if point_values is not None:
            zero_hit = point_values >= thresh
            if point_mask is not None:
                zero_hit &= point_mask
            if node_mask is not None:
                zero_hit &= node_mask
            for i in np.flatnonzero(zero_hit.ravel()):
                lists[i].append(0.0)
        flat_thresh = thresh.ravel()
        mask_flat = None if node_mask is None else node_mask.ravel()
        for r, avg, adm in stream_factory():
            cand = avg if adm is None else np.where(adm, avg, -np.inf)
            hit = cand.ravel() >= flat_thresh
            if mask_flat is not None:
                hit &= mask_flat
            for i in np.flatnonzero(hit):
                lists[i].append(r)
        goods = [np.array(g) for g in lists]

    return MaximalField(
        grid=grid,
        values=best,
        radii=radii,
        tolerance=tol,
        good_radii=goods,
        boundary_hits=boundary,
        domain_mask=node_mask,
    )


def hl_maximal(
    f: SampledFunction,
    radii: RadiusGrid,
    *,
    tol: float = DEFAULT_GOOD_TOL,
    track_good_radii: bool = True,
    method: str = "prefix",
) -> MaximalField:
    """Hardy-Littlewood maximal field: max over radii of ball averages of |f|.

    ``method`` selects the prefix-table fast path or the naive per-ball
    summation reference ("prefix" or "naive").
    """
    _check_positive_radii(radii, f.grid.spacing)
    if method == "prefix":
        stream = lambda: _hl_stream_prefix(f, radii.positive)
    elif method == "naive":
        stream = lambda: _hl_stream_naive(f, radii.positive)
    else:
        raise ValueError(f"unknown method {method!r}, expected 'prefix' or 'naive'")
    point = np.abs(f.values) if radii.include_zero else None
    return _collect_field(
        f.grid, radii, tol, track_good_radii, stream, point, None, None
    )


def boundary_distance(grid: UniformGrid, domain_mask: np.ndarray) -> np.ndarray:
    """Distance from each masked node to the domain boundary.

    Measured to the nearest unmasked node (the hull exterior counts as
    unmasked) minus half a spacing, so a ball of any admissible radius
    r < delta contains masked nodes only.
    """
    mask = np.asarray(domain_mask, dtype=bool)
    if mask.shape != grid.shape:
        raise ValueError(f"mask shape {mask.shape} != grid shape {grid.shape}")
    if not mask.any():
        raise ValueError("domain mask is empty")
    padded = np.pad(mask, 1, constant_values=False)
    dist = distance_transform_edt(padded, sampling=grid.spacing)
    core = dist[(slice(1, -1),) * grid.dim]
    return core - 0.5 * grid.spacing


def local_maximal(
    f: SampledFunction,
    domain_mask: np.ndarray,
    radii: RadiusGrid,
    *,
    tol: float = DEFAULT_GOOD_TOL,
    track_good_radii: bool = True,
) -> MaximalField:
    """Local maximal field over a domain: only radii r < delta(x) compete.

    delta is the distance to the domain boundary, so every admissible ball
    stays inside the domain.  Masked nodes with no admissible radius carry
    the limit value |f(x)| with good set {0}; off-mask values are zero.
    """
    _check_positive_radii(radii, f.grid.spacing)
    mask = np.asarray(domain_mask, dtype=bool)
    delta = boundary_distance(f.grid, mask)
    absf = np.abs(f.values)

    def stream() -> Iterator[tuple[float, np.ndarray, np.ndarray]]:
        for r, avg, _ in _hl_stream_prefix(f, radii.positive):
            yield r, avg, mask & (delta > r)

    no_admissible = ~(delta > radii.positive[0])
    point_mask = mask & (no_admissible | radii.include_zero)
    return _collect_field(
        f.grid, radii, tol, track_good_radii, stream, absf, point_mask, mask
    )


def bilinear_maximal(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    radii: RadiusGrid,
    *,
    tol: float = DEFAULT_GOOD_TOL,
    track_good_radii: bool = True,
) -> MaximalField:
    """Bilinear maximal field: max over radii of pair-product ball averages.

    Per node x the candidates are averages over lattice offsets z with
    |z| <= r of |f(x - alpha z) g(x - z)|; the first factor is read by
    multilinear interpolation when alpha z is not a lattice step.  The
    degenerate direction alpha = 1 (both factors slide together) is
    rejected.
    """
    if f.grid != g.grid:
        raise ValueError("f and g must share one grid")
    if alpha == 1.0:
        raise ValueError("alpha = 1 is degenerate; the two factors must separate")
    _check_positive_radii(radii, f.grid.spacing)
    stream = lambda: _bilinear_stream(f, g, alpha, radii.positive)
    point = np.abs(f.values * g.values) if radii.include_zero else None
    return _collect_field(
        f.grid, radii, tol, track_good_radii, stream, point, None, None
    )


# ---------------------------------------------------------------------------
# single-point operations
# ---------------------------------------------------------------------------


def _node_index(f: SampledFunction, x) -> tuple[int, ...]:
    return f.grid.index_of(x)


def ball_average(f: SampledFunction, x, radius: float) -> float:
    """Average of |f| over grid nodes within ``radius`` of the node ``x``."""
    h = f.grid.spacing
    if radius < h * (1.0 - 1e-9):
        raise ValueError(f"radius {radius} is below the grid spacing {h}")
    idx = _node_index(f, x)
    a = np.abs(f.values)
    if f.grid.dim == 1:
        (i,) = idx
        n = f.grid.counts[0]
        k = _steps(radius, h)
        lo, hi = max(0, i - k), min(n - 1, i + k)
        return float(a[lo : hi + 1].sum() / (hi - lo + 1))
    i, j = idx
    nx, ny = f.grid.counts
    w = _halfwidths(radius, h)
    total = 0.0
    count = 0
    for di in range(-(len(w) - 1), len(w)):
        row = i + di
        if not 0 <= row < nx:
            continue
        ww = int(w[abs(di)])
        lo, hi = max(0, j - ww), min(ny - 1, j + ww)
        total += float(a[row, lo : hi + 1].sum())
        count += hi - lo + 1
    return total / count


def bilinear_average(
    f: SampledFunction, g: SampledFunction, alpha: float, x, radius: float
) -> float:
    """Average of |f(x - alpha z) g(x - z)| over lattice offsets |z| <= radius.

    ``radius = 0`` returns the pointwise product |f(x) g(x)|.
    """
    if f.grid != g.grid:
        raise ValueError("f and g must share one grid")
    if alpha == 1.0:
        raise ValueError("alpha = 1 is degenerate; the two factors must separate")
    h = f.grid.spacing
    idx = _node_index(f, x)
    fv, gv = f.values, g.values
    if radius == 0.0:
        return float(np.abs(fv[idx] * gv[idx]))
    if radius < h * (1.0 - 1e-9):
        raise ValueError(f"radius {radius} is below the grid spacing {h}")

    def f_at(findex: Sequence[float]) -> float:
        # multilinear read in index space, zero outside
        vals = fv
        if vals.ndim == 1:
            (t,) = findex
            b = int(np.floor(t))
            wgt = t - b
            n = vals.shape[0]
            v0 = vals[b] if 0 <= b < n else 0.0
            if wgt == 0.0:
                return float(v0)
            v1 = vals[b + 1] if 0 <= b + 1 < n else 0.0
            return float((1.0 - wgt) * v0 + wgt * v1)
        ti, tj = findex
        bi, bj = int(np.floor(ti)), int(np.floor(tj))
        wi, wj = ti - bi, tj - bj
        out = 0.0
        for di, fi in ((0, 1.0 - wi), (1, wi)):
            for dj, fj in ((0, 1.0 - wj), (1, wj)):
                if fi * fj == 0.0:
                    continue
                ii, jj = bi + di, bj + dj
                if 0 <= ii < vals.shape[0] and 0 <= jj < vals.shape[1]:
                    out += fi * fj * float(vals[ii, jj])
        return out

    def g_at(gi: Sequence[int]) -> float:
        if gv.ndim == 1:
            (i,) = gi
            return float(gv[i]) if 0 <= i < gv.shape[0] else 0.0
        i, j = gi
        if 0 <= i < gv.shape[0] and 0 <= j < gv.shape[1]:
            return float(gv[i, j])
        return 0.0

    if f.grid.dim == 1:
        (i,) = idx
        k = _steps(radius, h)
        total = 0.0
        for j in range(-k, k + 1):
            total += abs(f_at((i - alpha * j,)) * g_at((i - j,)))
        return total / (2 * k + 1)
    i, j = idx
    w = _halfwidths(radius, h)
    total = 0.0
    count = 0
    for di in range(-(len(w) - 1), len(w)):
        ww = int(w[abs(di)])
        for dj in range(-ww, ww + 1):
            total += abs(
                f_at((i - alpha * di, j - alpha * dj)) * g_at((i - di, j - dj))
            )
            count += 1
    return total / count


def good_radii(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    x,
    radii: RadiusGrid,
    tol: float = DEFAULT_GOOD_TOL,
) -> np.ndarray:
    """Radii whose pair average at x reaches (1 - tol) of the maximum."""
    if not 0.0 < tol <= 0.1:
        raise ValueError(f"good-radius tolerance must be in (0, 0.1], got {tol}")
    _check_positive_radii(radii, f.grid.spacing)
    avgs = np.array([bilinear_average(f, g, alpha, x, r) for r in radii.values])
    best = avgs.max()
    return radii.values[avgs >= (1.0 - tol) * best]


def holder_envelope(
    p: float, q: float, norm_f_p: float, norm_g_q: float, radius: float, dim: int
) -> float:
    """Upper envelope m(B_r)^(-1/p - 1/q) * norm_f_p * norm_g_q for pair averages."""
    if p <= 1.0 or q <= 1.0:
        raise ValueError(f"exponents must exceed 1, got p={p}, q={q}")
    if norm_f_p < 0.0 or norm_g_q < 0.0:
        raise ValueError("norms must be nonnegative")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if dim == 1:
        measure = 2.0 * radius
    elif dim == 2:
        measure = np.pi * radius * radius
    else:
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    return float(measure ** (-(1.0 / p + 1.0 / q)) * norm_f_p * norm_g_q)


def write_field_csv(field: MaximalField, path_or_buffer) -> None:
    """Write per-node values and good radii as CSV (local fields: masked rows)."""
    if field.good_radii is None:
        raise ValueError("cannot serialize a field without tracked good radii")
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        w = csv.writer(fh, lineterminator="\n")
        dim = field.grid.dim
        w.writerow((["x"] if dim == 1 else ["x", "y"]) + ["value", "good_radii"])
        coords = field.grid.nodes()
        flat_vals = field.values.ravel()
        flat_mask = None if field.domain_mask is None else field.domain_mask.ravel()
        for i in range(field.grid.size):
            if flat_mask is not None and not flat_mask[i]:
                continue
            rads = ";".join(format_float(r) for r in field.good_radii[i])
            w.writerow(
                [format_float(c) for c in coords[i]]
                + [format_float(flat_vals[i]), rads]
            )
    finally:
        if own:
            fh.close()
