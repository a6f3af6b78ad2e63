"""Verification suites for maximal-operator inequalities and counterexamples.

Each suite builds its inputs, evaluates the discrete operators, and returns
a report of per-node margins or sequence observables together with every
tolerance and derived constant it used.  Inequality suites replace their
inputs by absolute values first; the operators are positively homogeneous,
so nothing is lost and gradients stay well defined for the smooth batteries
fed here.  Nodes within one maximal radius of the hull boundary are
excluded from theorem-backed checks, where zero extension distorts the
averages; the excluded band width is recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from .functions import indicator, normalized_indicator, sine, sine_weighted, smooth_bump, tent
from .grid import SampledFunction, UniformGrid, build_grid, sample
from .maximal import (
    DEFAULT_GOOD_TOL,
    MaximalField,
    RadiusGrid,
    _derivative_pair_stream,
    _hl_stream_prefix,
    _steps,
    bilinear_maximal,
    good_radii,
    hl_maximal,
    local_maximal,
)
from .sobolev import gradient, inner_product, lp_norm, sobolev_norm, translate

__all__ = [
    "ResolutionError",
    "InequalityReport",
    "ConvergenceReport",
    "inequality_tolerance",
    "derivative_tolerance",
    "check_gradient_bound",
    "check_line_bound",
    "derivative_formula",
    "check_derivative_formula",
    "check_decay_bound",
    "check_avg_upper_bound",
    "check_splitting",
    "run_ae_counterexample",
    "run_weak_counterexample_local",
    "run_weak_counterexample_global",
    "run_translate_sequence",
    "run_weak_continuity_demo",
    "random_bump_pair",
    "gradient_bound_suite",
    "derivative_formula_suite",
    "line_bound_suite",
    "SUITES",
]


class ResolutionError(RuntimeError):
    """The grid is too coarse to resolve the requested construction."""


def inequality_tolerance(h: float) -> float:
    """Default slack for pointwise inequality checks."""
    return 10.0 * h


def derivative_tolerance(h: float) -> float:
    """Default slack for derivative-formula comparisons."""
    return 20.0 * h


def _const(value: float, provenance: str) -> dict:
    return {"value": float(value), "provenance": provenance}


@dataclass
class InequalityReport:
    """Per-node record of a pointwise inequality lhs <= rhs + tolerance."""

    name: str
    parameters: dict
    coords: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tolerance: float
    grid_spacing: float
    grid_counts: tuple
    boundary_flag_count: int
    excluded_band: float
    excluded_tie_count: int = 0
    constants: dict = dc_field(default_factory=dict)

    @property
    def checked_count(self) -> int:
        return int(self.lhs.size)

    @property
    def violation_count(self) -> int:
        return int(np.count_nonzero(self.lhs > self.rhs + self.tolerance))

    @property
    def worst_violation(self) -> float:
        """Largest raw excess of lhs over rhs, clipped at zero."""
        if self.lhs.size == 0:
            return 0.0
        return float(max(0.0, float(np.max(self.lhs - self.rhs))))

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self, per_point: bool = False) -> dict:
        out = {
            "name": self.name,
            "parameters": self.parameters,
            "tolerance": float(self.tolerance),
            "grid": {"h": float(self.grid_spacing), "counts": list(self.grid_counts)},
            "checked_count": self.checked_count,
            "boundary_flag_count": int(self.boundary_flag_count),
            "excluded_band": float(self.excluded_band),
            "excluded_tie_count": int(self.excluded_tie_count),
            "constants": self.constants,
            "summary": {
                "violations": self.violation_count,
                "worst": self.worst_violation,
                "verdict": "pass" if self.passed else "fail",
            },
        }
        if per_point:
            out["per_point"] = {
                "coords": [[float(c) for c in row] for row in np.atleast_2d(self.coords)],
                "lhs": [float(v) for v in self.lhs],
                "rhs": [float(v) for v in self.rhs],
            }
        return out


@dataclass
class ConvergenceReport:
    """Observables along a parameter sequence plus threshold checks."""

    name: str
    parameters: dict
    observables: dict
    checks: list
    grid_spacing: float
    grid_counts: tuple
    constants: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def violation_count(self) -> int:
        return sum(0 if c["passed"] else 1 for c in self.checks)

    def to_dict(self, per_point: bool = False) -> dict:
        out = {
            "name": self.name,
            "parameters": self.parameters,
            "tolerance": None,
            "grid": {"h": float(self.grid_spacing), "counts": list(self.grid_counts)},
            "observables": {k: [float(v) for v in vs] for k, vs in self.observables.items()},
            "checks": self.checks,
            "constants": self.constants,
            "summary": {
                "violations": self.violation_count,
                "worst": None,
                "verdict": "pass" if self.passed else "fail",
            },
        }
        return out


def _check(claim: str, passed: bool, **detail) -> dict:
    entry = {"claim": claim, "passed": bool(passed)}
    for k, v in detail.items():
        if isinstance(v, (list, tuple)):
            entry[k] = [float(x) for x in v]
        elif v is not None:
            entry[k] = float(v)
    return entry


def _require_increasing(values: Sequence[float], label: str) -> None:
    if len(values) < 2 or any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{label} must be strictly increasing with length >= 2")


def _field_function(field: MaximalField) -> SampledFunction:
    return SampledFunction(field.grid, field.values)


def _ones(grid: UniformGrid) -> SampledFunction:
    return SampledFunction(grid, np.ones(grid.shape))


def _inverse_square_weight(grid: UniformGrid) -> SampledFunction:
    return sample(lambda *c: 1.0 / (1.0 + sum(x**2 for x in c)), grid)


# ---------------------------------------------------------------------------
# pointwise gradient bound
# ---------------------------------------------------------------------------


def check_gradient_bound(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    radii: RadiusGrid,
    tol: float | None = None,
    exclude_ties: bool = False,
) -> InequalityReport:
    """|grad M(f,g)| <= M(f, |grad g|) + M(|grad f|, g) on interior nodes.

    The field gradient is the centered difference of the computed maximal
    field; both sides use the same radius grid.  With ``exclude_ties`` the
    comparison skips nodes where several radii tie for the maximum, the same
    filter the derivative check applies; the bound itself needs no such
    restriction, so the default keeps every interior node.
    """
    fa, ga = f.abs(), g.abs()
    grid = f.grid
    h = grid.spacing
    if tol is None:
        tol = inequality_tolerance(h)
    mf = bilinear_maximal(fa, ga, alpha, radii, track_good_radii=exclude_ties)
    dg_mag = gradient(ga).magnitude()
    df_mag = gradient(fa).magnitude()
    rhs_field = (
        bilinear_maximal(fa, dg_mag, alpha, radii, track_good_radii=False).values
        + bilinear_maximal(df_mag, ga, alpha, radii, track_good_radii=False).values
    )
    lhs_field = gradient(_field_function(mf)).magnitude().values
    interior = grid.interior_mask(radii.r_max)
    qualifying = interior
    tie_count = 0
    if exclude_ties:
        qualifying = interior & (mf.good_counts() == 1)
        tie_count = int(np.count_nonzero(interior)) - int(np.count_nonzero(qualifying))
    return InequalityReport(
        name="gradient-bound",
        parameters={"alpha": float(alpha), "radii_count": int(radii.positive.size)},
        coords=grid.nodes()[qualifying.ravel()],
        lhs=lhs_field[qualifying],
        rhs=rhs_field[qualifying],
        tolerance=float(tol),
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=int(np.count_nonzero(mf.boundary_hits & qualifying)),
        excluded_band=radii.r_max,
        excluded_tie_count=tie_count,
        constants={"tolerance": _const(tol, "10h inequality slack")},
    )


# ---------------------------------------------------------------------------
# line-integral bound
# ---------------------------------------------------------------------------


def check_line_bound(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    radii: RadiusGrid,
    index_pairs: Sequence[tuple],
    tol: float | None = None,
) -> InequalityReport:
    """|M(x) - M(y)| <= trapezoidal integral of the gradient-bound right side
    along the axis-aligned segment joining two nodes."""
    fa, ga = f.abs(), g.abs()
    grid = f.grid
    h = grid.spacing
    if tol is None:
        tol = inequality_tolerance(h)
    mf = bilinear_maximal(fa, ga, alpha, radii, track_good_radii=False)
    rhs_field = (
        bilinear_maximal(fa, gradient(ga).magnitude(), alpha, radii, track_good_radii=False).values
        + bilinear_maximal(gradient(fa).magnitude(), ga, alpha, radii, track_good_radii=False).values
    )
    vals = mf.values
    lhs_list, rhs_list, coord_list = [], [], []
    for a, b in index_pairs:
        ia = (a,) if np.isscalar(a) else tuple(a)
        ib = (b,) if np.isscalar(b) else tuple(b)
        if grid.dim == 1:
            (i0,), (i1,) = ia, ib
            lo, hi = min(i0, i1), max(i0, i1)
            seg = rhs_field[lo : hi + 1]
        else:
            if ia[0] == ib[0]:
                lo, hi = sorted((ia[1], ib[1]))
                seg = rhs_field[ia[0], lo : hi + 1]
            elif ia[1] == ib[1]:
                lo, hi = sorted((ia[0], ib[0]))
                seg = rhs_field[lo : hi + 1, ia[1]]
            else:
                raise ValueError(f"nodes {ia} and {ib} are not on a common axis line")
        if seg.size < 2:
            raise ValueError(f"segment {ia}..{ib} is degenerate")
        lhs_list.append(abs(float(vals[ib]) - float(vals[ia])))
        rhs_list.append(float(np.trapezoid(seg, dx=h)))
        coord_list.append(grid.node(ia))
    return InequalityReport(
        name="line-bound",
        parameters={"alpha": float(alpha), "segments": len(lhs_list)},
        coords=np.array(coord_list),
        lhs=np.array(lhs_list),
        rhs=np.array(rhs_list),
        tolerance=float(tol),
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=int(np.count_nonzero(mf.boundary_hits)),
        excluded_band=0.0,
        constants={"tolerance": _const(tol, "10h inequality slack")},
    )


# ---------------------------------------------------------------------------
# derivative formula at good radii
# ---------------------------------------------------------------------------


def _derivative_field(
    fa: SampledFunction,
    ga: SampledFunction,
    alpha: float,
    radii: RadiusGrid,
    smallest_good: np.ndarray,
) -> np.ndarray:
    """Pair-derivative average at each node's smallest good radius (1D)."""
    grid = fa.grid
    df = gradient(fa).component(0)
    dg = gradient(ga).component(0)
    out = np.full(grid.shape, np.nan)
    zero_sel = smallest_good == 0.0
    point = df.values * ga.values + fa.values * dg.values
    out[zero_sel] = point[zero_sel]
    for r, avg in _derivative_pair_stream(df, ga, fa, dg, alpha, radii.positive):
        sel = smallest_good == r
        if np.any(sel):
            out[sel] = avg[sel]
    return out


def derivative_formula(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    x,
    radii: RadiusGrid,
    axis: int = 0,
    tol: float = DEFAULT_GOOD_TOL,
) -> float:
    """Candidate derivative of the bilinear maximal field at one node.

    Averages D|f|(x - alpha z)|g|(x - z) + |f|(x - alpha z) D|g|(x - z) over
    the ball of the smallest good radius; at good radius zero it degenerates
    to the product rule on the point values.
    """
    if f.grid.dim != 1:
        raise ValueError("the derivative formula check is one-dimensional")
    if axis != 0:
        raise ValueError(f"axis must be 0 on a one-dimensional grid, got {axis}")
    fa, ga = f.abs(), g.abs()
    idx = f.grid.index_of(x)
    good = good_radii(fa, ga, alpha, x, radii, tol)
    rstar = float(good[0])
    sel = np.full(f.grid.shape, np.nan)
    sel[idx] = rstar
    return float(_derivative_field(fa, ga, alpha, radii, sel)[idx])


def check_derivative_formula(
    f: SampledFunction,
    g: SampledFunction,
    alpha: float,
    radii: RadiusGrid,
    tol: float | None = None,
    good_tol: float = DEFAULT_GOOD_TOL,
) -> InequalityReport:
    """Derivative formula vs centered difference of the bilinear field.

    Only nodes whose good-radius set is a singleton qualify; ties are
    excluded and counted, since the field is merely Lipschitz across them.
    """
    if f.grid.dim != 1:
        raise ValueError("the derivative formula check is one-dimensional")
    fa, ga = f.abs(), g.abs()
    grid = f.grid
    h = grid.spacing
    if tol is None:
        tol = derivative_tolerance(h)
    bf = bilinear_maximal(fa, ga, alpha, radii, tol=good_tol, track_good_radii=True)
    counts = bf.good_counts()
    rstar = bf.smallest_good_radii()
    formula = _derivative_field(fa, ga, alpha, radii, rstar)
    fd = np.full(grid.shape, np.nan)
    fd[1:-1] = (bf.values[2:] - bf.values[:-2]) / (2.0 * h)
    interior = grid.interior_mask(radii.r_max)
    qualifying = interior & (counts == 1)
    n_interior = int(np.count_nonzero(interior))
    n_qual = int(np.count_nonzero(qualifying))
    discrepancy = np.abs(formula[qualifying] - fd[qualifying])
    return InequalityReport(
        name="derivative-formula",
        parameters={
            "alpha": float(alpha),
            "radii_count": int(radii.positive.size),
            "good_tolerance": float(good_tol),
            "interior_count": n_interior,
        },
        coords=grid.nodes()[qualifying.ravel()],
        lhs=discrepancy,
        rhs=np.zeros_like(discrepancy),
        tolerance=float(tol),
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=int(np.count_nonzero(bf.boundary_hits & qualifying)),
        excluded_band=radii.r_max,
        excluded_tie_count=n_interior - n_qual,
        constants={
            "tolerance": _const(tol, "20h derivative-comparison slack"),
            "singleton_fraction": _const(
                n_qual / n_interior if n_interior else 0.0,
                "share of interior nodes with a unique best radius",
            ),
        },
    )


# ---------------------------------------------------------------------------
# decay lower bound for compactly supported mass
# ---------------------------------------------------------------------------


def check_decay_bound(
    h: float = 0.01,
    half_width: float = 10.0,
    radii_count: int = 800,
    probe_lo: float = 1.0,
    probe_hi: float = 4.0,
    tol: float = 0.0,
) -> InequalityReport:
    """Mf(x) >= mass(|f| on the unit ball) / (4 |x|) for the unit indicator.

    Also records how closely the field tracks the closed form 1/(1 + |x|)
    away from the support edge, where the formula comes from maximizing the
    covered fraction (R - x + 1) / (2R) at R = x + 1.
    """
    n = int(round(2 * half_width / h)) + 1
    grid = build_grid(-half_width, h, n)
    f = sample(indicator(0.0, 1.0), grid)
    radii = RadiusGrid.linear(h, radii_count)
    fld = hl_maximal(f, radii, track_good_radii=False)
    xs = grid.axis_coords(0)
    probe = (xs >= probe_lo - 1e-12) & (xs <= probe_hi + 1e-12)
    unit_ball = np.abs(xs) <= 1.0 + 1e-12
    mass = float(np.abs(f.values[unit_ball]).sum() * h)
    decay_c = mass / 4.0
    lhs = decay_c / np.abs(xs[probe])
    rhs = fld.values[probe]

    strict = probe & (xs > probe_lo + h / 2)
    closed = 1.0 / (1.0 + np.abs(xs[strict]))
    closed_err = float(np.max(np.abs(fld.values[strict] - closed)))
    inside = np.abs(xs) <= 1.0 - h / 2
    inside_err = float(np.max(np.abs(fld.values[inside] - 1.0)))
    constants = {
        "unit_ball_mass": _const(mass, "sampled mass of |f| over the unit ball"),
        "decay_constant": _const(decay_c, "mass / (2^n * unit ball volume), n = 1"),
        "closed_form_max_err": _const(closed_err, "max |Mf - 1/(1+|x|)| on the probe band, x > 1"),
        "closed_form_tol": _const(5.0 * h, "5h closed-form slack"),
        "inside_max_err": _const(inside_err, "max |Mf - 1| strictly inside the support"),
    }
    i2 = int(np.argmin(np.abs(xs - 2.0)))
    if abs(xs[i2] - 2.0) < 1e-9:
        constants["value_at_2"] = _const(float(fld.values[i2]), "field value at x = 2")
        constants["target_at_2"] = _const(1.0 / 3.0, "closed form 1/(1+|x|) at x = 2")
    return InequalityReport(
        name="decay-bound",
        parameters={
            "probe_lo": probe_lo,
            "probe_hi": probe_hi,
            "radii_count": radii_count,
            "half_width": half_width,
        },
        coords=grid.nodes()[probe.ravel()],
        lhs=lhs,
        rhs=rhs,
        tolerance=float(tol),
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=int(np.count_nonzero(fld.boundary_hits & probe)),
        excluded_band=0.0,
        constants=constants,
    )


# ---------------------------------------------------------------------------
# averaging upper envelope
# ---------------------------------------------------------------------------


def check_avg_upper_bound(
    f: SampledFunction | None = None,
    p: float = 2.0,
    radii: RadiusGrid | None = None,
    slack_factor: float = 5.0,
) -> InequalityReport:
    """Ball averages of |f| never exceed m(B_R)^(-1/p) ||f||_p.

    Checked for every node and radius; the report keeps the worst node per
    radius.  The slack covers the O(h) mismatch between the lattice count
    and the continuum ball measure.
    """
    if p <= 1.0:
        raise ValueError(f"exponent must exceed 1, got {p}")
    if f is None:
        grid = build_grid(-6.0, 0.01, 1201)
        f = sample(smooth_bump(0.0, 2.0, 1.0), grid)
    grid = f.grid
    h = grid.spacing
    if radii is None:
        radii = RadiusGrid.linear(h, 200)
    norm = lp_norm(f, p)
    lhs_list, rhs_list, tol_list = [], [], []
    for r, avg, _ in _hl_stream_prefix(f, radii.positive):
        measure = 2.0 * r if grid.dim == 1 else np.pi * r * r
        env = measure ** (-1.0 / p) * norm
        lhs_list.append(float(avg.max()))
        rhs_list.append(env)
        tol_list.append(slack_factor * h * (1.0 / p) * env / r)
    lhs = np.array(lhs_list)
    rhs = np.array(rhs_list)
    slack = np.array(tol_list)
    # fold the per-radius slack into the reported right side and use a zero
    # uniform tolerance, so the report keeps one number per radius
    return InequalityReport(
        name="avg-envelope",
        parameters={"p": float(p), "radii_count": int(radii.positive.size)},
        coords=radii.positive[:, None],
        lhs=lhs,
        rhs=rhs + slack,
        tolerance=0.0,
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=0,
        excluded_band=0.0,
        constants={
            "lp_norm": _const(norm, "discrete L^p norm of the input"),
            "slack_factor": _const(slack_factor, "envelope slack multiplier (units of h)"),
        },
    )


# ---------------------------------------------------------------------------
# splitting of the global operator at a capped level
# ---------------------------------------------------------------------------


def check_splitting(
    u: SampledFunction | None = None,
    level: float = 4.0,
    core_half_width: float = 1.0,
    h: float = 0.01,
    half_width: float = 12.0,
    tol: float = 0.0,
) -> InequalityReport:
    """M(u) <= max(local M over an enlarged ball, 1/level) on the core.

    Once every average at radius >= R_m sits below 1/level, radii that leave
    the enlarged ball cannot raise the maximum above that cap, so the global
    field splits into the local field and the cap.
    """
    if level <= 0:
        raise ValueError(f"level must be positive, got {level}")
    if u is None:
        n = int(round(2 * half_width / h)) + 1
        grid = build_grid(-half_width, h, n)
        u = sample(smooth_bump(0.0, 1.0, 1.0), grid)
    grid = u.grid
    h = grid.spacing
    mass = lp_norm(u, 1.0)
    r_small = level * mass + 2 * h  # every average at radius >= this is <= 1/level
    big_half_width = core_half_width + 2.0 * r_small
    lo, hi = grid.hull()
    if big_half_width + h > min(-lo[0], hi[0]):
        raise ValueError(
            f"hull half-width {min(-lo[0], hi[0])} too small for the enlarged "
            f"ball of half-width {big_half_width}"
        )
    radii = RadiusGrid.linear(h, int(round((big_half_width + 1.0) / h)))
    xs = grid.axis_coords(0)
    core = np.abs(xs) <= core_half_width + 1e-12
    big_mask = np.abs(xs) < big_half_width

    glob = hl_maximal(u, radii, track_good_radii=False)
    loc = local_maximal(u, big_mask, radii, track_good_radii=False)
    lhs = glob.values[core]
    rhs = np.maximum(loc.values[core], 1.0 / level)

    premise_worst = 0.0
    for r, avg, _ in _hl_stream_prefix(u, radii.positive):
        if r >= r_small:
            premise_worst = max(premise_worst, float(avg.max()))
    return InequalityReport(
        name="splitting",
        parameters={
            "level": float(level),
            "core_half_width": float(core_half_width),
            "enlarged_half_width": float(big_half_width),
        },
        coords=grid.nodes()[core.ravel()],
        lhs=lhs,
        rhs=rhs,
        tolerance=float(tol),
        grid_spacing=h,
        grid_counts=grid.counts,
        boundary_flag_count=int(np.count_nonzero(glob.boundary_hits & core)),
        excluded_band=0.0,
        constants={
            "cap": _const(1.0 / level, "capped average level"),
            "small_radius": _const(r_small, "level * mass + 2h; averages beyond it sit under the cap"),
            "premise_worst_avg": _const(premise_worst, "largest average at radius >= small_radius"),
        },
    )


# ---------------------------------------------------------------------------
# counterexample sequences
# ---------------------------------------------------------------------------


def run_ae_counterexample(
    ks: Sequence[int] = (1, 2, 4, 8, 16),
    probe: float = 2.0,
    h: float = 0.01,
    half_width: float = 6.0,
    radii_count: int = 450,
    value_tol: float | None = None,
) -> ConvergenceReport:
    """Shrinking normalized indicators: pointwise values die, maxima persist.

    u_k is the indicator of the ball of radius 1/k scaled to unit mass; at a
    probe outside every support u_k vanishes while M(u_k) stays above the
    decay floor mass / (4 |probe|).
    """
    _require_increasing(ks, "ks")
    n = int(round(2 * half_width / h)) + 1
    grid = build_grid(-half_width, h, n)
    radii = RadiusGrid.linear(h, radii_count)
    if value_tol is None:
        value_tol = 5.0 * h
    xs = grid.axis_coords(0)
    iprobe = int(np.argmin(np.abs(xs - probe)))
    if abs(xs[iprobe] - probe) > 1e-9:
        raise ValueError(f"probe {probe} is not a grid node")
    u_vals, m_vals, floors, closed = [], [], [], []
    for k in ks:
        if 2 * _steps(1.0 / k, h) + 1 < 4 or (1.0 / k) / h < 2.0:
            raise ResolutionError(
                f"ball of radius 1/{k} holds fewer than 4 nodes at spacing {h}"
            )
        u = sample(normalized_indicator(k), grid)
        fld = hl_maximal(u, radii, track_good_radii=False)
        mass = lp_norm(u, 1.0)
        u_vals.append(float(np.abs(u.values[iprobe])))
        m_vals.append(float(fld.values[iprobe]))
        floors.append(mass / 4.0 / abs(probe))
        closed.append(k / (2.0 * (probe * k + 1.0)))
    checks = [
        _check(
            "u_k vanishes at the probe for every k",
            all(v == 0.0 for v in u_vals),
            observed=u_vals,
        ),
        _check(
            "M(u_k) at the probe stays above the decay floor",
            all(m >= fl for m, fl in zip(m_vals, floors)),
            observed=m_vals,
            thresholds=floors,
        ),
        _check(
            "M(u_k) at the probe stays above 1/8",
            all(m >= 0.125 for m in m_vals),
            observed=m_vals,
            threshold=0.125,
        ),
        _check(
            "M(u_k) tracks the closed form k / (2(pk + 1)) within 5h",
            all(abs(m - c) <= value_tol for m, c in zip(m_vals, closed)),
            observed=m_vals,
            targets=closed,
            threshold=value_tol,
        ),
    ]
    return ConvergenceReport(
        name="ae-sequence",
        parameters={"ks": list(ks), "probe": probe, "radii_count": radii_count},
        observables={
            "k": list(map(float, ks)),
            "u_at_probe": u_vals,
            "max_at_probe": m_vals,
            "decay_floor": floors,
            "closed_form": closed,
        },
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={"value_tol": _const(value_tol, "5h closed-form slack")},
    )


def run_weak_counterexample_local(
    ns: Sequence[int] = (4, 8, 16, 32),
    h: float = 1.0 / 1024.0,
    fixed_radius: float = 0.25,
    pairing_floor: float = 0.6,
    min_nodes_per_period: float = 16.0,
) -> ConvergenceReport:
    """Oscillations on (-1, 1): weak limit zero, local maxima keep mass.

    The local maximal field of sin(2 pi n x) pairs with the constant one
    above a fixed floor for every n, while the functions themselves pair to
    zero; the floor sits safely under the full-period mean of |sin|.
    """
    _require_increasing(ns, "ns")
    if not h < fixed_radius < 0.5:
        raise ValueError(
            f"fixed radius must lie strictly between h and 1/2, got {fixed_radius}"
        )
    pad = 0.25
    n_nodes = int(round(2 * (1.0 + pad) / h)) + 1
    grid = build_grid(-(1.0 + pad), h, n_nodes)
    xs = grid.axis_coords(0)
    mask = np.abs(xs) < 1.0 - h / 4
    radii = RadiusGrid.linear(h, int(round((fixed_radius + 0.05) / h)))
    if not np.any(np.isclose(radii.values, fixed_radius, rtol=0, atol=1e-12)):
        raise ValueError(f"fixed radius {fixed_radius} is not on the radius grid")
    one = _ones(grid)
    pair_u, pair_m = [], []
    for n in ns:
        if 1.0 / (n * h) < min_nodes_per_period - 1e-9:
            raise ResolutionError(
                f"{1.0 / (n * h):.1f} nodes per period at n = {n}; "
                f"need at least {min_nodes_per_period}"
            )
        u = sample(sine(n), grid)
        fld = local_maximal(u, mask, radii, track_good_radii=False)
        pair_u.append(inner_product(u, one, mask=mask))
        pair_m.append(inner_product(one, _field_function(fld), mask=mask))
    checks = [
        _check(
            "test pairing of u_n with 1 vanishes (within 2h)",
            all(abs(v) <= 2 * h for v in pair_u),
            observed=pair_u,
            threshold=2 * h,
        ),
        _check(
            "pairing of the local maximal field with 1 stays above the floor",
            all(v >= pairing_floor for v in pair_m),
            observed=pair_m,
            threshold=pairing_floor,
        ),
    ]
    return ConvergenceReport(
        name="weak-local",
        parameters={"ns": list(ns), "fixed_radius": fixed_radius},
        observables={"n": list(map(float, ns)), "pairing_u": pair_u, "pairing_max": pair_m},
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={
            "abs_sine_mean": _const(2.0 / np.pi, "mean of |sin| over full periods (closed form)"),
            "pairing_floor": _const(pairing_floor, "config default below the |sin| mean"),
        },
    )


def run_weak_counterexample_global(
    ns: Sequence[int] = (8, 16, 32, 64),
    h: float = 1.0 / 512.0,
    half_width: float = 20.0,
    radii_count: int = 512,
    small_pairing_bound: float = 0.05,
    pairing_floor: float = 0.5,
    decay_n_threshold: int = 32,
    min_nodes_per_period: float = 8.0,
) -> ConvergenceReport:
    """Weighted oscillations on the line: same failure for the global operator.

    u_n = sin(2 pi n x) / (1 + x^2) pairs to zero against the weight
    1 / (1 + x^2), while the maximal field keeps a fixed pairing.  The hull
    is wide enough that the discarded tail of the weight integral is below
    the small-pairing bound.
    """
    _require_increasing(ns, "ns")
    if half_width < 20.0:
        raise ValueError(f"hull half-width must be at least 20, got {half_width}")
    n_nodes = int(round(2 * half_width / h)) + 1
    grid = build_grid(-half_width, h, n_nodes)
    radii = RadiusGrid.linear(h, radii_count)
    w = _inverse_square_weight(grid)
    pair_u, pair_m = [], []
    for n in ns:
        if 1.0 / (n * h) < min_nodes_per_period - 1e-9:
            raise ResolutionError(
                f"{1.0 / (n * h):.1f} nodes per period at n = {n}; "
                f"need at least {min_nodes_per_period}"
            )
        u = sample(sine_weighted(n), grid)
        fld = hl_maximal(u, radii, track_good_radii=False)
        pair_u.append(inner_product(u, w))
        pair_m.append(inner_product(_field_function(fld), w))
    large = [v for n, v in zip(ns, pair_u) if n >= decay_n_threshold]
    checks = [
        _check(
            f"weighted pairing of u_n is small for n >= {decay_n_threshold}",
            all(abs(v) <= small_pairing_bound for v in large),
            observed=large,
            threshold=small_pairing_bound,
        ),
        _check(
            "weighted pairing of the maximal field stays above the floor",
            all(v >= pairing_floor for v in pair_m),
            observed=pair_m,
            threshold=pairing_floor,
        ),
    ]
    tail = float(np.pi / 2 - np.arctan(half_width))
    return ConvergenceReport(
        name="weak-global",
        parameters={"ns": list(ns), "half_width": half_width, "radii_count": radii_count},
        observables={"n": list(map(float, ns)), "pairing_u": pair_u, "pairing_max": pair_m},
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={
            "truncation_tail": _const(tail, "weight integral beyond the hull (arctan tail)"),
            "small_pairing_bound": _const(small_pairing_bound, "config default"),
            "pairing_floor": _const(pairing_floor, "config default"),
        },
    )


def run_translate_sequence(
    ks: Sequence[int] = (2, 4, 8, 10),
    h: float = 0.01,
    half_width: float = 16.0,
    radii_count: int = 1200,
    p: float = 2.0,
    pairing_bound: float = 0.01,
    origin_bound: float = 0.1,
    separation_factor: float = 0.5,
) -> ConvergenceReport:
    """Marching tents: weak convergence to zero without norm collapse.

    Translates u(x - k) of a tent pair to zero against a decaying weight and
    their maximal fields die at the origin, yet the Sobolev norms stay
    constant and distant translates keep the maximal fields far apart in L^2.
    """
    _require_increasing(ks, "ks")
    n_nodes = int(round(2 * half_width / h)) + 1
    grid = build_grid(-half_width, h, n_nodes)
    if max(ks) + 1.0 >= half_width:
        raise ValueError(f"hull half-width {half_width} too small for shift {max(ks)}")
    radii = RadiusGrid.linear(h, radii_count)
    base = sample(tent(0.0, 1.0), grid)
    w = _inverse_square_weight(grid)
    xs = grid.axis_coords(0)
    i0 = int(np.argmin(np.abs(xs)))
    fields = {}
    pair_w, m_at_0, snorms = [], [], []
    for k in ks:
        steps = int(round(k / h))
        if abs(steps * h - k) > 1e-9:
            raise ValueError(f"shift {k} is not a whole number of grid steps")
        uk = translate(base, 0, steps)
        fld = hl_maximal(uk, radii, track_good_radii=False)
        fields[k] = fld
        pair_w.append(inner_product(uk, w))
        m_at_0.append(float(fld.values[i0]))
        snorms.append(sobolev_norm(uk, p))
    base_field = hl_maximal(base, radii, track_good_radii=False)
    base_l2 = lp_norm(_field_function(base_field), 2.0)
    k_lo, k_hi = min(ks), max(k for k in ks if k != max(ks))  # e.g. 2 and 8
    diff = SampledFunction(grid, fields[k_hi].values - fields[k_lo].values)
    separation = lp_norm(diff, 2.0)
    dist_first = [
        lp_norm(SampledFunction(grid, fields[k].values - fields[ks[0]].values), 2.0)
        for k in ks
    ]
    checks = [
        _check(
            "weighted pairings decrease strictly along the sequence",
            all(a > b for a, b in zip(pair_w, pair_w[1:])),
            observed=pair_w,
        ),
        _check(
            f"weighted pairing at the last shift is below {pairing_bound}",
            pair_w[-1] < pairing_bound,
            observed=pair_w[-1],
            threshold=pairing_bound,
        ),
        _check(
            "maximal-field values at the origin decrease strictly",
            all(a > b for a, b in zip(m_at_0, m_at_0[1:])),
            observed=m_at_0,
        ),
        _check(
            f"maximal-field value at the origin ends below {origin_bound}",
            m_at_0[-1] < origin_bound,
            observed=m_at_0[-1],
            threshold=origin_bound,
        ),
        _check(
            "distant translates keep separated maximal fields in L2",
            separation >= separation_factor * base_l2,
            observed=separation,
            threshold=separation_factor * base_l2,
        ),
    ]
    return ConvergenceReport(
        name="translate-sequence",
        parameters={"ks": list(ks), "p": float(p), "half_width": half_width},
        observables={
            "k": list(map(float, ks)),
            "pairing_weight": pair_w,
            "max_at_origin": m_at_0,
            "sobolev_norm": snorms,
            "l2_distance_from_first": dist_first,
        },
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={
            "base_field_l2": _const(base_l2, "L2 norm of the unshifted maximal field"),
            "separation": _const(separation, f"L2 distance between shifts {k_lo} and {k_hi}"),
        },
    )


def run_weak_continuity_demo(
    ns: Sequence[int] = (16, 64, 256),
    h: float = 1.0 / 4096.0,
    half_width: float = 2.0,
    radii_count: int = 512,
    decay_factor: float = 1.5,
    min_nodes_per_period: float = 16.0,
) -> ConvergenceReport:
    """Damped oscillatory perturbations: the maximal fields converge weakly.

    u_n = u + sin(2 pi n x) bump(x) / n converges to u in norm, and the
    pairing of M(u_n) - M(u) against a fixed window shrinks by a definite
    factor every time n quadruples.
    """
    _require_increasing(ns, "ns")
    n_nodes = int(round(2 * half_width / h)) + 1
    grid = build_grid(-half_width, h, n_nodes)
    radii = RadiusGrid.linear(h, radii_count)
    base_ev = tent(0.0, 1.0)
    bump_ev = smooth_bump(0.0, 0.6, 1.0)
    probe = sample(indicator(0.0, 1.0), grid)
    base = sample(base_ev, grid)
    base_field = _field_function(hl_maximal(base, radii, track_good_radii=False))
    deltas = []
    for n in ns:
        if 1.0 / (n * h) < min_nodes_per_period - 1e-9:
            raise ResolutionError(
                f"{1.0 / (n * h):.1f} nodes per period at n = {n}; "
                f"need at least {min_nodes_per_period}"
            )
        a = 1.0 / n

        def ev(*coords, _a=a, _n=n):
            return base_ev(*coords) + _a * np.sin(2.0 * np.pi * _n * coords[0]) * bump_ev(*coords)

        un = sample(ev, grid)
        fld = _field_function(hl_maximal(un, radii, track_good_radii=False))
        diff = SampledFunction(grid, fld.values - base_field.values)
        deltas.append(abs(inner_product(diff, probe)))
    ratios = [a / b if b > 0 else np.inf for a, b in zip(deltas, deltas[1:])]
    checks = [
        _check(
            f"pairing gap shrinks by at least {decay_factor} per n -> 4n step",
            all(r >= decay_factor for r in ratios),
            observed=ratios,
            threshold=decay_factor,
        )
    ]
    return ConvergenceReport(
        name="weak-continuity",
        parameters={"ns": list(ns), "half_width": half_width, "radii_count": radii_count},
        observables={"n": list(map(float, ns)), "pairing_gap": deltas},
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={
            "amplitude_rule": _const(1.0, "perturbation amplitude 1/n"),
            "decay_factor": _const(decay_factor, "config default"),
        },
    )


# ---------------------------------------------------------------------------
# randomized batteries and suite wrappers
# ---------------------------------------------------------------------------


def _battery_params(rng: np.random.Generator, pairs: int) -> list[tuple]:
    out = []
    for _ in range(pairs):
        cf, cg = rng.uniform(-0.3, 0.3, size=2)
        wf, wg = rng.uniform(2.0, 2.6, size=2)
        af, ag = rng.uniform(0.5, 1.5, size=2)
        out.append(((cf, wf, af), (cg, wg, ag)))
    return out


def random_bump_pair(
    grid: UniformGrid, rng: np.random.Generator
) -> tuple[SampledFunction, SampledFunction]:
    """One smooth compactly supported bump pair from the default battery."""
    ((cf, wf, af), (cg, wg, ag)) = _battery_params(rng, 1)[0]
    return (
        sample(smooth_bump(cf, wf, af), grid),
        sample(smooth_bump(cg, wg, ag), grid),
    )


def _battery_grid(h: float, half_width: float) -> UniformGrid:
    return build_grid(-half_width, h, int(round(2 * half_width / h)) + 1)


def gradient_bound_suite(
    pairs: int = 20,
    seed: int = 20080311,
    h: float = 0.01,
    half_width: float = 4.0,
    radii_count: int = 256,
    alpha: float = -1.0,
    refine_pairs: int = 2,
) -> ConvergenceReport:
    """Gradient bound over a randomized bump battery, plus a refinement check.

    Every pair must come in with zero violations at slack 10h, and halving h
    on the leading pairs must not increase the worst raw excess.
    """
    rng = np.random.default_rng(seed)
    params = _battery_params(rng, pairs)
    grid = _battery_grid(h, half_width)
    radii = RadiusGrid.linear(h, radii_count, include_zero=True)
    worsts, violations, boundary = [], [], []
    for (pf, pg) in params:
        f = sample(smooth_bump(*pf), grid)
        g = sample(smooth_bump(*pg), grid)
        rep = check_gradient_bound(f, g, alpha, radii)
        worsts.append(rep.worst_violation)
        violations.append(rep.violation_count)
        boundary.append(rep.boundary_flag_count)
    fine_worsts = []
    grid2 = _battery_grid(h / 2, half_width)
    radii2 = RadiusGrid.linear(h / 2, 2 * radii_count, include_zero=True)
    for (pf, pg) in params[: max(0, refine_pairs)]:
        f = sample(smooth_bump(*pf), grid2)
        g = sample(smooth_bump(*pg), grid2)
        rep2 = check_gradient_bound(f, g, alpha, radii2)
        fine_worsts.append(rep2.worst_violation)
        violations.append(rep2.violation_count)
    checks = [
        _check(
            "no violations at slack 10h across the battery",
            all(v == 0 for v in violations),
            observed=[float(v) for v in violations],
        ),
        _check(
            "halving h does not increase the worst excess",
            all(fw <= cw for fw, cw in zip(fine_worsts, worsts)),
            observed=fine_worsts,
            targets=worsts[: len(fine_worsts)],
        ),
    ]
    return ConvergenceReport(
        name="gradient-bound",
        parameters={
            "pairs": pairs,
            "seed": seed,
            "alpha": alpha,
            "radii_count": radii_count,
            "half_width": half_width,
        },
        observables={
            "pair": list(map(float, range(pairs))),
            "worst_excess": worsts,
            "violations": [float(v) for v in violations[:pairs]],
            "boundary_flags": [float(b) for b in boundary],
        },
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={"tolerance": _const(inequality_tolerance(h), "10h inequality slack")},
    )


def derivative_formula_suite(
    pairs: int = 20,
    seed: int = 20080311,
    h: float = 0.01,
    half_width: float = 4.0,
    radii_count: int = 256,
    alpha: float = -1.0,
    min_singleton_fraction: float = 0.9,
) -> ConvergenceReport:
    """Derivative formula vs centered differences over the same battery."""
    rng = np.random.default_rng(seed)
    params = _battery_params(rng, pairs)
    grid = _battery_grid(h, half_width)
    radii = RadiusGrid.linear(h, radii_count, include_zero=True)
    violations, fractions, worsts, ties = [], [], [], []
    for (pf, pg) in params:
        f = sample(smooth_bump(*pf), grid)
        g = sample(smooth_bump(*pg), grid)
        rep = check_derivative_formula(f, g, alpha, radii)
        violations.append(rep.violation_count)
        fractions.append(rep.constants["singleton_fraction"]["value"])
        worsts.append(rep.worst_violation)
        ties.append(rep.excluded_tie_count)
    checks = [
        _check(
            "formula matches the centered difference within 20h on singleton nodes",
            all(v == 0 for v in violations),
            observed=[float(v) for v in violations],
        ),
        _check(
            f"at least {min_singleton_fraction:.0%} of interior nodes are singleton",
            all(fr >= min_singleton_fraction for fr in fractions),
            observed=fractions,
            threshold=min_singleton_fraction,
        ),
    ]
    return ConvergenceReport(
        name="derivative-formula",
        parameters={
            "pairs": pairs,
            "seed": seed,
            "alpha": alpha,
            "radii_count": radii_count,
            "half_width": half_width,
        },
        observables={
            "pair": list(map(float, range(pairs))),
            "worst_discrepancy": worsts,
            "singleton_fraction": fractions,
            "excluded_ties": [float(t) for t in ties],
        },
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={"tolerance": _const(derivative_tolerance(h), "20h derivative slack")},
    )


def line_bound_suite(
    seed: int = 20080311,
    h: float = 0.01,
    half_width: float = 4.0,
    radii_count: int = 256,
    alpha: float = -1.0,
    spans: int = 200,
) -> ConvergenceReport:
    """Line bound on adjacent interior nodes plus random interior spans."""
    rng = np.random.default_rng(seed)
    grid = _battery_grid(h, half_width)
    radii = RadiusGrid.linear(h, radii_count, include_zero=True)
    f, g = random_bump_pair(grid, rng)
    interior = np.flatnonzero(grid.interior_mask(radii.r_max))
    pairs = [(int(a), int(a + 1)) for a in interior[:-1]]
    for _ in range(spans):
        a, b = sorted(rng.choice(interior, size=2, replace=False))
        if a != b:
            pairs.append((int(a), int(b)))
    rep = check_line_bound(f, g, alpha, radii, pairs)
    checks = [
        _check(
            "no segment violates the trapezoidal bound at slack 10h",
            rep.violation_count == 0,
            observed=float(rep.violation_count),
        )
    ]
    return ConvergenceReport(
        name="line-bound",
        parameters={"segments": len(pairs), "alpha": alpha, "seed": seed},
        observables={"worst_excess": [rep.worst_violation]},
        checks=checks,
        grid_spacing=h,
        grid_counts=grid.counts,
        constants={"tolerance": _const(rep.tolerance, "10h inequality slack")},
    )


SUITES: dict[str, Callable] = {
    "gradient-bound": gradient_bound_suite,
    "derivative-formula": derivative_formula_suite,
    "line-bound": line_bound_suite,
    "decay-bound": check_decay_bound,
    "avg-envelope": check_avg_upper_bound,
    "splitting": check_splitting,
    "ae-sequence": run_ae_counterexample,
    "weak-local": run_weak_counterexample_local,
    "weak-global": run_weak_counterexample_global,
    "translate-sequence": run_translate_sequence,
    "weak-continuity": run_weak_continuity_demo,
}
