"""Acceptance battery: the headline guarantees, one verdict line each.

Each method covers one numbered criterion at its stated tolerance and prints
a single ``[criterion NN] ...: pass`` line (visible with ``-s``; the method
name carries the same number under ``-v``).  Randomized pieces use fixed
seeds, so reruns are directly comparable.  The full file takes on the order
of a minute; the timing check in criterion 10 dominates.
"""

import time

import numpy as np

from maxops.cli import main
from maxops.grid import SampledFunction, build_grid
from maxops.maximal import RadiusGrid, bilinear_maximal, hl_maximal, local_maximal
from maxops.sobolev import translate
from maxops.verify import (
    check_decay_bound,
    derivative_formula_suite,
    derivative_tolerance,
    gradient_bound_suite,
    inequality_tolerance,
    run_ae_counterexample,
    run_translate_sequence,
    run_weak_continuity_demo,
    run_weak_counterexample_global,
    run_weak_counterexample_local,
)


def _expect(failures: list, condition: bool, label: str) -> None:
    if not condition:
        failures.append(label)


def _verdict(num: int, label: str, failures: list) -> None:
    status = "pass" if not failures else "FAIL"
    print(f"[criterion {num:02d}] {label}: {status}")
    assert not failures, f"criterion {num:02d} ({label}): " + "; ".join(failures)


class TestAcceptance:
    def test_criterion_01_gradient_bound_battery(self):
        h = 0.01
        rep = gradient_bound_suite(
            pairs=20, h=h, half_width=4.0, radii_count=256, alpha=-1.0
        )
        fails = []
        _expect(fails, rep.parameters["pairs"] == 20, "battery runs 20 bump pairs")
        _expect(
            fails,
            rep.constants["tolerance"]["value"] == inequality_tolerance(h) == 10 * h,
            "inequality slack is 10h",
        )
        _expect(
            fails,
            all(v == 0.0 for v in rep.observables["violations"]),
            "zero violations on every pair at slack 10h",
        )
        refine = rep.checks[1]
        _expect(
            fails,
            refine["passed"]
            and len(refine["observed"]) >= 1
            and all(o <= t for o, t in zip(refine["observed"], refine["targets"])),
            "halving h does not increase the worst excess",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(1, "pointwise gradient bound on the random bump battery", fails)

    def test_criterion_02_derivative_formula_battery(self):
        h = 0.01
        rep = derivative_formula_suite(
            pairs=20, h=h, half_width=4.0, radii_count=256, alpha=-1.0
        )
        fails = []
        _expect(
            fails,
            rep.constants["tolerance"]["value"] == derivative_tolerance(h) == 20 * h,
            "derivative slack is 20h",
        )
        _expect(
            fails,
            all(w <= 20 * h for w in rep.observables["worst_discrepancy"]),
            "formula matches the centered difference within 20h",
        )
        _expect(
            fails,
            all(fr >= 0.9 for fr in rep.observables["singleton_fraction"]),
            "at least 90% of interior nodes have a singleton good-radius set",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(2, "derivative formula on singleton good-radius nodes", fails)

    def test_criterion_03_decay_bound(self):
        rep = check_decay_bound()
        h = rep.grid_spacing
        xs = np.abs(np.asarray(rep.coords, dtype=float).reshape(-1))
        fails = []
        _expect(
            fails,
            rep.tolerance == 0.0 and rep.violation_count == 0,
            "mass-based floor holds with zero slack",
        )
        _expect(
            fails,
            bool(np.all(rep.rhs >= 0.5 / xs)),
            "field value is at least 1/(2|x|) at every probe node in [1, 4]",
        )
        _expect(
            fails,
            abs(rep.constants["value_at_2"]["value"] - 1.0 / 3.0) <= 5 * h,
            "field value at x = 2 equals 1/3 within 5h",
        )
        # at the support edge x = 1 the smallest window keeps the discrete
        # two-thirds average, so the closed-form band starts strictly above it
        _expect(
            fails,
            rep.constants["closed_form_max_err"]["value"] <= 5 * h,
            "field tracks 1/(1+|x|) within 5h above the support edge",
        )
        _verdict(3, "decay floor and closed form for the unit indicator", fails)

    def test_criterion_04_vanishing_sequence_keeps_maxima(self):
        rep = run_ae_counterexample(ks=(1, 2, 4, 8, 16))
        h = rep.grid_spacing
        fails = []
        _expect(
            fails,
            all(v == 0.0 for v in rep.observables["u_at_probe"]),
            "every u_k vanishes at the probe",
        )
        _expect(
            fails,
            all(m >= 0.125 for m in rep.observables["max_at_probe"]),
            "every maximal value at the probe stays above 1/8",
        )
        _expect(
            fails,
            abs(rep.observables["max_at_probe"][0] - 1.0 / 6.0) <= 5 * h,
            "the k = 1 maximal value at the probe equals 1/6 within 5h",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(4, "shrinking normalized indicators at a fixed probe", fails)

    def test_criterion_05_weak_limit_local_operator(self):
        rep = run_weak_counterexample_local(ns=(4, 8, 16, 32), fixed_radius=0.25)
        h = rep.grid_spacing
        fails = []
        _expect(fails, h == 1.0 / 1024.0, "grid spacing is 1/1024")
        _expect(
            fails,
            all(abs(v) <= 2 * h for v in rep.observables["pairing_u"]),
            "oscillations pair with 1 below 2h",
        )
        _expect(
            fails,
            all(v >= 0.6 for v in rep.observables["pairing_max"]),
            "local maximal fields pair with 1 above 0.6",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(5, "bounded-domain oscillations under the local operator", fails)

    def test_criterion_06_weak_limit_global_operator(self):
        rep = run_weak_counterexample_global(ns=(8, 16, 32, 64))
        fails = []
        _expect(
            fails,
            rep.parameters["half_width"] == 20.0 and rep.grid_spacing == 1.0 / 512.0,
            "hull is [-20, 20] at spacing 1/512",
        )
        small = [
            abs(v)
            for n, v in zip(rep.observables["n"], rep.observables["pairing_u"])
            if n >= 32
        ]
        _expect(
            fails,
            small and all(v <= 0.05 for v in small),
            "weighted pairings fall below 0.05 from n = 32 on",
        )
        _expect(
            fails,
            all(v >= 0.5 for v in rep.observables["pairing_max"]),
            "weighted pairings of the maximal fields stay above 0.5",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(6, "weighted oscillations under the global operator", fails)

    def test_criterion_07_marching_translates(self):
        rep = run_translate_sequence(ks=(2, 4, 8, 10))
        pair_w = rep.observables["pairing_weight"]
        m_at_0 = rep.observables["max_at_origin"]
        fails = []
        _expect(
            fails,
            all(a > b for a, b in zip(pair_w, pair_w[1:])) and pair_w[-1] < 0.01,
            "weighted pairings decrease strictly and end below 0.01",
        )
        _expect(
            fails,
            all(a > b for a, b in zip(m_at_0, m_at_0[1:])) and m_at_0[-1] < 0.1,
            "maximal values at the origin decrease strictly and end below 0.1",
        )
        _expect(
            fails,
            rep.constants["separation"]["value"]
            >= 0.5 * rep.constants["base_field_l2"]["value"],
            "fields of the shifts 2 and 8 stay at least half the base L2 norm apart",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(7, "translated tents: weak decay without norm collapse", fails)

    def test_criterion_08_weak_continuity_rate(self):
        rep = run_weak_continuity_demo(ns=(16, 64, 256))
        gaps = rep.observables["pairing_gap"]
        ratios = [a / b for a, b in zip(gaps, gaps[1:]) if b > 0]
        fails = []
        _expect(fails, len(gaps) == 3, "three perturbation levels n, 4n, 16n")
        _expect(
            fails,
            len(ratios) == 2 and all(r >= 1.5 for r in ratios),
            "pairing gap shrinks by a factor of at least 1.5 per step",
        )
        _expect(fails, rep.passed, "suite verdict")
        _verdict(8, "weak continuity of the field map under damped wiggles", fails)

    def test_criterion_09_operator_algebra(self):
        draws = 100
        g1 = build_grid(-2.0, 0.05, 81)
        r1 = RadiusGrid.linear(0.05, 20)
        g2 = build_grid((-1.0, -1.0), 0.05, (41, 41))
        r2 = RadiusGrid.linear(0.05, 8)

        def pick(i):
            # every fifth draw exercises the two-dimensional operators
            return (g2, r2) if i % 5 == 4 else (g1, r1)

        def noise(rng, grid):
            return SampledFunction(grid, rng.standard_normal(grid.shape))

        def homogeneity():
            rng = np.random.default_rng(901)
            for i in range(draws):
                grid, radii = pick(i)
                f = noise(rng, grid)
                c = float(rng.uniform(-5.0, 5.0))
                lhs = hl_maximal(
                    f.with_values(c * f.values), radii, track_good_radii=False
                ).values
                rhs = abs(c) * hl_maximal(f, radii, track_good_radii=False).values
                if np.max(np.abs(lhs - rhs)) > 1e-12 * max(1.0, float(np.max(rhs))):
                    return False
            return True

        def monotonicity():
            rng = np.random.default_rng(902)
            for i in range(draws):
                grid, radii = pick(i)
                f = noise(rng, grid)
                bigger = f.with_values(
                    np.abs(f.values) + rng.uniform(0.0, 1.0, grid.shape)
                )
                mf = hl_maximal(f, radii, track_good_radii=False).values
                mg = hl_maximal(bigger, radii, track_good_radii=False).values
                if not np.all(mf <= mg + 1e-12 * max(1.0, float(np.max(mg)))):
                    return False
            return True

        def sublinearity():
            rng = np.random.default_rng(903)
            for i in range(draws):
                grid, radii = pick(i)
                f, g = noise(rng, grid), noise(rng, grid)
                m_sum = hl_maximal(
                    f.with_values(f.values + g.values), radii, track_good_radii=False
                ).values
                bound = (
                    hl_maximal(f, radii, track_good_radii=False).values
                    + hl_maximal(g, radii, track_good_radii=False).values
                )
                if not np.all(m_sum <= bound + 1e-12 * max(1.0, float(np.max(bound)))):
                    return False
            return True

        def equivariance():
            rng = np.random.default_rng(904)
            reach = int(round(r1.r_max / 0.05))
            for _ in range(draws):
                vals = np.zeros(81)
                vals[30:51] = rng.standard_normal(21)
                f = SampledFunction(g1, vals)
                m = int(rng.integers(1, 6))
                mf = hl_maximal(f, r1, track_good_radii=False).values
                mt = hl_maximal(translate(f, 0, m), r1, track_good_radii=False).values
                lo, hi = reach + m, 81 - reach
                if np.max(np.abs(mt[lo:hi] - mf[lo - m : hi - m])) > 1e-12:
                    return False
            return True

        def local_below_global():
            rng = np.random.default_rng(905)
            for i in range(draws):
                grid, radii = pick(i)
                radii = RadiusGrid.linear(0.05, radii.positive.size, include_zero=True)
                f = noise(rng, grid)
                mask = rng.uniform(size=grid.shape) < 0.7
                mask.flat[mask.size // 2] = True
                loc = local_maximal(f, mask, radii, track_good_radii=False).values
                glob = hl_maximal(f, radii, track_good_radii=False).values
                if not np.all(loc <= glob + 1e-12 * max(1.0, float(np.max(glob)))):
                    return False
            return True

        def reflection_symmetry():
            rng = np.random.default_rng(906)
            radii = RadiusGrid.linear(0.05, 12)
            for _ in range(draws):
                f, g = noise(rng, g1), noise(rng, g1)
                fg = bilinear_maximal(f, g, -1.0, radii, track_good_radii=False).values
                gf = bilinear_maximal(g, f, -1.0, radii, track_good_radii=False).values
                if np.max(np.abs(fg - gf)) > 1e-12 * max(1.0, float(np.max(fg))):
                    return False
            return True

        fails = []
        _expect(fails, homogeneity(), "absolute homogeneity")
        _expect(fails, monotonicity(), "monotonicity in |f|")
        _expect(fails, sublinearity(), "sublinearity")
        _expect(fails, equivariance(), "translation equivariance")
        _expect(fails, local_below_global(), "local field below the global field")
        _expect(fails, reflection_symmetry(), "argument swap under alpha = -1")
        _verdict(9, "operator algebra over 100 random inputs per property", fails)

    def test_criterion_10_fast_path_equivalence_and_speed(self):
        rng = np.random.default_rng(1001)
        worst = 0.0
        for i in range(50):
            if i % 5 == 4:
                n = int(rng.integers(24, 49))
                m = int(rng.integers(24, 49))
                grid = build_grid((0.0, 0.0), 0.03, (n, m))
                radii = RadiusGrid.linear(0.03, int(rng.integers(4, 10)))
            else:
                grid = build_grid(0.0, 0.01, int(rng.integers(64, 513)))
                radii = RadiusGrid.linear(0.01, int(rng.integers(8, 65)))
            f = SampledFunction(grid, rng.standard_normal(grid.shape))
            fast = hl_maximal(f, radii, track_good_radii=False, method="prefix").values
            naive = hl_maximal(f, radii, track_good_radii=False, method="naive").values
            worst = max(worst, float(np.max(np.abs(fast - naive))))
        fails = []
        _expect(
            fails,
            worst <= 1e-10,
            f"prefix and naive fields agree within 1e-10 on 50 inputs (worst {worst:.3e})",
        )

        n = 2**20
        grid = build_grid(0.0, 0.001, n)
        f = SampledFunction(grid, rng.standard_normal(n))
        radii = RadiusGrid.linear(0.001, 256)
        t0 = time.perf_counter()
        fast = hl_maximal(f, radii, track_good_radii=False, method="prefix")
        t_fast = time.perf_counter() - t0
        t0 = time.perf_counter()
        naive = hl_maximal(f, radii, track_good_radii=False, method="naive")
        t_naive = time.perf_counter() - t0
        speedup = t_naive / t_fast if t_fast > 0 else float("inf")
        big_diff = float(np.max(np.abs(fast.values - naive.values)))
        _expect(fails, big_diff <= 1e-10, f"paths agree at n = 2**20 (diff {big_diff:.3e})")
        _expect(
            fails,
            speedup >= 10.0,
            f"prefix path is {speedup:.1f}x faster at n = 2**20, 256 radii (needs 10x)",
        )
        _verdict(10, "prefix streaming equivalence and speed", fails)

    def test_criterion_11_byte_identical_reports(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "suites = decay-bound,splitting,ae-sequence,weak-local,line-bound\n"
            "per_point = true\n"
            "plots = false\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        argv = ["verify", "--config", str(cfg), "--out", str(out)]
        codes, blobs = [], []
        for extra in ([], [], ["--threads", "4"]):
            codes.append(main(argv + extra))
            blobs.append((out / "verify.json").read_bytes())
        fails = []
        _expect(fails, all(c == 0 for c in codes), "every verify run passes")
        _expect(fails, b'"per_point"' in blobs[0], "reports embed per-node payloads")
        _expect(
            fails,
            blobs[1] == blobs[0] and blobs[2] == blobs[0],
            "verify.json is byte-identical across repeats and thread counts",
        )
        _verdict(11, "deterministic reports for identical configurations", fails)
