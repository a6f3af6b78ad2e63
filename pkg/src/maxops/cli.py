"""Command-line front end: config ingestion, suite orchestration, artifacts.

Configuration is a flat key=value file plus command-line overrides.  All
delimited and JSON artifacts are deterministic for a fixed config: floats
carry 17 significant digits, keys keep a fixed order, and no timestamps or
host details are embedded.  Figures are rendered next to the delimited
outputs unless plots are disabled.

Exit codes: 0 all checks pass, 1 violations or benchmark mismatch,
2 grid too coarse for a requested construction, 64 usage or config errors.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, fields as dc_fields
from pathlib import Path

import numpy as np

from . import plots
from .functions import FunctionSpec, function_from_spec
from .grid import SampledFunction, UniformGrid, build_grid, format_float
from .maximal import RadiusGrid, bilinear_maximal, hl_maximal, local_maximal, write_field_csv
from .verify import SUITES, ResolutionError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_RESOLUTION = 2
EXIT_USAGE = 64

REPRO_IDS = ("example-5-1", "example-6-local", "example-6-global", "theorem-9", "noncompact")

BENCH_DIFF_TOL = 1e-10


class UsageError(ValueError):
    """Bad command line or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise UsageError(message)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Resolved run configuration; ``explicit`` records user-set keys."""

    dim: int = 1
    origin: tuple = (-4.0,)
    h: float = 0.01
    counts: tuple = (801,)
    radii_max: float | None = None
    radii_count: int = 256
    include_zero: bool = True
    p: float = 2.0
    q: float = 2.0
    alpha: float = -1.0
    seed: int = 20080311
    pairs: int = 20
    suites: tuple | None = None
    operator: str = "hl"
    f: str = "smooth_bump:center=0,width=2"
    g: str = "smooth_bump:center=0.2,width=2.2"
    domain_half_width: float | None = None
    bench_sizes: tuple = (4096, 16384)
    out: str = "."
    per_point: bool = False
    plots: bool = True
    threads: int = 1
    explicit: set = dc_field(default_factory=set)

    @property
    def derived_r(self) -> float:
        return self.p * self.q / (self.p + self.q)

    def validate(self) -> None:
        if self.dim not in (1, 2):
            raise UsageError(f"dim must be 1 or 2, got {self.dim}")
        if len(self.origin) != self.dim or len(self.counts) != self.dim:
            raise UsageError(
                f"origin and counts need {self.dim} entries, got "
                f"{len(self.origin)} and {len(self.counts)}"
            )
        if self.h <= 0:
            raise UsageError(f"spacing h must be positive, got {self.h}")
        if any(c < 2 for c in self.counts):
            raise UsageError(f"every axis needs at least 2 nodes, got {self.counts}")
        if self.p <= 1.0:
            raise UsageError(f"exponent p must exceed 1, got {self.p}")
        if self.q <= 1.0:
            raise UsageError(f"exponent q must exceed 1, got {self.q}")
        r = self.derived_r
        if self.dim == 1 and r < 1.0 - 1e-12:
            raise UsageError(
                f"derived exponent r = pq/(p+q) = {r:g} must be at least 1 "
                f"in one dimension"
            )
        if self.dim == 2 and r <= 1.0:
            raise UsageError(
                f"derived exponent r = pq/(p+q) = {r:g} must exceed 1 "
                f"in two dimensions"
            )
        if self.radii_count < 1:
            raise UsageError(f"radii_count must be positive, got {self.radii_count}")
        if self.radii_max is not None and self.radii_max <= 0:
            raise UsageError(f"radii_max must be positive, got {self.radii_max}")
        if self.pairs < 1:
            raise UsageError(f"pairs must be positive, got {self.pairs}")
        if self.threads < 1:
            raise UsageError(f"threads must be positive, got {self.threads}")
        if self.operator not in ("hl", "local", "bilinear"):
            raise UsageError(f"operator must be hl, local or bilinear, got {self.operator!r}")
        if self.suites is not None:
            unknown = [s for s in self.suites if s not in SUITES]
            if unknown:
                raise UsageError(
                    f"unknown suites {unknown}; available: {', '.join(SUITES)}"
                )
        if any(n < 2 for n in self.bench_sizes):
            raise UsageError(f"bench sizes must be at least 2, got {self.bench_sizes}")
        try:
            FunctionSpec.parse(self.f)
            FunctionSpec.parse(self.g)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def build_grid(self) -> UniformGrid:
        return build_grid(self.origin, self.h, self.counts)

    def radius_grid(self) -> RadiusGrid:
        count = self.radii_count
        if self.radii_max is not None:
            count = max(1, int(round(self.radii_max / self.h)))
        return RadiusGrid.linear(self.h, count, include_zero=self.include_zero)

    def selected_suites(self) -> list:
        if self.suites is None:
            return list(SUITES)
        chosen = set(self.suites)
        return [name for name in SUITES if name in chosen]

    def echo(self) -> dict:
        out = {}
        for f_ in dc_fields(self):
            if f_.name in ("explicit", "threads"):
                continue  # thread count must not influence report bytes
            v = getattr(self, f_.name)
            if isinstance(v, tuple):
                v = list(v)
            elif isinstance(v, set):
                v = sorted(v)
            out[f_.name] = v
        out["derived_r"] = self.derived_r
        return out


def _parse_bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key} expects a boolean, got {text!r}")


def _parse_floats(text: str, key: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise UsageError(f"config key {key} expects comma-separated reals, got {text!r}") from exc


def _parse_ints(text: str, key: str) -> tuple:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise UsageError(f"config key {key} expects comma-separated integers, got {text!r}") from exc


def _parse_suites(text: str) -> tuple | None:
    stripped = text.strip()
    if stripped.lower() == "all":
        return None
    return tuple(tok.strip() for tok in stripped.split(",") if tok.strip())


def _read_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        entries[key.strip()] = value.strip()
    return entries


_SCALAR_PARSERS = {
    "dim": lambda v, k: int(v),
    "h": lambda v, k: float(v),
    "radii_max": lambda v, k: float(v),
    "radii_count": lambda v, k: int(v),
    "include_zero": _parse_bool,
    "p": lambda v, k: float(v),
    "q": lambda v, k: float(v),
    "alpha": lambda v, k: float(v),
    "seed": lambda v, k: int(v),
    "pairs": lambda v, k: int(v),
    "operator": lambda v, k: str(v),
    "f": lambda v, k: str(v),
    "g": lambda v, k: str(v),
    "domain_half_width": lambda v, k: float(v),
    "out": lambda v, k: str(v),
    "per_point": _parse_bool,
    "plots": _parse_bool,
    "threads": lambda v, k: int(v),
}


def _apply_config_entry(cfg: RunConfig, key: str, raw: str) -> None:
    if key == "origin":
        cfg.origin = _parse_floats(raw, key)
    elif key == "counts":
        cfg.counts = _parse_ints(raw, key)
    elif key == "bench_sizes":
        cfg.bench_sizes = _parse_ints(raw, key)
    elif key == "suites":
        cfg.suites = _parse_suites(raw)
    elif key in _SCALAR_PARSERS:
        try:
            setattr(cfg, key, _SCALAR_PARSERS[key](raw, key))
        except ValueError as exc:
            raise UsageError(f"config key {key}: {exc}") from exc
    else:
        raise UsageError(f"unknown config key {key!r}")
    cfg.explicit.add(key)


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            _apply_config_entry(cfg, key, raw)
    overrides = {
        "out": getattr(args, "out", None),
        "h": getattr(args, "h", None),
        "radii_max": getattr(args, "radii_max", None),
        "radii_count": getattr(args, "radii_count", None),
        "alpha": getattr(args, "alpha", None),
        "p": getattr(args, "p", None),
        "q": getattr(args, "q", None),
        "seed": getattr(args, "seed", None),
        "threads": getattr(args, "threads", None),
        "pairs": getattr(args, "pairs", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
            cfg.explicit.add(key)
    if getattr(args, "suite", None):
        cfg.suites = tuple(args.suite)
        cfg.explicit.add("suites")
    if getattr(args, "per_point", False):
        cfg.per_point = True
        cfg.explicit.add("per_point")
    if getattr(args, "no_plots", False):
        cfg.plots = False
        cfg.explicit.add("plots")
    if getattr(args, "sizes", None):
        cfg.bench_sizes = _parse_ints(args.sizes, "bench_sizes")
        cfg.explicit.add("bench_sizes")
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isnan(v):
            return '"nan"'
        if np.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return format_float(v)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=True)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_json(value, indent: int = 0) -> str:
    """Render JSON with 17-significant-digit floats and stable key order."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k), ensure_ascii=True)}: {dumps_json(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        parts = [f"{inner}{dumps_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _json_scalar(value)


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def _write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_compute(cfg: RunConfig) -> int:
    grid = cfg.build_grid()
    radii = cfg.radius_grid()
    f = function_from_spec(cfg.f, grid)
    if cfg.operator == "hl":
        field = hl_maximal(f, radii)
    elif cfg.operator == "local":
        if cfg.domain_half_width is None:
            raise UsageError("operator=local needs domain_half_width in the config")
        coords = grid.nodes().reshape(grid.shape + (grid.dim,))
        mask = (coords**2).sum(axis=-1) < cfg.domain_half_width**2
        field = local_maximal(f, mask, radii)
    else:
        if cfg.alpha == 1.0:
            raise UsageError("alpha = 1 collapses both arguments to the same point")
        g = function_from_spec(cfg.g, grid)
        field = bilinear_maximal(f, g, cfg.alpha, radii)
    out = _out_dir(cfg)
    csv_path = out / f"{cfg.operator}_field.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        write_field_csv(field, fh)
    print(f"wrote {csv_path}")
    if cfg.plots:
        png = plots.save_field_plot(field, out / f"{cfg.operator}_field.png", cfg.operator)
        print(f"wrote {png}")
    flagged = int(np.count_nonzero(field.boundary_hits))
    print(f"nodes: {int(np.prod(grid.counts))}  radii: {radii.values.size}")
    print(f"max value: {format_float(float(field.values.max()))}")
    print(f"radius-grid-capped maxima: {flagged}")
    return EXIT_OK


def _suite_kwargs(cfg: RunConfig, fn) -> dict:
    overrides = {}
    for key in ("h", "radii_count", "alpha", "seed", "p", "pairs"):
        if key in cfg.explicit:
            overrides[key] = getattr(cfg, key)
    accepted = inspect.signature(fn).parameters
    return {k: v for k, v in overrides.items() if k in accepted}


def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.selected_suites()
    results = {}
    if cfg.threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            futures = {name: pool.submit(SUITES[name], **_suite_kwargs(cfg, SUITES[name])) for name in names}
        # collect in fixed suite order so failures surface deterministically
        results = {name: futures[name].result() for name in names}
    else:
        for name in names:
            results[name] = SUITES[name](**_suite_kwargs(cfg, SUITES[name]))
    reports = [results[name] for name in names]
    failures = [r.name for r in reports if not r.passed]
    doc = {
        "command": "verify",
        "config": cfg.echo(),
        "reports": [r.to_dict(per_point=cfg.per_point) for r in reports],
        "summary": {
            "suites": len(reports),
            "failures": len(failures),
            "verdict": "pass" if not failures else "fail",
        },
    }
    out = _out_dir(cfg)
    json_path = out / "verify.json"
    json_path.write_text(dumps_json(doc) + "\n", encoding="utf-8", newline="\n")
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(f"{rep.name}: {status}")
        if cfg.plots:
            plots.save_report_plot(rep, out / f"verify_{rep.name}.png")
    print(f"wrote {json_path}")
    print(f"verdict: {doc['summary']['verdict']} ({len(reports) - len(failures)}/{len(reports)} suites)")
    return EXIT_OK if not failures else EXIT_VIOLATION


def cmd_bench(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    radii = RadiusGrid.linear(cfg.h, cfg.radii_count)
    rows = []
    worst = 0.0
    for n in cfg.bench_sizes:
        grid = build_grid(0.0, cfg.h, n)
        f = SampledFunction(grid, rng.standard_normal(n))
        t0 = time.perf_counter()
        fast = hl_maximal(f, radii, track_good_radii=False, method="prefix")
        t_fast = time.perf_counter() - t0
        t0 = time.perf_counter()
        naive = hl_maximal(f, radii, track_good_radii=False, method="naive")
        t_naive = time.perf_counter() - t0
        diff = float(np.max(np.abs(fast.values - naive.values)))
        worst = max(worst, diff)
        rows.append((n, cfg.radii_count, t_naive, t_fast, diff))
        speedup = t_naive / t_fast if t_fast > 0 else float("inf")
        print(
            f"n={n} j={cfg.radii_count} t_naive={t_naive:.4f}s t_fast={t_fast:.4f}s "
            f"speedup={speedup:.1f}x max_abs_diff={diff:.3e}"
        )
    out = _out_dir(cfg)
    csv_path = out / "bench.csv"
    _write_csv(csv_path, ["n", "j", "t_naive", "t_fast", "max_abs_diff"], rows)
    print(f"wrote {csv_path}")
    if worst > BENCH_DIFF_TOL:
        print(f"FAIL: paths disagree by {worst:.3e} > {BENCH_DIFF_TOL:.0e}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _repro_table(example_id: str, report) -> tuple:
    obs = report.observables
    if example_id == "example-5-1":
        floor = [0.125] * len(obs["k"])
        return (
            ["k", "u_at_probe", "max_at_probe", "floor"],
            list(zip(obs["k"], obs["u_at_probe"], obs["max_at_probe"], floor)),
        )
    if example_id == "example-6-local":
        floor = [2.0 / np.pi] * len(obs["n"])
        return (
            ["n", "pairing_u", "pairing_max", "floor"],
            list(zip(obs["n"], obs["pairing_u"], obs["pairing_max"], floor)),
        )
    if example_id == "example-6-global":
        floor = [report.constants["pairing_floor"]["value"]] * len(obs["n"])
        return (
            ["n", "pairing_u", "pairing_max", "floor"],
            list(zip(obs["n"], obs["pairing_u"], obs["pairing_max"], floor)),
        )
    if example_id == "theorem-9":
        return (
            ["k", "pairing_weight", "max_at_origin", "sobolev_norm"],
            list(zip(obs["k"], obs["pairing_weight"], obs["max_at_origin"], obs["sobolev_norm"])),
        )
    # noncompact
    ref = [report.constants["base_field_l2"]["value"]] * len(obs["k"])
    return (
        ["k", "l2_distance_from_first", "base_field_l2"],
        list(zip(obs["k"], obs["l2_distance_from_first"], ref)),
    )


_REPRO_SUITE = {
    "example-5-1": "ae-sequence",
    "example-6-local": "weak-local",
    "example-6-global": "weak-global",
    "theorem-9": "translate-sequence",
    "noncompact": "translate-sequence",
}


def cmd_repro(cfg: RunConfig, example_id: str) -> int:
    suite = SUITES[_REPRO_SUITE[example_id]]
    report = suite(**_suite_kwargs(cfg, suite))
    header, rows = _repro_table(example_id, report)
    out = _out_dir(cfg)
    csv_path = out / f"{example_id}.csv"
    _write_csv(csv_path, header, rows)
    print(f"wrote {csv_path}")
    if cfg.plots:
        png = plots.save_report_plot(report, out / f"{example_id}.png")
        print(f"wrote {png}")
    for check in report.checks:
        print(f"  {check['claim']}: {'pass' if check['passed'] else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value configuration file")
    sub.add_argument("--out", help="output directory (default current directory)")
    sub.add_argument("--h", type=float, help="grid spacing override")
    sub.add_argument("--radii-max", type=float, dest="radii_max", help="largest radius")
    sub.add_argument("--radii-count", type=int, dest="radii_count", help="number of radii")
    sub.add_argument("--alpha", type=float, help="bilinear dilation parameter")
    sub.add_argument("--p", type=float, help="first exponent")
    sub.add_argument("--q", type=float, help="second exponent")
    sub.add_argument("--seed", type=int, help="seed for randomized batteries")
    sub.add_argument("--threads", type=int, help="worker threads for suite runs")
    sub.add_argument("--no-plots", action="store_true", dest="no_plots", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maxops", description="discrete maximal-operator toolkit")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = subs.add_parser("compute", help="evaluate a maximal field and write it as CSV")
    _add_common(sc)

    sv = subs.add_parser("verify", help="run verification suites and write a JSON report")
    _add_common(sv)
    sv.add_argument("--suite", action="append", help="suite name (repeatable)")
    sv.add_argument("--pairs", type=int, help="battery size for randomized suites")
    sv.add_argument("--per-point", action="store_true", dest="per_point", help="embed per-node margins")

    sb = subs.add_parser("bench", help="time the naive and prefix averaging paths")
    _add_common(sb)
    sb.add_argument("--sizes", help="comma-separated node counts")

    sr = subs.add_parser("repro", help="rebuild a canned observable table")
    _add_common(sr)
    sr.add_argument("--id", required=True, choices=REPRO_IDS, help="table identifier")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = build_config(args)
        if args.command == "compute":
            return cmd_compute(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        return cmd_repro(cfg, args.id)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
