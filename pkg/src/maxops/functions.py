"""Catalog of test functions and their construction from config specs.

A spec string is ``kind`` or ``kind:key=value,key=value``, for example
``smooth_bump:center=0.3,radius=2.2,amplitude=1.0``.  Evaluators take one
coordinate array per axis (meshgrid style) and broadcast, so they can be
sampled on 1D and 2D grids alike; radial kinds use the Euclidean distance
to the center.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import SampledFunction, UniformGrid, interpolate, read_function_csv, sample

__all__ = [
    "FunctionSpec",
    "function_from_spec",
    "indicator",
    "tent",
    "smooth_bump",
    "sine",
    "sine_weighted",
    "normalized_indicator",
]


def _radial(center: float, *coords: np.ndarray) -> np.ndarray:
    sq = (coords[0] - center) ** 2
    for c in coords[1:]:
        sq = sq + c**2
    return np.sqrt(sq)


def indicator(center: float = 0.0, radius: float = 1.0):
    """Characteristic function of the closed ball of ``radius`` about center."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def ev(*coords):
        return np.where(_radial(center, *coords) <= radius, 1.0, 0.0)

    return ev


def tent(center: float = 0.0, radius: float = 1.0, amplitude: float = 1.0):
    """Piecewise-linear peak of height ``amplitude`` supported on the ball."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def ev(*coords):
        return amplitude * np.maximum(0.0, 1.0 - _radial(center, *coords) / radius)

    return ev


def smooth_bump(center: float = 0.0, radius: float = 1.0, amplitude: float = 1.0):
    """Compactly supported smooth bump, value ``amplitude`` at the center."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def ev(*coords):
        t = _radial(center, *coords) / radius
        inside = t < 1.0
        tt = np.where(inside, t, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            prof = np.exp(1.0 - 1.0 / (1.0 - tt**2))
        return amplitude * np.where(inside, prof, 0.0)

    return ev


def sine(freq: float = 1.0):
    """sin(2 pi freq x) in the first coordinate."""

    def ev(*coords):
        return np.sin(2.0 * np.pi * freq * coords[0])

    return ev


def sine_weighted(freq: float = 1.0):
    """sin(2 pi freq x) damped by the radial weight 1 / (1 + |x|^2)."""

    def ev(*coords):
        return np.sin(2.0 * np.pi * freq * coords[0]) / (1.0 + _radial(0.0, *coords) ** 2)

    return ev


def normalized_indicator(k: float = 1.0):
    """Indicator of the ball of radius 1/k, scaled to unit integral."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")

    def ev(*coords):
        r = _radial(0.0, *coords)
        dim = len(coords)
        measure = 2.0 / k if dim == 1 else np.pi / (k * k)
        return np.where(r <= 1.0 / k, 1.0 / measure, 0.0)

    return ev


_BUILDERS = {
    "indicator": (indicator, {"center", "radius"}),
    "tent": (tent, {"center", "radius", "amplitude"}),
    "smooth_bump": (smooth_bump, {"center", "radius", "amplitude"}),
    "sine": (sine, {"freq"}),
    "sine_weighted": (sine_weighted, {"freq"}),
    "normalized_indicator": (normalized_indicator, {"k"}),
}

# accepted spellings for parameters in textual specs
_PARAM_ALIASES = {"width": "radius", "frequency": "freq"}


@dataclass(frozen=True)
class FunctionSpec:
    """Parsed description of a catalog function."""

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "FunctionSpec":
        text = text.strip()
        if not text:
            raise ValueError("empty function spec")
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params: dict = {}
        if rest.strip():
            for item in rest.split(","):
                key, sep, val = item.partition("=")
                if not sep:
                    raise ValueError(f"malformed parameter {item!r} in spec {text!r}")
                key, val = key.strip(), val.strip()
                key = _PARAM_ALIASES.get(key, key)
                params[key] = val if key in ("base", "path") else float(val)
        known = set(_BUILDERS) | {"translate", "csv"}
        if kind not in known:
            raise ValueError(f"unknown function kind {kind!r}; expected one of {sorted(known)}")
        return cls(kind, params)

    def evaluator(self):
        """Callable on coordinate arrays; not available for the csv kind."""
        if self.kind == "csv":
            raise ValueError("csv specs are realized from their file, not evaluated")
        if self.kind == "translate":
            params = dict(self.params)
            base = params.pop("base", None)
            shift = float(params.pop("shift", 0.0))
            if base is None:
                raise ValueError("translate spec needs base=<kind>")
            inner = FunctionSpec(str(base), params).evaluator()

            def ev(*coords):
                moved = (coords[0] - shift,) + tuple(coords[1:])
                return inner(*moved)

            return ev
        builder, allowed = _BUILDERS[self.kind]
        bad = set(self.params) - allowed
        if bad:
            raise ValueError(f"unknown parameters {sorted(bad)} for kind {self.kind!r}")
        return builder(**self.params)

    def realize(self, grid: UniformGrid) -> SampledFunction:
        """Sample the described function on a grid (csv data is interpolated if needed)."""
        if self.kind == "csv":
            path = self.params.get("path")
            if not path:
                raise ValueError("csv spec needs path=<file>")
            loaded = read_function_csv(str(path))
            if loaded.grid == grid:
                return loaded
            return sample(_Interpolant(loaded), grid)
        return sample(self.evaluator(), grid)


class _Interpolant:
    """Adapter evaluating a sampled function at arbitrary points."""

    def __init__(self, f: SampledFunction):
        self.f = f

    def __call__(self, *coords):
        pts = np.stack([np.asarray(c, dtype=float).ravel() for c in coords], axis=-1)
        vals = np.array([interpolate(self.f, p) for p in pts])
        return vals.reshape(np.asarray(coords[0]).shape)


def function_from_spec(text: str, grid: UniformGrid) -> SampledFunction:
    return FunctionSpec.parse(text).realize(grid)
