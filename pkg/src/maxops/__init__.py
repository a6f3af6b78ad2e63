"""Discrete maximal operators on uniform grids, with verification suites."""

from .grid import (
    PrefixTable,
    SampledFunction,
    SamplingError,
    UniformGrid,
    build_grid,
    interpolate,
    interval_sum,
    prefix_table,
    read_function_csv,
    sample,
    write_function_csv,
)
from .maximal import (
    DEFAULT_GOOD_TOL,
    MaximalField,
    RadiusGrid,
    ball_average,
    bilinear_average,
    bilinear_maximal,
    boundary_distance,
    good_radii,
    hl_maximal,
    holder_envelope,
    local_maximal,
    write_field_csv,
)
from .sobolev import (
    VectorField,
    diff_quotient,
    dilate,
    gradient,
    hausdorff_distance,
    inner_product,
    lp_norm,
    set_distance,
    sobolev_norm,
    translate,
    write_vector_csv,
)

__version__ = "0.1.0"
