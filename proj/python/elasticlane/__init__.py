"""Elastic lane maps: lane encoding, interaction energy, evolution and metrics."""

from ._core import (
    CapacityExceeded,
    DegenerateLane,
    DetectionMetrics,
    DivergenceError,
    Error,
    InvalidArgument,
    Lane,
    NonHermitianSpectrum,
    ParseError,
    ShapeMismatch,
    Trace,
    TuSimpleMetrics,
    __version__,
    decode_lane,
    descent_direction,
    dft_forward,
    difference_field,
    eie_energy,
    eie_gradient,
    encode_lane,
    energy_breakdown,
    evolve_explicit,
    evolve_implicit,
    exact_gradient_scale,
    frequency_kernel,
    heaviside,
    lane_iou,
    match_and_score,
    mse_energy,
    parse_culane_lines,
    stable_step_size,
    tusimple_score,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
