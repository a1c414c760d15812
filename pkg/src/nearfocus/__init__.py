"""Near-field spot beamfocusing: simulation, metrics, security maps, and
CSI-free adaptive optimization for planar arrays in the Fresnel zone."""
from __future__ import annotations

from .adaptive import (
    AdaptiveRun,
    PowerFeedback,
    SubArrayPartition,
    exhaustive_max,
    measure_power,
    partition,
    phase_grid,
    quantized_mrt_power,
    run_sbf,
    synchronize,
)
from .beamforming import BeamWeights, mrt_weights, multi_focal_weights, quantize_phases
from .channel import (
    FieldRegions,
    SteeringVector,
    correlation,
    field_regions,
    fraunhofer_distance,
    orthogonality_profile,
    steering_vector,
)
from .errors import (
    CalibrationDiverged,
    DuplicateFocalPoint,
    GridTooSmall,
    IndivisibleTiling,
    LengthMismatch,
    MultiplePeaks,
    NearfocusError,
    NoCrossing,
    PointOnAperture,
    ScenarioError,
    ShapeMismatch,
    WindowWarning,
)
from .fieldmap import FieldMap, evaluate_field, find_focal_peaks
from .geometry import Point3, SamplingGrid, UniformPlanarArray, element_positions
from .metrics import (
    SpotMetrics,
    bfr,
    hpbw,
    line_profile,
    size_tradeoff,
    spacing_tradeoff,
    spot_metrics,
)
from .security import (
    SecurityMap,
    SecurityScenario,
    calibrate_power,
    secure_boundary,
    security_map,
    sinr_at,
)

__version__ = "1.0.0"

__all__ = [
    "AdaptiveRun",
    "BeamWeights",
    "CalibrationDiverged",
    "DuplicateFocalPoint",
    "FieldMap",
    "FieldRegions",
    "GridTooSmall",
    "IndivisibleTiling",
    "LengthMismatch",
    "MultiplePeaks",
    "NearfocusError",
    "NoCrossing",
    "Point3",
    "PointOnAperture",
    "PowerFeedback",
    "SamplingGrid",
    "ScenarioError",
    "SecurityMap",
    "SecurityScenario",
    "ShapeMismatch",
    "SpotMetrics",
    "SteeringVector",
    "SubArrayPartition",
    "UniformPlanarArray",
    "WindowWarning",
    "bfr",
    "calibrate_power",
    "correlation",
    "element_positions",
    "evaluate_field",
    "exhaustive_max",
    "field_regions",
    "find_focal_peaks",
    "fraunhofer_distance",
    "hpbw",
    "line_profile",
    "measure_power",
    "mrt_weights",
    "multi_focal_weights",
    "orthogonality_profile",
    "partition",
    "phase_grid",
    "quantize_phases",
    "quantized_mrt_power",
    "run_sbf",
    "secure_boundary",
    "security_map",
    "sinr_at",
    "size_tradeoff",
    "spacing_tradeoff",
    "spot_metrics",
    "steering_vector",
    "synchronize",
    "__version__",
]
