"""Inductance of multilayer rectangular planar windings.

Estimation via a monomial model, coefficient fitting from labeled winding
datasets, and inductance maximization under geometric constraints.
"""

from .geometry import (
    GeometryError,
    IncompleteGeometryError,
    InfeasibleGeometryError,
    MeanSides,
    OrientationError,
    ValidationCheck,
    ValidationReport,
    WindingGeometry,
    canonicalize,
    derive_inner_side,
    mean_sides,
    meets_min_inner,
    validate,
)
from .estimator import (
    COEFFICIENT_NAMES,
    DEFAULT_COEFFICIENTS,
    MU0,
    CoefficientSet,
    effective_layer_spacing,
    inductance,
    inductance_from_dims,
    inductance_simplified,
    inductance_square,
    mohan_inductance,
    mohan_inductance_um,
)
from .dataset import (
    CSV_HEADER,
    NOMINAL_GRID_COUNTS,
    SOURCES,
    GridSpec,
    Sample,
    SampleFileError,
    SplitAssignment,
    dataset_a_spec,
    dataset_b_spec,
    dataset_c_spec,
    default_corpus,
    generate_grid,
    read_csv,
    read_geometry_csv,
    split_train_eval,
    synth_labels,
    write_csv,
    write_geometry_csv,
)
from .regression import (
    FEATURE_NAMES,
    CoefficientDispersion,
    DesignRow,
    FitReport,
    RankDeficiencyError,
    build_design_matrix,
    design_row,
    error_pct,
    evaluate,
    fit_and_evaluate,
    fit_ols,
    repeated_fit,
)
from .optimizer import (
    BOUND_KEYS,
    DEFAULT_RESOLUTION,
    InfeasibleProblemError,
    OptimizationProblem,
    OptimizationResult,
    RestartRecord,
    brute_force_max,
    default_problem,
    feasible,
    maximize,
)

__version__ = "0.1.0"

__all__ = [
    "GeometryError",
    "IncompleteGeometryError",
    "InfeasibleGeometryError",
    "MeanSides",
    "OrientationError",
    "ValidationCheck",
    "ValidationReport",
    "WindingGeometry",
    "canonicalize",
    "derive_inner_side",
    "mean_sides",
    "meets_min_inner",
    "validate",
    "COEFFICIENT_NAMES",
    "DEFAULT_COEFFICIENTS",
    "MU0",
    "CoefficientSet",
    "effective_layer_spacing",
    "inductance",
    "inductance_from_dims",
    "inductance_simplified",
    "inductance_square",
    "mohan_inductance",
    "mohan_inductance_um",
    "CSV_HEADER",
    "NOMINAL_GRID_COUNTS",
    "SOURCES",
    "GridSpec",
    "Sample",
    "SampleFileError",
    "SplitAssignment",
    "dataset_a_spec",
    "dataset_b_spec",
    "dataset_c_spec",
    "default_corpus",
    "generate_grid",
    "read_csv",
    "read_geometry_csv",
    "split_train_eval",
    "synth_labels",
    "write_csv",
    "write_geometry_csv",
    "FEATURE_NAMES",
    "CoefficientDispersion",
    "DesignRow",
    "FitReport",
    "RankDeficiencyError",
    "build_design_matrix",
    "design_row",
    "error_pct",
    "evaluate",
    "fit_and_evaluate",
    "fit_ols",
    "repeated_fit",
    "BOUND_KEYS",
    "DEFAULT_RESOLUTION",
    "InfeasibleProblemError",
    "OptimizationProblem",
    "OptimizationResult",
    "RestartRecord",
    "brute_force_max",
    "default_problem",
    "feasible",
    "maximize",
    "__version__",
]
