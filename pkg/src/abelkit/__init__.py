"""abelkit: lattice minima, tube volumes, projective-normality criteria,
and theta-function rank tests for polarized complex tori."""

from .torus import (
    PolarizationType,
    PeriodMatrix,
    PolarizedTorus,
    Subtorus,
    TorusError,
    ValidationCheck,
    ValidationReport,
    make_subtorus,
    make_torus,
    subtorus_from_dict,
    torus_from_dict,
    validate,
)
from .svp import (
    GramLattice,
    SVPError,
    SVPResult,
    brute_force_sv,
    buser_sarnak,
    lll_reduce,
    relative_buser_sarnak,
    shortest_vector,
)
from .diagonal import (
    HalvingCheck,
    ProductTorus,
    diagonal_halving_check,
    product_with_diagonal,
    projection_length_sq,
)
from .tube import (
    CurveError,
    CurveSpec,
    FedererReport,
    TubeError,
    TubeSpec,
    VolumeReport,
    curve_area_in_tube,
    curve_from_dict,
    exceptional_intersection,
    federer_check,
    volume_bound_check,
)
from .criteria import (
    BigCheck,
    BoundsTable,
    CriteriaReport,
    NormalityBound,
    bauer_m,
    big_check,
    bounds_table,
    evaluate,
    iyer_bound,
    nef_check,
    normality_bound,
    seshadri_lower_bound,
)
from .theta import (
    Rho2Report,
    ThetaBasis,
    ThetaError,
    automorphy_factor,
    evaluate_section,
    rho2_matrix,
    rho2_rank,
    theta_basis,
    theta_values,
)

__version__ = "0.1.0"

__all__ = [
    "PolarizationType", "PeriodMatrix", "PolarizedTorus", "Subtorus",
    "TorusError", "ValidationCheck", "ValidationReport",
    "make_torus", "make_subtorus", "validate",
    "torus_from_dict", "subtorus_from_dict",
    "GramLattice", "SVPError", "SVPResult",
    "lll_reduce", "shortest_vector", "brute_force_sv",
    "buser_sarnak", "relative_buser_sarnak",
    "ProductTorus", "HalvingCheck",
    "product_with_diagonal", "projection_length_sq", "diagonal_halving_check",
    "TubeSpec", "CurveSpec", "TubeError", "CurveError",
    "VolumeReport", "FedererReport",
    "curve_area_in_tube", "exceptional_intersection",
    "volume_bound_check", "federer_check", "curve_from_dict",
    "CriteriaReport", "BigCheck", "NormalityBound", "BoundsTable",
    "bauer_m", "seshadri_lower_bound", "nef_check", "big_check",
    "normality_bound", "iyer_bound", "evaluate", "bounds_table",
    "ThetaBasis", "Rho2Report", "ThetaError",
    "theta_basis", "theta_values", "evaluate_section", "automorphy_factor",
    "rho2_matrix", "rho2_rank",
    "__version__",
]
