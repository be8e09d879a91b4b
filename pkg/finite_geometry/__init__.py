# 有限幾何套件：GF(q) 算術、射影空間與二次型
from .errors import (
    CapExceededError,
    CliqueSearchTimeout,
    ConfigError,
    EigenSolverError,
    FieldConstructionError,
    InsufficientRowsError,
    KFreeError,
    WitnessConstructionError,
)
from .field import (
    Field,
    FieldElement,
    construct_field,
    field_of_order,
    quadratic_character,
    smallest_nonsquare,
    split_prime_power,
    square_root,
)
from .geometry import (
    Census,
    DiagonalForm,
    PointClass,
    ProjectivePoint,
    QuadraticSpace,
    canonicalize,
    census,
    classify,
    enumerate_points,
    orthogonal,
    perp_partner_map,
    point_index,
    polarization,
    projective_points,
    standard_form,
)

__all__ = [
    "KFreeError",
    "FieldConstructionError",
    "CapExceededError",
    "CliqueSearchTimeout",
    "EigenSolverError",
    "WitnessConstructionError",
    "ConfigError",
    "InsufficientRowsError",
    "Field",
    "FieldElement",
    "construct_field",
    "field_of_order",
    "quadratic_character",
    "smallest_nonsquare",
    "split_prime_power",
    "square_root",
    "Census",
    "DiagonalForm",
    "PointClass",
    "ProjectivePoint",
    "QuadraticSpace",
    "canonicalize",
    "census",
    "classify",
    "enumerate_points",
    "orthogonal",
    "perp_partner_map",
    "point_index",
    "polarization",
    "projective_points",
    "standard_form",
]

__version__ = "1.0.0"
