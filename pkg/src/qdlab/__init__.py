"""Numerical laboratory for rational quadratic differentials and their cosine push-forwards."""

from .errors import (
    BadPeriod,
    BadRadii,
    CriticalValue,
    DegenerateAtCritical,
    EvalAtPole,
    Inconclusive,
    NoConvergence,
    NonIntegrable,
    NotStrictlyPreperiodic,
    OddCount,
    PoleCollision,
    PoleImage,
    QDLabError,
    TailTooLarge,
    TooFewPoles,
    TooSmall,
    ZeroMass,
)
from .families import (
    Example41Params,
    Example42Params,
    control_family,
    efficiency_sweep,
    example41_build,
    example42_build,
    geometric_family,
    polygon_family,
)
from .limit_models import (
    ConcentrationResult,
    ThickScaling,
    ThinModel,
    choose_inner_radius,
    detect_thick_scaling,
    find_concentration_annulus,
    hat_scaling,
    limit_model_distance,
    mass_condition_check,
    modulus_bound,
    s_n_eval,
    s_n_sup_deviation,
    thin_image_annulus,
)
from .orbits import OrbitPortrait, counting_feasibility, teich_dimension, validate_portrait
from .pushforward import (
    CosineMap,
    TruncationPolicy,
    cos_preimages,
    cos_pushforward_density,
    cos_pushforward_mass,
    efficiency,
    efficiency_ratio,
    periodized_pushforward_density,
    poly_pushforward_density,
    quadratic_model_pushforward,
    restricted_cos_pushforward_mass,
    semiconjugacy_residual,
)
from .qd_core import (
    AffineMap,
    RationalQD,
    affine_pullback,
    affine_pushforward,
    degree_at_infinity,
    detect_cos_symmetric_pairs,
    eval_density,
)
from .quadrature import (
    MassResult,
    QuadratureConfig,
    annulus_log_mass,
    annulus_modulus,
    mass_fraction_profile,
    mass_on_region,
    plane_mass_partition,
)
from .regions import Annulus, Complement, Disk, HalfStrip, Intersection, Plane, Region, region_from_json

__version__ = "0.1.0"
