"""conekit: potential-theory toolkit for cone-like domains.

Closed-form Green functions by reflection images, the fractional Laplacian
as a principal-value integral, sphere-comparison machinery (weighted
inversions, critical radii, exponent bootstrap), boundary blow-up rescaling,
and a positive-solution solver with an independent shooting oracle.
"""

from .geometry import (
    BOTH,
    INNER_GRC,
    NEITHER,
    OUTER_GRC,
    AngularUnion,
    Ball,
    BallK,
    CrossSection,
    Domain,
    EmptySection,
    ExteriorBallK,
    FreeSpace,
    FullSphere,
    HalfLine,
    HalfSpaceK,
    Interval,
    MssClassification,
    Polygon2D,
    SignCap,
    SignSet1D,
    SphericalCap,
    TruncatedCone,
    classify_mss,
    cross_section,
    domain_from_json,
    kelvin_point,
    kelvin_pullback,
    signed_reflection,
)
from .grids import GridFunction
from .kernels import (
    ANGULAR,
    PAPER_CYCLES,
    ExteriorImagesKernel,
    FracLapConfig,
    FreeSpaceKernel,
    GreenKernel,
    HalfLineSqrtKernel,
    HypothesisReport,
    ImagesKernel,
    IntervalSqrtKernel,
    IteratedKernel,
    frac_laplacian,
    fundamental,
    fundamental_constant,
    green_exterior,
    green_for,
    green_images,
    green_interval_half,
    green_iterated,
    normalization_const,
    sphere_area,
    verify_hypotheses,
)
from .scaling import (
    CONVERGES,
    DILATE_FUNDAMENTAL,
    DILATE_OUTWARD,
    DIVERGES_MINUS,
    DIVERGES_PLUS,
    FIXED_POINT,
    SHRINK_INWARD,
    BootstrapRun,
    ExponentParams,
    Lambda0Result,
    bootstrap,
    find_lambda0,
    omega_lambda,
    p_critical,
)
from .solver import (
    PicardResult,
    PowerNonlinearity,
    QuadRule,
    ShootingResult,
    SolverConfig,
    apply_K,
    barrier_constant,
    barrier_zeta,
    calibrate_barrier_constant,
    lower_bound_rho,
    picard_solve,
    quadrature_for,
    radial_shooting_oracle,
    torsion_profile,
)
from .blowup import (
    BcbReport,
    ConeLimit,
    RescaleSpec,
    bcb_check,
    limit_cone,
    rescale_domain,
    rescale_solution,
)

__version__ = "0.1.0"
