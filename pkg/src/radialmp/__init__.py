"""radialmp: weighted radial Sobolev embeddings and a mountain-pass solver
for −div(A(|x|)∇u) + V(|x|)u = K(|x|)f(u) on R^N.

The pieces fit together as: `potentials` describes A, V, K and checks their
admissibility; `exponents` is the exact rational calculus of the derived
exponents and admissible intervals; `grid`/`spaces` discretize the weighted
energy space on a graded radial mesh; `functional`/`solver` minimize the
energy over the Nehari set; `probes` estimates the embedding suprema whose
decay certifies compactness.  The `radialmp` CLI drives reproducible runs.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import (
    DomainError,
    EscapeFailedError,
    ExtrapolationRefused,
    FitFailedError,
    GridMismatchError,
    NoScaleError,
    ParameterError,
    RadialMPError,
    SingularOperatorError,
)
from .exponents import (
    ExponentReport,
    ProblemParams,
    admissible_intervals,
    alpha_star,
    base_exponents,
    decay_exponents,
    exponent_report,
    q_star,
    q_tilde,
)
from .functional import (
    EnergyBreakdown,
    Nonlinearity,
    F_eval,
    check_f_hypotheses,
    derivative,
    energy,
    f_eval,
    nehari_scale,
    x_gradient,
)
from .grid import RadialGrid, Region, build_grid, quadrature, sphere_area
from .potentials import (
    HypothesisReport,
    PotentialSpec,
    check_hypothesis_A,
    check_hypothesis_K,
    check_hypothesis_V,
    eval_potential,
    fit_asymptotics,
    ratio_bound,
)
from .probes import ProbeResult, decay_study, estimate_S0, estimate_Sinfty
from .solver import (
    GeometryReport,
    SolveConfig,
    SolveResult,
    build_escape_direction,
    ps_residual,
    solve,
    verify_geometry,
)
from .spaces import (
    DiscreteRadialFunction,
    NormBundle,
    inner_product_X,
    norm_A,
    norm_bundle,
    norm_LqK,
    random_bump_profile,
    sum_norm,
    verify_decay_infinity,
    verify_decay_origin,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
