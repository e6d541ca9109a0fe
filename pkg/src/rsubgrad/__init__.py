"""Riemannian subgradient method on the sphere and SPD manifold, with
numerical certificates for its iteration-complexity bounds."""

from .bounds import (
    BoundReport,
    CurvatureConstants,
    boundedness_radius,
    c_kappa_d0,
    c_q_kappa,
    certify_lemli,
    certify_trace,
    exogenous_bound,
    polyak_bound,
    polyak_sum_bound,
)
from .convex import (
    OracleEvaluation,
    SubgradientOracle,
    check_subgradient,
    dist_oracle,
    feasibility_oracle,
)
from .feasibility import (
    FeasibilityInstance,
    generate_sphere,
    generate_spd,
    is_feasible,
    place_center,
)
from .geometry import SPD, Manifold, Sphere, safety_radius, spectral_apply
from .solver import (
    Exogenous,
    IterateTrace,
    Polyak,
    SolverConfig,
    exogenous_default,
    polyak_alpha_upper,
    polyak_step,
    run,
    subgradient_step,
)

__version__ = "0.1.0"
