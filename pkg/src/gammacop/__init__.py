"""Multivariate and multi-factor gamma distributions defined by affine
polynomials: Laplace copulas, closed-form densities, infinite-divisibility
testing, dependence measures, sampling, and independent numeric oracles.
"""

from .copulas import (
    AssembledDistribution,
    CopulaModel,
    assembled_cdf,
    assembled_logpdf,
    build_copula,
    conditional_cdf,
    copula_by_composition,
    copula_cdf,
    copula_pdf2,
    rectangle_mass,
)
from .densities import (
    DensityPoint,
    bifactor_logpdf,
    bivariate_gamma_logpdf,
    gamma_marginal_logpdf,
    multisensor_logpdf,
    trivariate_gamma_logpdf,
)
from .dependence import (
    DependenceResult,
    kendall_tau_closed,
    kendall_tau_mc,
    kendall_tau_quadrature,
    spearman_rho_closed,
    spearman_rho_mc,
    spearman_rho_quadrature,
)
from .divisibility import (
    DivisibilityReport,
    btilde,
    check_infinite_divisibility,
    partitions,
)
from .errors import (
    ArgumentError,
    ConstructionError,
    ConvergenceError,
    DomainError,
    ExistenceError,
    GammacopError,
    KernelError,
    ModelError,
    ParseError,
    PreconditionError,
)
from .polynomial import (
    AffineModel,
    AffinePolynomial,
    ShapeParams,
    dual_polynomial,
    eval_at_corner,
    evaluate,
    fgm_coefficients,
    model_from_json_dict,
    model_to_json_dict,
    product_polynomial,
)
from .sampling import (
    RngSpec,
    make_rng,
    sample_bivariate_gamma,
    sample_copula,
    sample_copula3,
    sample_gamma,
    sample_multifactor,
)
from .specialfn import (
    SeriesControl,
    default_control,
    horn_phi3,
    lauricella_FI,
    lauricella_FII,
    pfq,
    pochhammer,
)
from .validation import (
    ValidationReport,
    beta_series_check,
    hladik_pair_check,
    laplace_of_density,
    run_full_validation,
)

__version__ = "0.1.0"
