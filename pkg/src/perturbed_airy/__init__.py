"""Orthogonal polynomials for x^lambda exp(-x^3 - t/x) on (0, inf).

Extended-precision construction of the recurrence coefficients and numerical
checks of the ladder structure, the nonlinear difference system, the ODE,
the t-evolution and the large-n fluid asymptotics.
"""
from .asymptotics import (
    FluidModel,
    RatioSeries,
    alpha_scale,
    asymptotic_ratios,
    beta_scale,
    fluid_density,
    fluid_endpoint,
    fluid_mass,
    fluid_sie_residual,
)
from .errors import (
    AiryOPError,
    CertificationFailure,
    CoefficientPole,
    DegenerateArguments,
    DenominatorVanishes,
    Divergent,
    DomainError,
    NonConvergence,
    NonPositive,
    PoleOnBoundary,
    PrecisionExhausted,
    StepUnderflow,
)
from .evolution import EvolutionProbe, HankelH, evolution_residuals, hankel_H
from .ladder import (
    CLOSED_FORM,
    IDENTITIES,
    INTEGRAL,
    AuxTable,
    LadderCoeffs,
    aux_Rr,
    build_aux,
    identity_residuals,
    ladder_AB,
    ladder_coeffs,
    ladder_residuals,
    star_closed,
    star_integral,
)
from .numeric import (
    PrecisionSpec,
    QuadratureResult,
    derivative_t,
    integrate_halfline,
    integrate_interval,
    integrate_pv,
)
from .recurrence import (
    RecurrenceTable,
    build_recurrence,
    build_system,
    christoffel_darboux_residual,
    eval_poly,
    orthogonality_residual,
    stieltjes_recurrence,
)
from .report import Residual, ResidualReport
from .systems import OdeCoefficients, difference_system_residuals, ode_coefficients, ode_residual
from .weight import (
    MomentTable,
    WeightParams,
    moment,
    moment_table,
    potential_parts,
    weight_eval,
)

__version__ = "0.1.0"
