"""Coulomb-fluid model for large n: support endpoint, equilibrium density,
its normalisation and singular-integral-equation residual, and comparison
of computed recurrence coefficients with the leading asymptotics.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .errors import DomainError
from .numeric import PrecisionSpec, integrate_interval, integrate_pv, to_ctx
from .recurrence import RecurrenceTable
from .report import Residual, ResidualReport
from .weight import WeightParams, as_fraction, v_prime


def fluid_endpoint(n, prec: PrecisionSpec | None = None):
    """b solving 15 b^3 / 32 = n."""
    ctx = (prec or PrecisionSpec()).ctx
    n = to_ctx(ctx, as_fraction(n) if not hasattr(n, "context") else n)
    if n <= 0:
        raise DomainError("fluid particle number must be positive")
    return ctx.cbrt(32 * n / 15)


@dataclass(frozen=True)
class FluidModel:
    n: object
    b: object
    prec: PrecisionSpec

    @classmethod
    def for_n(cls, n, prec: PrecisionSpec | None = None) -> "FluidModel":
        prec = prec or PrecisionSpec()
        b = fluid_endpoint(n, prec)
        return cls(to_ctx(prec.ctx, as_fraction(n)), b, prec)


def _density(b, x):
    ctx = x.context
    return 3 * (8 * x**2 + 4 * b * x + 3 * b**2) / (16 * ctx.pi) * ctx.sqrt((b - x) / x)


def fluid_density(model: FluidModel, x):
    """sigma(x) = 3(8x^2 + 4bx + 3b^2)/(16 pi) sqrt((b - x)/x) on (0, b]."""
    ctx = model.prec.ctx
    x = to_ctx(ctx, x)
    if not 0 < x <= model.b:
        raise DomainError("the density lives on (0, b]")
    return _density(model.b, x)


def fluid_mass(model: FluidModel):
    """Integral of sigma over (0, b) by tanh-sinh quadrature."""
    b = model.b

    def integrand(x):
        return _density(to_ctx(x.context, b), x)

    return integrate_interval(integrand, 0, b, model.prec).value


def _sie_pv(model: FluidModel, x):
    # PV int_0^b sigma(y)/(x - y) dy after y = b sin^2(theta): the hard-edge
    # and soft-edge square roots cancel against the Jacobian, leaving
    # -(3 b / (8 pi)) (8y^2 + 4by + 3b^2) cos^2(theta) / (y - x) in theta
    ctx = model.prec.ctx
    b = model.b
    theta_c = ctx.asin(ctx.sqrt(x / b))

    def numerator(theta):
        tctx = theta.context
        bb = to_ctx(tctx, b)
        y = bb * tctx.sin(theta) ** 2
        ratio = _chord(tctx, theta, to_ctx(tctx, theta_c), bb)
        return -3 * bb * (8 * y**2 + 4 * bb * y + 3 * bb**2) * tctx.cos(theta) ** 2 / (8 * tctx.pi) * ratio

    return integrate_pv(numerator, theta_c, (0, ctx.pi / 2), model.prec).value


def _chord(ctx, theta, theta_c, b):
    # (theta - theta_c) / (y(theta) - y(theta_c)), regular at theta_c
    d = theta - theta_c
    if d == 0:
        return 1 / (b * ctx.sin(2 * theta_c))
    return d / (b * ctx.sin(theta + theta_c) * ctx.sin(d))


def fluid_sie_residual(
    model: FluidModel,
    xs,
    params: WeightParams | None = None,
) -> ResidualReport:
    """|v'(x) - 2 PV int sigma(y)/(x - y) dy| / max(1, |v'(x)|) at each x.

    Without ``params`` the potential is the pure cubic x^3.  With params the
    full v' (lambda and t terms included) is used; the displayed density
    carries no such terms, so that variant is a record, not a check.
    """
    ctx = model.prec.ctx
    b = model.b
    report = ResidualReport(meta={"potential": "cubic" if params is None else params.to_dict()})
    for x in xs:
        x = to_ctx(ctx, x)
        if not b / 100 <= x <= b - b / 100:
            raise DomainError("sample points must stay b/100 away from the endpoints")
        vp = 3 * x**2 if params is None else v_prime(params, x, ctx)
        pv = _sie_pv(model, x)
        res = abs(vp - 2 * pv)
        report.add(0, x, "sie", residual=Residual(res, res / max(1, abs(vp)), max(1, abs(vp))))
    return report


def alpha_scale(n, ctx):
    """(4n/15)^(1/3), the leading behaviour of alpha_n."""
    return ctx.cbrt(ctx.mpf(4) * n / 15)


def beta_scale(n, ctx):
    """(n^2/900)^(1/3), the leading behaviour of beta_n."""
    return ctx.cbrt(ctx.mpf(n) ** 2 / 900)


@dataclass
class RatioSeries:
    rows: list  # (n, alpha ratio, beta ratio)
    alpha_exponent: float
    beta_exponent: float

    def to_csv(self, digits: int = 20) -> str:
        lines = ["n,alpha_ratio,beta_ratio"]
        for n, ar, br in self.rows:
            lines.append(f"{n},{ar.context.nstr(ar, digits)},{br.context.nstr(br, digits)}")
        return "\n".join(lines) + "\n"

    def to_json(self, digits: int = 20) -> dict:
        return {
            "n": [n for n, _, _ in self.rows],
            "alpha_ratio": [ar.context.nstr(ar, digits) for _, ar, _ in self.rows],
            "beta_ratio": [br.context.nstr(br, digits) for _, _, br in self.rows],
            "alpha_correction_exponent": self.alpha_exponent,
            "beta_correction_exponent": self.beta_exponent,
        }


def _fit_exponent(ns, deviations):
    pts = [(math.log(n), math.log(float(d))) for n, d in zip(ns, deviations) if n > 0 and d != 0]
    if len(pts) < 2:
        return float("nan")
    slope, _ = statistics.linear_regression([p[0] for p in pts], [p[1] for p in pts])
    return slope


def asymptotic_ratios(table: RecurrenceTable, ns=None, fit_ns=None) -> RatioSeries:
    """alpha_n/(4n/15)^(1/3) and beta_n/(n^2/900)^(1/3) over ``ns``, with the
    exponent of |ratio - 1| ~ n^p fitted by least squares in log-log over
    ``fit_ns`` (default: all of ``ns``)."""
    ctx = table.ctx
    if ns is None:
        ns = range(1, table.nmax + 1)
    rows = []
    for n in ns:
        rows.append((n, table.alpha[n] / alpha_scale(n, ctx), table.beta[n] / beta_scale(n, ctx)))
    fit = [row for row in rows if fit_ns is None or row[0] in set(fit_ns)]
    return RatioSeries(
        rows,
        _fit_exponent([r[0] for r in fit], [abs(r[1] - 1) for r in fit]),
        _fit_exponent([r[0] for r in fit], [abs(r[2] - 1) for r in fit]),
    )
