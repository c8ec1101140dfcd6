"""t-derivatives of the recurrence data: checks of t p'(n,t) = r*_n,
t (ln h_n)' = -R*_n, the coupled differential-difference equations for
alpha_n and beta_n, and three routes to H_n(t) = t d/dt ln D_n(t).

Every derivative is a Richardson-extrapolated central difference over
tables rebuilt from scratch at the shifted values of t.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .errors import DomainError
from .ladder import INTEGRAL, build_aux
from .numeric import PrecisionSpec, derivative_t, to_ctx
from .recurrence import build_system, recurrence_guard
from .report import ResidualReport
from .weight import WeightParams

# tables shared by every probe with n <= DEFAULT_NMAX - 2
DEFAULT_NMAX = 12


@dataclass
class EvolutionProbe:
    params: WeightParams
    n: int
    prec: PrecisionSpec = field(default_factory=lambda: PrecisionSpec(40))
    nmax: int | None = None
    # t values at which tables were actually built
    grid: list = field(default_factory=list)

    def __post_init__(self):
        if self.params.t <= 0:
            raise DomainError("t-evolution needs t > 0")
        if self.nmax is None:
            self.nmax = max(DEFAULT_NMAX, self.n + 2)

    @property
    def table_prec(self) -> PrecisionSpec:
        return PrecisionSpec(self.prec.digits, recurrence_guard(self.nmax))

    def table(self, t=None):
        params = self.params if t is None else self.params.with_t(t)
        if t is not None and params.t not in self.grid:
            self.grid.append(params.t)
        return build_system(params, self.nmax, self.prec.digits)

    def derivative(self, quantity):
        """Extrapolated d/dt of ``quantity(table)`` at the probe's t."""
        prec = self.table_prec
        return derivative_t(lambda s: quantity(self.table(s)), self.params.t, prec)


@lru_cache(maxsize=64)
def _aux(table):
    return build_aux(table, INTEGRAL)


def _rhs_alpha(a, b, n):
    return a[n] + 3 * b[n] * (a[n] ** 2 + a[n] * a[n - 1] + a[n - 1] ** 2 + b[n] + b[n - 1]) - 3 * b[n + 1] * (
        a[n + 1] ** 2 + a[n + 1] * a[n] + a[n] ** 2 + b[n + 2] + b[n + 1]
    )


def _rhs_beta(a, b, n):
    return b[n] * (
        2
        + 3 * a[n - 2] * b[n - 1]
        - 3 * a[n + 1] * b[n + 1]
        + 3 * a[n - 1] * (a[n - 1] ** 2 + b[n] + 2 * b[n - 1])
        - 3 * a[n] * (a[n] ** 2 + b[n] + 2 * b[n + 1])
    )


def evolution_residuals(probe: EvolutionProbe) -> ResidualReport:
    """Residuals of the four t-evolution relations at the probe's (n, t).

    ``meta['budget']`` holds the differentiation error estimate of each
    relation (relative, same normalisation as the residual) and
    ``meta['pre_extrapolation']`` the residuals obtained with the plain
    central differences at steps h, h/2, h/4.
    """
    n = probe.n
    if not 2 <= n <= probe.nmax - 2:
        raise IndexError(f"evolution checks need 2 <= n <= {probe.nmax - 2}")
    base = probe.table()
    ctx = base.ctx
    t = to_ctx(ctx, probe.params.t)
    aux = _aux(base)
    a, b = base.alpha, base.beta

    relations = {
        "dp": (lambda tab: tab.p1[n], aux.rstar[n]),
        "dlogh": (lambda tab: tab.ctx.log(tab.h[n]), -aux.Rstar[n]),
        "dalpha": (lambda tab: tab.alpha[n], _rhs_alpha(a, b, n)),
        "dbeta": (lambda tab: tab.beta[n], _rhs_beta(a, b, n)),
    }
    report = ResidualReport(meta={"budget": {}, "pre_extrapolation": {}, "n": n})
    for name, (quantity, rhs) in relations.items():
        d = probe.derivative(quantity)
        lhs = t * d.value
        res = report.add(n, None, name, [lhs, -rhs])
        scale = res.scale
        report.meta["budget"][name] = t * d.error / scale
        report.meta["pre_extrapolation"][name] = [abs(t * c - rhs) / scale for c in d.central]
    report.meta["step"] = d.step
    return report


class HankelH(NamedTuple):
    fd: object
    formula: object
    residual: object
    star_sum: object
    budget: object


def hankel_H(probe: EvolutionProbe) -> HankelH:
    """H_n(t) three ways: finite differences of ln D_n, the closed form in
    alpha, beta and the starred quantities, and -sum_{j<n} R*_j."""
    n = probe.n
    if n < 1:
        raise IndexError("H_n needs n >= 1")
    base = probe.table()
    ctx = base.ctx
    lam, t = base.params.in_ctx(ctx)
    aux = _aux(base)
    a, b = base.alpha, base.beta
    R, r, Rs, rs = aux.R, aux.r, aux.Rstar, aux.rstar
    d = probe.derivative(lambda tab: tab.ctx.log(tab.hankel[n]))
    fd = t * d.value
    formula = (
        r[n] ** 2
        - lam * r[n]
        - 3 * t * b[n]
        + 6 * b[n] * rs[n]
        - b[n] * (3 * a[n] * Rs[n - 1] + 3 * a[n - 1] * Rs[n] + R[n] * R[n - 1])
    )
    star_sum = -ctx.fsum(Rs[:n])
    residual = abs(fd - formula) / max(1, abs(formula))
    return HankelH(fd, formula, residual, star_sum, t * d.error / max(1, abs(formula)))
