"""Auxiliary quantities R_n, r_n, R*_n, r*_n, the ladder functions A_n(x),
B_n(x), and residual checks of the ladder relations, the compatibility
conditions and the scalar identities that follow from them.

The starred pair has two independent routes: quadrature of its defining
integrals (``integral`` path) and the rational expressions in alpha, beta
(``closed_form`` path).  Identity checks always consume the integral path so
that the closed forms are tested, not assumed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DenominatorVanishes, DomainError
from .numeric import PrecisionSpec, integrate_halfline, integrate_halfline_many, to_ctx
from .recurrence import RecurrenceTable, _values, _weight_in, eval_all
from .report import ResidualReport
from .weight import WeightParams, v_prime

INTEGRAL = "integral"
CLOSED_FORM = "closed_form"


def _alpha(table, n):
    return table.alpha[n] if n >= 0 else table.ctx.zero


def _beta(table, n):
    return table.beta[n] if n >= 0 else table.ctx.zero


def aux_Rr(table: RecurrenceTable, n: int):
    """R_n = 3(alpha_n^2 + beta_n + beta_{n+1}), r_n = 3(alpha_n + alpha_{n-1}) beta_n - n."""
    if not 0 <= n <= table.nmax - 1:
        raise IndexError(f"aux_Rr needs 0 <= n <= {table.nmax - 1}, got {n}")
    a, b = table.alpha, table.beta
    R = 3 * (a[n] ** 2 + b[n] + b[n + 1])
    r = 3 * (a[n] + _alpha(table, n - 1)) * b[n] - n
    return R, r


def is_degenerate(params: WeightParams) -> bool:
    """At t = 0 both starred quantities vanish identically."""
    return params.t == 0


def star_integral(params: WeightParams, table: RecurrenceTable, n: int, prec: PrecisionSpec | None = None):
    """(R*_n, r*_n) from their defining integrals over y^{-1} P_n P_m w(y)."""
    prec = prec or table.prec
    ctx = prec.ctx
    if not 0 <= n <= table.nmax:
        raise IndexError(f"degree {n} outside 0..{table.nmax}")
    if is_degenerate(params):
        return ctx.zero, ctx.zero
    t = to_ctx(ctx, params.t)

    def integrand(y):
        vals = _values(table, y, n)
        w = _weight_in(params, y) / y
        below = vals[n - 1] if n >= 1 else 0
        return [vals[n] ** 2 * w, vals[n] * below * w]

    sq, mixed = (r.value for r in integrate_halfline_many(integrand, prec))
    Rstar = t * sq / table.h[n]
    rstar = t * mixed / table.h[n - 1] if n >= 1 else ctx.zero
    return Rstar, rstar


def _closed_Rstar(table, n, R, r):
    lam = to_ctx(table.ctx, table.params.lam)
    return r[n] + r[n + 1] + table.alpha[n] * R[n] - lam


def star_closed(table: RecurrenceTable, n: int):
    """(R*_n, r*_n) as rational functions of the recurrence coefficients.

    Valid for 1 <= n <= nmax - 2.  For n = 0 only R*_0 has a closed form
    (r*_0 = 0 because P_{-1} = 0) and that pair is returned.
    """
    if not 0 <= n <= table.nmax - 2:
        raise IndexError(f"star_closed needs 0 <= n <= {table.nmax - 2}, got {n}")
    ctx = table.ctx
    lam, t = table.params.in_ctx(ctx)
    lo = max(n - 1, 0)
    R, r = {}, {}
    for k in range(lo, n + 2):
        R[k], r[k] = aux_Rr(table, k)
    Rs_n = _closed_Rstar(table, n, R, r)
    if n == 0:
        return Rs_n, ctx.zero
    Rs_prev = _closed_Rstar(table, n - 1, R, r)
    denom = 2 * r[n] - lam
    if abs(denom) < ctx.mpf(10) ** (-(table.prec.digits - 5)) * max(1, abs(lam)):
        raise DenominatorVanishes(f"2 r_{n} - lambda = {ctx.nstr(denom, 5)} vanishes")
    b = table.beta[n]
    rs = (Rs_n * b * R[n - 1] + Rs_prev * b * R[n] + t * r[n]) / denom
    return Rs_n, rs


@dataclass(frozen=True)
class AuxTable:
    """R, r, R*, r* for n = 0..nmax-1.  On the closed-form path entries that
    lack a closed form (n = nmax-1 and r*_0 beyond its convention) are None.
    """

    R: tuple
    r: tuple
    Rstar: tuple
    rstar: tuple
    star_path: str
    degenerate: bool = False

    @property
    def size(self):
        return len(self.R)


def build_aux(table: RecurrenceTable, path: str = INTEGRAL) -> AuxTable:
    """All auxiliary quantities of a table, starred ones from ``path``."""
    ctx = table.ctx
    size = table.nmax
    R, r = zip(*(aux_Rr(table, n) for n in range(size)))
    params = table.params
    if path == INTEGRAL:
        if is_degenerate(params):
            Rstar = rstar = tuple(ctx.zero for _ in range(size))
        else:
            Rstar, rstar = _star_integrals_all(params, table, size - 1)
    elif path == CLOSED_FORM:
        Rstar, rstar = [None] * size, [None] * size
        for n in range(0, size - 1):
            try:
                Rstar[n], rstar[n] = star_closed(table, n)
            except DenominatorVanishes:
                Rstar[n] = _closed_Rstar(table, n, R, r)
        Rstar, rstar = tuple(Rstar), tuple(rstar)
    else:
        raise ValueError(f"unknown star path {path!r}")
    return AuxTable(tuple(R), tuple(r), tuple(Rstar), tuple(rstar), path, is_degenerate(params))


def _star_integrals_all(params, table, top):
    # one shared quadrature for every degree 0..top
    ctx = table.ctx
    t = to_ctx(ctx, params.t)

    def integrand(y):
        vals = _values(table, y, top)
        w = _weight_in(params, y) / y
        sq = [v * v * w for v in vals]
        mixed = [vals[k] * vals[k - 1] * w for k in range(1, top + 1)]
        return sq + mixed

    res = [r.value for r in integrate_halfline_many(integrand, table.prec)]
    sq, mixed = res[: top + 1], res[top + 1 :]
    Rstar = tuple(t * sq[n] / table.h[n] for n in range(top + 1))
    rstar = (ctx.zero,) + tuple(t * mixed[n - 1] / table.h[n - 1] for n in range(1, top + 1))
    return Rstar, rstar


@dataclass(frozen=True)
class LadderCoeffs:
    """A_n(x) = 3x + 3 alpha_n + R_n/x + R*_n/x^2, B_n(x) = 3 beta_n + r_n/x + r*_n/x^2."""

    n: int
    alpha: object
    beta: object
    R: object
    Rstar: object
    r: object
    rstar: object

    def A(self, x):
        return 3 * x + 3 * self.alpha + self.R / x + self.Rstar / x**2

    def B(self, x):
        return 3 * self.beta + self.r / x + self.rstar / x**2

    def dA(self, x):
        return 3 - self.R / x**2 - 2 * self.Rstar / x**3

    def dB(self, x):
        return -self.r / x**2 - 2 * self.rstar / x**3


def ladder_coeffs(table: RecurrenceTable, aux: AuxTable, n: int) -> LadderCoeffs:
    if not 0 <= n < aux.size or aux.Rstar[n] is None:
        raise IndexError(f"no auxiliary data for n={n}")
    rstar = aux.rstar[n] if aux.rstar[n] is not None else table.ctx.zero
    return LadderCoeffs(n, table.alpha[n], table.beta[n], aux.R[n], aux.Rstar[n], aux.r[n], rstar)


def ladder_AB(coeffs: LadderCoeffs, x):
    """(A_n(x), B_n(x)) from the Laurent coefficients."""
    ctx = coeffs.alpha.context
    x = to_ctx(ctx, x)
    if x <= 0:
        raise DomainError("ladder functions are evaluated at x > 0")
    return coeffs.A(x), coeffs.B(x)


def ladder_integral_AB(params: WeightParams, table: RecurrenceTable, n: int, x):
    """(A_n(x), B_n(x)) straight from their defining integrals with the
    divided-difference kernel of v'.  Quadrature oracle for the coefficients.
    """
    ctx = table.ctx
    x = to_ctx(ctx, x)
    lam, t = params.in_ctx(ctx)

    def integrand(y):
        yctx = y.context
        xx = to_ctx(yctx, x)
        kernel = 3 * (xx + y) + lam / (xx * y) + t / (xx * y**2) + t / (xx**2 * y)
        vals = _values(table, y, n)
        w = _weight_in(params, y) * kernel
        below = vals[n - 1] if n >= 1 else 0
        return [vals[n] ** 2 * w, vals[n] * below * w]

    sq, mixed = (r.value for r in integrate_halfline_many(integrand, table.prec))
    A = sq / table.h[n]
    B = mixed / table.h[n - 1] if n >= 1 else ctx.zero
    return A, B


def _sum_A(table, aux, n, x):
    return table.ctx.fsum(ladder_coeffs(table, aux, j).A(x) for j in range(n))


def compatibility_terms(params, table, aux, n, x):
    """Additive terms (summing to zero) of the ladder relations and of the
    compatibility conditions at one point x."""
    ctx = table.ctx
    x = to_ctx(ctx, x)
    p, dp, _ = eval_all(table, x, n)
    vp = v_prime(params, x, ctx)
    cn = ladder_coeffs(table, aux, n)
    cm = ladder_coeffs(table, aux, n - 1)
    cp = ladder_coeffs(table, aux, n + 1)
    An, Bn, Am, Bp = cn.A(x), cn.B(x), cm.A(x), cp.B(x)
    b = table.beta[n]
    return {
        "lowering": [dp[n], Bn * p[n], -b * An * p[n - 1]],
        "raising": [dp[n - 1], -Bn * p[n - 1], -vp * p[n - 1], Am * p[n]],
        "S1": [Bp, Bn, -(x - table.alpha[n]) * An, vp],
        "S2'": [Bn**2, vp * Bn, _sum_A(table, aux, n, x), -b * An * Am],
    }


def ladder_residuals(params, table: RecurrenceTable, aux: AuxTable, n: int, xs) -> ResidualReport:
    """Residuals of the lowering/raising relations and of S1, S2' at each x."""
    if not 1 <= n <= table.nmax - 2:
        raise IndexError(f"ladder_residuals needs 1 <= n <= {table.nmax - 2}")
    report = ResidualReport()
    for x in xs:
        if x <= 0:
            raise DomainError("sample points must be positive")
        for name, terms in compatibility_terms(params, table, aux, n, x).items():
            report.add(n, x, name, terms)
    return report


def identity_terms(table: RecurrenceTable, aux: AuxTable, n: int):
    """Additive terms of the seven scalar identities at index n."""
    ctx = table.ctx
    lam, t = table.params.in_ctx(ctx)
    a, b = table.alpha, table.beta
    R, r, Rs, rs = aux.R, aux.r, aux.Rstar, aux.rstar
    an, am, bn = a[n], _alpha(table, n - 1), b[n]
    sum_Rs = ctx.fsum(Rs[:n])
    sum_R = ctx.fsum(R[:n])
    sum_a = ctx.fsum(a[:n])
    return {
        "re1": [rs[n], rs[n + 1], -t, an * Rs[n]],
        "re3": [r[n], r[n + 1], -Rs[n], an * R[n], -lam],
        "re2": [rs[n] ** 2, -t * rs[n], -bn * Rs[n] * Rs[n - 1]],
        "re7": [2 * r[n] * rs[n], -lam * rs[n], -t * r[n], -bn * Rs[n] * R[n - 1], -bn * Rs[n - 1] * R[n]],
        "re6": [
            r[n] ** 2,
            -lam * r[n],
            -3 * t * bn,
            6 * bn * rs[n],
            sum_Rs,
            -3 * bn * an * Rs[n - 1],
            -3 * bn * am * Rs[n],
            -bn * R[n] * R[n - 1],
        ],
        "sumR": [
            6 * bn * r[n],
            -3 * lam * bn,
            sum_R,
            -3 * bn * Rs[n],
            -3 * bn * Rs[n - 1],
            -3 * bn * an * R[n - 1],
            -3 * bn * am * R[n],
        ],
        "re4": [rs[n], 3 * bn**2, sum_a, -3 * bn * an * am, -bn * R[n], -bn * R[n - 1]],
    }


IDENTITIES = ("re1", "re3", "re2", "re7", "re6", "sumR", "re4")


def identity_residuals(table: RecurrenceTable, aux: AuxTable, n: int) -> ResidualReport:
    """Normalised residuals of the seven identities obtained by matching
    Laurent coefficients in S1 and S2'."""
    if aux.star_path != INTEGRAL:
        raise ValueError("identity checks must consume integral-path starred values")
    if not 1 <= n <= table.nmax - 2:
        raise IndexError(f"identity_residuals needs 1 <= n <= {table.nmax - 2}")
    report = ResidualReport()
    for name, terms in identity_terms(table, aux, n).items():
        report.add(n, None, name, terms)
    return report


def subleading_from_identity(table: RecurrenceTable, aux: AuxTable, n: int):
    """p(n, t) recovered from the last identity: -sum alpha_j expressed
    through beta_n, alpha_n, alpha_{n-1}, R_n, R_{n-1} and r*_n."""
    a, b = table.alpha, table.beta
    bn = b[n]
    return -(bn * (3 * a[n] * _alpha(table, n - 1) + aux.R[n] + aux.R[n - 1]) - aux.rstar[n] - 3 * bn**2)
