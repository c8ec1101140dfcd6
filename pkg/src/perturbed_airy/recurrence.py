"""Recurrence coefficients, norms, sub-leading coefficients and Hankel
determinants of the monic orthogonal polynomials, built from moments.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DegenerateArguments, NonPositive, PrecisionExhausted
from .numeric import PrecisionSpec, context, integrate_halfline, integrate_halfline_many, to_ctx
from .weight import MomentTable, WeightParams, moment_table


def recurrence_guard(nmax: int) -> int:
    """Guard digits for a table of size ``nmax``: 15 + 3 nmax/2.

    The moment-to-coefficient map for this weight destroys about 1.2-1.4
    digits per degree (measured by the shadow run over lam in [0, 2],
    t in [0, 5]); the extra margin keeps every table above its target.
    """
    return 15 + (3 * nmax + 1) // 2


@dataclass(frozen=True)
class RecurrenceTable:
    params: WeightParams
    prec: PrecisionSpec
    nmax: int
    alpha: tuple
    beta: tuple
    h: tuple
    p1: tuple
    hankel: tuple
    # digits lost by the moment-to-coefficient map, from the shadow run
    lost_digits: float = 0.0
    moments_hash: str = ""

    @property
    def ctx(self):
        return self.prec.ctx

    def rows(self, digits: int | None = None):
        digits = digits or self.prec.digits
        s = lambda v: self.ctx.nstr(v, digits, strip_zeros=False)
        for n in range(self.nmax + 1):
            yield {
                "n": n,
                "alpha": s(self.alpha[n]),
                "beta": s(self.beta[n]),
                "h": s(self.h[n]),
                "p1": s(self.p1[n]),
                "D": s(self.hankel[n]),
            }

    def to_csv(self, digits: int | None = None) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["n", "alpha", "beta", "h", "p1", "D"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows(digits))
        return buf.getvalue()

    def to_json(self, digits: int | None = None) -> dict:
        d = self.params.to_dict()
        d.update(
            digits=self.prec.digits,
            nmax=self.nmax,
            lost_digits=round(self.lost_digits, 2),
            moments_sha256=self.moments_hash,
            rows=list(self.rows(digits)),
        )
        return d


def chebyshev_algorithm(mu, nmax: int, ctx):
    """Recurrence coefficients and norms from ordinary moments.

    Runs the mixed-moment recursion
    sigma[k][l] = sigma[k-1][l+1] - alpha[k-1] sigma[k-1][l] - beta[k-1] sigma[k-2][l]
    where sigma[k][l] is the integral of x^l P_k w, so h_k = sigma[k][k].
    Needs mu[0..2 nmax + 1].  Returns alpha, beta (beta[0] = 0) and h, all
    of length nmax + 1.
    """
    if len(mu) < 2 * nmax + 2:
        raise ValueError(f"need {2 * nmax + 2} moments for nmax={nmax}, got {len(mu)}")
    width = 2 * nmax + 2
    prev = [ctx.zero] * width
    cur = [to_ctx(ctx, m) for m in mu[:width]]
    alpha = [cur[1] / cur[0]]
    beta = [ctx.zero]
    h = [cur[0]]
    for k in range(1, nmax + 1):
        a, b = alpha[k - 1], beta[k - 1]
        nxt = [ctx.zero] * width
        for l in range(k, width - k):
            nxt[l] = cur[l + 1] - a * cur[l] - b * prev[l]
        hk = nxt[k]
        if hk <= 0:
            raise NonPositive(f"h_{k} = {ctx.nstr(hk, 5)} is not positive")
        alpha.append(nxt[k + 1] / hk - cur[k] / cur[k - 1])
        beta.append(hk / cur[k - 1])
        h.append(hk)
        prev, cur = cur, nxt
    return alpha, beta, h


def _rel_diff(a, b):
    return abs(a - b) / abs(a) if a != 0 else abs(b)


def build_recurrence(moments: MomentTable, nmax: int) -> RecurrenceTable:
    """Build the recurrence table from a certified moment table.

    The map from moments to coefficients is badly conditioned, so it is run
    twice: at the moments' working precision and as a shadow run with the
    moments rounded ``digits/2`` digits shorter.  The disagreement measures
    how many digits the map destroys; if fewer than ``digits`` survive in
    the main run, PrecisionExhausted is raised.
    """
    if moments.jmax < 2 * nmax + 1:
        raise ValueError(f"jmax={moments.jmax} < 2*nmax+1={2 * nmax + 1}")
    if not moments.certified:
        raise ValueError("moment table is not certified")
    prec = moments.prec
    ctx = prec.ctx
    alpha, beta, h = chebyshev_algorithm(moments.mu, nmax, ctx)

    shadow_dps = prec.working - (prec.digits + 1) // 2
    sctx = context(shadow_dps)
    s_alpha, s_beta, s_h = chebyshev_algorithm([to_ctx(sctx, m) for m in moments.mu], nmax, sctx)
    worst = max(
        max(_rel_diff(x, to_ctx(sctx, y)) for x, y in zip(alpha, s_alpha)),
        max(_rel_diff(x, to_ctx(sctx, y)) for x, y in zip(beta[1:], s_beta[1:])),
        max(_rel_diff(x, to_ctx(sctx, y)) for x, y in zip(h, s_h)),
    )
    if worst == 0:
        lost = 0.0
    else:
        lost = max(0.0, shadow_dps + float(ctx.log10(worst)))
    if prec.working - lost < prec.digits:
        raise PrecisionExhausted(
            f"moment-to-recurrence map loses {lost:.1f} digits, more than the "
            f"{prec.guard} guard digits",
            lost_digits=lost,
        )

    # first coefficients straight from the moments
    mu = moments.mu
    a0 = mu[1] / mu[0]
    b1 = mu[2] / mu[0] - a0**2
    tol = ctx.mpf(10) ** (-(prec.working - lost - 2))
    if _rel_diff(a0, alpha[0]) > tol or (nmax >= 1 and _rel_diff(b1, beta[1]) > tol):
        raise PrecisionExhausted("alpha_0 / beta_1 disagree with the moment formulas")

    p1 = [ctx.zero]
    for a in alpha:
        p1.append(p1[-1] - a)
    p1 = p1[: nmax + 1]
    hankel = [ctx.one]
    for hj in h:
        hankel.append(hankel[-1] * hj)

    return RecurrenceTable(
        params=moments.params,
        prec=prec,
        nmax=nmax,
        alpha=tuple(alpha),
        beta=tuple(beta),
        h=tuple(h),
        p1=tuple(p1),
        hankel=tuple(hankel),
        lost_digits=lost,
        moments_hash=moments.content_hash(),
    )


@lru_cache(maxsize=128)
def build_system(
    params: WeightParams,
    nmax: int,
    digits: int = 60,
    guard: int | None = None,
    check_derivative: bool = False,
) -> RecurrenceTable:
    """Moment table (jmax = 2 nmax + 1) plus recurrence table, cached."""
    if guard is None:
        guard = recurrence_guard(nmax)
    prec = PrecisionSpec(digits, guard)
    moments = moment_table(params, 2 * nmax + 1, prec, check_derivative=check_derivative)
    return build_recurrence(moments, nmax)


def _check_degree(table, n):
    if not 0 <= n <= table.nmax:
        raise IndexError(f"degree {n} outside 0..{table.nmax}")


def eval_all(table: RecurrenceTable, x, n: int, ctx=None):
    """Values, first and second derivatives of P_0..P_n at x."""
    _check_degree(table, n)
    ctx = ctx or table.ctx
    x = to_ctx(ctx, x)
    p, dp, ddp = [ctx.one], [ctx.zero], [ctx.zero]
    pm, dpm, ddpm = ctx.zero, ctx.zero, ctx.zero
    for k in range(n):
        c = x - table.alpha[k]
        b = table.beta[k]
        nxt = c * p[k] - b * pm
        dnxt = p[k] + c * dp[k] - b * dpm
        ddnxt = 2 * dp[k] + c * ddp[k] - b * ddpm
        pm, dpm, ddpm = p[k], dp[k], ddp[k]
        p.append(nxt)
        dp.append(dnxt)
        ddp.append(ddnxt)
    return p, dp, ddp


def eval_poly(table: RecurrenceTable, n: int, x):
    """(P_n(x), P_n'(x), P_n''(x)) by the differentiated three-term recurrence."""
    p, dp, ddp = eval_all(table, x, n)
    return p[n], dp[n], ddp[n]


def _values(table, x, n):
    # plain values only, in the context of x (quadrature nodes)
    ctx = x.context
    vals = [ctx.one]
    pm = ctx.zero
    for k in range(n):
        nxt = (x - table.alpha[k]) * vals[k] - table.beta[k] * pm
        pm = vals[k]
        vals.append(nxt)
    return vals


def _weight_in(params, x):
    ctx = x.context
    lam, t = params.in_ctx(ctx)
    return x**lam * ctx.exp(-(x**3) - t / x)


def orthogonality_residual(table: RecurrenceTable, m: int, n: int):
    """|<P_m, P_n>| / sqrt(h_m h_n) by direct quadrature, for m != n."""
    if m == n:
        raise DegenerateArguments("orthogonality_residual needs m != n")
    _check_degree(table, max(m, n))
    top = max(m, n)

    def integrand(x):
        vals = _values(table, x, top)
        return vals[m] * vals[n] * _weight_in(table.params, x)

    res = integrate_halfline(integrand, table.prec)
    return abs(res.value) / table.ctx.sqrt(table.h[m] * table.h[n])


def christoffel_darboux_residual(table: RecurrenceTable, n: int, x, y):
    """Relative defect of the Christoffel-Darboux summation formula."""
    ctx = table.ctx
    x, y = to_ctx(ctx, x), to_ctx(ctx, y)
    if x == y:
        raise DegenerateArguments("Christoffel-Darboux residual needs x != y")
    if n < 1:
        raise ValueError("n must be at least 1")
    px, _, _ = eval_all(table, x, n)
    py, _, _ = eval_all(table, y, n)
    lhs = ctx.fsum(px[j] * py[j] / table.h[j] for j in range(n))
    rhs = (px[n] * py[n - 1] - py[n] * px[n - 1]) / (table.h[n - 1] * (x - y))
    return abs(lhs - rhs) / abs(lhs)


def stieltjes_recurrence(params: WeightParams, nmax: int, prec: PrecisionSpec):
    """Independent construction by orthogonalisation with quadrature inner
    products (Stieltjes procedure).  Meant as an oracle for small nmax.

    Returns alpha[0..nmax], beta[0..nmax] (beta[0] = 0) and h[0..nmax].
    """
    ctx = prec.ctx
    alpha, beta, h = [], [ctx.zero], []

    class _Partial:
        pass

    partial = _Partial()
    for k in range(nmax + 1):
        partial.alpha, partial.beta = alpha, beta

        def integrand(x, k=k):
            vals = _values(partial, x, k)
            pk2w = vals[k] ** 2 * _weight_in(params, x)
            return [pk2w, x * pk2w]

        norm, first = (r.value for r in integrate_halfline_many(integrand, prec))
        h.append(norm)
        alpha.append(first / norm)
        if k >= 1:
            beta.append(norm / h[k - 1])
    return alpha, beta, h


def precision_report(table: RecurrenceTable) -> dict:
    """Summary of the precision budget for a built table."""
    return {
        "digits": table.prec.digits,
        "guard": table.prec.guard,
        "working": table.prec.working,
        "lost_digits": table.lost_digits,
        "surviving_digits": table.prec.working - table.lost_digits,
        "loss_per_degree": table.lost_digits / max(table.nmax, 1),
        "log10_D_nmax": float(table.ctx.log10(table.hankel[table.nmax])) if table.nmax else 0.0,
        "nmax": table.nmax,
        "guard_rule": math.isclose(table.prec.guard, recurrence_guard(table.nmax)),
    }
