"""Checks of the nonlinear difference system for (alpha_n, beta_n) and of
the second-order linear ODE satisfied by P_n."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import CoefficientPole
from .ladder import AuxTable, LadderCoeffs, aux_Rr, star_closed
from .numeric import to_ctx
from .recurrence import RecurrenceTable, eval_poly
from .report import ResidualReport
from .weight import v_prime


def difference_terms(table: RecurrenceTable, aux: AuxTable, n: int):
    """Additive terms of the two difference equations at index n, each with
    the magnitude its largest product has before internal cancellation.

    Only alpha, beta enter: R_k and r_k come from aux (their closed forms),
    R*_n is eliminated through r_n + r_{n+1} + alpha_n R_n - lambda.  At
    t = 0 those eliminated factors vanish identically, so normalising by
    the computed products would divide roundoff by roundoff.
    """
    ctx = table.ctx
    lam, t = table.params.in_ctx(ctx)
    a, b = table.alpha, table.beta
    R, r = aux.R, aux.r
    Sn = r[n] + r[n + 1] + a[n] * R[n] - lam
    Sm = r[n - 1] + r[n] + a[n - 1] * R[n - 1] - lam
    X = Sn * b[n] * R[n - 1] + Sm * b[n] * R[n]
    d = 2 * r[n] - lam
    sSn = max(abs(r[n]), abs(r[n + 1]), abs(a[n] * R[n]), abs(lam))
    sSm = max(abs(r[n - 1]), abs(r[n]), abs(a[n - 1] * R[n - 1]), abs(lam))
    sX = sSn * abs(b[n] * R[n - 1]) + sSm * abs(b[n] * R[n])
    tr = abs(t * r[n])
    sd = max(abs(2 * r[n]), abs(lam))
    h1 = [(X + t * r[n]) * (X - t * r[n] + lam * t), -b[n] * d**2 * Sn * Sm]
    h1_scale = max(max(sX, tr) * max(sX, tr, abs(lam * t)), abs(b[n]) * sd**2 * sSn * sSm)
    h2 = [
        2 * X,
        2 * t * r[n],
        d * (a[n] * (Sn - 1) + 3 * b[n] ** 2 - 3 * b[n + 1] ** 2 - t),
        -d * b[n] * (3 * a[n] * a[n - 1] + R[n] + R[n - 1]),
        d * b[n + 1] * (3 * a[n + 1] * a[n] + R[n + 1] + R[n]),
    ]
    h2_scale = max(
        2 * sX,
        2 * tr,
        sd * max(abs(a[n]) * (sSn + 1), 3 * b[n] ** 2, 3 * b[n + 1] ** 2, abs(t)),
        max(abs(v) for v in h2[3:]),
    )
    return {"h1": (h1, h1_scale), "h2": (h2, h2_scale)}


def difference_system_residuals(table: RecurrenceTable, aux: AuxTable, n: int) -> ResidualReport:
    if not 2 <= n <= table.nmax - 2:
        raise IndexError(f"difference system needs 2 <= n <= {table.nmax - 2}, got {n}")
    report = ResidualReport()
    for name, (terms, scale) in difference_terms(table, aux, n).items():
        report.add(n, None, name, terms, scale=scale)
    return report


@dataclass(frozen=True)
class OdeCoefficients:
    """P'' - c1 P' + c0 P = 0 with c1 = v' + A_n'/A_n and
    c0 = B_n' - B_n^2 - v' B_n + beta_n A_n A_{n-1} - A_n' B_n / A_n."""

    n: int
    c1: Callable
    c0: Callable
    current: LadderCoeffs
    previous: LadderCoeffs


def _closed_coeffs(table, n):
    R, r = aux_Rr(table, n)
    Rs, rs = star_closed(table, n)
    return LadderCoeffs(n, table.alpha[n], table.beta[n], R, Rs, r, rs)


def ode_coefficients(table: RecurrenceTable, aux: AuxTable, n: int) -> OdeCoefficients:
    """Assemble the ODE coefficients from the closed-form starred values.

    ``aux`` is accepted for interface symmetry; R_n and r_n are re-derived
    from the table so that only alpha, beta enter.
    """
    if not 1 <= n <= table.nmax - 2:
        raise IndexError(f"ode_coefficients needs 1 <= n <= {table.nmax - 2}")
    ctx = table.ctx
    cur = _closed_coeffs(table, n)
    prev = _closed_coeffs(table, n - 1)
    params = table.params
    beta = table.beta[n]
    floor = ctx.mpf(10) ** (-(table.prec.digits - 5))

    def A_checked(x):
        A = cur.A(x)
        if abs(A) < floor:
            raise CoefficientPole(f"A_{n}({ctx.nstr(x, 8)}) vanishes")
        return A

    def c1(x):
        x = to_ctx(ctx, x)
        return v_prime(params, x, ctx) + cur.dA(x) / A_checked(x)

    def c0(x):
        x = to_ctx(ctx, x)
        A, B, dA = A_checked(x), cur.B(x), cur.dA(x)
        vp = v_prime(params, x, ctx)
        return cur.dB(x) - B**2 - vp * B + beta * A * prev.A(x) - dA * B / A

    return OdeCoefficients(n, c1, c0, cur, prev)


def ode_residual(table: RecurrenceTable, aux: AuxTable, n: int, xs) -> ResidualReport:
    """|P_n'' - c1 P_n' + c0 P_n| relative to the largest of the three terms.

    The absolute residual is kept in each record as well, since the relative
    one loses meaning right at a zero of P_n.
    """
    coeffs = ode_coefficients(table, aux, n)
    report = ResidualReport()
    for x in xs:
        p, dp, ddp = eval_poly(table, n, x)
        report.add(n, x, "ode", [ddp, -coeffs.c1(x) * dp, coeffs.c0(x) * p])
    return report
