"""The weight x^lam * exp(-x^3 - t/x) on (0, inf), its potential, and moments."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath.libmp import repr_dps

from .errors import CertificationFailure, Divergent, DomainError
from .numeric import (
    PrecisionSpec,
    context,
    derivative_t,
    integrate_halfline,
    integrate_halfline_many,
    to_ctx,
)


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through ``repr`` so that ``0.1`` means one tenth rather than
    the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if hasattr(value, "_mpf_"):
        if not value.context.isfinite(value):
            raise DomainError(f"{value} has no rational value")
        # man_exp drops the sign, so read the raw tuple
        sign, man, exp, _ = value._mpf_
        return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)
    if isinstance(value, float):
        value = repr(value)
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    """Shortest exact text for ``q``: a decimal when it terminates, else p/q."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(q.numerator)
    scaled = q * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0").rstrip(".")


@dataclass(frozen=True)
class WeightParams:
    """Exponent ``lam`` (lambda) and perturbation strength ``t``, stored exactly."""

    lam: Fraction
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", as_fraction(self.lam))
        object.__setattr__(self, "t", as_fraction(self.t))
        if not self.lam > -1:
            raise DomainError(f"lambda must exceed -1, got {self.lam}")
        if self.t < 0:
            raise DomainError(f"t must be non-negative, got {self.t}")

    def in_ctx(self, ctx):
        return to_ctx(ctx, self.lam), to_ctx(ctx, self.t)

    def with_t(self, t) -> "WeightParams":
        return WeightParams(self.lam, t)

    def to_dict(self):
        return {"lambda": format_fraction(self.lam), "t": format_fraction(self.t)}


def _ctx_for(x, prec):
    if prec is not None:
        return prec.ctx
    return getattr(x, "context", None) or PrecisionSpec().ctx


def weight_eval(params: WeightParams, x, prec: PrecisionSpec | None = None):
    ctx = _ctx_for(x, prec)
    x = to_ctx(ctx, x)
    if x <= 0:
        raise DomainError("the weight is defined for x > 0")
    lam, t = params.in_ctx(ctx)
    return x**lam * ctx.exp(-(x**3) - t / x)


def v_prime(params: WeightParams, x, ctx):
    lam, t = params.in_ctx(ctx)
    return 3 * x**2 - lam / x - t / x**2


def potential_parts(params: WeightParams, x, y, prec: PrecisionSpec | None = None):
    """Return v(x), v'(x) and the divided difference (v'(x) - v'(y))/(x - y).

    The divided difference uses its closed form, so x == y is allowed and
    gives v''(x).
    """
    ctx = _ctx_for(x, prec)
    x, y = to_ctx(ctx, x), to_ctx(ctx, y)
    if x <= 0 or y <= 0:
        raise DomainError("potential_parts needs x, y > 0")
    lam, t = params.in_ctx(ctx)
    v = x**3 - lam * ctx.log(x) + t / x
    kernel = 3 * (x + y) + lam / (x * y) + t / (x * y**2) + t / (x**2 * y)
    return v, v_prime(params, x, ctx), kernel


def _check_moment_index(params, j):
    if params.t == 0 and j + params.lam <= -1:
        raise Divergent(f"moment j={j} diverges at t=0 for lambda={params.lam}")


def moment(params: WeightParams, j: int, prec: PrecisionSpec):
    """The j-th moment by half-line quadrature; negative j needs t > 0."""
    _check_moment_index(params, j)

    def integrand(x):
        ctx = x.context
        lam, t = params.in_ctx(ctx)
        return x ** (lam + j) * ctx.exp(-(x**3) - t / x)

    return integrate_halfline(integrand, prec).value


def gamma_moment(params: WeightParams, j: int, ctx):
    """Closed form Gamma((j + lam + 1)/3)/3, valid at t = 0 only."""
    if params.t != 0:
        raise DomainError("the Gamma closed form holds only at t = 0")
    lam = to_ctx(ctx, params.lam)
    return ctx.gamma((j + lam + 1) / 3) / 3


def _all_moments(params, jmax, prec):
    def integrand(x):
        ctx = x.context
        lam, t = params.in_ctx(ctx)
        w = x**lam * ctx.exp(-(x**3) - t / x)
        out = [w]
        for _ in range(jmax):
            w = w * x
            out.append(w)
        return out

    return [r.value for r in integrate_halfline_many(integrand, prec)]


def pearson_residual(mu, params, j, ctx):
    """Relative residual of 3 mu[j+4] = (j + lam + 2) mu[j+1] + t mu[j]."""
    lam, t = params.in_ctx(ctx)
    lhs = 3 * mu[j + 4]
    rhs = (j + lam + 2) * mu[j + 1] + t * mu[j]
    return abs(lhs - rhs) / abs(lhs)


@dataclass(frozen=True)
class MomentTable:
    params: WeightParams
    prec: PrecisionSpec
    mu: tuple
    certified: bool
    pearson_worst: object = None
    pearson_worst_j: int | None = None
    derivative_checks: tuple = field(default=(), repr=False)

    @property
    def jmax(self) -> int:
        return len(self.mu) - 1

    def to_json(self) -> dict:
        ctx = self.prec.ctx
        d = self.params.to_dict()
        d.update(
            digits=self.prec.digits,
            guard=self.prec.guard,
            # enough digits to round-trip every binary mantissa exactly
            mu=[ctx.nstr(m, repr_dps(ctx.prec), strip_zeros=False) for m in self.mu],
        )
        return d

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_json(cls, data: dict) -> "MomentTable":
        params = WeightParams(data["lambda"], data["t"])
        prec = PrecisionSpec(int(data["digits"]), int(data.get("guard", 15)))
        ctx = prec.ctx
        mu = tuple(ctx.mpf(s) for s in data["mu"])
        return certify(params, prec, mu, strict=False, check_derivative=False)


def certify(params, prec, mu, *, strict=True, check_derivative=True):
    """Run the Pearson-recursion certification over a list of moments."""
    ctx = prec.ctx
    tol = ctx.mpf(10) ** (-(prec.digits - 5))
    worst, worst_j = ctx.zero, None
    for j in range(len(mu) - 4):
        res = pearson_residual(mu, params, j, ctx)
        if worst_j is None or res > worst:
            worst, worst_j = res, j
    ok = worst <= tol and all(m > 0 for m in mu)

    checks = []
    if check_derivative and params.t > 0:
        jmax = len(mu) - 1
        for j in sorted({0, jmax // 2, jmax}):
            d = derivative_t(lambda s: moment(params.with_t(s), j, prec), params.t, prec)
            below = mu[j - 1] if j > 0 else moment(params, -1, prec)
            rel = abs(d.value + below) / abs(below)
            checks.append((j, rel))
            # difference steps of t*10^(-D/4) leave about 3D/4 + guard digits
            if rel > ctx.mpf(10) ** (-(prec.digits // 2)):
                ok = False
                if strict:
                    raise CertificationFailure(
                        f"d mu_{j}/dt != -mu_{j - 1}: relative residual {ctx.nstr(rel, 5)}",
                        j=j,
                        residual=rel,
                    )
    if strict and not ok:
        raise CertificationFailure(
            f"Pearson recursion fails at j={worst_j}: relative residual {ctx.nstr(worst, 5)}",
            j=worst_j,
            residual=worst,
        )
    return MomentTable(params, prec, tuple(mu), ok, worst, worst_j, tuple(checks))


def moment_table(
    params: WeightParams,
    jmax: int,
    prec: PrecisionSpec,
    *,
    strict: bool = True,
    check_derivative: bool = True,
) -> MomentTable:
    """Moments mu_0..mu_jmax, certified through the Pearson recursion.

    With ``strict`` a failed certification raises; otherwise the table comes
    back with ``certified=False``.
    """
    if jmax < 4:
        raise ValueError("jmax must be at least 4")
    mu = _all_moments(params, jmax, prec)
    return certify(params, prec, mu, strict=strict, check_derivative=check_derivative)
