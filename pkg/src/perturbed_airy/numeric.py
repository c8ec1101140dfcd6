"""Extended-precision kernels: precision contexts, double-exponential
quadrature on the half line and on finite intervals, principal-value
integrals, and Richardson-extrapolated differentiation.

Precision is never global.  Every kernel receives a :class:`PrecisionSpec`
and works inside a private :class:`mpmath.MPContext`; integrands are called
with ``mpf`` arguments belonging to that context and should do their
arithmetic in ``x.context``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath

from .errors import DomainError, NonConvergence, PoleOnBoundary, StepUnderflow

# extra digits the quadrature engine carries beyond the requested working
# precision so that its own rounding stays below the stopping tolerance
QUAD_EXTRA = 8
# trapezoid step of the coarsest level, in the transformed variable
_H0 = mpmath.mpf(1) / 2
_MIN_LEVEL = 3
_MAX_LEVEL = 14
_S_CAP = 16
_ASYMPTOTIC = mpmath.mpf(10) ** -3


@lru_cache(maxsize=None)
def context(dps: int) -> mpmath.ctx_mp.MPContext:
    """A private mpmath context fixed at ``dps`` decimal digits."""
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


@dataclass(frozen=True)
class PrecisionSpec:
    """Target accuracy ``digits`` plus ``guard`` extra working digits."""

    digits: int = 30
    guard: int = 15

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError(f"digits must be >= 30, got {self.digits}")
        if self.guard < 10:
            raise ValueError(f"guard must be >= 10, got {self.guard}")

    @property
    def working(self) -> int:
        return self.digits + self.guard

    @property
    def ctx(self):
        return context(self.working)

    @property
    def eps(self):
        """Claimed relative accuracy, 10**-digits."""
        return self.ctx.mpf(10) ** (-self.digits)

    def with_guard(self, guard: int) -> "PrecisionSpec":
        return PrecisionSpec(self.digits, guard)


@dataclass
class QuadratureResult:
    value: object
    error_estimate: object
    evaluations: int
    # sum of |terms|, the scale the stopping rule is measured against
    magnitude: object = field(default=0, repr=False)


def to_ctx(ctx, value):
    """Convert ints, Fractions, decimal strings and foreign mpfs into ``ctx``,
    rounding to its precision (``ctx.convert`` keeps a foreign mantissa)."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if hasattr(value, "_mpf_"):
        return ctx.mpf(value)
    return ctx.convert(value)


def _is_zero_vector(v):
    return all(c == 0 for c in v)


def _de_sum(f, transform, ctx, tol, *, vector=False, h0=_H0):
    """Adaptive trapezoid rule in a transformed variable ``s``.

    ``transform(s)`` returns ``(x, dx/ds)`` or ``None`` when ``s`` lies beyond
    the representable part of the domain.  The truncation window is fixed on
    the coarsest level by walking outward until three consecutive terms are
    negligible; each finer level halves the step and reuses all old nodes.
    """
    h0 = to_ctx(ctx, h0)
    evaluations = 0
    thresh = ctx.mpf(10) ** (-(ctx.dps + 5))

    def term(s):
        nonlocal evaluations
        mapped = transform(s)
        if mapped is None:
            return None
        x, dxds = mapped
        val = f(x)
        evaluations += 1
        vals = list(val) if vector else [val]
        out = []
        for v in vals:
            v = to_ctx(ctx, v)
            if not ctx.isfinite(v):
                raise DomainError(f"integrand is not finite at x={ctx.nstr(x, 10)}")
            out.append(v * dxds)
        return out

    first = term(ctx.zero)
    if first is None:
        raise DomainError("transform undefined at s=0")
    ncomp = len(first)
    peak = [abs(v) for v in first]
    total = list(first)
    absum = [abs(v) for v in first]

    def significant(vals):
        return any(abs(v) > thresh * m for v, m in zip(vals, peak) if m != 0) or (
            all(m == 0 for m in peak) and not _is_zero_vector(vals)
        )

    limits = []
    for direction in (1, -1):
        k = 0
        quiet = 0
        last = None
        while True:
            k += 1
            s = direction * k * h0
            if abs(s) > _S_CAP:
                raise NonConvergence("integrand not negligible at the truncation cap")
            vals = term(s)
            if vals is None:
                break
            for i, v in enumerate(vals):
                total[i] += v
                absum[i] += abs(v)
                if abs(v) > peak[i]:
                    peak[i] = abs(v)
            mags = [abs(v) for v in vals]
            decreasing = last is None or all(a <= b for a, b in zip(mags, last))
            last = mags
            if not significant(vals) and decreasing:
                quiet += 1
                if quiet == 3:
                    break
            else:
                quiet = 0
        limits.append(k)
    k_hi, k_lo = limits

    h = h0
    estimate = [v * h for v in total]
    magnitude = [v * h for v in absum]
    errors = [None] * ncomp
    history = []
    for level in range(1, _MAX_LEVEL + 1):
        h = h / 2
        new = [ctx.zero] * ncomp
        new_abs = [ctx.zero] * ncomp
        # odd multiples of the new step strictly inside the window
        scale = 2**level
        for m in range(-scale * k_lo + 1, scale * k_hi, 2):
            vals = term(m * h)
            if vals is None:
                continue
            for i, v in enumerate(vals):
                new[i] += v
                new_abs[i] += abs(v)
        refined = [e / 2 + h * v for e, v in zip(estimate, new)]
        magnitude = [a / 2 + h * v for a, v in zip(magnitude, new_abs)]
        errors = [abs(r - e) for r, e in zip(refined, estimate)]
        estimate = refined
        ok = all(err <= tol * mag for err, mag in zip(errors, magnitude))
        if ok and level >= 2:
            break
        worst = max(
            (err / mag for err, mag in zip(errors, magnitude) if mag != 0),
            default=ctx.zero,
        )
        history.append(worst)
        # stall test only once the rule has entered its convergent regime;
        # under-resolved narrow peaks give O(1) increments on early levels
        if level >= _MIN_LEVEL and len(history) >= 3 and history[-3] < _ASYMPTOTIC:
            if history[-1] > history[-2] / 2 and history[-2] > history[-3] / 2:
                raise NonConvergence(
                    f"refinement stalled at level {level}: relative increment "
                    f"{ctx.nstr(worst, 5)}"
                )
    else:
        raise NonConvergence(f"no convergence after {_MAX_LEVEL} levels")

    results = [
        QuadratureResult(v, e, evaluations, mag)
        for v, e, mag in zip(estimate, errors, magnitude)
    ]
    return results if vector else results[0]


def _halfline_transform(ctx):
    # x = exp(s - exp(-s)): doubly-exponential decay at both ends of s for
    # integrands that vanish like x^a (a > -1) at 0 and like exp(-x^3) at inf
    def transform(s):
        e = ctx.exp(-s)
        x = ctx.exp(s - e)
        return x, x * (1 + e)

    return transform


def _finite_transform(ctx, a, b):
    mid = (a + b) / 2
    half = (b - a) / 2
    halfpi = ctx.pi / 2
    # below these gaps the node would round onto the endpoint itself; an
    # endpoint at 0 has no such limit
    unit = ctx.mpf(10) ** (-(ctx.dps - 3))
    floor_a, floor_b = abs(a) * unit, abs(b) * unit

    def transform(s):
        u = halfpi * ctx.sinh(s)
        # distance to the nearer endpoint, free of cancellation
        gap = 2 * half / (1 + ctx.exp(2 * abs(u)))
        if u > 0:
            if gap <= floor_b:
                return None
            x = b - gap
        elif u < 0:
            if gap <= floor_a:
                return None
            x = a + gap
        else:
            x = mid
        return x, half * halfpi * ctx.cosh(s) / ctx.cosh(u) ** 2

    return transform


def integrate_halfline(f: Callable, prec: PrecisionSpec) -> QuadratureResult:
    """Integral of ``f`` over (0, inf) to ``prec.working`` digits.

    The substitution x = exp(s - exp(-s)) turns an essential zero at the
    origin (or an x**a endpoint with a > -1) and cubic-exponential decay at
    infinity into doubly-exponential tails, so a plain trapezoid rule in s
    with step halving converges geometrically in the number of digits.
    """
    ctx = context(prec.working + QUAD_EXTRA)
    tol = ctx.mpf(10) ** (-prec.working)
    res = _de_sum(f, _halfline_transform(ctx), ctx, tol)
    return _round_result(res, prec)


def integrate_halfline_many(f: Callable, prec: PrecisionSpec) -> list[QuadratureResult]:
    """Vector form of :func:`integrate_halfline`.

    ``f(x)`` returns a sequence; all components share nodes and every one of
    them must meet the tolerance.
    """
    ctx = context(prec.working + QUAD_EXTRA)
    tol = ctx.mpf(10) ** (-prec.working)
    res = _de_sum(f, _halfline_transform(ctx), ctx, tol, vector=True)
    return [_round_result(r, prec) for r in res]


def integrate_interval(f: Callable, a, b, prec: PrecisionSpec) -> QuadratureResult:
    """Tanh-sinh rule on (a, b); tolerates integrable endpoint singularities."""
    ctx = context(prec.working + QUAD_EXTRA)
    a, b = to_ctx(ctx, a), to_ctx(ctx, b)
    if not a < b:
        raise DomainError("integrate_interval needs a < b")
    tol = ctx.mpf(10) ** (-prec.working)
    res = _de_sum(f, _finite_transform(ctx, a, b), ctx, tol)
    return _round_result(res, prec)


def _round_result(res, prec):
    ctx = prec.ctx
    return QuadratureResult(
        to_ctx(ctx, res.value),
        to_ctx(ctx, res.error_estimate),
        res.evaluations,
        to_ctx(ctx, res.magnitude),
    )


def integrate_pv(numerator: Callable, pole, support: Sequence, prec: PrecisionSpec) -> QuadratureResult:
    """Cauchy principal value of the integral of numerator(x)/(x - pole).

    Singularity subtraction: the regular part (g(x) - g(c))/(x - c) goes to
    the tanh-sinh rule and g(c)*log((b - c)/(c - a)) is added exactly.
    """
    ctx = context(prec.working + QUAD_EXTRA)
    a, b = (to_ctx(ctx, v) for v in support)
    c = to_ctx(ctx, pole)
    if not a < c < b:
        raise PoleOnBoundary(f"pole {ctx.nstr(c, 10)} not inside ({ctx.nstr(a, 10)}, {ctx.nstr(b, 10)})")
    gc = to_ctx(ctx, numerator(c))
    # inside this radius the difference quotient would cancel away more
    # than a third of the digits; a cubic Taylor remainder is below eps there
    near = (b - a) * ctx.mpf(10) ** (-(ctx.dps // 3))
    taylor = []

    def regular(x):
        d = x - c
        if abs(d) < near:
            if not taylor:
                taylor.extend(ctx.diffs(numerator, c, 3))
            _, g1, g2, g3 = taylor
            return g1 + d * (g2 / 2 + d * g3 / 6)
        return (numerator(x) - gc) / d

    tol = ctx.mpf(10) ** (-prec.working)
    res = _de_sum(regular, _finite_transform(ctx, a, b), ctx, tol)
    res.value += gc * ctx.log((b - c) / (c - a))
    return _round_result(res, prec)


@dataclass
class DerivativeResult:
    value: object
    error: object
    # plain central differences at steps h, h/2, h/4 (before extrapolation)
    central: tuple
    step: object


def derivative_t(g: Callable, t0, prec: PrecisionSpec) -> DerivativeResult:
    """Derivative of ``g`` at ``t0`` by Richardson-extrapolated central
    differences with steps h, h/2, h/4 where h = t0 * 10**(-digits/4).

    Two extrapolation sweeps remove the h**2 and h**4 terms, leaving an
    O(h**6) truncation error.  The reported error is the size of the last
    extrapolation increment.
    """
    ctx = prec.ctx
    t0 = to_ctx(ctx, t0)
    if t0 <= 0:
        raise DomainError("derivative_t needs t0 > 0")
    h = t0 * ctx.mpf(10) ** (-ctx.mpf(prec.digits) / 4)
    if h / 4 < 10 * ctx.eps * t0:
        raise StepUnderflow("difference step below 10 ulp at working precision")
    steps = [h, h / 2, h / 4]
    central = []
    for step in steps:
        plus = to_ctx(ctx, g(t0 + step))
        minus = to_ctx(ctx, g(t0 - step))
        central.append((plus - minus) / (2 * step))
    first = [(4 * central[1] - central[0]) / 3, (4 * central[2] - central[1]) / 3]
    value = (16 * first[1] - first[0]) / 15
    return DerivativeResult(value, abs(value - first[1]), tuple(central), h)
