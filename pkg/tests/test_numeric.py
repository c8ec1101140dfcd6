import mpmath
import pytest

from perturbed_airy import (
    DomainError,
    NonConvergence,
    PoleOnBoundary,
    PrecisionSpec,
    derivative_t,
    integrate_halfline,
    integrate_interval,
    integrate_pv,
)
from perturbed_airy.errors import StepUnderflow
from perturbed_airy.numeric import context, to_ctx

P30 = PrecisionSpec(30)
P40 = PrecisionSpec(40)


def close(a, b, digits):
    return abs(a - b) <= mpmath.mpf(10) ** (-digits) * max(1, abs(b))


def test_precision_spec_invariants():
    assert PrecisionSpec(30).working == 45
    with pytest.raises(ValueError):
        PrecisionSpec(29)
    with pytest.raises(ValueError):
        PrecisionSpec(30, 9)
    assert PrecisionSpec(40, 20).with_guard(30).working == 70


def test_contexts_are_private():
    a, b = context(40), context(80)
    assert a is context(40)
    assert a.dps == 40 and b.dps == 80
    assert mpmath.mp.dps == 15


def test_halfline_cubic_exponential():
    ctx = P30.ctx
    res = integrate_halfline(lambda x: x.context.exp(-(x**3)), P30)
    assert close(res.value, ctx.gamma(ctx.mpf(1) / 3) / 3, 30)
    assert res.error_estimate <= P30.eps * max(1, abs(res.value))


def test_halfline_exact_derivative():
    res = integrate_halfline(lambda x: 3 * x**2 * x.context.exp(-(x**3)), P30)
    assert close(res.value, 1, 30)


def test_halfline_against_gauss_legendre_oracle():
    # composite Gauss-Legendre on (0,1) u (1,8); the tail past 8 is below e^-512
    oracle_ctx = context(70)
    f = lambda x: oracle_ctx.sqrt(x) * oracle_ctx.exp(-(x**3) - 1 / x)
    oracle = oracle_ctx.quad(f, [0, 1, 2, 4, 8], method="gauss-legendre")
    res = integrate_halfline(lambda x: x.context.sqrt(x) * x.context.exp(-(x**3) - 1 / x), P40)
    assert close(res.value, oracle, 40)


def test_halfline_rejects_non_finite():
    with pytest.raises(DomainError):
        integrate_halfline(lambda x: x.context.inf, P30)


def test_interval_with_endpoint_singularity():
    # integral of x^(-1/2) over (0, 4) is 4
    res = integrate_interval(lambda x: 1 / x.context.sqrt(x), 0, 4, P30)
    assert close(res.value, 4, 30)


def test_interval_requires_order():
    with pytest.raises(DomainError):
        integrate_interval(lambda x: x, 1, 0, P30)


@pytest.mark.parametrize(
    "g, pole, support, expected",
    [
        (lambda x: 1, 0, (-1, 1), 0),
        (lambda x: 1, 1, (0, 2), 0),
        (lambda x: x, mpmath.mpf(1) / 2, (0, 1), 1),
    ],
)
def test_pv_examples(g, pole, support, expected):
    res = integrate_pv(g, pole, support, P30)
    assert close(res.value, expected, 30)


def test_pv_off_centre():
    # PV int_0^1 dx/(x - 1/4) = ln 3
    ctx = P30.ctx
    res = integrate_pv(lambda x: 1, ctx.mpf(1) / 4, (0, 1), P30)
    assert close(res.value, ctx.log(3), 30)


def test_pv_with_hard_edge():
    # x = u^2 turns PV int_0^1 x^(-1/2)/(x - 1/4) dx into
    # PV int_0^1 2/(u^2 - 1/4) du = 2 ln|(u - 1/2)/(u + 1/2)| from 0 to 1
    ctx = P30.ctx
    c = ctx.mpf(1) / 4
    expected = 2 * ctx.log(ctx.mpf(1) / 3)
    res = integrate_pv(lambda x: 1 / x.context.sqrt(x), c, (0, 1), P30)
    assert close(res.value, expected, 28)


@pytest.mark.parametrize("pole", [0, 1, 2])
def test_pv_pole_on_boundary(pole):
    with pytest.raises(PoleOnBoundary):
        integrate_pv(lambda x: 1, pole, (0, 1), P30)


def test_derivative_polynomial():
    d = derivative_t(lambda t: t**2, 1, P30)
    assert close(d.value, 2, 30)


def test_derivative_exponential():
    ctx = P30.ctx
    d = derivative_t(lambda t: ctx.exp(-t), 1, P30)
    assert close(d.value, -ctx.exp(-1), 28)
    assert d.error < ctx.mpf(10) ** -25


def test_derivative_quintic_exact():
    d = derivative_t(lambda t: t**5 - 3 * t**4 + t, 2, P30)
    assert close(d.value, 5 * 16 - 3 * 4 * 8 + 1, 28)


def test_derivative_second_order_signature():
    ctx = P40.ctx
    d = derivative_t(lambda t: ctx.sin(t), 1, P40)
    e0, e1, e2 = (abs(c - ctx.cos(1)) for c in d.central)
    assert abs(e0 / e1 - 4) < 0.01 and abs(e1 / e2 - 4) < 0.01


def test_derivative_domain():
    with pytest.raises(DomainError):
        derivative_t(lambda t: t, 0, P30)


def test_derivative_step_underflow(monkeypatch):
    # steps of 10^(-D/4) only underflow when the context is far coarser
    # than the precision object claims
    prec = PrecisionSpec(30, 10)
    monkeypatch.setattr(PrecisionSpec, "ctx", property(lambda self: context(8)))
    with pytest.raises(StepUnderflow):
        derivative_t(lambda t: t, 1, prec)


def test_nonconvergence_for_non_integrable_tail():
    with pytest.raises(NonConvergence):
        integrate_halfline(lambda x: 1 / (1 + x), P30)


def test_to_ctx_fraction_exact():
    from fractions import Fraction

    ctx = context(50)
    assert to_ctx(ctx, Fraction(1, 3)) == ctx.mpf(1) / 3
    assert to_ctx(ctx, Fraction(-7, 2)) == ctx.mpf("-3.5")


def test_doubling_digits_is_consistent():
    f = lambda x: x.context.exp(-(x**3) - 2 / x) * x**2
    lo = integrate_halfline(f, PrecisionSpec(30)).value
    hi = integrate_halfline(f, PrecisionSpec(60)).value
    assert close(lo, hi, 30)
