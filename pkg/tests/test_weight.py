import json
from fractions import Fraction

import mpmath
import pytest

from perturbed_airy import (
    CertificationFailure,
    Divergent,
    DomainError,
    MomentTable,
    PrecisionSpec,
    WeightParams,
    moment,
    moment_table,
    potential_parts,
    weight_eval,
)
from perturbed_airy.numeric import context
from perturbed_airy.weight import as_fraction, certify, format_fraction, gamma_moment, pearson_residual

P30 = PrecisionSpec(30)
P40 = PrecisionSpec(40)


def test_params_are_exact():
    p = WeightParams(0.1, "1/3")
    assert p.lam == Fraction(1, 10)
    assert p.t == Fraction(1, 3)
    assert p.to_dict() == {"lambda": "0.1", "t": "1/3"}


@pytest.mark.parametrize("lam, t", [(-1, 0), (-2, 1), (0, -0.1)])
def test_params_reject_invalid(lam, t):
    with pytest.raises(DomainError):
        WeightParams(lam, t)


def test_as_fraction_from_mpf():
    ctx = context(30)
    assert as_fraction(ctx.mpf("0.75")) == Fraction(3, 4)


@pytest.mark.parametrize("q, text", [(Fraction(1, 2), "0.5"), (Fraction(-5, 4), "-1.25"), (Fraction(2, 3), "2/3"), (Fraction(7), "7")])
def test_format_fraction(q, text):
    assert format_fraction(q) == text
    assert Fraction(text) == q


def test_weight_values():
    ctx = P30.ctx
    assert abs(weight_eval(WeightParams(0, 0), 1, P30) - ctx.exp(-1)) < ctx.eps
    assert abs(weight_eval(WeightParams(2, 1), 1, P30) - ctx.exp(-2)) < ctx.eps


def test_weight_essential_zero():
    p = WeightParams("1/2", 1)
    # below any power of x near the origin
    for x, k in [("0.001", 100), ("0.0001", 1000)]:
        assert weight_eval(p, x, P30) < P30.ctx.mpf(x) ** k


def test_weight_domain():
    with pytest.raises(DomainError):
        weight_eval(WeightParams(0, 0), 0, P30)


def test_potential_parts():
    v, vp, K = potential_parts(WeightParams(0, 0), 2, 3, P30)
    assert vp == 12 and v == 8
    _, vp1, K = potential_parts(WeightParams(1, 1), 1, 2, P30)
    _, vp2, _ = potential_parts(WeightParams(1, 1), 2, 1, P30)
    assert K == P30.ctx.mpf("10.25")
    assert abs(K - (vp1 - vp2) / (1 - 2)) < P30.eps


def test_kernel_diagonal_is_second_derivative():
    p = WeightParams("0.5", "0.7")
    ctx = P30.ctx
    x = ctx.mpf("1.3")
    _, _, K = potential_parts(p, x, x, P30)
    lam, t = p.in_ctx(ctx)
    assert abs(K - (6 * x + lam / x**2 + 2 * t / x**3)) < 10 * P30.eps


def test_potential_domain():
    with pytest.raises(DomainError):
        potential_parts(WeightParams(0, 0), 1, 0, P30)


@pytest.mark.parametrize("j, expected", [(0, None), (2, Fraction(1, 3))])
def test_moment_t0_gamma(j, expected):
    ctx = P30.ctx
    mu = moment(WeightParams(0, 0), j, P30)
    if expected is None:
        expected = ctx.gamma(ctx.mpf(1) / 3) / 3
    else:
        expected = ctx.mpf(expected.numerator) / expected.denominator
    assert abs(mu - expected) < P30.eps


def test_moment_against_gauss_legendre_oracle():
    octx = context(70)
    f = lambda x: octx.sqrt(x) * octx.exp(-(x**3) - 1 / x)
    oracle = octx.quad(f, [0, 1, 2, 4, 8], method="gauss-legendre")
    mu = moment(WeightParams("1/2", 1), 0, P40)
    assert mu > 0
    assert abs(mu - oracle) < P40.eps * oracle


def test_negative_moments_need_t():
    with pytest.raises(Divergent):
        moment(WeightParams(0, 0), -1, P30)
    assert moment(WeightParams(0, 1), -3, P30) > 0


def test_gamma_moment_only_at_t0():
    with pytest.raises(DomainError):
        gamma_moment(WeightParams(0, 1), 0, P30.ctx)


@pytest.mark.parametrize("t", [0, 1])
def test_pearson_small_table(t):
    params = WeightParams(0, t)
    table = moment_table(params, 8, P30)
    assert table.certified
    mu = table.mu
    ctx = P30.ctx
    # 3 mu_4 = 2 mu_1 + t mu_0
    assert abs(3 * mu[4] - 2 * mu[1] - t * mu[0]) < ctx.mpf(10) ** -25
    assert all(m > 0 for m in mu)


def test_derivative_spot_checks_recorded():
    table = moment_table(WeightParams("1/2", 1), 8, P30)
    assert [j for j, _ in table.derivative_checks] == [0, 4, 8]
    assert all(rel < mpmath.mpf(10) ** -15 for _, rel in table.derivative_checks)


def test_certification_rejects_corrupted_moments():
    params = WeightParams("1/2", 1)
    table = moment_table(params, 10, P30, check_derivative=False)
    bad = list(table.mu)
    bad[6] *= 1 + P30.ctx.mpf(10) ** -20
    with pytest.raises(CertificationFailure) as info:
        certify(params, P30, bad, check_derivative=False)
    assert info.value.j in (2, 5, 6)
    loose = certify(params, P30, bad, strict=False, check_derivative=False)
    assert not loose.certified


def test_table_json_roundtrip():
    params = WeightParams("1/2", 1)
    table = moment_table(params, 9, P30, check_derivative=False)
    data = json.loads(json.dumps(table.to_json()))
    assert set(data) == {"lambda", "t", "digits", "guard", "mu"}
    assert all(isinstance(s, str) for s in data["mu"])
    again = MomentTable.from_json(data)
    assert again.certified
    assert again.content_hash() == table.content_hash()
    assert again.mu == table.mu


def test_pearson_residual_is_relative():
    params = WeightParams(2, 5)
    table = moment_table(params, 12, P30, check_derivative=False)
    assert all(pearson_residual(table.mu, params, j, P30.ctx) < P30.eps for j in range(9))
