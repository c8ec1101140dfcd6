import dataclasses

import pytest

from perturbed_airy import (
    CLOSED_FORM,
    IDENTITIES,
    INTEGRAL,
    DenominatorVanishes,
    DomainError,
    WeightParams,
    aux_Rr,
    build_aux,
    build_system,
    identity_residuals,
    ladder_AB,
    ladder_coeffs,
    ladder_residuals,
    star_closed,
    star_integral,
)
from perturbed_airy.ladder import compatibility_terms, ladder_integral_AB, subleading_from_identity
from perturbed_airy.report import residual_from_terms


def tiny(table, off):
    return table.ctx.mpf(10) ** (-(table.prec.digits - off))


def log_spaced(ctx, a, b, count):
    a, b = ctx.mpf(a), ctx.mpf(b)
    return [a * (b / a) ** (ctx.mpf(k) / (count - 1)) for k in range(count)]


def test_aux_at_zero(table14):
    R0, r0 = aux_Rr(table14, 0)
    assert r0 == 0
    assert R0 == 3 * (table14.alpha[0] ** 2 + table14.beta[1])


def test_aux_explicit(table14):
    t = table14
    R3, r3 = aux_Rr(t, 3)
    assert R3 == 3 * (t.alpha[3] ** 2 + t.beta[3] + t.beta[4])
    assert r3 == 3 * (t.alpha[3] + t.alpha[2]) * t.beta[3] - 3
    with pytest.raises(IndexError):
        aux_Rr(t, t.nmax)


def test_aux_table_invariants(aux14):
    assert aux14.r[0] == 0
    assert all(R > 0 for R in aux14.R)
    assert all(Rs > 0 for Rs in aux14.Rstar)
    assert aux14.star_path == INTEGRAL and not aux14.degenerate


def test_star_integral_degenerate_at_t0():
    table = build_system(WeightParams("1/2", 0), 6, 40)
    assert star_integral(table.params, table, 3) == (0, 0)
    aux = build_aux(table)
    assert aux.degenerate and all(v == 0 for v in aux.Rstar + aux.rstar)


def test_star_integral_against_re2(table14, half_one):
    R1s, _ = star_integral(half_one, table14, 1)
    assert R1s > 0
    R4s, r4s = star_integral(half_one, table14, 4)
    R3s, _ = star_integral(half_one, table14, 3)
    res = residual_from_terms([r4s**2, -r4s, -table14.beta[4] * R4s * R3s])
    assert res.rel < tiny(table14, 10)


def test_star_integral_matches_shared_quadrature(table14, aux14, half_one):
    Rs, rs = star_integral(half_one, table14, 6)
    assert abs(Rs - aux14.Rstar[6]) < tiny(table14, 10) * Rs
    assert abs(rs - aux14.rstar[6]) < tiny(table14, 10) * abs(rs)


def test_dual_path(table14, aux14):
    for n in range(1, table14.nmax - 1):
        Rs, rs = star_closed(table14, n)
        assert abs(Rs - aux14.Rstar[n]) <= tiny(table14, 10) * Rs
        assert abs(rs - aux14.rstar[n]) <= tiny(table14, 10) * abs(rs)


def test_closed_form_lambda_zero():
    table = build_system(WeightParams(0, 1), 8, 40)
    R, r = zip(*(aux_Rr(table, k) for k in range(3)))
    Rs, _ = star_closed(table, 1)
    assert Rs == r[1] + r[2] + table.alpha[1] * R[1]


def test_closed_form_n0_extension(table14, aux14):
    Rs0, rs0 = star_closed(table14, 0)
    assert rs0 == 0
    assert abs(Rs0 - aux14.Rstar[0]) <= tiny(table14, 10) * Rs0


def test_closed_form_range(table14):
    with pytest.raises(IndexError):
        star_closed(table14, table14.nmax - 1)


def test_denominator_vanishes(table14):
    # choose alpha_3 so that r_3 = 3(alpha_3 + alpha_2) beta_3 - 3 equals lambda/2
    t = table14
    lam = t.ctx.mpf(1) / 2
    alpha = list(t.alpha)
    alpha[3] = (3 + lam / 2) / (3 * t.beta[3]) - alpha[2]
    rigged = dataclasses.replace(t, alpha=tuple(alpha))
    with pytest.raises(DenominatorVanishes):
        star_closed(rigged, 3)
    closed = build_aux(rigged, CLOSED_FORM)
    assert closed.rstar[3] is None and closed.Rstar[3] is not None


def test_ladder_AB_limits(table14, aux14):
    c = ladder_coeffs(table14, aux14, 4)
    ctx = table14.ctx
    A, B = ladder_AB(c, 1)
    assert A == 3 + 3 * c.alpha + c.R + c.Rstar
    assert B == 3 * c.beta + c.r + c.rstar
    big = ctx.mpf(10) ** 30
    A, _ = ladder_AB(c, big)
    assert abs(A / big - 3) < ctx.mpf(10) ** -28
    with pytest.raises(DomainError):
        ladder_AB(c, 0)


def test_ladder_AB_against_defining_integrals(table14, aux14, half_one):
    c = ladder_coeffs(table14, aux14, 2)
    A, B = ladder_AB(c, "0.7")
    Ai, Bi = ladder_integral_AB(half_one, table14, 2, "0.7")
    assert abs(A - Ai) <= tiny(table14, 10) * abs(A)
    assert abs(B - Bi) <= tiny(table14, 10) * abs(B)


def test_ladder_residuals(table14, aux14, half_one):
    bound = tiny(table14, 10)
    assert ladder_residuals(half_one, table14, aux14, 1, [1]).max_rel() < bound
    xs = log_spaced(table14.ctx, "0.05", 5, 10)
    report = ladder_residuals(half_one, table14, aux14, 5, xs)
    assert report.names() == ["lowering", "raising", "S1", "S2'"]
    assert report.max_rel() < bound


def test_s2_without_sum_fails(table14, aux14, half_one):
    terms = compatibility_terms(half_one, table14, aux14, 5, "1.1")["S2'"]
    assert residual_from_terms(terms).rel < tiny(table14, 10)
    assert residual_from_terms([terms[0], terms[1], terms[3]]).rel > 1e-3


def test_ladder_residual_domain(table14, aux14, half_one):
    with pytest.raises(DomainError):
        ladder_residuals(half_one, table14, aux14, 2, [0])
    with pytest.raises(IndexError):
        ladder_residuals(half_one, table14, aux14, table14.nmax - 1, [1])


def test_seven_identities(table14, aux14):
    for n in range(1, 9):
        report = identity_residuals(table14, aux14, n)
        assert tuple(report.names()) == IDENTITIES
        assert report.max_rel() < table14.ctx.mpf(10) ** -45


def test_identities_need_integral_path(table14):
    with pytest.raises(ValueError):
        identity_residuals(table14, build_aux(table14, CLOSED_FORM), 2)


def test_subleading_recovered(table14, aux14):
    for n in range(1, 9):
        p = subleading_from_identity(table14, aux14, n)
        assert abs(p - table14.p1[n]) <= tiny(table14, 10) * abs(p)


def test_beta_perturbation_sensitivity(table14, aux14):
    ctx = table14.ctx
    n = 4
    eps = ctx.mpf(10) ** -20
    beta = list(table14.beta)
    beta[n] += eps
    shaken = dataclasses.replace(table14, beta=tuple(beta))
    base = identity_residuals(table14, aux14, n).records[0].residuals["re2"]
    moved = identity_residuals(shaken, aux14, n).records[0].residuals["re2"]
    # d/d beta_n of the re2 residual is R*_n R*_{n-1}
    expected = eps * aux14.Rstar[n] * aux14.Rstar[n - 1]
    assert base.abs < ctx.mpf(10) ** -50
    assert abs(moved.abs - expected) < expected * ctx.mpf(10) ** -10
