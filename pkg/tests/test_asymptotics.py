import math
from fractions import Fraction

import pytest
from flint import arb

from diamond.asymptotics import (alpha, beta, error_envelope, estimate, first_n_with_t_at_least,
                                 growth_parameters, k_constants, log_ratio_coefficients,
                                 log_ratio_expansion, log_ratio_model, main_term,
                                 relative_error_bound, x_of_n)
from diamond.ball import to_arb, working_precision
from diamond.bigseries import delta_table
from diamond.circle import main_formula_term
from diamond.errors import InvalidN, KOutOfRange, PreconditionViolated
from diamond.inequalities import n0


def test_x_examples():
    with working_precision(256):
        pi = arb.pi()
        assert x_of_n(3, 1).overlaps(2 * pi / 3)
        assert x_of_n(3, n0(3)).overlaps(12 * pi)
        assert x_of_n(1, 1).overlaps(pi * arb(20).sqrt() / 6)


@pytest.mark.parametrize("k", [3, 5, 8, 20])
def test_x_at_n0(k):
    with working_precision(256):
        assert x_of_n(k, n0(k)).overlaps(4 * arb.pi() / arb(3).sqrt() * arb(k) ** (arb(3) / 2))


def test_x_invalid():
    with pytest.raises(InvalidN):
        x_of_n(3, Fraction(1, 3))


@pytest.mark.parametrize("k", range(3, 51))
def test_constant_invariants(k):
    a, b = alpha(k), beta(k)
    assert Fraction(17, 7) <= a < Fraction(5, 2)
    assert Fraction(5, 7) <= b < Fraction(5, 2)
    kc = k_constants(k)
    with working_precision(256):
        assert kc.delta.value > 0
        assert kc.delta.value >= 6 * (arb(2) / 5).sqrt() / (2 * k + 1)
        pi = arb.pi()
        s = 2 * to_arb(a) * pi ** 3 / 18 + arb(2).sqrt() * pi ** (arb(3) / 2) * to_arb(b) ** (arb(3) / 4) / 3
        assert s < 14
        assert kc.A.value < kc.A_tilde.value


def test_constants_against_floats():
    kc = k_constants(3)
    a, b = 17 / 7, 5 / 7
    C = 432 * math.sqrt(2) * 27 * math.exp(math.pi) / (math.pi ** 2.5 * a ** 0.75)
    assert float(kc.delta) == pytest.approx(math.sqrt(a) - math.sqrt(b), rel=1e-14)
    assert float(kc.C) == pytest.approx(C, rel=1e-13)
    assert float(kc.A) == pytest.approx(1728 * C / (math.pi ** 4 * math.sqrt(a)), rel=1e-13)


def test_envelope_k3_n100():
    M = main_term(3, 100)
    assert M.is_positive()
    d = abs(M - delta_table(3, 100)[100])
    assert d <= error_envelope(3, 100)


def test_envelope_k3_n526():
    R = error_envelope(3, 526)
    assert R.is_positive() and R.rel_accuracy_bits() > 200


def test_envelope_k2():
    with pytest.raises(KOutOfRange):
        error_envelope(2, 100)


@pytest.mark.parametrize("k,n", [(1, 50), (3, 100)])
def test_main_term_matches_formula(k, n):
    assert main_term(k, n).overlaps(main_formula_term(k, n))


@pytest.mark.parametrize("k,n", [(3, 526), (5, 1000)])
def test_relative_bound(k, n):
    v = delta_table(k, n)[n]
    M = main_term(k, n)
    eps = abs(M - v) / M
    assert eps <= relative_error_bound(k, n)


def test_relative_bound_boundary():
    n = first_n_with_t_at_least(3, 4)
    relative_error_bound(3, n)
    with pytest.raises(PreconditionViolated):
        relative_error_bound(3, n - 1)


def test_estimate():
    e = estimate(3, 600)
    assert e.M.is_positive() and e.R_bound is not None and e.eps_bound is not None
    e1 = estimate(1, 600)
    assert e1.R_bound is None and e1.eps_bound is None


def test_a1_positive():
    for n in (10, 100, 10 ** 4, 10 ** 6):
        assert log_ratio_coefficients(3, n, 1)[0].is_positive()


def _log_ratio(k, n):
    c = delta_table(k, n + 1).coeffs
    with working_precision(256):
        return (to_arb(c[n + 1]) / c[n]).log()


def test_log_ratio_deviation_shrinks():
    devs = []
    for n in (10 ** 3, 10 ** 4):
        model = log_ratio_model(3, n, 1, 4).value
        devs.append(float(abs(model - _log_ratio(3, n)).upper()))
    assert devs[1] < devs[0]


def test_expansion_precondition():
    coeffs, note = log_ratio_expansion(3, 100, 1, 3)
    assert len(coeffs) == 3 and "not certified" in note
    with pytest.raises(PreconditionViolated):
        log_ratio_expansion(3, 1, 5, 2)


def test_delta_model_matches_a2():
    prev = None
    for n in (10 ** 4, 10 ** 6, 10 ** 8):
        A2 = log_ratio_coefficients(3, n, 2)[1]
        _, d = growth_parameters(3, n)
        with working_precision(256):
            rel = float(abs((-A2.value).sqrt() / d.value - 1).upper())
        if prev is not None:
            assert rel < prev
        prev = rel
    assert prev < 1e-3
