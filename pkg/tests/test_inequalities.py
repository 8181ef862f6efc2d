import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from diamond.bigseries import delta_table
from diamond.errors import KOutOfRange
from diamond.inequalities import (CertVerdict, Verdict, certified_threshold,
                                  count_distinct_real_roots, forward_difference, hermite_convergence_probe,
                                  hermite_poly, is_hyperbolic, jensen_poly, laguerre, logconcavity_certifier,
                                  multiplicative_check, n0, square_free_part, sturm_sequence, sweep_difference,
                                  sweep_laguerre, sweep_logconcave, sweep_multiplicative, sweep_turan,
                                  threshold_certificate, turan2_exact, turan_order)

X = sympy.Symbol("X")


def sympy_distinct_real(coeffs):
    p = sympy.Poly(list(reversed(coeffs)), X)
    return len(set(sympy.real_roots(p)))


def D(k, n):
    return delta_table(k, n)[n]


# -- polynomials -----------------------------------------------------------

def test_hyperbolic_examples():
    assert is_hyperbolic([-1, 0, 1])
    assert not is_hyperbolic([1, 0, 1])
    assert is_hyperbolic([1, 2, 1])  # double root
    assert is_hyperbolic([5])
    with pytest.raises(ValueError):
        is_hyperbolic([0])


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=7).filter(lambda c: c[-1] != 0))
def test_real_root_count_against_sympy(coeffs):
    assert count_distinct_real_roots(coeffs) == sympy_distinct_real(coeffs)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.integers(1, 3))
def test_square_free_part_removes_multiplicity(roots, mult):
    p = sympy.Poly(sympy.prod((X - r) ** mult for r in roots), X)
    coeffs = [int(c) for c in reversed(p.all_coeffs())]
    sf = square_free_part(coeffs)
    assert len(sf) - 1 == len(set(roots))
    assert is_hyperbolic(coeffs)


def test_sturm_sequence_ends_constant():
    seq = sturm_sequence([Fraction(c) for c in (-6, 11, -6, 1)])
    assert len(seq[-1]) == 1
    assert count_distinct_real_roots([-6, 11, -6, 1]) == 3


# -- Jensen / Turan ----------------------------------------------------------

def test_jensen_degree_one():
    jp = jensen_poly(3, 1, 40)
    assert jp.coeffs == (D(3, 40), D(3, 41))


def test_jensen_k1_d3_n5():
    jp = jensen_poly(1, 3, 5)
    assert jp.coeffs == tuple(math.comb(3, j) * D(1, 5 + j) for j in range(4))
    assert all(isinstance(c, int) for c in jp.coeffs)
    assert is_hyperbolic(jp)
    assert sympy_distinct_real(jp.coeffs) == 3


@pytest.mark.parametrize("k,n", [(1, 7), (2, 30), (3, 526), (5, 40)])
def test_order2_matches_turan2(k, n):
    # J^{2,n-1} has discriminant 4 (Delta(n)^2 - Delta(n-1) Delta(n+1))
    assert turan_order(k, 2, n).holds == turan2_exact(k, n).holds


def test_turan2_examples():
    assert turan2_exact(3, 526).holds
    r = turan2_exact(1, 1)
    assert r.values == (D(1, 0), D(1, 1), D(1, 2))
    assert r.holds == (D(1, 1) ** 2 >= D(1, 0) * D(1, 2))


def test_third_order_k1_from_6():
    assert sweep_turan(1, 3, 6, 400).verdict is Verdict.ALL_HOLD


# -- Laguerre / differences -----------------------------------------------

@pytest.mark.parametrize("k,n", [(1, 0), (2, 17), (4, 300)])
def test_laguerre_order_one(k, n):
    assert laguerre(k, 1, n) == D(k, n + 1) ** 2 - D(k, n) * D(k, n + 2)


def test_laguerre_order_two_formula():
    k, n = 3, 50
    a = [D(k, n + j) for j in range(5)]
    assert laguerre(k, 2, n) == 3 * a[2] ** 2 - 4 * a[1] * a[3] + a[0] * a[4]


def test_laguerre_examples():
    assert laguerre(3, 3, 2000) >= 0
    assert sweep_laguerre(1, 2, 12, 1000).verdict is Verdict.ALL_HOLD


def test_laguerre_order_two_small_n():
    # the order-2 Laguerre inequality is false at the start of the sequence
    rep = sweep_laguerre(1, 2, 0, 20)
    assert rep.verdict is Verdict.COUNTEREXAMPLES
    assert laguerre(1, 2, 1) == -19
    assert max(n for n, _ in rep.witnesses) == 11


def test_forward_difference_basics():
    assert forward_difference(3, 0, 40) == D(3, 40)
    assert forward_difference(3, 1, 40) == D(3, 41) - D(3, 40)
    assert forward_difference(2, 5, 500) > 0


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_difference_telescopes(r):
    k, lo, hi = 2, 100, 130
    total = sum(forward_difference(k, r, n) for n in range(lo, hi))
    assert total == forward_difference(k, r - 1, hi) - forward_difference(k, r - 1, lo)


def test_sweep_difference():
    assert sweep_difference(1, 3, 200, 400).verdict is Verdict.ALL_HOLD


# -- certifier and threshold -------------------------------------------------

@pytest.mark.parametrize("k,n", [(3, 526), (4, 526), (5, 1001)])
def test_certified(k, n):
    st_ = logconcavity_certifier(k, n)
    assert st_.verdict is CertVerdict.CERTIFIED
    assert st_.hyp_i and st_.hyp_ii and st_.gap_bound
    assert st_.theta <= 1 and st_.chain_consistent


def test_not_certified_small_n():
    st_ = logconcavity_certifier(3, 2)
    assert st_.verdict is CertVerdict.NOT_CERTIFIED_HERE
    assert st_.hyp_i is False
    assert st_.eps_star is None


def test_certifier_soundness():
    # whenever the certificate is obtained the exact ratio agrees
    for k in (3, 4, 6):
        for n in range(certified_threshold(k), certified_threshold(k) + 40, 7):
            st_ = logconcavity_certifier(k, n)
            if st_.verdict is CertVerdict.CERTIFIED:
                assert turan2_exact(k, n).holds
            assert st_.chain_consistent


def test_certifier_range():
    with pytest.raises(KOutOfRange):
        logconcavity_certifier(2, 600)


def test_threshold_examples():
    assert n0(3) == Fraction(649, 3)
    c3 = threshold_certificate(3)
    assert c3.threshold == 526 and c3.branch == "finite" and c3.passed
    c5 = threshold_certificate(5)
    assert c5.threshold == 1001 and c5.checks["hyp_ii_at_n0"] and c5.passed
    c16 = threshold_certificate(16)
    assert c16.branch == "closed-form" and c16.passed and c16.checks["closed_form"]
    with pytest.raises(KOutOfRange):
        threshold_certificate(2)


def test_logconcave_sweep_certified():
    rep = sweep_logconcave(3, 526, 560, certify=True)
    assert rep.verdict is Verdict.ALL_HOLD


# -- multiplicativity ---------------------------------------------------------

def test_multiplicative_examples():
    assert multiplicative_check(3, 526, 526).holds
    assert multiplicative_check(3, 600, 800).holds
    r = multiplicative_check(3, 1, 1)
    assert r.values[2:] == (D(3, 1), D(3, 1), D(3, 2))


def test_multiplicative_sweep():
    rep = sweep_multiplicative(3, 526, 560)
    assert rep.verdict is Verdict.ALL_HOLD and rep.checked == 35 * 36 // 2


# -- Hermite -----------------------------------------------------------------

def test_hermite_polys():
    assert hermite_poly(0) == [1]
    assert hermite_poly(2) == [-2, 0, 1]
    assert hermite_poly(3) == [0, -6, 0, 1]
    assert hermite_poly(4) == [12, 0, -12, 0, 1]
    assert hermite_poly(3, "physicists") == [0, -12, 0, 8]
    assert hermite_poly(4, "physicists") == [12, 0, -48, 0, 16]


def test_hermite_probe_decreasing():
    devs = [d for _, d in hermite_convergence_probe(1, 3, [1000, 5000, 10000])]
    assert devs[0] > devs[1] > devs[2]
    devs = [d for _, d in hermite_convergence_probe(3, 4, [1000, 10000])]
    assert devs[0] > devs[1]


def test_range_errors():
    with pytest.raises(ValueError):
        sweep_turan(3, 2, 10, 5)
    with pytest.raises(ValueError):
        turan2_exact(3, 0)
