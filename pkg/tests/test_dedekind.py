import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from diamond.dedekind import (TermIndex, a_sum, a_sum_exponents, b_value, coprime_residues,
                              dedekind_sum, enumerate_nonnegative_r, modular_data, omega_exponent,
                              r_max, r_value, sawtooth, solve_h_jt, solve_h_prime)
from diamond.errors import NonCoprimeInput


def s_alt(h, j):
    """s(h, j) = sum_{i<j} (i/j) ((h i / j)), an equivalent classical form."""
    total = Fraction(0)
    for i in range(1, j):
        total += Fraction(i, j) * sawtooth(Fraction(h * i, j))
    return total


def test_sawtooth():
    assert sawtooth(0) == 0
    assert sawtooth(Fraction(1, 2)) == 0
    assert sawtooth(Fraction(1, 4)) == Fraction(-1, 4)
    assert sawtooth(Fraction(-1, 4)) == Fraction(1, 4)
    assert sawtooth(7) == 0


def test_dedekind_examples():
    assert dedekind_sum(0, 1) == 0
    assert dedekind_sum(1, 2) == 0
    assert dedekind_sum(1, 3) == Fraction(1, 18)


def test_non_coprime():
    with pytest.raises(NonCoprimeInput):
        dedekind_sum(2, 4)
    with pytest.raises(NonCoprimeInput):
        solve_h_prime(3, 6)


def test_reciprocity_up_to_200():
    for j in range(2, 201):
        for h in range(1, j):
            if math.gcd(h, j) != 1:
                continue
            # s(j, h) = s(j mod h, h) by periodicity of the sawtooth
            lhs = dedekind_sum(h, j) + dedekind_sum(j % h, h)
            rhs = Fraction(-1, 4) + (Fraction(h, j) + Fraction(j, h) + Fraction(1, h * j)) / 12
            assert lhs == rhs, (h, j)


@given(st.integers(1, 80).flatmap(lambda j: st.tuples(st.just(j), st.integers(0, j - 1))))
def test_denominator_and_alternative_form(hj):
    j, h = hj
    if math.gcd(h, j) != 1:
        return
    s = dedekind_sum(h, j)
    assert (6 * j) % s.denominator == 0
    assert s == s_alt(h, j)


def test_h_prime_examples():
    assert solve_h_prime(1, 5) == 4
    assert solve_h_prime(0, 1) == 0
    assert solve_h_prime(3, 7) == 2


def test_h_jt_examples():
    assert solve_h_jt(1, 3, 2) == 1
    assert solve_h_jt(1, 2, 2) == 0
    assert solve_h_jt(1, 4, 2) == 1


@given(st.integers(1, 60), st.integers(1, 200), st.sampled_from([2, 3, 5, 7, 14, 22]))
def test_h_jt_solves_congruence(h, j, t):
    if math.gcd(h, j) != 1:
        return
    x = solve_h_jt(h, j, t)
    g = math.gcd(j, t)
    mod = j // g
    assert 0 <= x < mod
    assert (h * (t // g) * x + 1) % mod == 0


def omega_by_hand(k, j, h):
    g2, g1, g4 = math.gcd(j, 2), math.gcd(j, 2 * k + 1), math.gcd(j, 4 * k + 2)
    e = (3 * s_alt(h, j) + s_alt(h * (4 * k + 2) // g4, j // g4)
         - s_alt(h * 2 // g2, j // g2) - s_alt(h * (2 * k + 1) // g1, j // g1))
    return e % 2


def test_omega_examples():
    assert omega_exponent(1, 1, 0) == 0
    assert omega_exponent(3, 2, 1) == omega_by_hand(3, 2, 1)
    assert omega_exponent(1, 3, 1) == omega_by_hand(1, 3, 1)


@given(st.integers(1, 6), st.integers(1, 40), st.integers(0, 39))
def test_omega_matches_composition(k, j, h):
    h %= j
    if math.gcd(h, j) != 1:
        return
    e = omega_exponent(k, j, h)
    assert 0 <= e < 2
    assert e == omega_by_hand(k, j, h)


def test_modular_data_invariants():
    for k in (1, 3):
        for j in range(1, 30):
            for h in coprime_residues(j):
                md = modular_data(k, j, h)
                assert (h * md.h_prime + 1) % j == 0
                for s in md.s_values.values():
                    assert (6 * j) % s.denominator == 0 or s == 0


def r_literal(k, j, h, n1, n2, n3, n4):
    """def:r transcribed verbatim; h is accepted and, as written, unused."""
    g2, g1, g4 = math.gcd(j, 2), math.gcd(j, 2 * k + 1), math.gcd(j, 4 * k + 2)
    m = 4 * k + 2
    head = Fraction((g2 ** 2 - 2) * (g1 ** 2 - (2 * k + 1)) + 2 * m, m)
    return head - 24 * (n1 + Fraction(g4 ** 2, m) * n2 + Fraction(g2 ** 2, 4) * n3 * (3 * n3 - 1)
                        + Fraction(g1 ** 2, m) * n4 * (3 * n4 - 1))


@pytest.mark.parametrize("k", [1, 2, 3, 7])
def test_r_examples(k):
    alpha = Fraction(5 * k + 2, 2 * k + 1)
    beta = Fraction(5 * k - 10, 2 * k + 1)
    assert r_value(k, 1, TermIndex(0, 0, 0, 0)) == alpha
    assert r_value(k, 2, TermIndex(0, 0, 0, 0)) == Fraction(2 * k + 2, 2 * k + 1)
    assert r_value(k, 2, TermIndex(0, 0, 0, 0)) / 4 == Fraction(k + 1, 4 * k + 2)
    assert r_value(k, 1, TermIndex(0, 1, 0, 0)) == beta


def test_r_is_h_independent():
    rng = random.Random(5)
    for _ in range(300):
        k, j = rng.randint(1, 8), rng.randint(1, 60)
        idx = (rng.randint(0, 3), rng.randint(0, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        values = {r_literal(k, j, h, *idx) for h in coprime_residues(j)}
        assert values == {r_value(k, j, idx)}


def test_r_max_is_zero_index():
    for k in range(1, 6):
        for j in range(1, 40):
            assert r_max(k, j) == r_value(k, j, (0, 0, 0, 0))


def test_enumerate_examples():
    assert enumerate_nonnegative_r(1, 1) == [TermIndex(0, 0, 0, 0)]
    assert enumerate_nonnegative_r(2, 1) == [TermIndex(0, 0, 0, 0)]
    # beta_2 = 0: the literal r >= 0 condition admits one vanishing summand
    assert enumerate_nonnegative_r(2, 1, include_zero=True) == [TermIndex(0, 0, 0, 0),
                                                                 TermIndex(0, 1, 0, 0)]
    e3 = enumerate_nonnegative_r(3, 1)
    assert TermIndex(0, 0, 0, 0) in e3 and TermIndex(0, 1, 0, 0) in e3
    assert all(i.n1 == 0 and i.n3 == 0 for i in e3)


@pytest.mark.parametrize("k", [1, 2, 3, 6, 10])
def test_enumerate_matches_brute_force(k):
    # r <= r_max(j) <= 5/2 bounds every coordinate well inside this box
    box = [(n1, n2, n3, n4) for n1 in range(0, 3) for n2 in range(0, 8)
           for n3 in range(-3, 4) for n4 in range(-4, 5)]
    for j in range(1, 31):
        rs = {idx: r_literal(k, j, 1, *idx) for idx in box}
        got = [i.as_tuple() for i in enumerate_nonnegative_r(k, j, include_zero=True)]
        assert got == sorted(i for i in box if rs[i] >= 0), j
        got = [i.as_tuple() for i in enumerate_nonnegative_r(k, j)]
        assert got == sorted(i for i in box if rs[i] > 0), j


def test_b_examples():
    assert b_value(5, 1, 0, (0, 0, 0, 0)) == 0
    h_2_14 = solve_h_jt(1, 2, 14)
    assert b_value(3, 2, 1, (0, 1, 0, 0)) == 2 * math.gcd(2, 14) * h_2_14
    assert b_value(3, 1, 0, (0, 1, 0, 0)) == 0


def b_with(k, j, hp, hjt, idx):
    n1, n2, n3, n4 = idx
    g2, g1, g4 = math.gcd(j, 2), math.gcd(j, 2 * k + 1), math.gcd(j, 4 * k + 2)
    return (2 * n1 * hp + 2 * n2 * g4 * hjt[4 * k + 2] + n3 * (3 * n3 - 1) * g2 * hjt[2]
            + n4 * (3 * n4 - 1) * g1 * hjt[2 * k + 1])


def test_representative_invariance():
    rng = random.Random(11)
    for _ in range(400):
        k, j = rng.randint(1, 6), rng.randint(1, 50)
        h = rng.choice(coprime_residues(j))
        idx = (rng.randint(0, 4), rng.randint(0, 4), rng.randint(-4, 4), rng.randint(-4, 4))
        md = modular_data(k, j, h)
        base = b_with(k, j, md.h_prime, md.h_jt, idx)
        assert base == b_value(k, j, h, idx)
        shifted = {t: x + rng.randint(-3, 3) * (j // math.gcd(j, t)) for t, x in md.h_jt.items()}
        other = b_with(k, j, md.h_prime + rng.randint(-3, 3) * j, shifted, idx)
        # exp(pi i b / j) only sees b mod 2j
        assert (other - base) % (2 * j) == 0


def test_a_sum_j1_is_one():
    for k in (1, 4):
        v = a_sum(k, 1, 10, (0, 0, 0, 0))
        assert v.real.contains(1) and v.imag.contains(0)


@given(st.integers(1, 6), st.integers(1, 40), st.integers(1, 500),
       st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-2, 2), st.integers(-2, 2)))
def test_a_sum_bounded_by_j(k, j, n, idx):
    v = a_sum(k, j, n, idx, precision_bits=128)
    assert v.abs_upper() <= j + v.real.radius + v.imag.radius


def test_a_sum_against_mpmath():
    exps = a_sum_exponents(1, 2, 1, (0, 0, 0, 0))
    with mpmath.workdps(120):
        ref = sum(mpmath.expjpi(mpmath.mpf(e.numerator) / e.denominator) for e in exps)
        v = a_sum(1, 2, 1, (0, 0, 0, 0), precision_bits=256)
        assert abs(mpmath.mpf(v.real.midpoint.str(80, radius=False)) - ref.real) < mpmath.mpf(10) ** -70
        assert abs(mpmath.mpf(v.imag.midpoint.str(80, radius=False)) - ref.imag) < mpmath.mpf(10) ** -70


def test_a_sum_requires_positive_shift():
    with pytest.raises(ValueError):
        a_sum(11, 1, 1, (0, 0, 0, 0))


def test_a_sum_tolerance():
    from diamond.errors import PrecisionExhausted
    with pytest.raises(PrecisionExhausted):
        a_sum(2, 7, 5, (0, 0, 0, 0), precision_bits=64, tolerance=2.0 ** -130)
