"""Multiplier-system data for the broken k-diamond eta quotient.

Roots of unity are kept as exact rational exponents ``e`` meaning
``exp(pi*i*e)``; they only become complex balls inside :func:`a_sum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from flint import acb

from .ball import ComplexBall, DEFAULT_PREC, exp_pi_i, working_precision
from .errors import NonCoprimeInput, PrecisionExhausted

HALF = Fraction(1, 2)


def sawtooth(x) -> Fraction:
    """((x)) = x - floor(x) - 1/2 off the integers, 0 on them."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - HALF


def _require_coprime(h: int, j: int) -> None:
    if j < 1:
        raise ValueError("j must be a positive integer")
    if math.gcd(h, j) != 1:
        raise NonCoprimeInput(f"gcd({h}, {j}) != 1")


@lru_cache(maxsize=None)
def dedekind_sum(h: int, j: int) -> Fraction:
    """s(h, j) = sum over mu mod j of ((mu/j)) ((h mu/j)), by the direct O(j) sum."""
    _require_coprime(h, j)
    # ((mu/j)) = (2 mu - j) / (2j) for 0 < mu < j, so sum integers and divide once
    total = 0
    for mu in range(1, j):
        b = h * mu % j
        if b:
            total += (2 * mu - j) * (2 * b - j)
    return Fraction(total, 4 * j * j)


def solve_h_prime(h: int, j: int) -> int:
    """The representative of h' in [0, j) with h*h' = -1 (mod j)."""
    _require_coprime(h, j)
    if j == 1:
        return 0
    return (-pow(h, -1, j)) % j


def solve_h_jt(h: int, j: int, t: int) -> int:
    """The solution 0 <= x < j/g of h*(t/g)*x = -1 (mod j/g), g = gcd(j, t)."""
    _require_coprime(h, j)
    g = math.gcd(j, t)
    mod = j // g
    if mod == 1:
        return 0
    return (-pow(h * (t // g), -1, mod)) % mod


def _scaled_sum(h: int, j: int, t: int) -> Fraction:
    g = math.gcd(j, t)
    return dedekind_sum(h * (t // g), j // g)


@lru_cache(maxsize=None)
def omega_exponent(k: int, j: int, h: int) -> Fraction:
    """Exponent e in [0, 2) with Omega_k(h, j) = exp(pi*i*e)."""
    _require_coprime(h, j)
    e = (3 * dedekind_sum(h, j)
         + _scaled_sum(h, j, 4 * k + 2)
         - _scaled_sum(h, j, 2)
         - _scaled_sum(h, j, 2 * k + 1))
    return e % 2


@dataclass(frozen=True)
class TermIndex:
    n1: int
    n2: int
    n3: int
    n4: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n1, self.n2, self.n3, self.n4)


@dataclass(frozen=True)
class ModularData:
    """Everything about the cusp h/j that does not depend on n."""

    k: int
    j: int
    h: int
    h_prime: int
    h_jt: dict = field(hash=False)
    s_values: dict = field(hash=False)
    omega_exponents: dict = field(hash=False)

    def __post_init__(self):
        if math.gcd(self.h, self.j) != 1 or not 0 <= self.h < max(self.j, 1):
            raise NonCoprimeInput(f"bad cusp h={self.h}, j={self.j}")
        assert (self.h * self.h_prime + 1) % self.j == 0
        for t, x in self.h_jt.items():
            g = math.gcd(self.j, t)
            assert (self.h * (t // g) * x + 1) % (self.j // g) == 0


@lru_cache(maxsize=None)
def modular_data(k: int, j: int, h: int) -> ModularData:
    _require_coprime(h, j)
    ts = (2, 2 * k + 1, 4 * k + 2)
    s_values = {1: dedekind_sum(h, j)}
    for t in ts:
        s_values[t] = _scaled_sum(h, j, t)
    return ModularData(
        k=k, j=j, h=h,
        h_prime=solve_h_prime(h, j),
        h_jt={t: solve_h_jt(h, j, t) for t in ts},
        s_values=s_values,
        omega_exponents={"omega": s_values[1], "Omega": omega_exponent(k, j, h)},
    )


def _gcds(k: int, j: int) -> tuple[int, int, int]:
    return math.gcd(j, 2), math.gcd(j, 2 * k + 1), math.gcd(j, 4 * k + 2)


def r_max(k: int, j: int) -> Fraction:
    """r at the zero index: the largest value r can take for this j."""
    g2, g1, _ = _gcds(k, j)
    m = 4 * k + 2
    return Fraction((g2 * g2 - 2) * (g1 * g1 - (2 * k + 1)) + 2 * m, m)


def r_value(k: int, j: int, idx) -> Fraction:
    """The exact rational r(n1, n2, n3, n4) attached to modulus j (independent of h)."""
    n1, n2, n3, n4 = _as_tuple(idx)
    g2, g1, g4 = _gcds(k, j)
    m = 4 * k + 2
    weight = (n1
              + Fraction(g4 * g4, m) * n2
              + Fraction(g2 * g2, 4) * n3 * (3 * n3 - 1)
              + Fraction(g1 * g1, m) * n4 * (3 * n4 - 1))
    return r_max(k, j) - 24 * weight


def _as_tuple(idx) -> tuple[int, int, int, int]:
    if isinstance(idx, TermIndex):
        return idx.as_tuple()
    n1, n2, n3, n4 = idx
    return int(n1), int(n2), int(n3), int(n4)


def _pentagonal_range(limit: Fraction) -> list[int]:
    """All integers n with n(3n - 1) <= limit."""
    out = []
    n = 0
    while n * (3 * n - 1) <= limit:
        out.append(n)
        n += 1
    n = -1
    while n * (3 * n - 1) <= limit:
        out.append(n)
        n -= 1
    return sorted(out)


@lru_cache(maxsize=None)
def _enumerate(k: int, j: int) -> tuple[TermIndex, ...]:
    g2, g1, g4 = _gcds(k, j)
    m = 4 * k + 2
    top = r_max(k, j)
    if top < 0:
        return ()
    # each summand of the weight is nonnegative, so each is bounded by top/24 alone
    budget = top / 24
    n1_max = math.floor(budget)
    n2_max = math.floor(budget * m / (g4 * g4))
    n3_vals = _pentagonal_range(budget * 4 / (g2 * g2))
    n4_vals = _pentagonal_range(budget * m / (g1 * g1))
    found = []
    for n1 in range(n1_max + 1):
        for n2 in range(n2_max + 1):
            for n3 in n3_vals:
                for n4 in n4_vals:
                    idx = TermIndex(n1, n2, n3, n4)
                    if r_value(k, j, idx) >= 0:
                        found.append(idx)
    return tuple(sorted(found, key=TermIndex.as_tuple))


def enumerate_nonnegative_r(k: int, j: int, include_zero: bool = False) -> list[TermIndex]:
    """Index tuples with r >= 0 for modulus j, in lexicographic order.

    Tuples with r = 0 contribute r * I_2(0) = 0 to every sum, so they are
    left out unless ``include_zero`` is set (for k = 2 and j = 1 this is
    the only difference: (0, 1, 0, 0) has r = beta_2 = 0).
    """
    found = _enumerate(k, j)
    if include_zero:
        return list(found)
    return [i for i in found if r_value(k, j, i) != 0]


def b_value(k: int, j: int, h: int, idx) -> int:
    n1, n2, n3, n4 = _as_tuple(idx)
    md = modular_data(k, j, h)
    g2, g1, g4 = _gcds(k, j)
    p3, p4 = n3 * (3 * n3 - 1), n4 * (3 * n4 - 1)
    # n(3n-1) is always even, which makes exp(pi*i*b/j) independent of representatives
    assert p3 % 2 == 0 and p4 % 2 == 0
    return (2 * n1 * md.h_prime
            + 2 * n2 * g4 * md.h_jt[4 * k + 2]
            + p3 * g2 * md.h_jt[2]
            + p4 * g1 * md.h_jt[2 * k + 1])


def coprime_residues(j: int) -> list[int]:
    if j == 1:
        return [0]
    return [h for h in range(1, j) if math.gcd(h, j) == 1]


def a_sum_exponents(k: int, j: int, n: int, idx, as_printed: bool = False) -> list[Fraction]:
    """Exact exponents (mod 2) of the unit-modulus summands of A_j.

    Each summand is Omega_k(h, j) exp(-2 pi i h n / j) exp(pi i b / j).  The
    cusp expansion of the eta quotient carries a phase exp(-pi i (k+1) h / (6j))
    that cancels the (k+1)/12 shift in exp(-2 pi i h (n - (k+1)/12) / j); with
    ``as_printed=True`` that phase is dropped and the shifted form is used
    verbatim, which leaves a nonzero imaginary part in the truncated sum.
    """
    shift = Fraction(n) - Fraction(k + 1, 12) if as_printed else Fraction(n)
    out = []
    for h in coprime_residues(j):
        e = omega_exponent(k, j, h) - 2 * h * shift / j + Fraction(b_value(k, j, h, idx), j)
        out.append(e % 2)
    return out


def a_sum(k: int, j: int, n: int, idx, precision_bits: int = DEFAULT_PREC,
          tolerance=None, as_printed: bool = False) -> ComplexBall:
    """A_j(n, n1..n4) as a complex ball.

    Each summand is a root of unity with an exact rational exponent, so
    the only rounding is in the final sin/cos evaluations.  If ``tolerance``
    is given and the radius of either part exceeds it, PrecisionExhausted
    is raised.
    """
    if Fraction(n) - Fraction(k + 1, 12) <= 0:
        raise ValueError("a_sum requires n > (k+1)/12")
    with working_precision(precision_bits):
        total = acb(0)
        for e in a_sum_exponents(k, j, n, idx, as_printed):
            total += exp_pi_i(e, precision_bits)
    result = ComplexBall(total, precision_bits)
    if tolerance is not None:
        if result.real.radius > tolerance or result.imag.radius > tolerance:
            raise PrecisionExhausted(f"A_{j} radius exceeds {tolerance} at {precision_bits} bits")
    return result
