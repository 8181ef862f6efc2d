"""Main term, explicit error envelopes and the constant chain for k >= 3.

Everything is assembled from exact rationals and ball transcendentals; no
decimal literal enters a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from flint import arb

from .ball import Ball, DEFAULT_PREC, to_arb, working_precision
from .bessel import bessel_i
from .errors import InvalidN, KOutOfRange, PreconditionViolated


def alpha(k: int) -> Fraction:
    return Fraction(5 * k + 2, 2 * k + 1)


def beta(k: int) -> Fraction:
    return Fraction(5 * k - 10, 2 * k + 1)


def _require_k3(k: int) -> None:
    if k < 3:
        raise KOutOfRange(f"explicit envelopes are stated for k >= 3, got k={k}")


@dataclass(frozen=True)
class KConstants:
    k: int
    alpha: Fraction
    beta: Fraction
    delta: Ball
    C: Ball
    A: Ball
    A_tilde: Ball


@lru_cache(maxsize=None)
def k_constants(k: int, precision_bits: int = DEFAULT_PREC) -> KConstants:
    """delta_k, C_k, A_k and the cruder A~_k as balls."""
    _require_k3(k)
    a, b = alpha(k), beta(k)
    with working_precision(precision_bits):
        pi = arb.pi()
        sa, sb = to_arb(a).sqrt(), to_arb(b).sqrt()
        delta = sa - sb
        growth = 432 * arb(2).sqrt() * k ** 3 * (pi * (arb(k) / 3).sqrt()).exp()
        C = growth / (pi ** (arb(5) / 2) * to_arb(a) ** (arb(3) / 4))
        A = 1728 * C / (pi ** 4 * sa)
        A_tilde = 1728 / pi ** (arb(13) / 2) * growth
    return KConstants(k, a, b, *(Ball(v, precision_bits) for v in (delta, C, A, A_tilde)))


def _x_arb(k: int, n, prec: int) -> arb:
    inner = 24 * Fraction(n) - (2 * k + 2)
    if inner <= 0:
        raise InvalidN(f"x_k(n) needs 24n > 2k+2 (k={k}, n={n})")
    with working_precision(prec):
        return arb.pi() * to_arb(inner).sqrt() / 6


def x_of_n(k: int, n, precision_bits: int = DEFAULT_PREC) -> Ball:
    """x_k(n) = pi sqrt(24n - 2k - 2) / 6; n may be a Fraction."""
    return Ball(_x_arb(k, n, precision_bits), precision_bits)


def main_term(k: int, n, precision_bits: int = DEFAULT_PREC) -> Ball:
    """M_k(n) = pi^3 alpha_k / (18 x^2) * I_2(sqrt(alpha_k) x)."""
    prec = precision_bits
    x = _x_arb(k, n, prec)
    a = alpha(k)
    with working_precision(prec):
        t = to_arb(a).sqrt() * x
    bess = bessel_i(2, Ball(t, prec), prec).value
    with working_precision(prec):
        return Ball(arb.pi() ** 3 * to_arb(a) / (18 * x * x) * bess, prec)


def error_envelope(k: int, n, precision_bits: int = DEFAULT_PREC) -> Ball:
    """12 k^3 e^{pi sqrt(k/3)} x^{-3/2} e^{sqrt(beta_k) x}."""
    _require_k3(k)
    x = _x_arb(k, n, precision_bits)
    with working_precision(precision_bits):
        pi = arb.pi()
        v = (12 * arb(k) ** 3 * (pi * (arb(k) / 3).sqrt()).exp()
             * x ** (arb(-3) / 2) * (to_arb(beta(k)).sqrt() * x).exp())
    return Ball(v, precision_bits)


def relative_error_bound(k: int, n, precision_bits: int = DEFAULT_PREC) -> Ball:
    """C_k x e^{-delta_k x}, valid where sqrt(alpha_k) x >= 4."""
    _require_k3(k)
    kc = k_constants(k, precision_bits)
    x = _x_arb(k, n, precision_bits)
    with working_precision(precision_bits):
        t = to_arb(kc.alpha).sqrt() * x
        if not t >= 4:
            raise PreconditionViolated(f"sqrt(alpha_k) x_k(n) >= 4 fails at k={k}, n={n}")
        v = kc.C.value * x * (-kc.delta.value * x).exp()
    return Ball(v, precision_bits)


def first_n_with_t_at_least(k: int, t_min) -> int:
    """Smallest integer n with sqrt(alpha_k) x_k(n) >= t_min.

    Uses the exact equivalence n >= (k+1)/12 + 36 t^2/(24 pi^2 alpha_k), with
    a ball check around the boundary.
    """
    a = alpha(k)
    guess = (k + 1) / 12 + 36 * float(t_min) ** 2 / (24 * math.pi ** 2 * float(a))
    n = max(1, math.floor(guess) - 2)
    while 24 * n <= 2 * k + 2:
        n += 1
    while True:
        with working_precision(DEFAULT_PREC):
            t = to_arb(a).sqrt() * _x_arb(k, n, DEFAULT_PREC)
            if t >= to_arb(t_min):
                return n
        n += 1


@dataclass(frozen=True)
class AsymptoticEstimate:
    k: int
    n: object
    x: Ball
    M: Ball
    R_bound: Ball | None
    eps_bound: Ball | None


def estimate(k: int, n, precision_bits: int = DEFAULT_PREC) -> AsymptoticEstimate:
    x = x_of_n(k, n, precision_bits)
    M = main_term(k, n, precision_bits)
    R = eps = None
    if k >= 3:
        R = error_envelope(k, n, precision_bits)
        try:
            eps = relative_error_bound(k, n, precision_bits)
        except PreconditionViolated:
            eps = None
    return AsymptoticEstimate(k, n, x, M, R, eps)


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def log_ratio_coefficients(k: int, n, M_terms: int, precision_bits: int = DEFAULT_PREC) -> list[Ball]:
    """A_1(n), ..., A_M(n) of the main-term model of log(Delta(n+j)/Delta(n))."""
    if M_terms < 1:
        raise ValueError("M_terms must be positive")
    x = _x_arb(k, n, precision_bits)
    a = alpha(k)
    out = []
    with working_precision(precision_bits):
        pi2 = arb.pi() ** 2
        sa = to_arb(a).sqrt()
        out.append(Ball(sa * pi2 / (3 * x) - 5 * pi2 / (6 * x * x), precision_bits))
        for m in range(2, M_terms + 1):
            lead = -sa * _double_factorial(2 * m - 3) / (2 ** m * math.factorial(m) * x ** (2 * m - 1))
            corr = arb(5) / (4 * m * x ** (2 * m))
            out.append(Ball((lead + corr) * (-2 * pi2 / 3) ** m, precision_bits))
    return out


REMAINDER_NOTE = ("model coefficients of the main-term expansion; the remainder is "
                  "not certified and is only measured empirically against exact data")


def log_ratio_expansion(k: int, n, j: int, M_terms: int,
                        precision_bits: int = DEFAULT_PREC) -> tuple[list[Ball], str]:
    x = _x_arb(k, n, precision_bits)
    with working_precision(precision_bits):
        if not x * x > 2 * arb.pi() ** 2 * abs(j) / 3:
            raise PreconditionViolated("expansion in j diverges: need x^2 > 2 pi^2 |j| / 3")
    return log_ratio_coefficients(k, n, M_terms, precision_bits), REMAINDER_NOTE


def log_ratio_model(k: int, n, j: int, M_terms: int, precision_bits: int = DEFAULT_PREC) -> Ball:
    coeffs, _ = log_ratio_expansion(k, n, j, M_terms, precision_bits)
    total = Ball(0, precision_bits)
    for m, c in enumerate(coeffs, start=1):
        total = total + c * j ** m
    return total


def growth_parameters(k: int, n, precision_bits: int = DEFAULT_PREC) -> tuple[Ball, Ball]:
    """Leading-order A(n) and delta(n) used to renormalise Jensen polynomials."""
    x = _x_arb(k, n, precision_bits)
    a = alpha(k)
    with working_precision(precision_bits):
        pi2 = arb.pi() ** 2
        A = to_arb(a).sqrt() * pi2 / (3 * x)
        d = to_arb(a) ** (arb(1) / 4) * pi2 / (3 * arb(2).sqrt() * x ** (arb(3) / 2))
    return Ball(A, precision_bits), Ball(d, precision_bits)
