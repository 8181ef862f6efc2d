"""Truncated exact (circle-method) formula for Delta_k(n).

The j-sum is cut at J.  There is no proven tail bound for it, so an
evaluation is only called *certified* when the truncated ball, widened by
an empirical tail allowance, pins down a single integer and that integer
agrees with the exact series coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from flint import acb, arb

from .ball import Ball, ComplexBall, DEFAULT_PREC, exp_pi_i, to_arb, working_precision
from .bessel import bessel_i
from .bigseries import delta_table, eta_power_inverse_series
from .dedekind import (TermIndex, b_value, coprime_residues, enumerate_nonnegative_r,
                       omega_exponent, r_value)
from .errors import InvalidN, PrecisionExhausted

DEFAULT_J = 50
# calibrated on k <= 6, n <= 300: the true tail never exceeded 1.85x the
# half-window mass, and 2x the mass stays below 0.4 there
TAIL_SAFETY = 2


@dataclass(frozen=True)
class FormulaTerm:
    j: int
    idx: TermIndex
    amplitude: ComplexBall
    r: Fraction
    bessel_arg: Ball
    contribution: Ball
    imag_contribution: Ball


@dataclass
class ExactEval:
    k: int
    n: int
    J: int
    terms: list = field(repr=False)
    partial_sum: Ball
    imag_sum: Ball
    tail_allowance: Ball
    rounded: int | None
    certified: bool
    series_value: int | None = None

    @property
    def imaginary_vanishes(self) -> bool:
        return self.imag_sum.contains(0)

    def deviation(self) -> Ball | None:
        if self.series_value is None:
            return None
        return abs(self.partial_sum - self.series_value)


@lru_cache(maxsize=None)
def _phase_table(k: int, j: int, idx: TermIndex) -> tuple[tuple[int, Fraction], ...]:
    """(h, Omega exponent + b/j) for each h; only the -2hn/j part depends on n."""
    return tuple(
        (h, omega_exponent(k, j, h) + Fraction(b_value(k, j, h, idx), j))
        for h in coprime_residues(j)
    )


def _a_sum_fast(k: int, j: int, n: int, idx: TermIndex, prec: int) -> acb:
    total = acb(0)
    for h, base in _phase_table(k, j, idx):
        total += exp_pi_i(base - Fraction(2 * h * n, j), prec)
    return total


def _small_tables(k: int):
    # n1 and n2 never exceed (5k+2)/(2k+1) * (4k+2)/24 < k + 1
    N = k + 2
    return eta_power_inverse_series(3, N), eta_power_inverse_series(1, N)


def formula_terms(k: int, n: int, J: int, precision_bits: int = DEFAULT_PREC) -> list[FormulaTerm]:
    """All summands with j <= J, sorted by (j, idx)."""
    if Fraction(n) - Fraction(k + 1, 12) <= 0:
        raise InvalidN(f"the exact formula needs n > (k+1)/12 (k={k}, n={n})")
    if J < 1:
        raise ValueError("J must be >= 1")
    prec = precision_bits
    p3, p1 = _small_tables(k)
    terms = []
    with working_precision(prec):
        x = arb.pi() * arb(24 * n - 2 * k - 2).sqrt() / 6
        front = arb.pi() ** 3 / (18 * x * x)
        for j in range(1, J + 1):
            for idx in enumerate_nonnegative_r(k, j):
                r = r_value(k, j, idx)
                A = _a_sum_fast(k, j, n, idx, prec)
                sign = -1 if (idx.n3 + idx.n4) % 2 else 1
                amp = A * (sign * p3[idx.n1] * p1[idx.n2])
                rr = to_arb(r)
                arg = x * rr.sqrt() / j
                bess = bessel_i(2, Ball(arg, prec), prec).value
                scale = front * rr * bess / j
                terms.append(FormulaTerm(
                    j=j, idx=idx,
                    amplitude=ComplexBall(amp, prec),
                    r=r,
                    bessel_arg=Ball(arg, prec),
                    contribution=Ball(amp.real * scale, prec),
                    imag_contribution=Ball(amp.imag * scale, prec),
                ))
    return terms


def _sum(balls, prec) -> arb:
    with working_precision(prec):
        total = arb(0)
        for b in balls:
            total += b.value
        return total


def tail_allowance(terms: list[FormulaTerm], J: int, precision_bits: int = DEFAULT_PREC) -> Ball:
    """Empirical size of the omitted j > J part of the sum.

    TAIL_SAFETY times the absolute mass sum |S_j| of the blocks J/2 < j <= J.
    Once the Bessel arguments are small the blocks decay like 1/j^2, and then
    the mass of (J/2, J] and of (J, inf) are both about C/J; the factor
    absorbs the irregular cancellation between residue classes of j.  This is
    a heuristic, not a bound.
    """
    blocks: dict[int, arb] = {}
    with working_precision(precision_bits):
        for t in terms:
            if 2 * t.j > J:
                blocks[t.j] = blocks.get(t.j, arb(0)) + t.contribution.value
        total = arb(0)
        for s in blocks.values():
            total += abs(s).upper()
        return Ball(TAIL_SAFETY * total, precision_bits)


def exact_formula_eval(k: int, n: int, J: int = DEFAULT_J, precision_bits: int = DEFAULT_PREC,
                       compare_series: bool = True) -> ExactEval:
    terms = formula_terms(k, n, J, precision_bits)
    partial = Ball(_sum((t.contribution for t in terms), precision_bits), precision_bits)
    imag = Ball(_sum((t.imag_contribution for t in terms), precision_bits), precision_bits)
    allowance = tail_allowance(terms, J, precision_bits)
    candidates = partial.integers_within(allowance.upper)
    rounded = None
    with working_precision(precision_bits):
        nearest = partial.midpoint + arb(1) / 2
        nearest = int(nearest.floor().unique_fmpz())
    if len(candidates) == 1:
        rounded = candidates[0]
    else:
        rounded = nearest
    series_value = delta_table(k, n)[n] if compare_series else None
    certified = (len(candidates) == 1
                 and (series_value is None or candidates[0] == series_value))
    return ExactEval(k=k, n=n, J=J, terms=terms, partial_sum=partial, imag_sum=imag,
                     tail_allowance=allowance, rounded=rounded, certified=certified,
                     series_value=series_value)


def main_formula_term(k: int, n: int, precision_bits: int = DEFAULT_PREC) -> Ball:
    """The j = 1, zero-index summand alone."""
    for t in formula_terms(k, n, 1, precision_bits):
        if t.idx == TermIndex(0, 0, 0, 0):
            return t.contribution
    raise AssertionError("zero index is always present for j = 1")


def convergence_profile(k: int, n: int, J_max: int,
                        precision_bits: int = DEFAULT_PREC) -> list[tuple[int, float]]:
    """|partial sum through J - Delta_k(n)| for J = 1..J_max."""
    truth = delta_table(k, n)[n]
    terms = formula_terms(k, n, J_max, precision_bits)
    out = []
    with working_precision(precision_bits):
        running = arb(0)
        i = 0
        for J in range(1, J_max + 1):
            while i < len(terms) and terms[i].j == J:
                running += terms[i].contribution.value
                i += 1
            dev = abs(running - truth)
            if not dev.is_finite():
                raise PrecisionExhausted("partial sum is not finite")
            out.append((J, float(dev.mid())))
    return out
