"""Rigorous modified Bessel functions I_nu for small integer orders.

Two evaluation regimes:

* ascending series ``sum (t/2)^(2m+nu) / (m! (m+nu)!)``, all terms positive,
  truncated once the term ratio is below 1/2 and the tail is bounded by a
  geometric series;
* large-argument expansion
  ``e^t / sqrt(2 pi t) * sum_k (-1)^k a_k(nu) t^-k`` with
  ``a_k = prod_{i<=k} (4 nu^2 - (2i-1)^2) / (k! 8^k)``.  The remainder is
  taken as twice the first omitted term, plus ``2 e^{-2t}`` times the
  absolute sum of the kept terms for the exponentially small companion
  series.  This is the certified constant this package commits to.

The switch between them is at ``t = max(30, precision_bits / 2)``.
"""

from __future__ import annotations

from fractions import Fraction

from flint import arb

from .ball import Ball, DEFAULT_PREC, to_arb, working_precision
from .errors import DomainTooSmall, PreconditionViolated, PrecisionExhausted

GUARD_BITS = 24


def switch_point(precision_bits: int) -> int:
    return max(30, precision_bits // 2)


def _as_ball(t, precision_bits):
    if isinstance(t, Ball):
        return t, precision_bits or t.precision_bits
    prec = precision_bits or DEFAULT_PREC
    return Ball(t, prec), prec


def _series_arb(nu: int, t: arb, prec: int) -> arb:
    if t.is_zero():
        return arb(1) if nu == 0 else arb(0)
    with working_precision(prec + GUARD_BITS):
        half = t / 2
        h2 = half * half
        top = half.upper() * half.upper()
        eps = arb(2) ** (-(prec + 8))
        term = half ** nu / arb.fac_ui(nu)
        total = term
        m = 0
        while True:
            term = term * h2 / ((m + 1) * (m + 1 + nu))
            m += 1
            total += term
            # every later ratio is below this one
            ratio = top / ((m + 1) * (m + 1 + nu))
            if ratio < arb(1) / 2 and term.upper() <= eps * total.lower():
                break
            if m > 100000:
                raise PrecisionExhausted("power series for I_nu did not settle")
        tail = (term.upper() * ratio / (1 - ratio)).upper()
        return total + arb(0, tail)


def _asymptotic_coeffs(nu: int, count: int) -> list[Fraction]:
    mu = 4 * nu * nu
    coeffs = [Fraction(1)]
    for k in range(1, count + 1):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (8 * k))
    return coeffs


def _asymptotic_arb(nu: int, t: arb, prec: int) -> arb:
    with working_precision(prec + GUARD_BITS):
        lo = t.lower()
        if not lo > 0:
            raise PreconditionViolated("asymptotic regime needs t > 0")
        eps = arb(2) ** (-(prec + 8))
        inv = 1 / t
        inv_lo = 1 / lo  # upper bound for 1/t over the ball
        total = arb(1)
        abs_total = arb(1)
        power = arb(1)
        power_up = arb(1)
        mu = 4 * nu * nu
        a = Fraction(1)
        k = 0
        while True:
            nxt = a * (mu - (2 * k + 1) ** 2) / (8 * (k + 1))
            next_bound = abs(arb(nxt.numerator) / nxt.denominator) * power_up * inv_lo
            if next_bound.upper() <= eps or nxt == 0:
                break
            if k + 1 > 2 * lo.floor().unique_fmpz():
                # terms stop decreasing near k ~ 2t
                break
            k += 1
            a = nxt
            power = power * inv
            power_up = power_up * inv_lo
            term = arb(a.numerator) / a.denominator * power
            total += -term if k % 2 else term
            abs_total += abs(arb(a.numerator) / a.denominator) * power_up
        remainder = 2 * next_bound + 2 * (-2 * lo).exp() * abs_total
        total += arb(0, remainder.upper())
        prefactor = t.exp() / (2 * arb.pi() * t).sqrt()
        return prefactor * total


def bessel_i_series(nu: int, t, precision_bits: int | None = None) -> Ball:
    tb, prec = _as_ball(t, precision_bits)
    _check_domain(tb)
    return Ball(_series_arb(nu, tb.value, prec), prec)


def bessel_i_asymptotic(nu: int, t, precision_bits: int | None = None) -> Ball:
    tb, prec = _as_ball(t, precision_bits)
    _check_domain(tb)
    return Ball(_asymptotic_arb(nu, tb.value, prec), prec)


def _check_domain(t: Ball) -> None:
    if t.lower < 0:
        raise PreconditionViolated(f"I_nu needs t >= 0, got {t}")


def bessel_i(nu: int, t, precision_bits: int | None = None) -> Ball:
    """Enclosure of I_nu(t) for integer nu >= 0 and a nonnegative ball t."""
    if nu < 0:
        raise PreconditionViolated("order must be a nonnegative integer")
    tb, prec = _as_ball(t, precision_bits)
    _check_domain(tb)
    if tb.lower >= switch_point(prec):
        value = _asymptotic_arb(nu, tb.value, prec)
    else:
        value = _series_arb(nu, tb.value, prec)
    if not value.is_finite():
        raise PrecisionExhausted(f"I_{nu} enclosure is not finite")
    return Ball(value, prec)


def bessel_upper_bound(kappa, s, precision_bits: int | None = None) -> Ball:
    """Upper envelope for I_kappa(s), kappa > -1/2, s >= 0.

    ``sqrt(2/(pi s)) e^s`` for s >= 1 and ``2^(1-kappa) s^kappa / Gamma(kappa+1)``
    below 1; a ball straddling 1 gets the union of both branches.
    """
    kappa = Fraction(kappa)
    if kappa <= Fraction(-1, 2):
        raise PreconditionViolated("kappa must exceed -1/2")
    sb, prec = _as_ball(s, precision_bits)
    _check_domain(sb)
    with working_precision(prec):
        sv = sb.value
        ka = to_arb(kappa)
        branches = []
        if not sv.upper() < 1:
            branches.append((2 / (arb.pi() * sv)).sqrt() * sv.exp())
        if sv.lower() < 1:
            small = arb(2) ** (1 - ka) / (ka + 1).gamma()
            branches.append(small * sv ** ka if not sv.is_zero() else arb(0))
        value = branches[0]
        for b in branches[1:]:
            value = value.union(b)
        return Ball(value, prec)


def log_bessel_derivatives(t, precision_bits: int | None = None) -> tuple[Ball, Ball]:
    """Enclosures of phi'(t) and phi''(t) for phi = log I_2.

    phi' = I_3/I_2 + 2/t, and phi'' follows from the Bessel equation as
    ``1 + 4/t^2 - phi'/t - phi'^2``.
    """
    tb, prec = _as_ball(t, precision_bits)
    if not tb.lower > 0:
        raise PreconditionViolated("phi derivatives need t > 0")
    i2 = bessel_i(2, tb, prec).value
    i3 = bessel_i(3, tb, prec).value
    if i2.contains(0):
        raise DomainTooSmall("I_2 enclosure contains zero")
    with working_precision(prec):
        tv = tb.value
        phi1 = i3 / i2 + 2 / tv
        phi2 = 1 + 4 / (tv * tv) - phi1 / tv - phi1 * phi1
    return Ball(phi1, prec), Ball(phi2, prec)
