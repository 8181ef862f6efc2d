"""Midpoint-radius real and complex balls.

Thin carriers around Arb's ``arb``/``acb`` that remember the working
precision they were produced at.  Every arithmetic operation runs at the
larger precision of its operands, and a non-finite result raises
:class:`PrecisionExhausted` instead of silently propagating.

Internal numerical code works on raw ``arb`` values inside
:func:`working_precision` and only wraps results in :class:`Ball` at the
public boundary.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from flint import acb, arb, ctx, fmpq, fmpz

from .errors import PrecisionExhausted

DEFAULT_PREC = 256
MIN_PREC = 64


def working_precision(bits: int):
    """Context manager setting Arb's working precision to ``bits``."""
    return ctx.workprec(int(bits))


def to_arb(x) -> arb:
    """Convert an exact number (int, Fraction, fmpq) or arb to an arb.

    Must be called inside the desired working precision; exact inputs are
    rounded with a rigorous radius.
    """
    if isinstance(x, arb):
        return x
    if isinstance(x, Ball):
        return x.value
    if isinstance(x, bool):
        return arb(int(x))
    if isinstance(x, int):
        return arb(fmpz(x))
    if isinstance(x, Fraction) or isinstance(x, Rational):
        return arb(fmpq(int(x.numerator), int(x.denominator)))
    if isinstance(x, fmpq):
        return arb(x)
    if isinstance(x, fmpz):
        return arb(x)
    if isinstance(x, str):
        return arb(x)
    if isinstance(x, float):
        # floats are exact dyadic rationals
        return arb(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a ball")


def _prec_of(*xs) -> int:
    return max((x.precision_bits for x in xs if isinstance(x, (Ball, ComplexBall))), default=DEFAULT_PREC)


def _check(value, what="ball"):
    if not value.is_finite():
        raise PrecisionExhausted(f"{what} is not finite: {value}")
    return value


class Ball:
    """A rigorous enclosure ``[midpoint - radius, midpoint + radius]``."""

    __slots__ = ("value", "precision_bits")

    def __init__(self, value, precision_bits: int = DEFAULT_PREC):
        self.precision_bits = int(precision_bits)
        with working_precision(self.precision_bits):
            self.value = _check(to_arb(value) + 0)

    @classmethod
    def from_mid_rad(cls, mid, rad, precision_bits: int = DEFAULT_PREC) -> "Ball":
        with working_precision(precision_bits):
            m = to_arb(mid)
            r = to_arb(rad)
            return cls(arb(m.mid(), 0) + arb(0, r.upper()) + arb(0, m.rad()), precision_bits)

    @classmethod
    def pi(cls, precision_bits: int = DEFAULT_PREC) -> "Ball":
        with working_precision(precision_bits):
            return cls(arb.pi(), precision_bits)

    # -- accessors ---------------------------------------------------
    @property
    def midpoint(self) -> arb:
        return self.value.mid()

    @property
    def radius(self) -> arb:
        return self.value.rad()

    @property
    def lower(self) -> arb:
        return self.value.lower()

    @property
    def upper(self) -> arb:
        return self.value.upper()

    def contains(self, x) -> bool:
        with working_precision(self.precision_bits):
            return bool(self.value.contains(to_arb(x)))

    def contains_integer(self) -> bool:
        return bool(self.value.contains_integer())

    def unique_integer(self) -> int | None:
        """The single integer enclosed by the ball, or None."""
        z = self.value.unique_fmpz()
        return None if z is None else int(z)

    def integers_within(self, extra=0) -> list[int]:
        """All integers in the ball widened by ``extra`` (a nonnegative number)."""
        with working_precision(self.precision_bits):
            widened = self.value + arb(0, to_arb(extra).upper())
            lo = int(widened.lower().ceil().unique_fmpz())
            hi = int(widened.upper().floor().unique_fmpz())
        return list(range(lo, hi + 1))

    def widen(self, extra) -> "Ball":
        with working_precision(self.precision_bits):
            return Ball(self.value + arb(0, to_arb(extra).upper()), self.precision_bits)

    def overlaps(self, other: "Ball") -> bool:
        return bool(self.value.overlaps(to_arb(other)))

    def is_positive(self) -> bool:
        return bool(self.value > 0)

    def is_negative(self) -> bool:
        return bool(self.value < 0)

    def rel_accuracy_bits(self) -> int:
        return int(self.value.rel_accuracy_bits())

    # -- arithmetic --------------------------------------------------
    def _binary(self, other, op):
        prec = _prec_of(self, other)
        with working_precision(prec):
            return Ball(op(self.value, to_arb(other)), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __pow__(self, other):
        return self._binary(other, lambda a, b: a ** b)

    def __neg__(self):
        return Ball(-self.value, self.precision_bits)

    def __abs__(self):
        with working_precision(self.precision_bits):
            return Ball(abs(self.value), self.precision_bits)

    def _unary(self, name):
        with working_precision(self.precision_bits):
            return Ball(getattr(self.value, name)(), self.precision_bits)

    def sqrt(self) -> "Ball":
        return self._unary("sqrt")

    def exp(self) -> "Ball":
        return self._unary("exp")

    def log(self) -> "Ball":
        return self._unary("log")

    # -- comparisons are certain-or-False, as in Arb -----------------
    def __lt__(self, other):
        return bool(self.value < to_arb(other))

    def __le__(self, other):
        return bool(self.value <= to_arb(other))

    def __gt__(self, other):
        return bool(self.value > to_arb(other))

    def __ge__(self, other):
        return bool(self.value >= to_arb(other))

    def __float__(self):
        return float(self.value.mid())

    def __repr__(self):
        return f"Ball({self.value.str(20)}, bits={self.precision_bits})"

    def to_json(self) -> dict:
        """Decimal midpoint and radius; the printed interval still encloses the value.

        Arb's decimal printer rounds the radius up to cover the truncation of
        the midpoint, so the strings are parsed out of its output.
        """
        digits = max(20, int(self.precision_bits * 0.30103) + 2)
        text = self.value.str(digits)
        if text.startswith("[+/- "):
            mid, rad = "0", text[5:-1]  # Arb drops a midpoint lost in the radius
        elif text.startswith("["):
            mid, rad = text[1:-1].split(" +/- ")
        else:
            mid, rad = text, "0"
        return {"mid": mid, "rad": rad, "bits": self.precision_bits}

    @classmethod
    def from_json(cls, obj: dict) -> "Ball":
        prec = int(obj["bits"])
        with working_precision(prec):
            v = arb(obj["mid"]) + arb(0, arb(obj["rad"]).upper())
        return cls(v, prec)


class ComplexBall:
    """Rectangular complex ball; ``real`` and ``imag`` are real balls."""

    __slots__ = ("value", "precision_bits")

    def __init__(self, value, precision_bits: int = DEFAULT_PREC):
        self.precision_bits = int(precision_bits)
        if not isinstance(value, acb):
            with working_precision(self.precision_bits):
                value = acb(to_arb(value))
        if not value.is_finite():
            raise PrecisionExhausted(f"complex ball is not finite: {value}")
        self.value = value

    @property
    def real(self) -> Ball:
        return Ball(self.value.real, self.precision_bits)

    @property
    def imag(self) -> Ball:
        return Ball(self.value.imag, self.precision_bits)

    def abs_upper(self) -> arb:
        with working_precision(self.precision_bits):
            return self.value.abs_upper()

    def __add__(self, other):
        prec = _prec_of(self, other)
        o = other.value if isinstance(other, ComplexBall) else to_arb(other)
        with working_precision(prec):
            return ComplexBall(self.value + o, prec)

    __radd__ = __add__

    def __mul__(self, other):
        prec = _prec_of(self, other)
        o = other.value if isinstance(other, ComplexBall) else to_arb(other)
        with working_precision(prec):
            return ComplexBall(self.value * o, prec)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ComplexBall({self.value.str(20)}, bits={self.precision_bits})"

    def to_json(self) -> dict:
        return {"re": self.real.to_json(), "im": self.imag.to_json()}


def exp_pi_i(e: Fraction, precision_bits: int = DEFAULT_PREC) -> acb:
    """``exp(pi*i*e)`` for an exact rational ``e``, as a raw acb.

    The exponent is reduced mod 2 exactly before any rounding happens, so
    the radius does not grow with the size of ``e``.
    """
    e = Fraction(e) % 2
    with working_precision(precision_bits):
        s, c = arb.sin_cos_pi_fmpq(fmpq(e.numerator, e.denominator))
        return acb(c, s)
