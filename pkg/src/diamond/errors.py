"""Exception hierarchy shared by every module of the package."""


class DiamondError(Exception):
    """Base class for all package errors."""


class CutoffTooSmall(DiamondError):
    """A coefficient beyond the cutoff of a table was requested."""


class NonCoprimeInput(DiamondError, ValueError):
    pass


class InvalidN(DiamondError, ValueError):
    """n lies outside the domain n > (k+1)/12 of the analytic formulas."""


class KOutOfRange(DiamondError, ValueError):
    pass


class PreconditionViolated(DiamondError, ValueError):
    pass


class PrecisionExhausted(DiamondError, ArithmeticError):
    """A ball came back infinite or too wide to decide what was asked."""


class DomainTooSmall(PrecisionExhausted):
    """A divisor ball straddles zero (only happens for tiny arguments)."""


class CacheFormatError(DiamondError):
    pass
