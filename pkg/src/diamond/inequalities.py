"""Inequality checks for Delta_k(n): Turan of any order, Laguerre, forward
differences, the analytic log-concavity certificate, and multiplicativity.

Every verdict about an individual n is decided on exact integers; balls only
enter the analytic certificate and the Hermite probe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from flint import arb

from .asymptotics import (_x_arb, alpha, growth_parameters, k_constants, main_term,
                          relative_error_bound)
from .ball import Ball, DEFAULT_PREC, to_arb, working_precision
from .bigseries import delta_coeffs, delta_table
from .errors import KOutOfRange, PreconditionViolated, PrecisionExhausted


def _values(k: int, lo: int, hi: int) -> tuple:
    if lo < 0:
        raise ValueError("negative index")
    return delta_coeffs(k, hi)


# -- exact checks ---------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    """One exact check at one n; ``values`` holds the integers it was decided on."""

    holds: bool
    n: int
    values: tuple


def turan2_exact(k: int, n: int) -> CheckResult:
    """Delta(n)^2 >= Delta(n-1) Delta(n+1), decided on exact integers."""
    if n < 1:
        raise ValueError("turan2_exact needs n >= 1")
    c = _values(k, n - 1, n + 1)
    a, b, d = c[n - 1], c[n], c[n + 1]
    return CheckResult(b * b >= a * d, n, (a, b, d))


@dataclass(frozen=True)
class JensenPoly:
    d: int
    n: int
    coeffs: tuple  # ascending powers of X

    def __post_init__(self):
        if len(self.coeffs) != self.d + 1:
            raise ValueError("a degree-d Jensen polynomial has d+1 coefficients")


def jensen_poly(k: int, d: int, n: int) -> JensenPoly:
    """J^{d,n}(X) = sum_j C(d, j) Delta(n+j) X^j."""
    if d < 0 or n < 0:
        raise ValueError("need d >= 0 and n >= 0")
    c = _values(k, n, n + d)
    return JensenPoly(d, n, tuple(math.comb(d, j) * c[n + j] for j in range(d + 1)))


# polynomials below are lists of Fractions in ascending order, no trailing zeros

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _derivative(p: list) -> list:
    return _trim([i * p[i] for i in range(1, len(p))])


def _divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        _trim(a)
    return _trim(q), a


def _gcd(a: list, b: list) -> list:
    while b:
        a, b = b, _divmod(a, b)[1]
    return [c / a[-1] for c in a]


def _sign_changes(signs: list[int]) -> int:
    signs = [s for s in signs if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_sequence(p: list) -> list[list]:
    seq = [p, _derivative(p)]
    while seq[-1]:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def count_distinct_real_roots(p) -> int:
    """Number of distinct real roots of a nonzero rational polynomial."""
    p = _trim([Fraction(c) for c in p])
    if not p:
        raise ValueError("the zero polynomial has no finite root count")
    if len(p) == 1:
        return 0
    seq = sturm_sequence(p)
    # signs at +inf follow the leading coefficients, at -inf flip with parity of degree
    at_pos = [1 if s[-1] > 0 else -1 for s in seq]
    at_neg = [(1 if s[-1] > 0 else -1) * (-1 if (len(s) - 1) % 2 else 1) for s in seq]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def square_free_part(p) -> list:
    p = _trim([Fraction(c) for c in p])
    g = _gcd(p, _derivative(p)) if len(p) > 1 else [Fraction(1)]
    return _divmod(p, g)[0]


def is_hyperbolic(p) -> bool:
    """True iff every complex root of ``p`` is real (exact, via Sturm chains)."""
    coeffs = p.coeffs if isinstance(p, JensenPoly) else p
    sf = square_free_part(coeffs)
    if not sf:
        raise ValueError("the zero polynomial has no roots to classify")
    return count_distinct_real_roots(sf) == len(sf) - 1


def turan_order(k: int, d: int, n: int) -> CheckResult:
    """Turan inequality of order d at n: J^{d,n-1} is hyperbolic."""
    if n < 1:
        raise ValueError("need n >= 1")
    jp = jensen_poly(k, d, n - 1)
    return CheckResult(is_hyperbolic(jp), n, jp.coeffs)


def laguerre(k: int, m: int, n: int) -> int:
    """L_m(Delta(n)) = 1/2 sum_{j<=2m} (-1)^{j+m} C(2m, j) Delta(n+j) Delta(n+2m-j).

    The sum is symmetric in j <-> 2m-j and C(2m, m) is even, so the half is
    an exact integer; L_1 is Delta(n+1)^2 - Delta(n) Delta(n+2).
    """
    if m < 0 or n < 0:
        raise ValueError("need m >= 0 and n >= 0")
    c = _values(k, n, n + 2 * m)
    twice = sum((-1) ** (j + m) * math.comb(2 * m, j) * c[n + j] * c[n + 2 * m - j]
                for j in range(2 * m + 1))
    assert twice % 2 == 0
    return twice // 2


def forward_difference(k: int, r: int, n: int) -> int:
    """Delta^r(Delta_k(n)) = sum_i C(r, i) (-1)^{r+i} Delta_k(n+i)."""
    if r < 0 or n < 0:
        raise ValueError("need r >= 0 and n >= 0")
    c = _values(k, n, n + r)
    return sum(math.comb(r, i) * (-1) ** (r + i) * c[n + i] for i in range(r + 1))


def multiplicative_check(k: int, a: int, b: int) -> CheckResult:
    """Delta(a) Delta(b) >= Delta(a+b)."""
    if a < 0 or b < 0:
        raise ValueError("need a, b >= 0")
    c = _values(k, 0, a + b)
    return CheckResult(c[a] * c[b] >= c[a + b], a, (a, b, c[a], c[b], c[a + b]))


# -- analytic certificate -------------------------------------------------

class CertVerdict(enum.Enum):
    CERTIFIED = "Certified"
    NOT_CERTIFIED_HERE = "NotCertifiedHere"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class CertifierState:
    k: int
    n: int
    theta: Ball  # exact-series ratio Delta(n-1) Delta(n+1) / Delta(n)^2
    theta_M: Ball
    eps_star: Ball | None  # relative-error bound; None where its precondition fails
    gap: Ball  # 1 - theta_M
    hyp_i: bool | None  # x(n-1) >= 26/sqrt(alpha); None when undecided
    hyp_ii: bool | None  # e^{delta x(n)} >= A_k x(n)^4
    gap_bound: bool | None  # gap >= sqrt(alpha) pi^4 / (36 x(n+1)^3), where (i) holds
    chain: bool | None  # gap >= 16 eps* and eps* <= 1/2 (then theta <= 1 must follow)
    verdict: CertVerdict
    precision_bits: int
    reason: str = ""

    @property
    def chain_consistent(self) -> bool:
        """False only if the sufficient condition held while theta > 1."""
        return not (self.chain and self.theta > 1)


def _decide(lhs: arb, rhs: arb) -> bool | None:
    if lhs >= rhs:
        return True
    if lhs < rhs:
        return False
    return None


def _certify_once(k: int, n: int, prec: int) -> CertifierState:
    kc = k_constants(k, prec)
    c = _values(k, n - 1, n + 1)
    with working_precision(prec):
        sa = to_arb(kc.alpha).sqrt()
        x_prev, x, x_next = (_x_arb(k, m, prec) for m in (n - 1, n, n + 1))
        hyp_i = _decide(x_prev, 26 / sa)
        hyp_ii = _decide((kc.delta.value * x).exp(), kc.A.value * x ** 4)

        theta = to_arb(Fraction(c[n - 1] * c[n + 1], c[n] * c[n]))
        Ms = [main_term(k, m, prec).value for m in (n - 1, n, n + 1)]
        theta_M = Ms[0] * Ms[2] / (Ms[1] * Ms[1])
        gap = 1 - theta_M

        eps_star = None
        if sa * x_prev >= 4:
            eps_star = max(relative_error_bound(k, m, prec).value for m in (n - 1, n, n + 1))

        gap_bound = None
        if hyp_i:
            gap_bound = _decide(gap, sa * arb.pi() ** 4 / (36 * x_next ** 3))
        chain = None
        if eps_star is not None:
            chain = bool(eps_star <= arb(1) / 2 and gap >= 16 * eps_star)

    if not all(v.is_finite() for v in (theta, theta_M, gap)):
        raise PrecisionExhausted("certifier balls are not finite")
    if hyp_i and hyp_ii:
        verdict, reason = CertVerdict.CERTIFIED, ""
    elif hyp_i is False or hyp_ii is False:
        failed = [name for name, v in (("(i)", hyp_i), ("(ii)", hyp_ii)) if v is False]
        verdict, reason = CertVerdict.NOT_CERTIFIED_HERE, "hypothesis " + " and ".join(failed) + " fails"
    else:
        verdict = CertVerdict.INCONCLUSIVE
        reason = f"hypotheses undecided at {prec} bits"
    return CertifierState(
        k=k, n=n,
        theta=Ball(theta, prec), theta_M=Ball(theta_M, prec),
        eps_star=None if eps_star is None else Ball(eps_star, prec),
        gap=Ball(gap, prec),
        hyp_i=hyp_i, hyp_ii=hyp_ii, gap_bound=gap_bound, chain=chain,
        verdict=verdict, precision_bits=prec, reason=reason,
    )


def logconcavity_certifier(k: int, n: int, precision_bits: int = DEFAULT_PREC) -> CertifierState:
    """Check the two hypotheses that make Delta(n)^2 >= Delta(n-1) Delta(n+1) a theorem.

    (i) x(n-1) >= 26/sqrt(alpha_k) and (ii) e^{delta_k x(n)} >= A_k x(n)^4.
    NotCertifiedHere says nothing about log-concavity itself.  An undecided
    comparison is retried once at twice the precision.
    """
    if k < 3:
        raise KOutOfRange("the certificate is stated for k >= 3")
    if not Fraction(n) > Fraction(k + 1, 12) + 1:
        raise PreconditionViolated("the certificate needs n > (k+1)/12 + 1")
    state = _certify_once(k, n, precision_bits)
    if state.verdict is CertVerdict.INCONCLUSIVE:
        state = _certify_once(k, n, 2 * precision_bits)
    return state


def n0(k: int) -> Fraction:
    return 8 * k ** 3 + Fraction(k + 1, 12)


def certified_threshold(k: int) -> int:
    return max(math.ceil(n0(k)), 526)


@dataclass
class ThresholdCertificate:
    k: int
    branch: str  # "closed-form" or "finite"
    threshold: int
    passed: bool
    checks: dict = field(default_factory=dict)  # name -> bool


CLOSED_FORM_CONST = Fraction(72, 5)  # the 14.4 bounding the k-free constant


def _closed_form_const(prec: int) -> arb:
    with working_precision(prec):
        pi = arb.pi()
        return ((arb(1728) / pi ** (arb(13) / 2) * 432 * arb(2).sqrt()).log()
                + 4 * (4 * pi / arb(3).sqrt()).log())


def threshold_certificate(k: int, precision_bits: int = DEFAULT_PREC) -> ThresholdCertificate:
    """Certify that both hypotheses hold for every n >= max(ceil(n0(k)), 526)."""
    if k < 3:
        raise KOutOfRange("the threshold is stated for k >= 3")
    prec = precision_bits
    kc = k_constants(k, prec)
    threshold = certified_threshold(k)
    checks: dict[str, bool] = {}
    with working_precision(prec):
        pi = arb.pi()
        sa = to_arb(kc.alpha).sqrt()
        x_n0 = _x_arb(k, n0(k), prec)
        # (i) at the threshold; x is increasing so it persists
        checks["hyp_i_at_threshold"] = bool(_x_arb(k, threshold - 1, prec) >= 26 / sa)
        # F(n) = e^{delta x}/x^4 increases once x >= 4/delta
        checks["F_increasing_from_n0"] = bool(x_n0 >= 4 / kc.delta.value)
        if k >= 16:
            branch = "closed-form"
            const = _closed_form_const(prec)
            c144 = to_arb(CLOSED_FORM_CONST)
            checks["const_below_14.4"] = bool(const < c144)
            lhs = (72 * pi / 7 * (arb(2) / 15).sqrt() - pi / arb(3).sqrt()) * arb(k).sqrt()
            checks["closed_form"] = bool(lhs >= 9 * arb(k).log() + c144)
            checks["A_k_below_A_tilde"] = bool(kc.A.value <= kc.A_tilde.value)
        else:
            branch = "finite"
            for label, m in (("n0", math.ceil(n0(k))), ("threshold", threshold)):
                x = _x_arb(k, m, prec)
                checks[f"hyp_ii_at_{label}"] = bool(
                    (kc.delta.value * x).exp() >= kc.A.value * x ** 4)
    # hypothesis (ii) at ceil(n0) is informative only: the certified threshold
    # is the max with 526, so (ii) is only needed from there on
    required = [name for name in checks if name != "hyp_ii_at_n0"]
    passed = all(checks[name] for name in required)
    return ThresholdCertificate(k, branch, threshold, passed, checks)


# -- Hermite probe --------------------------------------------------------

def hermite_poly(d: int, convention: str = "gorz") -> list[int]:
    """Ascending coefficients of H_d.

    ``gorz``: generating function exp(-t^2 + X t), H_{d+1} = X H_d - 2d H_{d-1}
    (H_1 = X, H_2 = X^2 - 2); this is the normalisation in which the
    renormalised Jensen polynomials converge.  ``physicists``: H_1 = 2X,
    H_{d+1} = 2X H_d - 2d H_{d-1}.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    scale = {"gorz": 1, "physicists": 2}[convention]
    prev, cur = [0], [1]
    for i in range(d):
        nxt = [0] + [scale * c for c in cur]
        for j, c in enumerate(prev):
            nxt[j] -= 2 * i * c
        prev, cur = cur, nxt
    return cur


def renormalized_jensen(k: int, d: int, n: int, precision_bits: int = 512) -> list[Ball]:
    """Coefficients of delta^{-d}/Delta(n) * J^{d,n}((delta X - 1) e^{-A})."""
    prec = precision_bits
    c = _values(k, n, n + d)
    A, delta = growth_parameters(k, n, prec)
    with working_precision(prec):
        w = [math.comb(d, j) * to_arb(Fraction(c[n + j], c[n])) * (-j * A.value).exp()
             for j in range(d + 1)]
        out = []
        for i in range(d + 1):
            s = arb(0)
            for j in range(i, d + 1):
                s += w[j] * math.comb(j, i) * (-1) ** (j - i)
            out.append(Ball(s * delta.value ** (i - d), prec))
    return out


def hermite_convergence_probe(k: int, d: int, n_list, convention: str = "gorz",
                              precision_bits: int = 512) -> list[tuple[int, float]]:
    """(n, sup-norm coefficient distance to H_d) for each n."""
    H = hermite_poly(d, convention)
    out = []
    for n in n_list:
        coeffs = renormalized_jensen(k, d, n, precision_bits)
        dev = max(abs(b - h).upper for b, h in zip(coeffs, H))
        out.append((n, float(dev)))
    return out


# -- sweeps ---------------------------------------------------------------

class Verdict(enum.Enum):
    ALL_HOLD = "AllHold"
    COUNTEREXAMPLES = "Counterexamples"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class IneqReport:
    family: str
    order: int | None
    k: int
    range: tuple[int, int]
    verdict: Verdict
    witnesses: list = field(default_factory=list)  # (n, exact values) of failures
    reason: str = ""
    checked: int = 0


def _report(family, order, k, lo, hi, failures, checked, inconclusive=()) -> IneqReport:
    if failures:
        verdict, reason = Verdict.COUNTEREXAMPLES, f"{len(failures)} failing n"
    elif inconclusive:
        verdict, reason = Verdict.INCONCLUSIVE, f"undecided at n = {list(inconclusive)[:10]}"
    else:
        verdict, reason = Verdict.ALL_HOLD, ""
    return IneqReport(family, order, k, (lo, hi), verdict, list(failures), reason, checked)


def _check_range(lo: int, hi: int) -> None:
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")


def sweep_turan(k: int, d: int, lo: int, hi: int) -> IneqReport:
    _check_range(lo, hi)
    delta_table(k, hi + max(d, 1))
    fails = []
    for n in range(lo, hi + 1):
        r = turan2_exact(k, n) if d == 2 else turan_order(k, d, n)
        if not r.holds:
            fails.append((n, r.values))
    return _report("turan", d, k, lo, hi, fails, hi - lo + 1)


def sweep_laguerre(k: int, m: int, lo: int, hi: int) -> IneqReport:
    _check_range(lo, hi)
    delta_table(k, hi + 2 * m)
    fails = [(n, (v,)) for n in range(lo, hi + 1) if (v := laguerre(k, m, n)) < 0]
    return _report("laguerre", m, k, lo, hi, fails, hi - lo + 1)


def sweep_difference(k: int, r: int, lo: int, hi: int) -> IneqReport:
    _check_range(lo, hi)
    delta_table(k, hi + r)
    fails = [(n, (v,)) for n in range(lo, hi + 1) if (v := forward_difference(k, r, n)) <= 0]
    return _report("diff", r, k, lo, hi, fails, hi - lo + 1)


def sweep_multiplicative(k: int, lo: int, hi: int) -> IneqReport:
    """Every pair lo <= a <= b <= hi."""
    _check_range(lo, hi)
    c = _values(k, 0, 2 * hi)
    fails = []
    for a in range(lo, hi + 1):
        ca = c[a]
        for b in range(a, hi + 1):
            if ca * c[b] < c[a + b]:
                fails.append((a, (a, b, ca, c[b], c[a + b])))
    n_pairs = (hi - lo + 1) * (hi - lo + 2) // 2
    return _report("multiplicative", None, k, lo, hi, fails, n_pairs)


def sweep_logconcave(k: int, lo: int, hi: int, certify: bool = False,
                     precision_bits: int = DEFAULT_PREC) -> IneqReport:
    """Exact log-concavity over [lo, hi]; optionally also the analytic certificate.

    With ``certify`` every n must also be Certified (an Inconclusive
    certificate makes the report Inconclusive; NotCertifiedHere counts as a
    failure of the certificate, not of log-concavity, and is reported the
    same way).
    """
    rep = sweep_turan(k, 2, lo, hi)
    rep.family = "logconcave"
    if not certify or rep.verdict is Verdict.COUNTEREXAMPLES:
        return rep
    undecided = []
    for n in range(lo, hi + 1):
        st = logconcavity_certifier(k, n, precision_bits)
        if st.verdict is not CertVerdict.CERTIFIED:
            undecided.append(n)
        if not st.chain_consistent:
            rep.witnesses.append((n, ("certificate chain held while theta > 1",)))
    if rep.witnesses:
        rep.verdict = Verdict.COUNTEREXAMPLES
    elif undecided:
        rep.verdict = Verdict.INCONCLUSIVE
        rep.reason = f"certificate not obtained at n = {undecided[:10]}"
    return rep
