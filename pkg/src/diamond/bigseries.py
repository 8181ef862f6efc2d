"""Exact coefficient tables for eta-quotient q-series.

Every product that appears here is a finite combination of factors
``(q^m; q^m)_inf``, each of which has only O(sqrt(N)) nonzero coefficients
below ``q^N`` by Euler's pentagonal number theorem.  Multiplying or dividing
a dense big-integer series by such a factor therefore costs O(N^{3/2}) and
needs no rational arithmetic, because every factor has constant term 1.

Tables are immutable and memoised in-process; they can additionally be
persisted in a small binary format (see ``docs/cache_format.md``).
"""

from __future__ import annotations

import enum
import operator
import os
import struct
import threading
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .ball import Ball, DEFAULT_PREC
from .errors import CacheFormatError, CutoffTooSmall, PrecisionExhausted

CACHE_ENV = "DIAMOND_CACHE_DIR"
CACHE_MAGIC = b"DKTB"
CACHE_VERSION = 1


class TableKind(enum.Enum):
    DELTA = 0  # broken k-diamond partitions, parameter k
    COLORED = 1  # r-colored partitions, parameter r


@dataclass(frozen=True)
class CoeffTable:
    """Coefficients ``coeffs[0..cutoff]`` of one q-series."""

    kind: TableKind
    param: int
    cutoff: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.cutoff + 1:
            raise ValueError("coefficient count does not match cutoff")

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n > self.cutoff:
            raise CutoffTooSmall(f"n={n} exceeds table cutoff {self.cutoff}")
        return self.coeffs[n]

    def __len__(self):
        return self.cutoff + 1

    def truncate(self, cutoff: int) -> "CoeffTable":
        if cutoff > self.cutoff:
            raise CutoffTooSmall(f"cannot extend a table of cutoff {self.cutoff} to {cutoff}")
        return CoeffTable(self.kind, self.param, cutoff, self.coeffs[: cutoff + 1])

    def check_invariants(self) -> None:
        """Raise ValueError unless the table has the shape every valid table has."""
        c = self.coeffs
        if not c or c[0] != 1:
            raise ValueError("constant coefficient must be 1")
        if any(v <= 0 for v in c):
            raise ValueError("coefficients must be strictly positive")
        if self.kind is TableKind.COLORED and any(a > b for a, b in zip(c, c[1:])):
            raise ValueError("colored partition counts must be nondecreasing")


# -- sparse eta factors ---------------------------------------------------

def pentagonal_terms(N: int, step: int = 1) -> list[tuple[int, int]]:
    """Nonzero terms ``(exponent, sign)`` of ``(q^step; q^step)_inf`` below q^N.

    Sorted by exponent; the first entry is always ``(0, 1)``.
    """
    terms = [(0, 1)]
    m = 1
    while True:
        e1 = step * m * (3 * m - 1) // 2
        if e1 > N:
            break
        sign = -1 if m % 2 else 1
        terms.append((e1, sign))
        e2 = step * m * (3 * m + 1) // 2
        if e2 <= N:
            terms.append((e2, sign))
        m += 1
    return terms


def multiply_by_factor(series: list[int], step: int) -> list[int]:
    """Multiply a dense series by ``(q^step; q^step)_inf``, keeping its length."""
    N = len(series) - 1
    out = list(series)
    for e, s in pentagonal_terms(N, step)[1:]:
        op = operator.add if s > 0 else operator.sub
        out[e:] = list(map(op, out[e:], series[: N + 1 - e]))
    return out


def divide_by_factor(series: list[int], step: int) -> list[int]:
    """Divide a dense series by ``(q^step; q^step)_inf``, keeping its length."""
    N = len(series) - 1
    terms = pentagonal_terms(N, step)[1:]
    exps = [e for e, _ in terms]
    plus = [e for e, s in terms if s > 0]
    minus = [e for e, s in terms if s < 0]
    plus_ends = [bisect_right(plus, i) for i in range(N + 1)]
    minus_ends = [bisect_right(minus, i) for i in range(N + 1)]
    out = [0] * (N + 1)
    for i in range(N + 1):
        # c * P = a  =>  c[i] = a[i] - sum_{e>0} sign(e) c[i-e]
        acc = series[i]
        if exps and exps[0] <= i:
            acc -= sum([out[i - e] for e in plus[: plus_ends[i]]])
            acc += sum([out[i - e] for e in minus[: minus_ends[i]]])
        out[i] = acc
    return out


# -- tables ---------------------------------------------------------------

_memo: dict[tuple[TableKind, int], CoeffTable] = {}
_memo_lock = threading.Lock()


def _lookup(kind: TableKind, param: int, N: int) -> CoeffTable | None:
    with _memo_lock:
        t = _memo.get((kind, param))
    if t is not None and t.cutoff >= N:
        return t if t.cutoff == N else t.truncate(N)
    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        path = cache_path(cache_dir, kind, param)
        if path.exists():
            t = load_table(path)
            _remember(t)
            if t.cutoff >= N:
                return t.truncate(N)
    return None


def _build_size(kind: TableKind, param: int, N: int) -> int:
    """Cutoff to build for a miss: at least double any cached table, so a
    sequence of slowly growing requests costs amortised O(1) rebuilds."""
    with _memo_lock:
        old = _memo.get((kind, param))
    return N if old is None else max(N, 2 * old.cutoff)


def _remember(t: CoeffTable) -> None:
    with _memo_lock:
        old = _memo.get((t.kind, t.param))
        if old is None or old.cutoff < t.cutoff:
            _memo[(t.kind, t.param)] = t


def _store(t: CoeffTable) -> None:
    _remember(t)
    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        path = cache_path(cache_dir, t.kind, t.param)
        try:
            existing = read_header(path) if path.exists() else None
        except CacheFormatError:
            existing = None
        if existing is None or existing[2] < t.cutoff:
            save_table(t, path)


def clear_memo() -> None:
    with _memo_lock:
        _memo.clear()


def eta_power_inverse_series(r: int, N: int) -> CoeffTable:
    """Coefficients of ``1/(q;q)_inf^r`` (r-colored partitions) up to q^N."""
    if r < 1 or N < 0:
        raise ValueError("need r >= 1 and N >= 0")
    hit = _lookup(TableKind.COLORED, r, N)
    if hit is not None:
        return hit
    M = _build_size(TableKind.COLORED, r, N)
    series = [1] + [0] * M
    for _ in range(r):
        series = divide_by_factor(series, 1)
    t = CoeffTable(TableKind.COLORED, r, M, tuple(series))
    _store(t)
    return t if M == N else t.truncate(N)


def delta_table(k: int, N: int) -> CoeffTable:
    """Coefficients of the broken k-diamond generating function up to q^N.

    The product is
    ``(q^2;q^2)(q^{2k+1};q^{2k+1}) / ((q;q)^3 (q^{4k+2};q^{4k+2}))``.
    """
    if k < 1 or N < 0:
        raise ValueError("need k >= 1 and N >= 0")
    hit = _lookup(TableKind.DELTA, k, N)
    if hit is not None:
        return hit
    M = _build_size(TableKind.DELTA, k, N)
    series = [1] + [0] * M
    series = multiply_by_factor(series, 2)
    series = multiply_by_factor(series, 2 * k + 1)
    for _ in range(3):
        series = divide_by_factor(series, 1)
    series = divide_by_factor(series, 4 * k + 2)
    t = CoeffTable(TableKind.DELTA, k, M, tuple(series))
    _store(t)
    return t if M == N else t.truncate(N)


def delta_coeffs(k: int, N: int) -> tuple:
    """Raw coefficient tuple of Delta_k reaching at least q^N, without copying.

    May be longer than N+1; for hot loops that would otherwise truncate a
    cached table on every call.
    """
    with _memo_lock:
        full = _memo.get((TableKind.DELTA, k))
    if full is not None and full.cutoff >= N:
        return full.coeffs
    return delta_table(k, N).coeffs


def colored_partition_bound_check(r: int, m: int, table: CoeffTable | None = None,
                                  precision_bits: int = DEFAULT_PREC) -> bool:
    """Whether ``p_r(m) <= exp(pi*sqrt(2rm/3))``, decided rigorously.

    The left side is exact; the right side is a ball.  If ``table`` is given
    it must be an r-colored table reaching m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if table is None:
        table = eta_power_inverse_series(r, m)
    elif table.kind is not TableKind.COLORED or table.param != r:
        raise ValueError("table is not the r-colored partition table")
    value = table[m]
    prec = precision_bits
    for _ in range(4):
        pi = Ball.pi(prec)
        bound = (pi * (Ball(2 * r * m, prec) / 3).sqrt()).exp()
        if bound >= value:
            return True
        if bound < value:
            return False
        prec *= 2
    raise PrecisionExhausted("could not separate p_r(m) from its exponential bound")


# -- binary cache ---------------------------------------------------------
#
# header:  4s magic "DKTB" | u8 version | u8 kind | u32 param | u32 cutoff
# body:    per coefficient, u32 byte length L then L bytes big-endian magnitude
# all integers big-endian; coefficients are nonnegative so no sign is stored.

_HEADER = struct.Struct(">4sBBII")
_LEN = struct.Struct(">I")


def cache_path(cache_dir, kind: TableKind, param: int) -> Path:
    name = "delta" if kind is TableKind.DELTA else "colored"
    return Path(cache_dir) / f"{name}_{param}.dktb"


def dump_table(t: CoeffTable) -> bytes:
    parts = [_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, t.kind.value, t.param, t.cutoff)]
    for c in t.coeffs:
        if c < 0:
            raise ValueError("negative coefficients cannot be cached")
        raw = c.to_bytes(max(1, (c.bit_length() + 7) // 8), "big")
        parts.append(_LEN.pack(len(raw)))
        parts.append(raw)
    return b"".join(parts)


def parse_table(data: bytes) -> CoeffTable:
    if len(data) < _HEADER.size:
        raise CacheFormatError("truncated header")
    magic, version, kind, param, cutoff = _HEADER.unpack_from(data, 0)
    if magic != CACHE_MAGIC:
        raise CacheFormatError("bad magic")
    if version != CACHE_VERSION:
        raise CacheFormatError(f"unsupported format version {version}")
    try:
        kind = TableKind(kind)
    except ValueError:
        raise CacheFormatError(f"unknown table kind {kind}") from None
    pos = _HEADER.size
    coeffs = []
    for _ in range(cutoff + 1):
        if pos + _LEN.size > len(data):
            raise CacheFormatError("truncated body")
        (L,) = _LEN.unpack_from(data, pos)
        pos += _LEN.size
        if pos + L > len(data):
            raise CacheFormatError("truncated coefficient")
        coeffs.append(int.from_bytes(data[pos:pos + L], "big"))
        pos += L
    if pos != len(data):
        raise CacheFormatError("trailing bytes after last coefficient")
    t = CoeffTable(kind, param, cutoff, tuple(coeffs))
    try:
        t.check_invariants()
    except ValueError as exc:
        raise CacheFormatError(f"cached table violates invariants: {exc}") from None
    return t


def save_table(t: CoeffTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    tmp.write_bytes(dump_table(t))
    os.replace(tmp, path)


def load_table(path) -> CoeffTable:
    return parse_table(Path(path).read_bytes())


def read_header(path) -> tuple[TableKind, int, int]:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
    if len(head) < _HEADER.size:
        raise CacheFormatError("truncated header")
    magic, version, kind, param, cutoff = _HEADER.unpack(head)
    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        raise CacheFormatError("bad header")
    return TableKind(kind), param, cutoff
