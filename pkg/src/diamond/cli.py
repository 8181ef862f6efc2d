"""Command-line front end.

Exit status: 0 when every asserted check passes, 1 when a check fails,
2 on usage errors.  JSON reports have the shape
``{command, config, results, verdict, timing}`` with exact integers as
decimal strings and balls as ``{mid, rad, bits}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .ball import MIN_PREC
from .bigseries import CACHE_ENV
from .errors import DiamondError

VERIFY_FAMILIES = ("turan", "laguerre", "diff", "logconcave", "multiplicative", "threshold")
DEFAULT_ORDER = {"turan": 2, "laguerre": 1, "diff": 1}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None
    k: int | None
    n_lo: int | None
    n_hi: int | None
    J: int
    precision_bits: int
    output_format: str
    cache_dir: str | None
    threads: int
    strict: bool
    order: int | None
    certify: bool
    only: list | None

    def to_json(self) -> dict:
        # thread count and cache location do not change results, so they stay
        # out of the echoed config (reports must not depend on them)
        out = {"command": self.command}
        if self.family:
            out["family"] = self.family
        for key in ("k", "order"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.n_lo is not None:
            out["range"] = [str(self.n_lo), str(self.n_hi)]
        out["J"] = self.J
        out["bits"] = self.precision_bits
        out["strict"] = self.strict
        if self.certify:
            out["certify"] = True
        if self.only:
            out["only"] = self.only
        return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="diamond parameter k >= 1")
    common.add_argument("--n", type=int, help="single index n")
    common.add_argument("--from", dest="n_from", type=int, help="first n of a sweep")
    common.add_argument("--to", dest="n_to", type=int, help="last n of a sweep (inclusive)")
    common.add_argument("--J", type=int, default=50, help="truncation of the exact formula")
    common.add_argument("--bits", type=int, default=256, help="working precision in bits")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--cache-dir", help=f"table cache directory (default ${CACHE_ENV})")
    common.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--strict", action="store_true", help="treat Inconclusive as failure")

    p = argparse.ArgumentParser(prog="diamond",
                                description="Broken k-diamond partitions: series, exact formula, "
                                            "asymptotics and inequality checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="exact series values")
    sub.add_parser("exact-formula", parents=[common], help="truncated exact formula with certification")
    sub.add_parser("asymptotic", parents=[common], help="main term, error envelopes, relative error")
    v = sub.add_parser("verify", parents=[common], help="inequality sweeps")
    v.add_argument("family", choices=VERIFY_FAMILIES)
    v.add_argument("--order", type=int, help="order for turan, laguerre and diff")
    v.add_argument("--certify", action="store_true",
                   help="logconcave: also require the analytic certificate at every n")
    r = sub.add_parser("reproduce", parents=[common], help="run the acceptance suite")
    r.add_argument("--only", help="comma-separated criterion numbers")
    return p


def make_config(args) -> RunConfig:
    cmd = args.command
    family = getattr(args, "family", None)
    if args.bits < MIN_PREC:
        raise UsageError(f"--bits must be at least {MIN_PREC}")
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    if args.J < 1:
        raise UsageError("--J must be positive")
    if args.n is not None and (args.n_from is not None or args.n_to is not None):
        raise UsageError("give either --n or --from/--to, not both")
    lo = hi = None
    if args.n is not None:
        lo = hi = args.n
    elif args.n_from is not None or args.n_to is not None:
        if args.n_from is None or args.n_to is None:
            raise UsageError("--from and --to go together")
        lo, hi = args.n_from, args.n_to
        if hi < lo:
            raise UsageError("empty range: --to is below --from")
    needs_k = cmd != "reproduce"
    if needs_k and args.k is None:
        raise UsageError("--k is required")
    if args.k is not None and args.k < 1:
        raise UsageError("--k must be >= 1")
    needs_n = cmd in ("compute", "exact-formula", "asymptotic") or (
        cmd == "verify" and family != "threshold")
    if needs_n and lo is None:
        raise UsageError("--n or --from/--to is required")
    if lo is not None and lo < 0:
        raise UsageError("n must be nonnegative")
    order = getattr(args, "order", None)
    if cmd == "verify" and family in DEFAULT_ORDER:
        order = DEFAULT_ORDER[family] if order is None else order
        if order < 0:
            raise UsageError("--order must be nonnegative")
    elif order is not None:
        raise UsageError(f"--order does not apply to {family}")
    only = None
    if cmd == "reproduce" and args.only:
        try:
            only = sorted({int(x) for x in args.only.split(",")})
        except ValueError:
            raise UsageError("--only takes comma-separated integers") from None
        if any(not 1 <= i <= 11 for i in only):
            raise UsageError("criteria are numbered 1 to 11")
    if args.format == "csv" and not (cmd in ("compute", "exact-formula", "asymptotic")):
        raise UsageError("csv output is only available for per-n sweep tables")
    return RunConfig(
        command=cmd, family=family, k=args.k, n_lo=lo, n_hi=hi, J=args.J,
        precision_bits=args.bits, output_format=args.format,
        cache_dir=args.cache_dir or os.environ.get(CACHE_ENV), threads=args.threads,
        strict=args.strict, order=order, certify=getattr(args, "certify", False), only=only,
    )


# -- workers (top level so they pickle) -----------------------------------

def _int(v) -> str | None:
    return None if v is None else str(v)


def _ball(b) -> dict | None:
    return None if b is None else b.to_json()


def _compute_row(k: int, n: int, bits: int, J: int) -> dict:
    from .bigseries import delta_table
    return {"n": str(n), "value": str(delta_table(k, n)[n])}


def _exact_row(k: int, n: int, bits: int, J: int) -> dict:
    from .circle import exact_formula_eval
    ev = exact_formula_eval(k, n, J=J, precision_bits=bits)
    ok = ev.certified and ev.imaginary_vanishes
    return {
        "n": str(n),
        "partial_sum": _ball(ev.partial_sum),
        "imag_sum": _ball(ev.imag_sum),
        "tail_allowance": _ball(ev.tail_allowance),
        "rounded": _int(ev.rounded),
        "series_value": _int(ev.series_value),
        "certified": ev.certified,
        "imaginary_vanishes": ev.imaginary_vanishes,
        "ok": ok,
    }


def _asymptotic_row(k: int, n: int, bits: int, J: int) -> dict:
    from .asymptotics import estimate
    from .bigseries import delta_table
    est = estimate(k, n, bits)
    value = delta_table(k, n)[n]
    row = {
        "n": str(n),
        "value": str(value),
        "x": _ball(est.x),
        "M": _ball(est.M),
        "R_bound": _ball(est.R_bound),
        "eps_bound": _ball(est.eps_bound),
    }
    diff = abs(est.M - value)
    within = None if est.R_bound is None else bool(diff <= est.R_bound)
    rel_ok = None if est.eps_bound is None else bool(diff / est.M <= est.eps_bound)
    row["within_envelope"] = within
    row["relative_error_ok"] = rel_ok
    row["ok"] = within is not False and rel_ok is not False
    return row


def _verify_chunk(family: str, k: int, order, lo: int, hi: int, certify: bool, bits: int):
    from . import inequalities as iq
    if family == "turan":
        return iq.sweep_turan(k, order, max(lo, 1), hi)
    if family == "laguerre":
        return iq.sweep_laguerre(k, order, lo, hi)
    if family == "diff":
        return iq.sweep_difference(k, order, lo, hi)
    if family == "logconcave":
        return iq.sweep_logconcave(k, max(lo, 1), hi, certify=certify, precision_bits=bits)
    raise ValueError(family)


def _mult_chunk(k: int, a_lo: int, a_hi: int, hi: int):
    """Pairs a <= b with a in [a_lo, a_hi] and b up to the sweep's end."""
    from .bigseries import delta_table
    from .inequalities import _values
    delta_table(k, 2 * hi)
    c = _values(k, 0, 2 * hi)
    fails = []
    count = 0
    for a in range(a_lo, a_hi + 1):
        for b in range(a, hi + 1):
            count += 1
            if c[a] * c[b] < c[a + b]:
                fails.append((a, (a, b, c[a], c[b], c[a + b])))
    return fails, count


def _init_worker(cache_dir):
    if cache_dir:
        os.environ[CACHE_ENV] = cache_dir


def _pmap(cfg: RunConfig, fn, arglists):
    if cfg.threads == 1 or len(arglists) < 2:
        return [fn(*a) for a in arglists]
    with ProcessPoolExecutor(max_workers=cfg.threads, initializer=_init_worker,
                             initargs=(cfg.cache_dir,)) as pool:
        futures = [pool.submit(fn, *a) for a in arglists]
        return [f.result() for f in futures]


def _chunks(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    total = hi - lo + 1
    parts = max(1, min(parts, total))
    size, extra = divmod(total, parts)
    out, start = [], lo
    for i in range(parts):
        end = start + size + (1 if i < extra else 0) - 1
        out.append((start, end))
        start = end + 1
    return out


# -- commands -------------------------------------------------------------

PER_N = {"compute": _compute_row, "exact-formula": _exact_row, "asymptotic": _asymptotic_row}


def _run_per_n(cfg: RunConfig):
    from .bigseries import delta_table
    if cfg.command == "exact-formula" and not Fraction(cfg.n_lo) > Fraction(cfg.k + 1, 12):
        raise UsageError(f"exact-formula needs n > (k+1)/12 = {Fraction(cfg.k + 1, 12)}")
    if cfg.command == "asymptotic" and 24 * cfg.n_lo <= 2 * cfg.k + 2:
        raise UsageError("asymptotic needs 24n > 2k + 2")
    delta_table(cfg.k, cfg.n_hi)  # build once in the parent; workers read the cache
    fn = PER_N[cfg.command]
    rows = _pmap(cfg, fn, [(cfg.k, n, cfg.precision_bits, cfg.J) for n in range(cfg.n_lo, cfg.n_hi + 1)])
    if cfg.command == "compute":
        verdict = "pass"
    else:
        verdict = "pass" if all(r["ok"] for r in rows) else "fail"
    return rows, verdict


def _report_json(rep) -> dict:
    return {
        "family": rep.family,
        "order": rep.order,
        "k": rep.k,
        "range": [str(rep.range[0]), str(rep.range[1])],
        "verdict": rep.verdict.value,
        "checked": str(rep.checked),
        "reason": rep.reason,
        "witnesses": [{"n": str(n), "values": [str(v) for v in vals]} for n, vals in rep.witnesses],
    }


def _merge(reports, family, order, k, lo, hi):
    from .inequalities import Verdict, _report
    fails, undecided = [], []
    checked = 0
    for r in reports:
        fails.extend(r.witnesses)
        checked += r.checked
        if r.verdict is Verdict.INCONCLUSIVE:
            undecided.append(r.reason)
    rep = _report(family, order, k, lo, hi, fails, checked)
    if not fails and undecided:
        rep.verdict = Verdict.INCONCLUSIVE
        rep.reason = "; ".join(undecided)
    return rep


def _threshold_json(cert) -> dict:
    return {
        "k": cert.k,
        "branch": cert.branch,
        "threshold": str(cert.threshold),
        "passed": cert.passed,
        "checks": dict(cert.checks),
    }


def _run_verify(cfg: RunConfig):
    from .inequalities import Verdict, _report, threshold_certificate
    fam = cfg.family
    if fam == "threshold":
        if cfg.k < 3:
            raise UsageError("threshold needs k >= 3")
        cert = threshold_certificate(cfg.k, cfg.precision_bits)
        return [_threshold_json(cert)], "pass" if cert.passed else "fail"
    if fam == "logconcave" and cfg.certify and cfg.k < 3:
        raise UsageError("--certify needs k >= 3")
    from .bigseries import delta_table
    lo, hi = cfg.n_lo, cfg.n_hi
    if fam in ("turan", "logconcave"):
        lo = max(lo, 1)
        if hi < lo:
            raise UsageError("turan/logconcave sweeps need n >= 1")
    if fam == "logconcave" and cfg.certify and not Fraction(lo) > Fraction(cfg.k + 1, 12) + 1:
        raise UsageError("--certify needs n > (k+1)/12 + 1")
    reach = {"turan": hi + cfg.order if cfg.order else hi + 1, "logconcave": hi + 1,
             "laguerre": hi + 2 * (cfg.order or 0), "diff": hi + (cfg.order or 0),
             "multiplicative": 2 * hi}[fam]
    delta_table(cfg.k, reach)
    parts = _chunks(lo, hi, cfg.threads)
    if fam == "multiplicative":
        out = _pmap(cfg, _mult_chunk, [(cfg.k, a, b, hi) for a, b in parts])
        fails = [w for f, _ in out for w in f]
        rep = _report("multiplicative", None, cfg.k, lo, hi, fails, sum(c for _, c in out))
    else:
        out = _pmap(cfg, _verify_chunk,
                    [(fam, cfg.k, cfg.order, a, b, cfg.certify, cfg.precision_bits) for a, b in parts])
        rep = _merge(out, out[0].family, cfg.order, cfg.k, lo, hi)
    if rep.verdict is Verdict.ALL_HOLD:
        verdict = "pass"
    elif rep.verdict is Verdict.INCONCLUSIVE:
        verdict = "fail" if cfg.strict else "inconclusive"
    else:
        verdict = "fail"
    return [_report_json(rep)], verdict


def _run_reproduce(cfg: RunConfig):
    from . import acceptance
    numbers = cfg.only or sorted(acceptance.CRITERIA)
    results = _pmap(cfg, _criterion, [(i,) for i in numbers])
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
            for r in results]
    return rows, "pass" if all(r.passed for r in results) else "fail"


def _criterion(i: int):
    from . import acceptance
    return acceptance.CRITERIA[i]()


# -- output ---------------------------------------------------------------

def dumps(report: dict) -> str:
    """Canonical JSON text; ``dumps(json.loads(dumps(r))) == dumps(r)``."""
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _flatten(row: dict) -> dict:
    out = {}
    for key, val in row.items():
        if isinstance(val, dict):
            for sub, v in val.items():
                out[f"{key}.{sub}"] = v
        elif val is None:
            out[key] = ""
        else:
            out[key] = val
    return out


def to_csv(rows: list[dict]) -> str:
    flat = [_flatten(r) for r in rows]
    fields = []
    for r in flat:
        for key in r:
            if key not in fields:
                fields.append(key)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()


def _fmt_ball(b: dict | None) -> str:
    if b is None:
        return "-"
    return b["mid"] if b["rad"] == "0" else f"{b['mid'][:24]} +/- {b['rad']}"


def to_text(report: dict) -> str:
    cmd = report["command"]
    lines = []
    for row in report["results"]:
        if cmd == "compute":
            lines.append(f"{row['n']}\t{row['value']}")
        elif cmd == "exact-formula":
            lines.append(f"n={row['n']} rounded={row['rounded']} series={row['series_value']} "
                         f"certified={row['certified']} imag0={row['imaginary_vanishes']} "
                         f"partial={_fmt_ball(row['partial_sum'])} "
                         f"tail={_fmt_ball(row['tail_allowance'])}")
        elif cmd == "asymptotic":
            lines.append(f"n={row['n']} value={row['value']} M={_fmt_ball(row['M'])} "
                         f"R_bound={_fmt_ball(row['R_bound'])} eps_bound={_fmt_ball(row['eps_bound'])} "
                         f"within={row['within_envelope']} rel_ok={row['relative_error_ok']}")
        elif cmd == "verify" and "branch" in row:
            lines.append(f"k={row['k']} branch={row['branch']} threshold={row['threshold']} "
                         f"passed={row['passed']}")
            lines.extend(f"  {name}: {ok}" for name, ok in row["checks"].items())
        elif cmd == "verify":
            order = "" if row["order"] is None else f"({row['order']})"
            lines.append(f"{row['family']}{order} k={row['k']} n in [{row['range'][0]}, "
                         f"{row['range'][1]}]: {row['verdict']} ({row['checked']} checked)"
                         + (f" {row['reason']}" if row["reason"] else ""))
            for w in row["witnesses"][:50]:
                lines.append(f"  counterexample n={w['n']}: {' '.join(w['values'])}")
        elif cmd == "reproduce":
            mark = "PASS" if row["passed"] else "FAIL"
            lines.append(f"[{mark}] criterion {row['criterion']}: {row['title']}: {row['detail']}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.cache_dir:
        os.environ[CACHE_ENV] = cfg.cache_dir
    start = time.perf_counter()
    if cfg.command in PER_N:
        rows, verdict = _run_per_n(cfg)
    elif cfg.command == "verify":
        rows, verdict = _run_verify(cfg)
    else:
        rows, verdict = _run_reproduce(cfg)
    report = {
        "command": cfg.command,
        "config": cfg.to_json(),
        "results": rows,
        "verdict": verdict,
        "timing": {"seconds": round(time.perf_counter() - start, 3), "threads": cfg.threads},
    }
    code = 0 if verdict in ("pass", "inconclusive") else 1
    return report, code


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    if fmt == "csv":
        return to_csv(report["results"])
    return to_text(report)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        report, code = run(cfg)
    except UsageError as exc:
        print(f"diamond: error: {exc}", file=sys.stderr)
        return 2
    except DiamondError as exc:
        print(f"diamond: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, cfg.output_format))
    return code
