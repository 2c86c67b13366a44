"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 invalid arguments,
3 unreadable or malformed input files.  Nothing is printed or written until
a command has finished, so error paths leave no partial output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .bounds import WeightSpectrum, classify_cosets, dmin_statement, lb_lemma3, lb_rm_closed_form, union_bound_fer
from .code_model import (
    CodeSpec,
    FormatError,
    PacPolynomial,
    check_transform,
    identity_transform,
    pac_transform,
    random_transform,
    read_profile,
    read_transform,
    rm_profile,
)
from .enumerator import EnumerationResult, count_min_weight
from .oracle import OracleSizeError, brute_force_spectrum
from .polysearch import search_optimal_polynomial

EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_FILE = 3

_JSON_SAFE = 1 << 53


class UsageError(Exception):
    pass


def _safe(x):
    """Integers beyond 2**53 become decimal strings; containers are walked."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) > _JSON_SAFE else x
    if isinstance(x, dict):
        return {str(k): _safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_safe(v) for v in x]
    return x


@dataclass
class RunReport:
    """Machine-readable record of one command.  Every field is JSON-safe as stored."""

    command: list[str]
    code: dict
    transform: dict | None
    wmin: int
    awmin: str | None
    dmin_exceeds_wmin: bool | None
    stats: dict = field(default_factory=dict)
    per_coset: dict | None = None
    results: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls(**json.loads(text))


# --------------------------------------------------------------------------- argument plumbing


def _spec_from_args(args) -> CodeSpec:
    if args.rm is not None:
        r, n = args.rm
        if not 1 <= n <= 24 or not 0 <= r <= n:
            raise UsageError(f"--rm: need 0 <= r <= n and 1 <= n <= 24, got r={r}, n={n}")
        return rm_profile(r, n)
    return read_profile(args.profile)


def _rm_order(spec: CodeSpec) -> int | None:
    m = re.fullmatch(r"RM\((\d+),(\d+)\)", spec.origin or "")
    return int(m.group(1)) if m else None


def _transform_from_args(args, spec: CodeSpec, default_identity: bool = False):
    if args.pac is not None:
        try:
            p = PacPolynomial.from_octal(args.pac)
            T = pac_transform(spec, p)
        except ValueError as e:
            raise UsageError(f"--pac: {e}") from None
        return T, {"kind": "pac", "polynomial": p.octal, "descriptor": T.descriptor}
    if args.random_seed is not None:
        T = random_transform(spec, args.random_seed)
        return T, {"kind": "random", "seed": args.random_seed, "descriptor": T.descriptor}
    if args.transform is not None:
        T = read_transform(args.transform)
        try:
            check_transform(T, spec)
        except ValueError as e:
            raise UsageError(f"--transform: {e}") from None
        return T, {"kind": "file", "file": str(args.transform), "descriptor": T.descriptor}
    if args.identity or default_identity:
        return identity_transform(spec.n), {"kind": "identity", "descriptor": "identity"}
    raise UsageError("a transform is required: --identity | --pac OCTAL | --random-seed S | --transform FILE")


def _code_info(spec: CodeSpec) -> dict:
    return {"n": spec.n, "N": spec.N, "K": spec.K, "rate": spec.rate, "profile": spec.origin}


def _parse_ebn0(text: str) -> list[float]:
    """``"0,1,2.5"`` or ``"start:stop:step"`` (stop inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + k * step, 12) for k in range(max(count, 0))]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--ebn0-db: expected 'a,b,c' or 'start:stop:step', got {text!r}") from None


def _threads(args) -> int:
    return args.threads if args.threads and args.threads > 0 else (os.cpu_count() or 1)


def _count_summary(spec: CodeSpec, tinfo: dict, res: EnumerationResult) -> list[str]:
    lines = [
        f"code       n={spec.n} N={spec.N} K={spec.K} R={spec.rate:.6g} profile={spec.origin}",
        f"transform  {tinfo['descriptor']}",
        f"wmin       {res.wmin}",
        f"Awmin      {res.awmin}",
    ]
    if res.dmin_exceeds_wmin:
        lines.append("note       Awmin = 0, so dmin > wmin")
    s = res.stats
    lines.append(
        f"stats      visited_subtrees={s.visited_subtrees} message_updates={s.message_updates} "
        f"pretransform_checks={s.pretransform_checks}"
    )
    return lines


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------- commands


def cmd_count(args):
    spec = _spec_from_args(args)
    T, tinfo = _transform_from_args(args, spec)
    t0 = time.perf_counter()
    res = count_min_weight(spec, T, shortcircuit=not args.no_shortcircuit, workers=_threads(args))
    elapsed = time.perf_counter() - t0
    lines = _count_summary(spec, tinfo, res)
    lines.append(f"time       {elapsed:.3f} s")
    per_coset_csv = _csv_text(["coset", "count"], sorted(res.per_coset.items()))
    if args.per_coset:
        lines.append(per_coset_csv.rstrip("\n"))
    report = RunReport(
        command=list(args.argv),
        code=_code_info(spec),
        transform=tinfo,
        wmin=res.wmin,
        awmin=str(res.awmin),
        dmin_exceeds_wmin=res.dmin_exceeds_wmin,
        stats=res.stats.as_dict(),
        per_coset=_safe(res.per_coset) if args.per_coset else None,
        wall_clock_s=elapsed,
    )
    return report, lines, {args.csv: per_coset_csv}, 0


def cmd_bounds(args):
    spec = _spec_from_args(args)
    t0 = time.perf_counter()
    wmin, exact = dmin_statement(spec)
    cls = classify_cosets(spec)
    unremovable = lb_lemma3(spec)
    r = _rm_order(spec)
    closed = lb_rm_closed_form(r) if r is not None and r <= spec.n - 2 else None
    results = {
        "wmin": wmin,
        "dmin_equals_wmin_for_all_T": exact,
        "pretransformable_cosets": len(cls.pretransformable),
        "non_pretransformable_cosets": len(cls.non_pretransformable),
        "lb_unremovable": unremovable,
        "lb_closed_form": closed,
    }
    lines = [
        f"code       n={spec.n} N={spec.N} K={spec.K} R={spec.rate:.6g} profile={spec.origin}",
        f"wmin       {wmin} ({'dmin = wmin for every T' if exact else 'dmin >= wmin'})",
        f"cosets     {len(cls.pretransformable)} pre-transformable, {len(cls.non_pretransformable)} not",
        f"unremovable Awmin >= {unremovable}",
    ]
    if closed is not None:
        lines.append(f"closed     Awmin >= {closed}")
    files = {}
    tinfo = None
    if args.ebn0_db is not None:
        if args.spectrum is not None:
            try:
                spectrum = WeightSpectrum.parse(args.spectrum)
            except ValueError as e:
                raise UsageError(f"--spectrum: {e}") from None
        else:
            T, tinfo = _transform_from_args(args, spec, default_identity=True)
            res = count_min_weight(spec, T, workers=_threads(args))
            if not res.awmin:
                raise UsageError("Awmin = 0 for this transform; pass --spectrum explicitly")
            spectrum = WeightSpectrum(((res.wmin, res.awmin),))
        sweep = [(e, union_bound_fer(spectrum, spec.rate, e)) for e in _parse_ebn0(args.ebn0_db)]
        fer_csv = _csv_text(["ebn0_db", "fer_union_bound"], [(f"{e:g}", f"{v:.12e}") for e, v in sweep])
        lines.append(fer_csv.rstrip("\n"))
        files[args.csv] = fer_csv
        results["spectrum"] = [list(t) for t in spectrum]
        results["fer_union_bound"] = [[e, v] for e, v in sweep]
    elapsed = time.perf_counter() - t0
    report = RunReport(
        command=list(args.argv),
        code=_code_info(spec),
        transform=tinfo,
        wmin=wmin,
        awmin=None,
        dmin_exceeds_wmin=None,
        results=_safe(results),
        wall_clock_s=elapsed,
    )
    return report, lines, files, 0


def cmd_verify(args):
    spec = _spec_from_args(args)
    T, tinfo = _transform_from_args(args, spec)
    t0 = time.perf_counter()
    res = count_min_weight(spec, T, shortcircuit=not args.no_shortcircuit, workers=_threads(args))
    try:
        oracle = brute_force_spectrum(spec, T, k_limit=args.k_limit)
    except OracleSizeError as e:
        raise UsageError(f"verify: {e}") from None
    elapsed = time.perf_counter() - t0
    oracle_count = oracle.spectrum[res.wmin]
    agree = oracle_count == res.awmin and (oracle.dmin > res.wmin) == res.dmin_exceeds_wmin
    lines = _count_summary(spec, tinfo, res)
    lines += [
        f"oracle     dmin={oracle.dmin} A_dmin={oracle.a_dmin} A_wmin={oracle_count}",
        f"verdict    {'agree' if agree else 'MISMATCH'}",
    ]
    report = RunReport(
        command=list(args.argv),
        code=_code_info(spec),
        transform=tinfo,
        wmin=res.wmin,
        awmin=str(res.awmin),
        dmin_exceeds_wmin=res.dmin_exceeds_wmin,
        stats=res.stats.as_dict(),
        results=_safe({"oracle_dmin": oracle.dmin, "oracle_a_dmin": oracle.a_dmin, "oracle_a_wmin": oracle_count, "agree": agree}),
        wall_clock_s=elapsed,
    )
    return report, lines, {}, 0 if agree else EXIT_MISMATCH


def cmd_search(args):
    spec = _spec_from_args(args)
    if args.max_degree < args.min_degree or args.min_degree < 0:
        raise UsageError(f"--max-degree/--min-degree: invalid range [{args.min_degree}, {args.max_degree}]")
    t0 = time.perf_counter()
    rep = search_optimal_polynomial(
        spec,
        args.max_degree,
        min_degree=args.min_degree,
        early_abort=not args.no_early_abort,
        top=args.top,
        workers=_threads(args),
    )
    elapsed = time.perf_counter() - t0
    ranked_csv = rep.csv()
    p = rep.best_polynomial
    lines = [
        f"code       n={spec.n} N={spec.N} K={spec.K} R={spec.rate:.6g} profile={spec.origin}",
        f"space      degree {rep.search_space[0]}..{rep.search_space[1]}, {rep.evaluated} candidates, {rep.aborted} aborted early",
        f"best       {p} (degree {p.degree}, {p.nonzeros} nonzero) Awmin={rep.best_awmin}",
        f"ties       {rep.ties_considered}",
        ranked_csv.rstrip("\n"),
    ]
    results = {
        "best_polynomial": p.octal,
        "best_degree": p.degree,
        "best_awmin": str(rep.best_awmin),
        "ties_considered": rep.ties_considered,
        "search_space": list(rep.search_space),
        "evaluated": rep.evaluated,
        "aborted": rep.aborted,
        "ranked": [[c.polynomial.octal, c.polynomial.degree, str(c.awmin)] for c in rep.ranked],
    }
    report = RunReport(
        command=list(args.argv),
        code=_code_info(spec),
        transform=None,
        wmin=dmin_statement(spec)[0],
        awmin=str(rep.best_awmin),
        dmin_exceeds_wmin=rep.best_awmin == 0,
        results=results,
        wall_clock_s=elapsed,
    )
    return report, lines, {args.csv: ranked_csv}, 0


def cmd_random_ensemble(args):
    spec = _spec_from_args(args)
    if args.trials < 1:
        raise UsageError(f"--trials: must be positive, got {args.trials}")
    t0 = time.perf_counter()
    threads = _threads(args)
    rows = []
    for s in range(args.seed, args.seed + args.trials):
        res = count_min_weight(spec, random_transform(spec, s), workers=threads)
        rows.append((s, res.awmin))
    elapsed = time.perf_counter() - t0
    values = [a for _, a in rows]
    wmin = dmin_statement(spec)[0]
    mean = statistics.fmean(values)
    lines = [
        f"code       n={spec.n} N={spec.N} K={spec.K} R={spec.rate:.6g} profile={spec.origin}",
        f"trials     {args.trials} (seeds {args.seed}..{args.seed + args.trials - 1})",
        f"Awmin      min={min(values)} mean={mean:.6g} max={max(values)}",
    ]
    results = {"min": min(values), "mean": mean, "max": max(values), "trials": [[s, a] for s, a in rows]}
    report = RunReport(
        command=list(args.argv),
        code=_code_info(spec),
        transform={"kind": "random", "seeds": [args.seed, args.seed + args.trials - 1]},
        wmin=wmin,
        awmin=None,
        dmin_exceeds_wmin=min(values) == 0,
        results=_safe(results),
        wall_clock_s=elapsed,
    )
    return report, lines, {args.csv: _csv_text(["seed", "awmin"], rows)}, 0


# --------------------------------------------------------------------------- parser


def _add_profile(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rm", nargs=2, type=int, metavar=("R", "N"), help="Reed-Muller profile RM(R, N)")
    g.add_argument("--profile", type=Path, metavar="FILE", help="profile file")


def _add_transform(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--identity", action="store_true", help="no pre-transform (plain polar code)")
    g.add_argument("--pac", metavar="OCTAL", help="PAC polynomial in octal, e.g. 155 or 155_8")
    g.add_argument("--random-seed", type=int, metavar="S", help="seeded random upper-triangular transform")
    g.add_argument("--transform", type=Path, metavar="FILE", help="transform file")


def _add_common(p, csv_help=None):
    p.add_argument("--json", type=Path, metavar="PATH", help="write the run report as JSON")
    if csv_help:
        p.add_argument("--csv", type=Path, metavar="PATH", help=csv_help)
    p.add_argument("--threads", type=int, default=0, help="worker processes (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptpc", description="Minimum-weight codewords of pre-transformed polar codes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count wmin-weight codewords")
    _add_profile(p)
    _add_transform(p)
    _add_common(p, "write the per-coset counts as CSV")
    p.add_argument("--per-coset", action="store_true", help="print the per-coset table")
    p.add_argument("--no-shortcircuit", action="store_true", help="walk every coset literally (for counter studies)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bounds", help="distance statement, lower bounds and union-bound FER")
    _add_profile(p)
    _add_transform(p)
    _add_common(p, "write the FER sweep as CSV")
    p.add_argument("--spectrum", metavar="W:A,...", help="spectrum slice for the union bound")
    p.add_argument("--ebn0-db", metavar="SWEEP", help="Eb/N0 values: 'a,b,c' or 'start:stop:step'")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="cross-check the count against brute force")
    _add_profile(p)
    _add_transform(p)
    _add_common(p)
    p.add_argument("--k-limit", type=int, default=24, help="largest K the brute force accepts")
    p.add_argument("--no-shortcircuit", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive PAC polynomial search")
    _add_profile(p)
    _add_common(p, "write the ranked candidates as CSV")
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--min-degree", type=int, default=0)
    p.add_argument("--top", type=int, default=10, help="rows in the ranked table")
    p.add_argument("--no-early-abort", action="store_true", help="count every candidate in full")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("random-ensemble", help="Awmin statistics over seeded random transforms")
    _add_profile(p)
    _add_common(p, "write per-trial counts as CSV")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="first seed; trial t uses seed + t")
    p.set_defaults(func=cmd_random_ensemble)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        report, lines, files, code = args.func(args)
    except UsageError as e:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {e}\n")
    except FormatError as e:
        parser.exit(EXIT_FILE, f"{parser.prog} {args.command}: error: {e}\n")
    except OSError as e:
        parser.exit(EXIT_FILE, f"{parser.prog} {args.command}: error: {e.filename}: {e.strerror}\n")
    for path, text in files.items():
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
    if args.json is not None:
        Path(args.json).write_text(report.to_json(), encoding="utf-8")
    print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
