"""Command-line surface.

Machine-readable-first: JSON Lines by default, CSV opt-in, human tables
on stderr only.  Exit codes: 0 success, 1 usage, 2 precondition,
3 resource cap, 4 table mismatch.  Output is byte-identical for
identical inputs: sorted JSON keys, fixed row ordering, no timestamps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import PolyParseError, PreconditionError, ResourceLimitError
from .fermat import FermatContext, cycles, full_matrix, stable_dim_by_count
from .ff import primes_in_range
from .lengths import (
    bernstein_bound,
    fermat7_lengths,
    weighted_fermat7_lengths,
)
from .poly import parse_poly
from .semilinear import flag_length, matrix_from_json, matrix_to_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3
EXIT_MISMATCH = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class SweepConfig:
    """Prime sweep: range [lo, hi), optional residue filter mod 21, output
    format and path, worker count."""

    lo: int
    hi: int
    residues_mod21: frozenset[int] | None = None
    fmt: str = "json"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.lo >= self.hi:
            raise PreconditionError("sweep range must satisfy lo < hi")
        if self.fmt not in ("json", "csv"):
            raise PreconditionError("format must be json or csv")
        if self.jobs < 1:
            raise PreconditionError("jobs must be >= 1")
        if self.residues_mod21 is not None and not self.residues_mod21 <= set(range(21)):
            raise PreconditionError("mod-21 residues must lie in 0..20")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _flag_dim_cap() -> int | None:
    raw = os.environ.get("FROBLEN_MAX_DIM")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise PreconditionError("FROBLEN_MAX_DIM must be an integer") from None


def _sweep_row(p: int) -> dict:
    report = fermat7_lengths(p)
    match = next(
        rec["match"] for rec in report.evidence if rec["op"] == "piecewise_table_check"
    )
    return {
        "p": p,
        "p_mod_21": p % 21,
        "stable_dim": report.stable_dim,
        "l_F": report.l_F,
        "l_Finf": report.l_Finf,
        "l_D": report.l_D,
        "table_match": bool(match),
    }


_CSV_COLUMNS = ("p", "p_mod_21", "stable_dim", "l_F", "l_Finf", "l_D", "table_match")


def _format_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(_dump(row) + "\n" for row in rows)
    lines = [",".join(_CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in _CSV_COLUMNS:
            v = row[col]
            cells.append("true" if v is True else "false" if v is False else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_stable_dim(args) -> int:
    ctx = FermatContext(args.n, args.d, args.p)
    print(stable_dim_by_count(ctx))
    return EXIT_OK


def cmd_fermat7_sweep(args) -> int:
    residues = None
    if args.mod21:
        residues = frozenset(int(x) for x in args.mod21.split(","))
    config = SweepConfig(
        lo=args.lo,
        hi=args.hi,
        residues_mod21=residues,
        fmt=args.format,
        out=args.out,
        jobs=args.jobs,
    )
    targets = []
    for p in primes_in_range(config.lo, config.hi):
        if p == 7:
            print("note: p=7 divides the defining degree; skipped", file=sys.stderr)
            continue
        if config.residues_mod21 is not None and p % 21 not in config.residues_mod21:
            continue
        targets.append(p)
    if config.jobs > 1 and len(targets) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_sweep_row, targets))
    else:
        rows = [_sweep_row(p) for p in targets]
    rows.sort(key=lambda row: row["p"])
    _emit(_format_rows(rows, config.fmt), config.out)
    mismatches = [row for row in rows if not row["table_match"]]
    if mismatches:
        for row in mismatches:
            print(
                f"mismatch at p={row['p']}: computed "
                f"({row['l_F']}, {row['l_Finf']}, {row['l_D']})",
                file=sys.stderr,
            )
        return EXIT_MISMATCH
    print(f"swept {len(rows)} primes, all rows match", file=sys.stderr)
    return EXIT_OK


def cmd_bound(args) -> int:
    degrees = [int(x) for x in args.degrees.split(",")]
    print(bernstein_bound(args.vars, degrees, args.j))
    return EXIT_OK


def cmd_fedder(args) -> int:
    from .poly import fedder_is_f_pure

    f = parse_poly(args.poly, args.p)
    print("true" if fedder_is_f_pure(f, args.p) else "false")
    return EXIT_OK


def cmd_matrix(args) -> int:
    ctx = FermatContext(args.n, args.d, args.p)
    _emit(_dump(matrix_to_json(full_matrix(ctx))) + "\n", args.out)
    return EXIT_OK


def cmd_cycles(args) -> int:
    from .fermat import orbit_matrix

    ctx = FermatContext(args.n, args.d, args.p)
    data = [
        {
            "members": [str(m) for m in orbit.members],
            "coefficients": [c.value for c in orbit.coefficients],
            "matrix": matrix_to_json(orbit_matrix(orbit, ctx.p)),
        }
        for orbit in cycles(ctx)
    ]
    _emit(_dump(data) + "\n", args.out)
    return EXIT_OK


def cmd_weighted_fermat7(args) -> int:
    report = weighted_fermat7_lengths(args.p, trials=args.trials)
    _emit(report.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_flag(args) -> int:
    if args.matrix == "-":
        raw = sys.stdin.read()
    else:
        with open(args.matrix, "r", encoding="utf-8") as fh:
            raw = fh.read()
    M = matrix_from_json(json.loads(raw))
    print(flag_length(M, max_dim=_flag_dim_cap(), strategy=args.strategy))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="froblen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stable-dim", help="stable-part dimension by solution counting")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=cmd_stable_dim)

    sp = sub.add_parser("fermat7-sweep", help="length table sweep for x^7+y^7+z^7")
    sp.add_argument("--lo", type=int, required=True)
    sp.add_argument("--hi", type=int, required=True)
    sp.add_argument("--mod21", type=str, default=None, help="comma-separated residues")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_fermat7_sweep)

    sp = sub.add_parser("bound", help="multiset degree bound calculator")
    sp.add_argument("--vars", type=int, required=True)
    sp.add_argument("--degrees", type=str, required=True, help="comma-separated")
    sp.add_argument("--j", type=int, required=True)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("fedder", help="F-purity of a hypersurface via Fedder")
    sp.add_argument("--poly", type=str, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=cmd_fedder)

    sp = sub.add_parser("matrix", help="Frobenius matrix of a diagonal hypersurface")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("cycles", help="surviving Frobenius orbits")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_cycles)

    sp = sub.add_parser(
        "weighted-fermat7", help="length report for t*x^7+t*y^7+z^7, p = 7k+4"
    )
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_weighted_fermat7)

    sp = sub.add_parser("flag", help="flag length of a JSON twisted matrix")
    sp.add_argument("--matrix", type=str, required=True, help="path or - for stdin")
    sp.add_argument("--strategy", choices=("auto", "linear", "generic"), default="auto")
    sp.set_defaults(func=cmd_flag)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PolyParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
