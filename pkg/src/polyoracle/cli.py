"""Command line: generate polytopes, dump site sets and run benchmarks.

Exit codes: 0 success, 1 usage error, 2 numerical failure (infeasible,
unbounded, non-interior anchor, ...), 3 input/output error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bench
from .datagen import GenSpec, Variant, gen_polytope
from .errors import FileFormatError, ParameterError, PolyOracleError
from .fileio import read_polytope, write_polytope
from .sites import build_sites

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return val


def _count(text):
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return val


def _eps(text):
    val = float(text)
    if not 0 < val < 1:
        raise argparse.ArgumentTypeError(f"eps must lie in (0, 1), got {text}")
    return val


def _add_lsh(p, multi=False):
    kw = dict(nargs="*", type=_positive_int) if multi else dict(type=_positive_int)
    p.add_argument("--k", **kw, help="hash bits per table (default depends on n)")
    p.add_argument("--l", **kw, help="number of hash tables")
    p.add_argument("--probes", **kw, help="buckets probed per table")


def _add_common(p, anchor="origin"):
    p.add_argument("polytope", type=Path, help="polytope file")
    p.add_argument("--eps", type=_eps, default=0.05, help="approximation parameter (default 0.05)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anchor", choices=("origin", "chebyshev"), default=anchor)
    p.add_argument("--out", type=Path, help="CSV output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyoracle", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write random polytopes P_{d}_{n}_{i}.poly")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--instances", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0, help="instance i uses seed + i")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="paper")
    p.add_argument("--rhs", type=float, default=1000.0)
    p.add_argument("--integer-mod", action="store_true",
                   help="draw integer coefficients randint(0, 32767) %% 1000")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = sub.add_parser("sites", help="dump the anchor and its facet reflections")
    p.add_argument("polytope", type=Path)
    p.add_argument("--anchor", choices=("origin", "chebyshev"), default="origin")
    p.add_argument("--out", type=Path, help="point file (default stdout)")

    p = sub.add_parser("bench-membership", help="membership accuracy and timing")
    _add_common(p)
    _add_lsh(p)
    p.add_argument("--queries", type=_count, default=1000, help="points inside and outside each")
    p.add_argument("--margin", type=float, help="exterior clearance (default 2 eps diam_ub)")
    p.add_argument("--eps-prime", choices=("branch2", "paper"), default="branch2")
    p.add_argument("--no-clearance", action="store_true",
                   help="score every query, not only those off the eps slab")

    p = sub.add_parser("bench-boundary", help="ray shooting accuracy and timing")
    _add_common(p, anchor="chebyshev")
    _add_lsh(p)
    p.add_argument("--rays", type=_count, default=1000)
    p.add_argument("--mode", choices=("approx", "exact"), default="approx")

    p = sub.add_parser("sweep", help="LSH accuracy over a (k, l, probes) grid")
    _add_common(p)
    _add_lsh(p, multi=True)
    p.add_argument("--queries", type=_count, default=1000)
    p.add_argument("--eps-prime", choices=("branch2", "paper"), default="branch2")
    p.add_argument("--no-clearance", action="store_true")
    return parser


def _emit_csv(rows, out: Path | None, meta: dict) -> None:
    if out is None:
        bench.write_csv(rows, sys.stdout, meta)
        return
    with open(out, "w", encoding="ascii", newline="") as fh:
        bench.write_csv(rows, fh, meta)


def _meta(args) -> dict:
    skip = {"func", "verbose", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def cmd_gen(args) -> None:
    variant = Variant(args.variant)
    specs = [GenSpec(args.d, args.n, args.rhs, args.seed + i, variant, args.integer_mod)
             for i in range(args.instances)]
    args.out.mkdir(parents=True, exist_ok=True)

    def one(item):
        i, spec = item
        path = args.out / f"P_{spec.d}_{spec.n}_{i}.poly"
        write_polytope(path, gen_polytope(spec), spec.meta())
        return path

    with ThreadPoolExecutor(max_workers=bench.worker_count()) as pool:
        for path in pool.map(one, enumerate(specs)):
            print(path)


def cmd_sites(args) -> None:
    P = read_polytope(args.polytope)
    S = build_sites(P, bench.choose_anchor(P, args.anchor))
    meta = {"source": args.polytope.name, "anchor": args.anchor, "delta": repr(S.delta)}
    if args.out is not None:
        S.dump(args.out, meta)
        return
    for key, val in meta.items():
        sys.stdout.write(f"# {key}: {val}\n")
    for p in S.points:
        sys.stdout.write(" ".join(repr(float(x)) for x in p) + "\n")


def cmd_bench_membership(args) -> None:
    P = read_polytope(args.polytope)
    rows = bench.bench_membership(
        P, eps=args.eps, k=args.k, l=args.l, probes=args.probes, queries=args.queries,
        seed=args.seed, anchor=args.anchor, clearance=not args.no_clearance,
        margin=args.margin, eps_prime_mode=args.eps_prime, instance=args.polytope.stem)
    _emit_csv(rows, args.out, _meta(args))


def cmd_bench_boundary(args) -> None:
    P = read_polytope(args.polytope)
    rows = bench.bench_boundary(
        P, eps=args.eps, rays=args.rays, seed=args.seed, mode=args.mode, k=args.k,
        l=args.l, probes=args.probes, anchor=args.anchor, instance=args.polytope.stem)
    _emit_csv(rows, args.out, _meta(args))


def cmd_sweep(args) -> None:
    P = read_polytope(args.polytope)
    dk, dl, dp = bench.lsh_defaults(P.n)
    grid = [[dflt] if given is None else given
            for given, dflt in ((args.k, dk), (args.l, dl), (args.probes, dp))]
    if not all(grid):
        raise UsageError("every grid axis needs at least one value")
    rows = bench.sweep(P, ks=grid[0], ls=grid[1], probes_list=grid[2], eps=args.eps,
                       queries=args.queries, seed=args.seed, anchor=args.anchor,
                       clearance=not args.no_clearance, eps_prime_mode=args.eps_prime,
                       instance=args.polytope.stem)
    _emit_csv(rows, args.out, _meta(args))


COMMANDS = {
    "gen": cmd_gen,
    "sites": cmd_sites,
    "bench-membership": cmd_bench_membership,
    "bench-boundary": cmd_bench_boundary,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"polyoracle: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FileFormatError) as exc:
        print(f"polyoracle: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PolyOracleError, ArithmeticError) as exc:
        print(f"polyoracle: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
