"""
Command-line surface: instance generation, Gröbner basis runs, syzygy export,
reduction-count benchmarks and rank-prediction checks.

Exit codes: 0 success, 1 usage or format error, 2 non-generic instance.
"""
import argparse
import json
import sys
from math import comb
from typing import List, Optional, Sequence

import pandas as pd

from ..algebra.gf import PrimeField
from ..benchmarks.table_runner import BenchRunner, filter_grid, parse_grid
from ..determinantal.detsys import DetSystem, generate_generic_system, instance_record, load_instance, save_instance
from ..determinantal.hilbert import expected_gb_maxdeg, hilbert_coeff, rank_oracle
from ..determinantal.syzgen import annihilates, kernel_ranks, syz2_corank_one, syz_corank_one, syz_gen
from ..groebner.f5core import (F5Config, GroebnerBasis, dehomogenize_basis, det_f5, det_f5_corank_one, interreduce,
                               standard_f5)
from ..utils.config import get_settings
from ..utils.errors import DeterminantalF5Error, NonGenericInstanceError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NON_GENERIC = 2


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text if text.endswith("\n") else text + "\n")
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _field(args) -> PrimeField:
    return PrimeField(args.prime or get_settings().prime)


def _seed(args) -> int:
    return get_settings().seed if args.seed is None else args.seed


def _system(args) -> DetSystem:
    """The instance named by --instance, or a fresh generic one from --n/--k/--r/--seed."""
    if getattr(args, "instance", None):
        return load_instance(args.instance)
    if args.n is None:
        raise UsageError("either --instance or --n is required")
    r = args.n - 2 if args.r is None else args.r
    k = args.k + 1 if args.affine else args.k
    return generate_generic_system(args.n, k, r, _field(args), _seed(args), affine=args.affine)


def cmd_gen(args) -> int:
    system = _system(args)
    record = instance_record(system)
    if args.out:
        save_instance(system, args.out)
    else:
        print(json.dumps(record))
    retries = f" after {system.retries} retries" if system.retries else ""
    print(f"generic instance n={system.n} k={system.k} r={system.r} seed={system.M.seed}{retries}",
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _run_gb(system: DetSystem, algo: str, D: Optional[int]):
    n, r = system.n, system.r
    if algo == "det-corank1":
        if r != n - 2:
            raise UsageError(f"det-corank1 needs r = n - 2, got n={n}, r={r}")
        cfg = F5Config(label="det-corank1", seed=system.M.seed)
        return det_f5_corank_one(system.M, D, cfg, system=system)
    if D is None:
        D = expected_gb_maxdeg(n, r)
    if algo == "det":
        return det_f5(system.M, r, D, F5Config(label="det", seed=system.M.seed), system=system)
    return standard_f5(system.gens, D, F5Config(label="std", seed=system.M.seed))


def _basis_lines(G: GroebnerBasis, affine: bool) -> List[str]:
    if affine:
        return [str(f) for f in dehomogenize_basis(interreduce(G))]
    return G.to_lines()


def cmd_gb(args) -> int:
    system = _system(args)
    G, stats = _run_gb(system, args.algo, args.degree_bound)
    if not G.elements:
        logger.warning(f"Empty basis for D={args.degree_bound}")
    affine = system.M.affine
    if args.format == "json":
        payload = {"basis": G.to_dict(), "stats": stats.to_dict()}
        if affine:
            payload["affine_basis"] = _basis_lines(G, True)
        _emit(json.dumps(payload, indent=2), args.out)
    elif args.format == "csv":
        _emit(stats.to_frame().to_csv(index=False), args.out)
    else:
        _emit("\n".join(_basis_lines(G, affine)), args.out)
    if args.trace:
        stats.to_frame().to_json(args.trace, orient="records", lines=True)
    summary = (f"{stats.label}: {len(G)} basis elements, max degree {G.max_degree}, "
               f"{stats.reductions_to_zero} reductions to zero, {stats.field_ops} field operations "
               f"({stats.total_field_ops()} with syzygy stages)")
    print(summary, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_syz(args) -> int:
    system = _system(args)
    if args.second:
        basis = syz2_corank_one(system)
    elif system.r == system.n - 2:
        basis = syz_corank_one(system)
    else:
        basis = syz_gen(system)
    records = [syz.to_dict() for syz in basis]
    if args.format == "csv":
        frame = pd.DataFrame(basis.coefficient_matrix())
        frame.insert(0, "tag", [rec["tag"] for rec in records])
        _emit(frame.to_csv(index=False), args.out)
    elif args.format == "json":
        _emit(json.dumps({"ambient_rank": basis.ambient_rank, "syzygies": records}), args.out)
    else:
        _emit("\n".join(f"{rec['tag']}: {rec['coords']}" for rec in records), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    grid = filter_grid(parse_grid(args.grid, args.table), args.max_n)
    if not grid:
        raise UsageError("empty benchmark grid")
    runner = BenchRunner(prime=args.prime)
    df = runner.collect_and_transform(grid, trials=args.trials, seed=_seed(args))
    if args.out:
        runner.save_to_csv(df, args.out)
    else:
        print(df.to_csv(index=False), end="")
    failures = df[df["error"].notna()]
    for _, row in failures.iterrows():
        logger.error(f"Bench row n={row['n']}, r={row['r']}, k={row['k']} failed: {row['error']}")
    return EXIT_OK


def verify_report(system: DetSystem) -> pd.DataFrame:
    """
    Pass/fail table of the corank-one claims on one instance: syzygy count,
    syzygy validity, Hilbert ranks and the maximal Gröbner basis degree.
    """
    n = system.n
    if system.r != n - 2:
        raise UsageError(f"verify needs r = n - 2, got n={n}, r={system.r}")
    rows = []
    syzygies = syz_corank_one(system)
    rows.append({"check": "syzygy count", "expected": 2 * n * n - 2, "measured": len(syzygies)})
    valid = sum(annihilates(s, system.gens) for s in syzygies)
    rows.append({"check": "syzygies annihilate", "expected": len(syzygies), "measured": valid})
    rank, kernel_dim, joint = kernel_ranks(syzygies, system)
    rows.append({"check": "syzygy rank", "expected": kernel_dim, "measured": rank})
    rows.append({"check": "syzygies span the degree-1 kernel", "expected": kernel_dim, "measured": joint})
    if system.k == 4:
        for d in range(n - 1, 2 * n - 2):
            rows.append({"check": f"rank degree {d}", "expected": hilbert_coeff(n, d),
                         "measured": rank_oracle(system.gens, d)})
    else:
        logger.warning(f"Skipping Hilbert rank checks for k={system.k}")
    D = 2 * n - 3
    try:
        G, stats = det_f5_corank_one(system.M, D, system=system, strict=False)
        max_degree, top_rank = G.max_degree, stats.rank_at(D)
    except DeterminantalF5Error as e:
        logger.warning(f"Gröbner basis run failed during verify: {str(e)}")
        max_degree, top_rank = -1, -1
    rows.append({"check": "max basis degree", "expected": D, "measured": max_degree})
    if system.k == 4:
        rows.append({"check": f"rank degree {D} in the run", "expected": comb(2 * n, 3), "measured": top_rank})
    df = pd.DataFrame(rows)
    df["passed"] = df["expected"] == df["measured"]
    return df


def cmd_verify(args) -> int:
    df = verify_report(_system(args))
    if args.format == "json":
        _emit(df.to_json(orient="records"), args.out)
    elif args.format == "csv":
        _emit(df.to_csv(index=False), args.out)
    else:
        _emit(df.to_string(index=False), args.out)
    return EXIT_OK


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", help="Instance JSON written by gen")
    parser.add_argument("--n", type=int, help="Matrix size")
    parser.add_argument("--k", type=int, default=4, help="Number of variables")
    parser.add_argument("--r", type=int, help="Target rank, default n - 2")
    parser.add_argument("--affine", action="store_true", help="Add a homogenizing variable to the k variables")


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--seed", type=int, help="Master seed")
    common.add_argument("--prime", type=int, help="Field characteristic")

    parser = CliParser(prog="detf5", description="Determinantal Gröbner bases with matrix-F5")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    gen = sub.add_parser("gen", parents=[common], help="Generate a generic instance")
    _add_instance_args(gen)
    gen.add_argument("--out", help="Output JSON path (stdout when omitted)")
    gen.set_defaults(func=cmd_gen)

    gb = sub.add_parser("gb", parents=[common], help="Compute a Gröbner basis")
    _add_instance_args(gb)
    gb.add_argument("--algo", choices=["std", "det", "det-corank1"], default="det-corank1")
    gb.add_argument("--degree-bound", type=int, help="Degree bound D")
    gb.add_argument("--format", choices=["txt", "json", "csv"], default="txt")
    gb.add_argument("--trace", help="Write per-block records as JSON lines to this path")
    gb.add_argument("--out")
    gb.set_defaults(func=cmd_gb)

    syz = sub.add_parser("syz", parents=[common], help="Export the submatrix syzygies")
    _add_instance_args(syz)
    syz.add_argument("--second", action="store_true", help="Second syzygies (corank one)")
    syz.add_argument("--format", choices=["txt", "json", "csv"], default="json")
    syz.add_argument("--out")
    syz.set_defaults(func=cmd_syz)

    bench = sub.add_parser("bench", parents=[common], help="Reproduce reduction-to-zero counts")
    bench.add_argument("--grid", help="Rows as 'n,r,k;n,r,k'")
    bench.add_argument("--table", choices=["corank-one", "higher", "all"], default="corank-one")
    bench.add_argument("--max-n", type=int, help="Drop rows with larger n")
    bench.add_argument("--trials", type=int, default=1)
    bench.add_argument("--format", choices=["csv"], default="csv")
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)

    verify = sub.add_parser("verify", parents=[common], help="Check syzygy and rank predictions on one instance")
    _add_instance_args(verify)
    verify.add_argument("--format", choices=["txt", "json", "csv"], default="txt")
    verify.add_argument("--out")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonGenericInstanceError as e:
        logger.error(f"Non-generic instance: {str(e)}")
        hint = f" from seed {e.seed}; retry with another --seed" if e.seed is not None else ""
        print(f"error: non-generic instance: {e}{hint}", file=sys.stderr)
        return EXIT_NON_GENERIC
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DeterminantalF5Error as e:
        logger.exception(f"Run failed: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
