"""Command-line entry point: ``dnftaut <command> ...`` or ``python -m dnftaut``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .bounds import density_bound
from .dnf import parse_dnf, verify
from .encoder import EncodeOptions, build_instance
from .groups import GroupKind, GroupSpec
from .oracle import exists_bruteforce
from .search import TIERS, Budget, ResultStore, cached_max_k, exact_k, reproduce_table
from .solver import DEFAULT_TIME_LIMIT
from .tables import GRIDS

GROUP_CHOICES = [k.value for k in GroupKind]


def _add_group(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", choices=GROUP_CHOICES, default="none",
                   help="require invariance under this permutation group")


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--timeout", type=float, default=DEFAULT_TIME_LIMIT,
                   help="seconds per (n, u, k) instance (default %(default)s)")
    p.add_argument("--no-timeout", action="store_true", help="run without a time limit")
    p.add_argument("--solver", metavar="CMD",
                   help="external DIMACS solver command; {cnf} is replaced by the file path")
    p.add_argument("--no-symmetry-breaking", action="store_true")
    p.add_argument("--forbid-subsumed", action="store_true",
                   help="exclude DNFs where one cube contains another")


def _budget(args) -> Budget:
    return Budget(None if args.no_timeout else args.timeout, solver_command=args.solver)


def _options(args) -> EncodeOptions:
    return EncodeOptions(symmetry_breaking=not args.no_symmetry_breaking,
                         forbid_subsumed=args.forbid_subsumed)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bound(args) -> int:
    res = density_bound(args.n, args.u)
    if args.csv:
        _emit(res.to_csv(), args.csv)
    print(f"n={args.n} u={args.u}: density bound k <= {res.k_max_bound}")
    return 0


def cmd_search(args) -> int:
    group = GroupSpec.parse(args.group, args.n)
    store = ResultStore(args.store) if args.store else None
    res, reused = cached_max_k(args.n, args.u, group, _budget(args), _options(args), store, args.force)
    for k in sorted(res.statuses, reverse=True):
        print(f"k={k}: {res.statuses[k]} ({res.runtimes[k]:.2f}s)")
    found = "undetermined" if res.k_found is None else res.k_found
    print(f"n={res.n} u={res.u} group={res.group}: k={found} bound={res.k_density_bound}"
          f" matched_bound={res.matched_bound} proven_optimal={res.proven_optimal}"
          + (" (stored result)" if reused else ""))
    if res.witness is not None:
        print(f"witness ({len(res.witness)} cubes):")
        print(res.witness)
    if args.csv:
        _emit("n,u,group,k_found,k_density_bound,proven_optimal\n"
              f"{res.n},{res.u},{res.group},{'' if res.k_found is None else res.k_found},"
              f"{res.k_density_bound},{int(res.proven_optimal)}\n", args.csv)
    return 0 if res.k_found is not None else 2


def cmd_exact(args) -> int:
    res = exact_k(args.n, args.k, GroupSpec.parse(args.group, args.n), _budget(args), _options(args))
    print(f"n={args.n} k={args.k}: {res.status.value} ({res.runtime:.2f}s)")
    if res.witness is not None:
        print(res.witness)
    return 0


def cmd_table(args) -> int:
    store = ResultStore(args.store) if args.store else None

    def progress(r):
        if args.verbose:
            print(f"  {r.group} n={r.n} u={r.u}: k={r.k_found} {r.statuses}", file=sys.stderr)

    rep = reproduce_table(args.which, args.n_max, args.u_max, _budget(args), args.tier, args.workers,
                          store, args.force, _options(args), progress)
    print(rep.render())
    print()
    print(rep.diff_report())
    if args.csv:
        _emit(rep.to_csv(), args.csv)
    return 1 if rep.disagreements() or rep.group_mismatches() else 0


def cmd_verify(args) -> int:
    with open(args.dnf) as fh:
        d = parse_dnf(fh.read())
    group = GroupSpec.parse(args.group, d.n)
    report = verify(d, args.k, args.u, None if group.is_trivial else group)
    print(json.dumps({"ok": report.ok, "failures": report.failures(), "n": d.n, "cubes": len(d)}))
    return 0 if report.ok else 1


def cmd_encode(args) -> int:
    group = GroupSpec.parse(args.group, args.n)
    f, vm = build_instance(args.n, args.u, args.k, group, _options(args).for_group(group))
    _emit(f.to_dimacs(), args.output)
    if args.output:
        print(f"wrote {args.output}: {f.num_vars} variables ({vm.num_cube_vars} cubes), {len(f.clauses)} clauses")
    return 0


def cmd_oracle(args) -> int:
    res = exists_bruteforce(args.n, args.u, args.k, GroupSpec.parse(args.group, args.n),
                            best_effort=args.best_effort)
    print(json.dumps(res.to_json()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnftaut", description="Search for distinct DNF tautologies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="density bound on k for (n, u)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--csv", metavar="FILE")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("search", help="largest k for (n, u, group)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    _add_group(p)
    _add_budget(p)
    p.add_argument("--store", metavar="FILE", help="JSON-lines result store")
    p.add_argument("--force", action="store_true", help="ignore stored results")
    p.add_argument("--csv", metavar="FILE")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("exact", help="cubes of length exactly k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_group(p)
    _add_budget(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("table", help="regenerate a reference grid and diff it")
    p.add_argument("--which", choices=sorted(GRIDS), required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--u-max", type=int)
    p.add_argument("--tier", choices=sorted(TIERS), default="default")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--store", metavar="FILE")
    p.add_argument("--force", action="store_true")
    p.add_argument("--csv", metavar="FILE")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_budget(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="check a DNF file")
    p.add_argument("--dnf", required=True, metavar="FILE")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    _add_group(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", help="write the CNF instance in DIMACS format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_group(p)
    p.add_argument("--no-symmetry-breaking", action="store_true")
    p.add_argument("--forbid-subsumed", action="store_true")
    p.add_argument("-o", "--output", metavar="FILE.cnf")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("oracle", help="brute-force existence check (n <= 3)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_group(p)
    p.add_argument("--best-effort", action="store_true", help="allow n > 3")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
