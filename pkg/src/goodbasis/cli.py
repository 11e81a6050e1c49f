"""Command-line interface.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import mpmath

from .golden import CRITERIA, RunConfig, golden_suite
from .goodness import build_frame, check_goodness, solve_good_basis
from .groups import CatalogError, catalog_group, catalog_names, load_reductions, set_catalog_dir
from .potential import associativity_check, catalog_potential, potential_vector_field
from .reduction import (check_lift, divisors, find_reduction, good_invariants, lift_constant,
                        make_context, reduce_good_basis, reduction_sequence, reduction_table,
                        verify_cataloged_reduction)

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--digits", type=int, default=default if suppress else 60, help="working precision")
    parser.add_argument("--tol", default=default, help="numeric tolerance (default 1e-40, looser below 50 digits)")
    parser.add_argument("--cap", type=int, default=default if suppress else 5000, help="closure size cap")
    parser.add_argument("--json", action="store_true", default=default if suppress else False,
                        help="emit JSON reports")
    parser.add_argument("--seed", type=int, default=default if suppress else 0, help="seed for randomized checks")
    parser.add_argument("--catalog", default=default, help="catalog directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="goodbasis", description="Good basic invariants of reflection groups.")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p, suppress=True)
        return p

    p = add("catalog", "catalog operations")
    p.add_argument("action", choices=["list"])
    p = add("verify-good", "check the cataloged good invariants")
    p.add_argument("group")
    p = add("solve-good", "solve for good invariants")
    p.add_argument("group")
    p.add_argument("--from-sigma", nargs="?", const="classical", default="classical",
                   choices=["classical", "mixed"], help="starting basic invariants")
    p = add("potential", "potential vector field")
    p.add_argument("group")
    p.add_argument("--check-assoc", action="store_true")
    p = add("reduce", "reduce to a regular eigenspace")
    p.add_argument("group")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--target")
    p = add("sequence", "reduction sequence over all divisors of d1")
    p.add_argument("group")
    p = add("lift", "lift G(m,1,n) good invariants to G(m,m,n+1)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=["stated", "compatible"], default="stated")
    p = add("golden", "run the full verification suite")
    p.add_argument("--criteria", type=int, nargs="*", choices=sorted(CRITERIA))
    p.add_argument("--workers", type=int, default=1)
    return parser


def _config(args) -> RunConfig:
    try:
        return RunConfig(digits=args.digits, tol=args.tol, cap=args.cap, json=args.json,
                         catalog=args.catalog, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(cfg: RunConfig, data, text_lines) -> None:
    if cfg.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _group(name: str):
    try:
        return catalog_group(name)
    except (CatalogError, FileNotFoundError) as exc:
        raise UsageError(f"unknown group {name!r}") from exc


# -- subcommands ---------------------------------------------------------------
def cmd_catalog(args, cfg) -> int:
    rows = []
    for name in catalog_names():
        spec = _group(name)
        rows.append({"name": name, "rank": spec.rank, "degrees": list(spec.degrees), "duality": spec.duality})
    reds = [{"id": e["id"], "parent": e["parent"], "child": e["child"], "delta": e["delta"]} for e in load_reductions()]
    lines = [f"{r['name']:>5}  rank {r['rank']}  degrees {r['degrees']}"
             + ("" if r["duality"] else "  (not a duality group)") for r in rows]
    lines += [f"reduction {r['id']}: delta={r['delta']}" for r in reds]
    _emit(cfg, {"groups": rows, "reductions": reds}, lines)
    return OK


def _fmt_poly(p) -> str:
    return str(p) if p else "0"


def cmd_verify_good(args, cfg) -> int:
    spec = _group(args.group)
    rep = check_goodness(good_invariants(spec.name), build_frame(spec), digits=cfg.digits, tol=cfg.tol)
    lines = [f"{spec.name}: good={rep.good} compatible={rep.compatible} "
             f"conditions={len(rep.conditions)} jacobian residual={mpmath.nstr(rep.jacobian_residual, 3)}"]
    lines += [f"  nonzero condition x{c.alpha + 1} {c.multi_index}: {c.value}" for c in rep.failures()]
    _emit(cfg, rep.to_json(), lines)
    return OK if rep.verdict else FAILED


def cmd_solve_good(args, cfg) -> int:
    spec = _group(args.group)
    sigma = spec.mixed_sigma_set() if args.from_sigma == "mixed" else spec.sigma_set()
    if args.from_sigma == "mixed" and not spec.mixed_sigma:
        raise UsageError(f"{spec.name} has no cataloged alternative basis")
    res = solve_good_basis(spec, build_frame(spec), sigma, digits=cfg.digits, tol=cfg.tol)
    matches = None
    if spec.good and res.exact:
        matches = res.invariants.polys() == spec.good_set().polys()
    coeffs = [{str(list(b)): str(c) for b, c in cmap.items()} for cmap in res.invariants.coeffs]
    lines = [f"{spec.name}: solved from the {args.from_sigma} basis, exact={res.exact}"]
    for k, cmap in enumerate(coeffs):
        terms = " + ".join(f"({c})*sigma^{b}" for b, c in cmap.items())
        lines.append(f"  x{k + 1} = {terms}")
    if matches is not None:
        lines.append(f"  agrees with catalog: {matches}")
    _emit(cfg, {"group": spec.name, "exact": res.exact, "coefficients": coeffs, "matches_catalog": matches}, lines)
    return OK if res.exact and matches is not False else FAILED


def cmd_potential(args, cfg) -> int:
    spec = _group(args.group)
    P = potential_vector_field(good_invariants(spec.name), build_frame(spec), digits=cfg.digits, tol=cfg.tol)
    data = P.to_json()
    lines = []
    if not spec.duality:
        print(f"warning: {spec.name} is not a duality group", file=sys.stderr)
    for k, comp in enumerate(P.components):
        lines.append(f"G{k + 1} = {_fmt_poly(comp)}")
    status = OK if P.exact else FAILED
    if spec.potential:
        same = P.components == catalog_potential(spec)[0].components
        data["matches_catalog"] = same
        lines.append(f"agrees with catalog: {same}")
        status = status if same else FAILED
    if args.check_assoc:
        res = associativity_check(P)
        data.update(res.to_json())
        if res.associative:
            lines.append("associative: True")
        else:
            lines.append(f"associative: False, counterexample {tuple(k + 1 for k in res.counterexample)}")
        if spec.duality and not res.associative:
            status = FAILED
    _emit(cfg, data, lines)
    return status


def cmd_reduce(args, cfg) -> int:
    spec = _group(args.group)
    if args.target:
        _group(args.target)
    d1 = spec.degrees[0]
    if args.delta < 1 or d1 % args.delta:
        raise UsageError(f"{args.delta} does not divide {d1}")
    entry = find_reduction(spec.name, args.delta, args.target)
    if entry is not None:
        rep = verify_cataloged_reduction(entry, digits=cfg.digits, tol=cfg.tol, cap=cfg.cap)
        rows = reduction_table(entry)
        lines = [f"{spec.name} -> {entry['child']} (delta={args.delta})"]
        lines += [f"  {a} -> {b}" for a, b in rows]
        lines += [f"  check {k}: {'pass' if v else 'FAIL'}" for k, v in rep.checks.items()]
        data = rep.to_json()
        data["table"] = rows
        _emit(cfg, data, lines)
        return OK if rep.passed else FAILED
    if args.target:
        raise UsageError(f"no cataloged reduction {spec.name} -> {args.target} with delta={args.delta}")
    ctx = make_context(build_frame(spec), args.delta)
    reduced = reduce_good_basis(good_invariants(spec.name), ctx, verify=False)
    rep = check_goodness(reduced, ctx.child, digits=cfg.digits, tol=cfg.tol, validate=False)
    step = next(s for s in reduction_sequence(spec) if s.delta == args.delta) if args.delta > 1 else None
    lines = [f"{spec.name} delta={args.delta}: surviving indices {[a + 1 for a in ctx.i_set]}, "
             f"degrees {list(ctx.child_degrees)}",
             f"  restricted invariants good={rep.good} compatible={rep.compatible}"]
    lines += [f"  x{c + 1} -> 0" for c in ctx.ic_set]
    if step:
        lines.append(f"  candidates {step.candidates} ({step.status})")
    data = {"group": spec.name, "delta": args.delta, "i_set": [a + 1 for a in ctx.i_set],
            "degrees": list(ctx.child_degrees), "goodness": rep.to_json(),
            "candidates": step.candidates if step else [spec.name]}
    _emit(cfg, data, lines)
    return OK if rep.verdict else FAILED


def cmd_sequence(args, cfg) -> int:
    spec = _group(args.group)
    steps = reduction_sequence(spec)
    lines = [f"{spec.name} degrees {list(spec.degrees)}; divisors of d1: {divisors(spec.degrees[0])}"]
    for s in steps:
        line = f"  delta={s.delta:>2} degrees {list(s.degrees)} -> {', '.join(s.candidates) or 'none'} [{s.status}]"
        lines.append(line)
        lines += [f"      via {' -> '.join(p)}" for p in s.paths]
    _emit(cfg, {"group": spec.name, "steps": [s.to_json() for s in steps]}, lines)
    return OK


def cmd_lift(args, cfg) -> int:
    if args.m < 2 or args.n < 1:
        raise UsageError("need m >= 2 and n >= 1")
    c = lift_constant(args.m, args.n, args.variant)
    rep = check_lift(args.m, args.n, args.variant, digits=cfg.digits, tol=cfg.tol)
    lines = [f"G({args.m},1,{args.n}) -> G({args.m},{args.m},{args.n + 1}): x{args.n + 1} = ({c}) * sigma{args.n + 1}",
             f"  good={rep.good} compatible={rep.compatible}"]
    data = {"constant": c.to_json(), "variant": args.variant, "goodness": rep.to_json()}
    _emit(cfg, data, lines)
    passed = rep.good if args.variant == "stated" else rep.verdict
    return OK if passed else FAILED


def cmd_golden(args, cfg) -> int:
    summary = golden_suite(cfg, args.criteria, workers=max(1, args.workers))
    lines = [f"{'pass' if c.passed else 'FAIL'}  {c.id:<40} {c.seconds:7.2f}s  {c.detail}" for c in summary.checks]
    failed = sum(not c.passed for c in summary.checks)
    lines.append(f"{len(summary.checks) - failed}/{len(summary.checks)} checks passed")
    _emit(cfg, summary.to_json(), lines)
    return OK if summary.passed else FAILED


COMMANDS = {"catalog": cmd_catalog, "verify-good": cmd_verify_good, "solve-good": cmd_solve_good,
            "potential": cmd_potential, "reduce": cmd_reduce, "sequence": cmd_sequence, "lift": cmd_lift,
            "golden": cmd_golden}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        cfg = _config(args)
        if args.command != "golden":
            set_catalog_dir(cfg.catalog)
        with mpmath.workdps(cfg.digits):
            return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return FAILED
    finally:
        set_catalog_dir(None)


if __name__ == "__main__":
    sys.exit(main())
