"""The golden verification suite: every acceptance check, grouped by criterion."""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath

from .goodness import build_frame, check_goodness, solve_good_basis, _check_homogeneous
from .groups import (PRIMITIVE, catalog_group, group_order_check, load_reductions, reflections,
                     set_catalog_dir)
from .poly import MultiPoly, random_poly
from .potential import associativity_check, catalog_potential, potential_vector_field, unit_property, \
    verify_potential_function
from .reduction import (check_lift, find_reduction, identification_map, lift_constant, make_context,
                        monomial_subquotient, phi_E, reduction_table, sigma_pattern, verify_cataloged_reduction,
                        verify_witness, witness_for)
from .scalar import DEFAULT_DIGITS, DEFAULT_TOL, Cyclotomic, as_cyclotomic, euler_phi

DUALITY = ("G35", "G28", "G25", "G8", "G5", "G9", "G10")
SOLVER_GROUPS = ("G8", "G9", "G10", "G5", "G25")
SMALL_GROUPS = ("G8", "G5", "G9", "G10", "G25", "G28", "G(2,1,2)", "G(3,1,2)", "G(2,1,4)", "G(4,1,2)",
                "G(2,2,3)", "G(3,3,3)", "G(2,2,5)", "mu(12)")


@dataclass
class RunConfig:
    digits: int = DEFAULT_DIGITS
    tol: str | None = None
    cap: int = 5000
    json: bool = False
    catalog: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError("digits must be at least 30")
        if self.tol is None:
            self.tol = DEFAULT_TOL if self.digits >= 50 else f"1e-{self.digits - 10}"
        with mpmath.workdps(self.digits):
            if mpmath.mpf(self.tol) < mpmath.mpf(10) ** (10 - self.digits):
                raise ValueError(f"tolerance {self.tol} is below 1e{10 - self.digits} for {self.digits} digits")


@dataclass
class CheckResult:
    id: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def to_json(self):
        return {"id": self.id, "passed": self.passed, "detail": self.detail, "seconds": round(self.seconds, 3)}


@dataclass
class Summary:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_criterion(self) -> dict:
        out = {}
        for c in self.checks:
            out.setdefault(int(c.id[1:3]), []).append(c)
        return out

    def to_json(self):
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


# -- individual criteria ----------------------------------------------------------
# Each returns a list of (check id, callable -> (passed, detail)).

def _goodness(cfg: RunConfig) -> list:
    def run(name):
        spec = catalog_group(name)
        rep = check_goodness(spec.good_set(), build_frame(spec), digits=cfg.digits, tol=cfg.tol)
        return rep.verdict, f"conditions={len(rep.conditions)} residual={mpmath.nstr(rep.jacobian_residual, 3)}"
    return [(f"c01.goodness.{n}", lambda n=n: run(n)) for n in PRIMITIVE]


def potential_matches(P, expected, tol) -> tuple:
    """Exact equality; numeric fallback on inexact fields."""
    if P.exact:
        return P.components == expected, "exact"
    worst = mpmath.mpf(0)
    for got, want in zip(P.numeric_components, expected):
        for e in set(got.terms) | set(want.terms):
            a = got.terms.get(e, 0)
            b = as_cyclotomic(want.terms.get(e, 0)).embed(mpmath.mp.dps)
            worst = max(worst, abs(a - b))
    return bool(worst <= mpmath.mpf(tol)), f"numeric residual {mpmath.nstr(worst, 3)}"


def _potentials(cfg: RunConfig) -> list:
    def run(name):
        spec = catalog_group(name)
        P = potential_vector_field(spec.good_set(), build_frame(spec), digits=cfg.digits, tol=cfg.tol)
        C, F, pairing = catalog_potential(spec)
        with mpmath.workdps(cfg.digits):
            ok, how = potential_matches(P, C.components, cfg.tol)
        if F is not None:
            ok = ok and verify_potential_function(F, P, pairing)
            how += ", potential function"
        return ok, how
    return [(f"c02.potential.{n}", lambda n=n: run(n)) for n in PRIMITIVE]


def _reduction(entry_id: str, cfg: RunConfig):
    entry = next(e for e in load_reductions() if e["id"] == entry_id)
    rep = verify_cataloged_reduction(entry, digits=cfg.digits, tol=cfg.tol, cap=cfg.cap)
    failed = [k for k, v in rep.checks.items() if not v]
    return rep.passed, "all maps exact" if not failed else f"failed: {failed}"


def _e6_f4(cfg: RunConfig) -> list:
    def table():
        rows = reduction_table(find_reduction("G35", 2, "G28"))
        want = [("x1", "x1"), ("x2", "0"), ("x3", "x2"), ("x4", "x3"), ("x5", "0"), ("x6", "x4")]
        return rows == want, str(rows)
    return [("c03.reduction.G35-G28", lambda: _reduction("G35-G28", cfg)), ("c03.table.G35-G28", table)]


def _other_reductions(cfg: RunConfig) -> list:
    ids = ["G35-G25", "G28-G5", "G28-G8", "G25-G5", "G31-G9", "G31-G10"]
    return [(f"c04.reduction.{i}", lambda i=i: _reduction(i, cfg)) for i in ids]


def witness_check(entry: dict, cfg: RunConfig, swap: bool = False):
    parent = catalog_group(entry["parent"])
    child = catalog_group(entry["child"])
    ctx = make_context(build_frame(parent), int(entry["delta"]))
    ident = identification_map(ctx, build_frame(child), entry["basis_map"])
    return verify_witness(ctx, witness_for(entry, ctx, ident, swap=swap), child.expected_order(), cfg.cap)


def _witnesses(cfg: RunConfig) -> list:
    def run(entry):
        res = witness_check(entry, cfg)
        swapped = witness_check(entry, cfg, swap=True)
        return res.passed and not swapped.passed, f"pairs={len(res.matches)} order={res.generated_order}"
    return [(f"c05.witness.{e['id']}", lambda e=e: run(e)) for e in load_reductions()
            if not e["parent"].startswith("G(")]


def _monomial(cfg: RunConfig) -> list:
    def sub(m, n):
        rep = monomial_subquotient(m, n, digits=cfg.digits, tol=cfg.tol)
        return rep.passed, str(rep.checks)

    def g214():
        entry = find_reduction("G(2,1,4)", 4, "G(4,1,2)")
        rep = verify_cataloged_reduction(entry, digits=cfg.digits, tol=cfg.tol, cap=cfg.cap)
        pattern = [(a, b) for a, b, _ in sigma_pattern(entry)]
        ok = rep.passed and pattern == [(1, 1), (2, 0), (3, 2), (4, 0)]
        return ok, f"sigma pattern {pattern}"
    out = [(f"c06.subquotient.G({m},{m},{n + 1})", lambda m=m, n=n: sub(m, n)) for m, n in ((2, 2), (3, 2), (2, 4))]
    out.append(("c06.reduction.G(2,1,4)-G(4,1,2)", g214))
    return out


def _lift(cfg: RunConfig) -> list:
    def stated():
        rep = check_lift(2, 2, "stated", digits=cfg.digits, tol=cfg.tol)
        ok = rep.good and lift_constant(2, 2, "stated") == 2 * Cyclotomic(4, [0, 1])
        return ok, f"good={rep.good} compatible={rep.compatible}"

    def compatible():
        rep = check_lift(2, 2, "compatible", digits=cfg.digits, tol=cfg.tol)
        return rep.verdict, f"good={rep.good} compatible={rep.compatible}"
    return [("c07.lift.G(2,2,3).stated", stated), ("c07.lift.G(2,2,3).compatible", compatible)]


def _solver(cfg: RunConfig) -> list:
    def run(name):
        spec = catalog_group(name)
        frame = build_frame(spec)
        target = spec.good_set().polys()
        plain = solve_good_basis(spec, frame, digits=cfg.digits, tol=cfg.tol)
        mixed = solve_good_basis(spec, frame, spec.mixed_sigma_set(), digits=cfg.digits, tol=cfg.tol)
        ok = plain.exact and mixed.exact and plain.invariants.polys() == target \
            and mixed.invariants.polys() == target
        return ok, "classical and mixed bases agree with the catalog"
    return [(f"c08.solver.{n}", lambda n=n: run(n)) for n in SOLVER_GROUPS]


def _associativity(cfg: RunConfig) -> list:
    def run(name):
        spec = catalog_group(name)
        P, _, _ = catalog_potential(spec)
        res = associativity_check(P)
        if name == "G31":
            return (not res.associative and res.counterexample is not None,
                    f"counterexample {tuple(k + 1 for k in res.counterexample)}" if res.counterexample else "none")
        return res.associative and unit_property(P), "associative"
    return [(f"c09.associativity.{n}", lambda n=n: run(n)) for n in DUALITY + ("G31",)]


def _properties(cfg: RunConfig) -> list:
    def scalar_axioms():
        rng = random.Random(cfg.seed)
        for _ in range(50):
            n = rng.choice([3, 4, 8, 12, 24])
            a, b, c = (Cyclotomic(n, [rng.randint(-9, 9) for _ in range(euler_phi(n))])
                       for _ in range(3))
            if (a + b) * c != a * c + b * c or a * (b * c) != (a * b) * c or a + b != b + a:
                return False, "ring axiom violated"
            if a and a * a.inverse() != 1:
                return False, "inverse failed"
        return True, "50 random triples"

    def eigen_laws():
        bad = []
        for name in PRIMITIVE + SMALL_GROUPS:
            spec = catalog_group(name)
            try:
                build_frame(spec, check_regular=False).check()
            except ValueError:
                bad.append(name)
        return not bad, f"failed: {bad}" if bad else "all frames"

    def homogeneity():
        for name in PRIMITIVE:
            spec = catalog_group(name)
            _check_homogeneous(spec.good_set(), spec.degrees, seed=cfg.seed)
            _check_homogeneous(spec.sigma_set(), spec.degrees, seed=cfg.seed)
            P, _, _ = catalog_potential(spec)
            if not P.is_weighted_homogeneous():
                return False, f"{name} potential"
        return True, "good sets, classical sets, potentials"

    def reflection_counts():
        got = {name: len(reflections(catalog_group(name), cfg.cap).lines()) for name in ("G35", "G31")}
        return got == {"G35": 36, "G31": 60}, str(got)

    def orders():
        got = {name: group_order_check(catalog_group(name), cfg.cap) for name in SMALL_GROUPS}
        return all(v is not None for v in got.values()), str(got)

    def phi_homomorphism():
        rng = random.Random(cfg.seed)
        spec = catalog_group("G35")
        ctx = make_context(build_frame(spec, check_regular=False), 2)
        n, m = spec.rank, len(ctx.i_set)
        for _ in range(20):
            p = random_poly(rng, n, 4, 3)
            q = random_poly(rng, n, 4, 3)
            if phi_E(p + q, ctx) != phi_E(p, ctx) + phi_E(q, ctx) or phi_E(p * q, ctx) != phi_E(p, ctx) * phi_E(q, ctx):
                return False, "homomorphism property fails"
            at_q = [1 if k == 0 else 0 for k in range(n)]
            at_qE = [1 if k == 0 else 0 for k in range(m)]
            if as_cyclotomic(p.substitute(at_q)) != as_cyclotomic(phi_E(p, ctx).substitute(at_qE)):
                return False, "evaluation at q does not commute"
        if phi_E(MultiPoly.constant(1, n), ctx) != MultiPoly.constant(1, m):
            return False, "unit not preserved"
        return True, "20 random pairs"

    return [("c10.scalar-axioms", scalar_axioms), ("c10.eigen-laws", eigen_laws),
            ("c10.homogeneity", homogeneity), ("c10.reflection-counts", reflection_counts),
            ("c10.group-orders", orders), ("c10.phi-E", phi_homomorphism)]


CRITERIA = {
    1: ("goodness of the primitive catalogs", _goodness),
    2: ("potential vector fields", _potentials),
    3: ("E6 to F4 reduction", _e6_f4),
    4: ("cataloged reductions", _other_reductions),
    5: ("generator witnesses", _witnesses),
    6: ("monomial family reductions", _monomial),
    7: ("lift to G(m,m,n+1)", _lift),
    8: ("solver independence", _solver),
    9: ("associativity", _associativity),
    10: ("property suites", _properties),
}


def _run_one(check_id: str, fn) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a failing check must not stop the suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(check_id, bool(ok), detail, time.perf_counter() - start)


def collect(cfg: RunConfig, criteria=None) -> list:
    keys = sorted(CRITERIA) if criteria is None else sorted(criteria)
    checks = []
    for k in keys:
        checks.extend(CRITERIA[k][1](cfg))
    return checks


def golden_suite(cfg: RunConfig | None = None, criteria=None, workers: int = 1) -> Summary:
    """Run the checks; results are sorted by check id regardless of scheduling."""
    cfg = cfg or RunConfig()
    set_catalog_dir(cfg.catalog)
    try:
        with mpmath.workdps(cfg.digits):
            checks = collect(cfg, criteria)
            if workers > 1:
                with ThreadPoolExecutor(workers) as pool:
                    results = list(pool.map(lambda c: _run_one(*c), checks))
            else:
                results = [_run_one(*c) for c in checks]
    finally:
        set_catalog_dir(None)
    return Summary(sorted(results, key=lambda r: r.id))
