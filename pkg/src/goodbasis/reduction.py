"""Reduction of good invariants and potentials to regular eigenspaces.

For a divisor delta of d_1 the eigenspace E of g^(d_1/delta) is spanned by the frame
vectors whose degree is divisible by delta.  Restricting to E keeps the frame intact,
so good invariants restrict to good invariants of the subquotient and the potential
vector field restricts with them.  Comparing with a cataloged child group needs an
explicit linear identification of E with the child's space; it is built from the
two frames and a table of unit scale factors, then checked against group elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm

import mpmath

from .expr import Expr
from .goodness import (AdmissibleFrame, GoodnessReport, build_frame, check_goodness,
                       solve_good_basis, _sqrt_numeric)
from .groups import (PRIMITIVE, GroupSpec, InvariantSet, as_invariant_set,
                     catalog_dir, catalog_group, generated_order, i_set, load_reductions)
from .linalg import CycMatrix, eigenspace, in_span, unit_vector
from .poly import MultiPoly
from .potential import catalog_potential, potential_vector_field
from .scalar import DEFAULT_DIGITS, DEFAULT_TOL, Cyclotomic, as_cyclotomic, recognize, root_of_unity, sqrt_rational


class ReductionError(ValueError):
    pass


def divisors(n: int) -> list:
    return [k for k in range(1, n + 1) if n % k == 0]


# -- contexts ------------------------------------------------------------------
@dataclass
class ReductionContext:
    """E with its graded coordinates: w_k is the coefficient of parent basis vector i_set[k]."""

    parent: AdmissibleFrame
    delta: int
    i_set: list
    ic_set: list
    child: AdmissibleFrame

    @property
    def E_basis(self) -> list:
        return [self.parent.basis[a] for a in self.i_set]

    @property
    def embedding(self) -> CycMatrix:
        """u = embedding @ w."""
        return CycMatrix.from_columns(self.E_basis)

    @property
    def child_degrees(self) -> tuple:
        return self.child.degrees


def make_context(frame: AdmissibleFrame, delta: int, i_override=None) -> ReductionContext:
    """Context for the delta-reduction; ``i_override`` (0-based) replaces the divisibility rule."""
    degs = frame.degrees
    d1 = degs[0]
    if delta < 1 or d1 % delta:
        raise ReductionError(f"{delta} does not divide {d1}")
    if i_override is None:
        keep = i_set(degs, delta)
        k = d1 // delta
        dim = len(eigenspace(frame.g ** k, frame.zeta ** k))
        if dim != len(keep):
            raise ReductionError(f"eigenspace has dimension {dim}, expected {len(keep)}")
    else:
        keep = sorted(i_override)
        if 0 not in keep:
            raise ReductionError("the index set must contain the first degree")
    rest = [a for a in range(frame.rank) if a not in keep]
    m = len(keep)
    child = AdmissibleFrame(None, CycMatrix.diagonal([frame.eigenvalue(a) for a in keep]), frame.zeta,
                            tuple(degs[a] for a in keep), [unit_vector(m, k) for k in range(m)],
                            [frame.norms[a] for a in keep])
    return ReductionContext(frame, delta, keep, rest, child)


# -- restriction maps --------------------------------------------------------------
def phi_E(p: MultiPoly, ctx: ReductionContext) -> MultiPoly:
    """Set the graded coordinates outside the index set to zero and reindex onto E."""
    return restrict_variables(p, ctx.i_set)


def restrict_variables(p: MultiPoly, keep) -> MultiPoly:
    keep = list(keep)
    drop = [k for k in range(p.nvars) if k not in keep]
    terms = {}
    for e, c in p.terms.items():
        if all(e[k] == 0 for k in drop):
            terms[tuple(e[k] for k in keep)] = c
    return MultiPoly(len(keep), terms)


def pullback(x, M: CycMatrix) -> list:
    """Polynomials x(M w) in the variables w (M is rows = nvars of x, cols = len(w))."""
    xs = as_invariant_set(x)
    if M.rows != xs.nvars:
        raise ValueError("matrix rows must equal the number of variables")
    forms = [MultiPoly.linear_form(list(M.row(i))) for i in range(M.rows)]
    out = []
    for v in xs.evaluate(forms):
        if not isinstance(v, MultiPoly):
            v = MultiPoly.constant(v, M.cols) if v else MultiPoly(M.cols)
        out.append(v)
    return out


def reduce_good_basis(x, ctx: ReductionContext, verify: bool = True, digits: int = DEFAULT_DIGITS,
                      tol=DEFAULT_TOL) -> list:
    """Restrictions of x_alpha to E for alpha in the index set, in E's graded coordinates."""
    restricted = pullback(x, ctx.embedding)
    for c in ctx.ic_set:
        if restricted[c]:
            raise ReductionError(f"x{c + 1} does not vanish on E")
    reduced = [restricted[a] for a in ctx.i_set]
    if verify:
        report = check_goodness(reduced, ctx.child, digits=digits, tol=tol, validate=False)
        if not report.verdict:
            raise ReductionError("restricted invariants are not good and compatible on E")
    return reduced


def reduce_potential(G, ctx: ReductionContext) -> list:
    """Potential components for the index set with x_c = 0 for c outside it, reindexed."""
    comps = list(G.components) if hasattr(G, "components") else list(G)
    for c in ctx.ic_set:
        if restrict_variables(comps[c], ctx.i_set):
            raise ReductionError(f"potential component {c + 1} does not vanish on E")
    return [restrict_variables(comps[a], ctx.i_set) for a in ctx.i_set]


# -- identification with a cataloged child ----------------------------------------
@dataclass
class Identification:
    """Linear map from the child's space onto E.

    With rho_k = sqrt(h_alpha / h'_beta) the map sending q'_beta to q_alpha / (a_alpha rho_k) pairs
    unit vectors as q_alpha = a_alpha * map(q'_beta).  Only rho_k / rho_1 needs to be cyclotomic, so
    ``matrix`` stores rho_1 times that map and ``scale_sq`` stores rho_1^2.
    """

    pairs: list      # (alpha, beta), 0-based, sorted by beta
    factors: list    # a_alpha in child order
    scale_sq: Cyclotomic
    matrix: CycMatrix

    def degree_scale(self, d: int) -> Cyclotomic:
        """rho_1^d, exact for even d or when rho_1 itself is cyclotomic."""
        if d % 2 == 0:
            return self.scale_sq ** (d // 2)
        return _certified_sqrt(self.scale_sq) ** d


def _certified_sqrt(c: Cyclotomic, digits: int = DEFAULT_DIGITS, tol=DEFAULT_TOL) -> Cyclotomic:
    if c.is_rational() and c.to_fraction() > 0:
        return sqrt_rational(c.to_fraction())
    with mpmath.workdps(digits):
        value = recognize(_sqrt_numeric(c, digits), digits=digits, tol=tol)
    if value is None or value * value != c:
        raise ReductionError(f"{c} has no recognizable square root")
    return value


def identification_map(ctx: ReductionContext, child_frame: AdmissibleFrame, basis_map) -> Identification:
    """``basis_map`` holds (alpha, beta, a) with 1-based indices and a unit-modulus scalar a."""
    entries = sorted(((int(al) - 1, int(be) - 1, _scalar(a)) for al, be, a in basis_map), key=lambda t: t[1])
    if sorted(al for al, _, _ in entries) != ctx.i_set:
        raise ReductionError("basis map does not cover the index set")
    if [be for _, be, _ in entries] != list(range(child_frame.rank)):
        raise ReductionError("basis map does not cover the child frame")
    P = ctx.parent
    ratios = [P.norms[al] / child_frame.norms[be] for al, be, _ in entries]
    cols = []
    for (al, _, a), r in zip(entries, ratios):
        rel = _certified_sqrt(r / ratios[0])
        cols.append(P.basis[al] * (a * rel).inverse())
    B = CycMatrix.from_columns(cols) @ child_frame.coord_change.inverse()
    return Identification([(al, be) for al, be, _ in entries], [a for _, _, a in entries], ratios[0], B)


def _scalar(text) -> Cyclotomic:
    return as_cyclotomic(Expr(str(text)).eval({}))


def invariant_factor(factors, degrees, d1: int | None = None) -> list:
    """x'_beta = a_1^(1-d) a^(-1) x: factors for each (a, d) in child order."""
    a1 = factors[0]
    return [a1 ** (1 - d) * a ** -1 for a, d in zip(factors, degrees)]


def potential_factor(factors, degrees, d1: int) -> list:
    a1 = factors[0]
    return [a1 ** (d1 + d - 1) * a for a, d in zip(factors, degrees)]


# -- witnesses ---------------------------------------------------------------------
@dataclass
class SubquotientWitness:
    parent_elements: list
    child_elements: list
    identification: Identification
    labels: list = field(default_factory=list)


@dataclass
class WitnessResult:
    preserved: list
    matches: list
    generated_order: int | None
    expected_order: int | None

    @property
    def passed(self) -> bool:
        order_ok = self.expected_order is None or self.generated_order in (None, self.expected_order)
        return all(self.preserved) and all(self.matches) and order_ok

    def to_json(self):
        return {"preserved": self.preserved, "matches": self.matches, "generated_order": self.generated_order,
                "expected_order": self.expected_order, "passed": self.passed}


def verify_witness(ctx: ReductionContext, w: SubquotientWitness, expected_order: int | None = None,
                   cap: int = 5000) -> WitnessResult:
    """Each parent element preserves E and acts on it as the paired child element."""
    B = w.identification.matrix
    preserved, matches = [], []
    for P, C in zip(w.parent_elements, w.child_elements):
        preserved.append(all(in_span(ctx.E_basis, P @ v) for v in ctx.E_basis))
        matches.append(P @ B == B @ C)
    order = generated_order(w.child_elements, cap) if w.child_elements else None
    return WitnessResult(preserved, matches, order, expected_order)


# -- good invariants for any loadable group -------------------------------------
def good_invariants(name: str) -> InvariantSet:
    """Cataloged good set, or the solver's output for groups without one."""
    return _good_invariants(name, str(catalog_dir()))


@lru_cache(maxsize=None)
def _good_invariants(name: str, directory: str) -> InvariantSet:
    spec = catalog_group(name)
    if spec.good:
        return spec.good_set()
    return solve_good_basis(spec, build_frame(spec)).invariants


def potential_components(name: str) -> tuple:
    return _potential_components(name, str(catalog_dir()))


@lru_cache(maxsize=None)
def _potential_components(name: str, directory: str) -> tuple:
    spec = catalog_group(name)
    if spec.potential:
        return tuple(catalog_potential(spec)[0].components)
    return tuple(potential_vector_field(good_invariants(name), build_frame(spec)).components)


def substitute_x(p: MultiPoly, images: dict, nvars: int) -> MultiPoly:
    """Replace x_alpha by images[alpha] (a MultiPoly in nvars variables), zero when absent."""
    values = [images.get(k, MultiPoly(nvars)) for k in range(p.nvars)]
    out = p.substitute(values)
    if not isinstance(out, MultiPoly):
        out = MultiPoly.constant(out, nvars) if out else MultiPoly(nvars)
    return out


# -- cataloged reductions -----------------------------------------------------------
@dataclass
class ReductionReport:
    id: str
    parent: str
    child: str
    delta: int
    checks: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self):
        return {"id": self.id, "parent": self.parent, "child": self.child, "delta": self.delta,
                "checks": self.checks, "passed": self.passed, "details": self.details}


def find_reduction(parent: str, delta: int, child: str | None = None) -> dict | None:
    for entry in load_reductions():
        if entry["parent"] == parent and entry["delta"] == delta and (child is None or entry["child"] == child):
            return entry
    return None


def witness_for(entry: dict, ctx: ReductionContext, ident: Identification, swap: bool = False) -> SubquotientWitness:
    parent = catalog_group(entry["parent"])
    child = catalog_group(entry["child"])
    P = [parent.element(p) for p, _ in entry["witness"]]
    C = [child.element(c) for _, c in entry["witness"]]
    if swap and len(C) > 1:
        C[0], C[1] = C[1], C[0]
    return SubquotientWitness(P, C, ident, [tuple(pair) for pair in entry["witness"]])


def verify_cataloged_reduction(entry: dict, digits: int = DEFAULT_DIGITS, tol=DEFAULT_TOL,
                               cap: int = 5000) -> ReductionReport:
    """Checks one cataloged reduction: index set, witnesses, invariant and potential maps, goodness."""
    parent = catalog_group(entry["parent"])
    child = catalog_group(entry["child"])
    pframe = build_frame(parent)
    cframe = build_frame(child)
    delta = int(entry["delta"])
    ctx = make_context(pframe, delta)
    checks, details = {}, {}
    zeroed = sorted(int(k) - 1 for k in entry["zeroed"])
    checks["index_set"] = zeroed == ctx.ic_set and ctx.child_degrees == tuple(sorted(child.degrees, reverse=True)) \
        and ctx.child_degrees == tuple(child.degrees)
    details["i_set"] = [a + 1 for a in ctx.i_set]

    ident = identification_map(ctx, cframe, entry["basis_map"])
    wres = verify_witness(ctx, witness_for(entry, ctx, ident), child.expected_order(), cap)
    checks["witness"] = wres.passed
    details["witness"] = wres.to_json()

    # invariants pulled back along B against the child's good set
    inv_law = invariant_factor(ident.factors, child.degrees)
    pulled = pullback(good_invariants(parent.name), ident.matrix)
    child_x = good_invariants(child.name).polys()
    stated = {(int(al) - 1, int(be) - 1): _scalar(c) for al, be, c in entry["invariant_map"]}
    inv_ok = all(not pulled[c] for c in zeroed)
    restricted = []
    for (al, be), law in zip(ident.pairs, inv_law):
        restricted.append(pulled[al] * ident.degree_scale(parent.degrees[al]).inverse())
        inv_ok = inv_ok and stated.get((al, be)) == law and restricted[-1] == child_x[be] * law
    checks["invariant_map"] = inv_ok

    # potential components transported by the same substitution
    n_child = child.rank
    images = {al: MultiPoly.variable(be, n_child) * law for (al, be), law in zip(ident.pairs, inv_law)}
    GP = potential_components(parent.name)
    GC = potential_components(child.name)
    pot_law = potential_factor(ident.factors, child.degrees, parent.degrees[0])
    pstated = {(int(al) - 1, int(be) - 1): _scalar(c) for al, be, c in entry["potential_map"]}
    pot_ok = all(not substitute_x(GP[c], images, n_child) for c in zeroed)
    for (al, be), law in zip(ident.pairs, pot_law):
        pot_ok = pot_ok and pstated.get((al, be)) == law and GC[be] == substitute_x(GP[al], images, n_child) * law
    checks["potential_map"] = pot_ok
    details["potential_map_source"] = entry.get("potential_map_source", "stated")

    if entry.get("potential_function"):
        _, FP, _ = catalog_potential(parent)
        _, FC, _ = catalog_potential(child)
        unit_scales = all(a == 1 for a in ident.factors)
        checks["potential_function"] = unit_scales and FC == substitute_x(FP, images, n_child)

    report = check_goodness(restricted, cframe.rescaled(ident.factors), digits=digits, tol=tol, validate=False)
    checks["goodness"] = report.verdict
    return ReductionReport(entry.get("id", f"{parent.name}-{child.name}"), parent.name, child.name, delta,
                           checks, details)


def reduction_table(entry: dict) -> list:
    """(parent label, image label) rows such as ("x3", "x2") or ("x2", "0")."""
    stated = {int(al): (int(be), c) for al, be, c in entry["invariant_map"]}
    rows = []
    for al in range(1, catalog_group(entry["parent"]).rank + 1):
        if al in stated:
            be, c = stated[al]
            c = str(c)
            prefix = "" if c == "1" else ("-" if c == "-1" else f"{c}*")
            rows.append((f"x{al}", f"{prefix}x{be}"))
        else:
            rows.append((f"x{al}", "0"))
    return rows


# -- monomial family -----------------------------------------------------------------
@dataclass
class FamilyReport:
    name: str
    checks: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self):
        return {"name": self.name, "checks": self.checks, "passed": self.passed, "details": self.details}


def monomial_subquotient(m: int, n: int, digits: int = DEFAULT_DIGITS, tol=DEFAULT_TOL) -> FamilyReport:
    """G(m,m,n+1) restricted to u_(n+1) = 0 against G(m,1,n).

    When m divides n+1 every degree is divisible by m; the subspace is then taken to be
    the span of the first n frame vectors instead of a full eigenspace.
    """
    parent = catalog_group(f"G({m},{m},{n + 1})")
    child = catalog_group(f"G({m},1,{n})")
    pframe = build_frame(parent)
    cframe = build_frame(child)
    override = list(range(n)) if (n + 1) % m == 0 else None
    ctx = make_context(pframe, m, override)
    checks = {"index_set": ctx.i_set == list(range(n)), "degrees": ctx.child_degrees == tuple(child.degrees)}
    ident = identification_map(ctx, cframe, [(k + 1, k + 1, 1) for k in range(n)])
    checks["embedding"] = ident.matrix == CycMatrix.from_columns([unit_vector(n + 1, k) for k in range(n)])
    sig = pullback(parent.sigma_set(), ident.matrix)
    csig = child.sigma_set().polys()
    checks["sigma"] = all(sig[k] == csig[k] for k in range(n)) and not sig[n]
    x = pullback(good_invariants(parent.name), ident.matrix)
    cx = good_invariants(child.name).polys()
    checks["good_set"] = all(x[k] == cx[k] for k in range(n)) and not x[n]
    reduced = reduce_good_basis(good_invariants(parent.name), ctx, verify=False, digits=digits, tol=tol)
    checks["goodness"] = check_goodness(reduced, ctx.child, digits=digits, tol=tol, validate=False).verdict
    return FamilyReport(f"{parent.name}->{child.name}", checks,
                        {"remark_case": override is not None, "i_set": [a + 1 for a in ctx.i_set]})


def scalar_ratio(p: MultiPoly, q: MultiPoly):
    """c with p == c * q (q nonzero), else None."""
    if not q:
        return None
    e, c = next(iter(q.terms.items()))
    ratio = as_cyclotomic(p.terms.get(e, 0)) / c
    return ratio if p == q * ratio else None


def sigma_pattern(entry: dict) -> list:
    """For each parent sigma: ("beta", c) when it restricts to c * sigma'_beta, ("0", None) when it vanishes."""
    parent = catalog_group(entry["parent"])
    child = catalog_group(entry["child"])
    ctx = make_context(build_frame(parent), int(entry["delta"]))
    ident = identification_map(ctx, build_frame(child), entry["basis_map"])
    sig = pullback(parent.sigma_set(), ident.matrix)
    csig = child.sigma_set().polys()
    out = []
    for al, p in enumerate(sig):
        if not p:
            out.append((al + 1, 0, None))
            continue
        hit = None
        for be, q in enumerate(csig):
            c = scalar_ratio(p, q)
            if c is not None and c:
                hit = (al + 1, be + 1, c)
        out.append(hit if hit else (al + 1, None, None))
    return out


def lift_constant(m: int, n: int, variant: str = "stated") -> Cyclotomic:
    """Coefficient of sigma_(n+1) in the lift: (sqrt n)^n zeta_(nm)^(-n(n+1)/2), or the
    compatible variant with exponent -n(n-1)/2."""
    root = sqrt_rational(n) ** n
    if variant == "stated":
        return root * root_of_unity(n * m, -(n * (n + 1) // 2))
    if variant == "compatible":
        return root * root_of_unity(n * m, -(n * (n - 1) // 2))
    raise ValueError(f"unknown lift variant {variant!r}")


def lift_good_basis(m: int, n: int, coeffs=None, variant: str = "stated") -> InvariantSet:
    """Good set of G(m,1,n) (sigma-coefficient maps) extended to G(m,m,n+1) with c * sigma_(n+1)."""
    from .goodness import ComposedInvariants
    if coeffs is None:
        coeffs = good_invariants(f"G({m},1,{n})").coeffs
    big = catalog_group(f"G({m},{m},{n + 1})")
    lifted = [{tuple(b) + (0,): c for b, c in cmap.items()} for cmap in coeffs]
    lifted.append({(0,) * n + (1,): lift_constant(m, n, variant)})
    return ComposedInvariants(big.sigma_set(), lifted)


def check_lift(m: int, n: int, variant: str = "stated", digits: int = DEFAULT_DIGITS,
               tol=DEFAULT_TOL) -> GoodnessReport:
    big = catalog_group(f"G({m},{m},{n + 1})")
    return check_goodness(lift_good_basis(m, n, variant=variant), build_frame(big), digits=digits, tol=tol)


# -- reduction sequences ------------------------------------------------------------
def _is_arithmetic(ds) -> int | None:
    """m when ds == {m, 2m, ..., km} with k >= 1."""
    ds = sorted(ds)
    m = ds[0]
    return m if m > 0 and ds == [m * (k + 1) for k in range(len(ds))] else None


def degree_candidates(degrees) -> list:
    """Loadable groups whose degree multiset equals ``degrees``."""
    target = sorted(degrees)
    out = []
    for name in PRIMITIVE:
        if sorted(catalog_group(name).degrees) == target:
            out.append(name)
    if len(target) == 1:
        out.append(f"mu({target[0]})")
        return out
    m = _is_arithmetic(target)
    if m is not None and m >= 2:
        out.append(f"G({m},1,{len(target)})")
    for k, e in enumerate(target):
        rest = target[:k] + target[k + 1:]
        m = _is_arithmetic(rest)
        if m is not None and m >= 2 and e == len(rest) + 1 and not (m == 2 and e == 2):
            name = f"G({m},{m},{len(rest) + 1})"
            if name not in out:
                out.append(name)
    return out


@dataclass
class SequenceStep:
    delta: int
    degrees: tuple
    i_set: list
    candidates: list
    status: str
    paths: list = field(default_factory=list)

    def to_json(self):
        return {"delta": self.delta, "degrees": list(self.degrees), "i_set": [a + 1 for a in self.i_set],
                "candidates": self.candidates, "status": self.status,
                "paths": [list(path) for path in self.paths]}


def _chains(parent: str, delta: int, entries: list, acc=()) -> list:
    """Chains of cataloged reductions starting at ``parent`` whose deltas have lcm ``delta``."""
    out = []
    for entry in entries:
        if entry["parent"] != parent:
            continue
        step = acc + ((entry["child"], entry["delta"]),)
        total = lcm(*(d for _, d in step))
        if delta % total:
            continue
        if total == delta and len(step) > 1:
            out.append(step)
        out.extend(_chains(entry["child"], delta, entries, step))
    return out


def reduction_sequence(spec: GroupSpec) -> list:
    """Every divisor delta > 1 of d_1 with its surviving degrees and matching groups.

    A step is "verified" when it keeps every index, keeps only the first one, or has the
    same index set (hence the same eigenspace) as a cataloged reduction of this group.
    Otherwise chains of cataloged reductions reaching the same degrees are listed.
    """
    degs = tuple(spec.degrees)
    entries = load_reductions()
    steps = []
    for delta in divisors(degs[0])[1:]:
        keep = i_set(degs, delta)
        sub = tuple(degs[a] for a in keep)
        cands = degree_candidates(sub)
        if len(keep) == len(degs):
            status = "verified"
            cands = [spec.name] + [c for c in cands if c != spec.name]
        elif len(keep) == 1 or any(e["parent"] == spec.name and i_set(degs, e["delta"]) == keep for e in entries):
            status = "verified"
        else:
            status = "degrees-match-only"
        paths = []
        if status != "verified":
            paths = [tuple(f"{c} (delta={d})" for c, d in chain) for chain in _chains(spec.name, delta, entries)
                     if sorted(catalog_group(chain[-1][0]).degrees) == sorted(sub)]
        steps.append(SequenceStep(delta, sub, keep, cands, status, paths))
    return steps
