"""Potential vector fields, potential functions and the associativity probe."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import mpmath

from .expr import Expr
from .goodness import AdmissibleFrame, normalized_scale, taylor_jets, _sqrt_numeric
from .groups import GroupSpec
from .poly import MultiPoly, derivative, weighted_monomials
from .scalar import DEFAULT_DIGITS, DEFAULT_TOL, as_cyclotomic, recognize


class PotentialError(ValueError):
    pass


@dataclass
class PotentialField:
    """Components G_1..G_n as polynomials in the good invariants x_1..x_n."""

    components: list
    degrees: tuple
    group: str = ""
    duality: bool = True
    exact: bool = True
    z1_at_q: int = 1
    numeric_components: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.components)

    def is_weighted_homogeneous(self) -> bool:
        d1 = self.degrees[0]
        return all(p.weighted_degrees(self.degrees) <= {d + d1}
                   for p, d in zip(self.components, self.degrees))

    def to_json(self):
        return {"group": self.group, "duality": self.duality, "exact": self.exact,
                "components": [p.to_json() for p in self.components]}


def x_variables(n: int) -> dict:
    return {f"x{k + 1}": MultiPoly.variable(k, n) for k in range(n)}


def parse_x_poly(text: str, n: int) -> MultiPoly:
    v = Expr(text).eval(x_variables(n))
    if not isinstance(v, MultiPoly):
        v = MultiPoly.constant(as_cyclotomic(v), n) if v else MultiPoly(n)
    return v.map_coeffs(as_cyclotomic)


def catalog_potential(spec: GroupSpec) -> tuple:
    """(PotentialField, potential function or None, pairing or None) from catalog data."""
    data = spec.potential
    if not data:
        raise PotentialError(f"{spec.name} has no cataloged potential")
    n = spec.rank
    if "fields" in data:
        comps = [parse_x_poly(t, n) for t in data["fields"]]
        F, pairing = None, None
    else:
        F = parse_x_poly(data["function"], n)
        pairing = [int(k) for k in data["pairing"]]
        comps = [derivative(F, pairing[g] - 1) for g in range(n)]
    return PotentialField(comps, tuple(spec.degrees), spec.name, spec.duality), F, pairing


def potential_vector_field(x, frame: AdmissibleFrame, digits: int = DEFAULT_DIGITS, tol=DEFAULT_TOL,
                           max_den: int = 10 ** 6, jets=None) -> PotentialField:
    """G_gamma = 1/(d_gamma - 1) * sum over the degree-(d_gamma + d_1) index set of
    Taylor coefficients of x_gamma at the unit q, times x^a (with z_1(q) = 1)."""
    degs = frame.degrees
    n = frame.rank
    d1 = degs[0]
    if any(d < 2 for d in degs):
        raise PotentialError("all degrees must be at least 2")
    if jets is None:
        jets = taylor_jets(x, frame, d1 + max(degs))
    comps, numeric = [], []
    exact = True
    with mpmath.workdps(digits):
        for gamma, d in enumerate(degs):
            terms, nterms = {}, {}
            for a in weighted_monomials(degs, d + d1, 2):
                t = as_cyclotomic(jets[gamma].terms.get(a, 0))
                if not t:
                    continue
                c = t / (d - 1)
                K = normalized_scale(frame, d, a)
                kappa_num = c.embed(digits) * _sqrt_numeric(K, digits)
                nterms[a] = kappa_num
                kappa = recognize(kappa_num, digits=digits, tol=tol, max_den=max_den)
                if kappa is not None and kappa * kappa == c * c * K:
                    terms[a] = kappa
                else:
                    exact = False
            comps.append(MultiPoly(n, terms))
            numeric.append(MultiPoly(n, nterms))
    group = frame.group
    return PotentialField(comps, tuple(degs), group.name if group else "",
                          group.duality if group else True, exact, 1, numeric)


def verify_potential_function(F: MultiPoly, P: PotentialField, pairing) -> bool:
    """dF/dx_{pairing(gamma)} == G_gamma for every gamma (pairing is 1-based)."""
    return all(derivative(F, pairing[g] - 1) == P.components[g] for g in range(P.rank))


def structure_constants(P: PotentialField) -> list:
    """C[alpha][beta][gamma] = d^2 G_gamma / dx_alpha dx_beta."""
    n = P.rank
    first = [[derivative(P.components[g], a) for a in range(n)] for g in range(n)]
    return [[[derivative(first[g][a], b) for g in range(n)] for b in range(n)] for a in range(n)]


@dataclass
class AssociativityResult:
    associative: bool
    counterexample: tuple | None = None
    difference: MultiPoly | None = None

    def to_json(self):
        out = {"associative": self.associative}
        if self.counterexample is not None:
            out["counterexample"] = [k + 1 for k in self.counterexample]
            out["difference"] = self.difference.to_json()
        return out


def associativity_check(P: PotentialField) -> AssociativityResult:
    """Checks sum_e C_ab^e C_ec^d == sum_e C_bc^e C_ae^d as polynomial identities."""
    n = P.rank
    C = structure_constants(P)
    zero = MultiPoly(n)
    for a, b, c, d in product(range(n), repeat=4):
        lhs = zero
        rhs = zero
        for e in range(n):
            if C[a][b][e] and C[e][c][d]:
                lhs = lhs + C[a][b][e] * C[e][c][d]
            if C[b][c][e] and C[a][e][d]:
                rhs = rhs + C[b][c][e] * C[a][e][d]
        diff = lhs - rhs
        if diff:
            return AssociativityResult(False, (a, b, c, d), diff)
    return AssociativityResult(True)


def unit_property(P: PotentialField) -> bool:
    """C_{1 beta}^gamma is the Kronecker delta."""
    n = P.rank
    C = structure_constants(P)
    one = MultiPoly.constant(1, n)
    return all(C[0][b][g] == (one if b == g else MultiPoly(n)) for b in range(n) for g in range(n))
