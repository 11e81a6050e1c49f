"""Admissible frames, the goodness verifier, and the good-basic-invariant solver.

Derivative conditions are scale invariant, so they are evaluated exactly at the
unnormalized eigenvectors.  Quantities that depend on the unit normalization of
the eigenvectors (the Jacobian at q, the final scale of each invariant) pick up
square roots of the Hermitian norms, which are handled numerically and then,
where possible, recognized and certified exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial, prod

import mpmath

from .groups import (GroupSpec, InvariantSet, as_invariant_set, is_invariant, is_regular_vector,
                     random_exact_point, reflections)
from .expr import NumericRing
from .linalg import CycMatrix, CycVector, eigenspace, hermitian, kernel, matrix_order
from .poly import Jet, weighted_monomials
from .scalar import DEFAULT_DIGITS, DEFAULT_TOL, Cyclotomic, as_cyclotomic, recognize, root_of_unity


class FrameError(ValueError):
    pass


class GoodnessError(ValueError):
    pass


@dataclass
class AdmissibleFrame:
    """An admissible triplet (g, zeta, q) with an eigenbasis q_1..q_n, q_1 = q.

    Basis vectors are stored unnormalized; ``norms[b]`` is hermitian(q_b, q_b), so the
    unit vectors are basis[b] / sqrt(norms[b]).
    """

    group: GroupSpec | None
    g: CycMatrix
    zeta: Cyclotomic
    degrees: tuple
    basis: list
    norms: list = field(default_factory=list)

    def __post_init__(self):
        if not self.norms:
            self.norms = [hermitian(v, v) for v in self.basis]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def q_exact(self) -> CycVector:
        return self.basis[0]

    @property
    def q_norm_sq(self) -> Cyclotomic:
        return self.norms[0]

    @property
    def coord_change(self) -> CycMatrix:
        """Columns are the basis vectors: u = coord_change * z."""
        return CycMatrix.from_columns(self.basis)

    def eigenvalue(self, b: int) -> Cyclotomic:
        return self.zeta ** (1 - self.degrees[b])

    def norm_factors(self, digits: int = DEFAULT_DIGITS) -> list:
        with mpmath.workdps(digits):
            return [mpmath.sqrt(mpmath.re(h.embed(digits))) for h in self.norms]

    def rescaled(self, factors) -> "AdmissibleFrame":
        """Same frame with basis vector b multiplied by a unit-modulus factors[b]."""
        basis = [v * as_cyclotomic(a) for v, a in zip(self.basis, factors)]
        return AdmissibleFrame(self.group, self.g, self.zeta, self.degrees, basis, list(self.norms))

    def check(self) -> None:
        for b, v in enumerate(self.basis):
            if self.g @ v != v * self.eigenvalue(b):
                raise FrameError(f"basis vector {b + 1} is not a zeta^(1-d) eigenvector")


def build_frame(spec: GroupSpec, g: CycMatrix | None = None, zeta_power: int = 1,
                check_regular: bool = True) -> AdmissibleFrame:
    """Frame for ``spec``; the cataloged eigenvectors are used verbatim when g is the cataloged one."""
    fd = spec.frame_data
    if g is None:
        if fd is None:
            raise FrameError(f"{spec.name} has no cataloged frame element")
        g = fd.g
    d1 = spec.degrees[0]
    zeta = root_of_unity(d1, zeta_power)
    if zeta ** d1 != 1 or any(zeta ** k == 1 for k in range(1, d1)):
        raise FrameError("zeta must be a primitive d1-th root of unity")
    matrix_order(g, 10 * d1 + 10)
    use_catalog = fd is not None and g == fd.g and zeta == fd.zeta
    if use_catalog:
        basis = list(fd.eigenvectors)
    else:
        basis = []
        groups: dict = {}
        for b, d in enumerate(spec.degrees):
            groups.setdefault(d % d1, []).append(b)
        slot = [None] * spec.rank
        for key, members in groups.items():
            lam = zeta ** (1 - spec.degrees[members[0]])
            space = eigenspace(g, lam)
            if len(space) != len(members):
                raise FrameError(f"eigenvalue zeta^(1-{spec.degrees[members[0]]}) has multiplicity "
                                 f"{len(space)}, expected {len(members)}")
            for b, v in zip(members, space):
                slot[b] = v
        basis = slot
    frame = AdmissibleFrame(spec, g, zeta, tuple(spec.degrees), basis)
    frame.check()
    if check_regular and not is_regular_vector(frame.q_exact, reflections(spec)):
        raise FrameError("the zeta-eigenvector q is not regular")
    return frame


# -- Taylor jets at q ---------------------------------------------------------
def frame_jets(frame: AdmissibleFrame, cap: int) -> list:
    """u_i = q_i + sum_b t_b (q_b)_i as weighted jets in t (weights = degrees)."""
    n = frame.rank
    Q = frame.basis
    out = []
    for i in range(len(Q[0])):
        coeffs = [Q[b][i] for b in range(n)]
        out.append(Jet.affine(Q[0][i], coeffs, frame.degrees, cap))
    return out


def taylor_jets(x, frame: AdmissibleFrame, cap: int | None = None) -> list:
    """Truncated expansions of each invariant around q in the unnormalized graded coordinates."""
    xs = as_invariant_set(x)
    cap = cap if cap is not None else max(frame.degrees)
    vals = xs.evaluate(frame_jets(frame, cap))
    out = []
    for v in vals:
        if not isinstance(v, Jet):
            v = Jet(frame.rank, {(0,) * frame.rank: v} if v else {}, frame.degrees, cap)
        out.append(v)
    return out


def unit(n: int, b: int) -> tuple:
    return tuple(1 if k == b else 0 for k in range(n))


def normalized_scale(frame: AdmissibleFrame, degree: int, exps) -> Cyclotomic:
    """K with [t^a] (unit frame) = [t~^a] * sqrt(K):  K = h1^(|a|-d) * prod h_b^(-a_b)."""
    h = frame.norms
    k = h[0] ** (sum(exps) - degree)
    for b, a in enumerate(exps):
        if a:
            k = k * h[b] ** (-a)
    return k


def _sqrt_numeric(c: Cyclotomic, digits: int):
    return mpmath.sqrt(mpmath.re(c.embed(digits)))


@dataclass
class Condition:
    alpha: int
    multi_index: tuple
    value: Cyclotomic

    @property
    def passed(self) -> bool:
        return not self.value

    def to_json(self):
        return {"alpha": self.alpha + 1, "multi_index": list(self.multi_index),
                "value": self.value.to_json(), "pass": self.passed}


@dataclass
class GoodnessReport:
    conditions: list
    jacobian: object
    jacobian_exact: list
    jacobian_residual: object
    tolerance: object
    good: bool
    compatible: bool

    @property
    def verdict(self) -> bool:
        return self.good and self.compatible

    def failures(self) -> list:
        return [c for c in self.conditions if not c.passed]

    def to_json(self):
        return {"conditions": [c.to_json() for c in self.conditions],
                "jacobian_residual": mpmath.nstr(self.jacobian_residual, 5),
                "good": self.good, "compatible": self.compatible, "verdict": self.verdict}


def _check_homogeneous(xs: InvariantSet, degrees, seed: int = 0) -> None:
    rng = random.Random(seed)
    w = random_exact_point(rng, xs.nvars, bound=1000)
    base = xs.evaluate(w)
    scaled = xs.evaluate([c * 2 for c in w])
    for k, (a, b, d) in enumerate(zip(base, scaled, degrees)):
        if as_cyclotomic(b) != as_cyclotomic(a) * 2 ** d:
            raise GoodnessError(f"x{k + 1} is not homogeneous of degree {d}")


def check_goodness(x, frame: AdmissibleFrame, digits: int = DEFAULT_DIGITS, tol=DEFAULT_TOL,
                   validate: bool = True, jets=None) -> GoodnessReport:
    xs = as_invariant_set(x)
    n = frame.rank
    degs = frame.degrees
    if len(xs) != n:
        raise GoodnessError("need one invariant per degree")
    if validate:
        _check_homogeneous(xs, degs)
        if frame.group is not None and frame.group.generators and not is_invariant(xs, frame.group):
            raise GoodnessError("input polynomials are not invariant under the group")
    if jets is None:
        jets = taylor_jets(xs, frame, max(degs))
    conditions = []
    for alpha, d in enumerate(degs):
        for a in weighted_monomials(degs, d, 2):
            coeff = as_cyclotomic(jets[alpha].terms.get(a, 0))
            conditions.append(Condition(alpha, a, coeff * prod(factorial(k) for k in a)))
    exact = [[as_cyclotomic(jets[al].terms.get(unit(n, b), 0)) for b in range(n)] for al in range(n)]
    with mpmath.workdps(digits):
        tol = mpmath.mpf(tol)
        J = mpmath.matrix(n, n)
        for al in range(n):
            for b in range(n):
                if exact[al][b]:
                    scale = normalized_scale(frame, degs[al], unit(n, b))
                    J[al, b] = exact[al][b].embed(digits) * _sqrt_numeric(scale, digits)
        residual = max(abs(J[al, b] - (1 if al == b else 0)) for al in range(n) for b in range(n))
    good = all(c.passed for c in conditions)
    return GoodnessReport(conditions, J, exact, residual, tol, good, bool(residual <= tol))


def numeric_check(x, frame: AdmissibleFrame, digits: int = DEFAULT_DIGITS) -> tuple:
    """Independent floating-point pass at the unit-normalized frame.

    Returns (largest |Taylor coefficient| over the derivative conditions, Jacobian matrix).
    """
    xs = as_invariant_set(x)
    n = frame.rank
    degs = frame.degrees
    with mpmath.workdps(digits):
        scale = frame.norm_factors(digits)
        Q = [[c.embed(digits) / scale[b] for c in v] for b, v in enumerate(frame.basis)]
        jets = [Jet.affine(Q[0][i], [Q[b][i] for b in range(n)], degs, max(degs)) for i in range(len(Q[0]))]
        vals = xs.evaluate(jets, NumericRing(digits))
        worst = mpmath.mpf(0)
        for alpha, d in enumerate(degs):
            for a in weighted_monomials(degs, d, 2):
                worst = max(worst, abs(vals[alpha].terms.get(a, 0)))
        J = mpmath.matrix(n, n)
        for alpha in range(n):
            for b in range(n):
                J[alpha, b] = vals[alpha].terms.get(unit(n, b), 0)
    return worst, J


# -- solver -------------------------------------------------------------------
class ComposedInvariants(InvariantSet):
    """x_alpha = sum_b coeffs[alpha][b] * prod sigma^b, evaluated through the sigma set."""

    def __init__(self, sigma: InvariantSet, coeffs: list):
        super().__init__(sigma.nvars, [])
        self.sigma = sigma
        self.coeffs = coeffs
        self._polys = None
        self.names = [f"x{k + 1}" for k in range(len(coeffs))]

    def __len__(self):
        return len(self.coeffs)

    def evaluate(self, values, ring=None):
        numeric = ring is not None and ring.numeric
        s = self.sigma.evaluate(values, ring) if numeric else self.sigma.evaluate(values)
        out = []
        for cmap in self.coeffs:
            total = 0
            for b, c in cmap.items():
                term = ring.const(c) if numeric else c
                for j, e in enumerate(b):
                    if e:
                        term = s[j] ** e * term if not isinstance(s[j], (int, Cyclotomic)) else term * s[j] ** e
                total = term + total if not isinstance(term, (int, Cyclotomic)) else total + term
            out.append(total)
        return out

    def polys(self):
        if self._polys is None:
            self._polys = InvariantSet.polys(self)
        return self._polys


class ScaledInvariants(InvariantSet):
    def __init__(self, base: InvariantSet, factors: list):
        super().__init__(base.nvars, [])
        self.base = base
        self.factors = [as_cyclotomic(f) for f in factors]
        self._polys = None

    def __len__(self):
        return len(self.factors)

    def evaluate(self, values, ring=None):
        if ring is not None and ring.numeric:
            return [v * ring.const(f) for v, f in zip(self.base.evaluate(values, ring), self.factors)]
        return [v * f if not isinstance(v, (int, Cyclotomic)) else as_cyclotomic(v) * f
                for v, f in zip(self.base.evaluate(values), self.factors)]


@dataclass
class SolveResult:
    invariants: ComposedInvariants
    exact: bool
    numeric_coeffs: list


def solve_good_basis(spec: GroupSpec, frame: AdmissibleFrame, sigma=None, digits: int = DEFAULT_DIGITS,
                     tol=DEFAULT_TOL, max_den: int = 10 ** 6) -> SolveResult:
    """Unique good and compatible basic invariants as combinations of sigma-monomials."""
    sig = as_invariant_set(sigma) if sigma is not None else spec.sigma_set()
    degs = frame.degrees
    n = frame.rank
    sjets = taylor_jets(sig, frame, max(degs))
    coeffs = []
    numeric = []
    exact_all = True
    for alpha, d in enumerate(degs):
        cands = weighted_monomials(degs, d, 1).entries
        mjets = []
        for b in cands:
            j = None
            for k, e in enumerate(b):
                for _ in range(e):
                    j = sjets[k] if j is None else j * sjets[k]
            mjets.append(j)
        rows = []
        for a in weighted_monomials(degs, d, 2):
            rows.append([as_cyclotomic(mj.terms.get(a, 0)) for mj in mjets])
        for beta in range(n):
            if beta != alpha and degs[beta] == d:
                rows.append([as_cyclotomic(mj.terms.get(unit(n, beta), 0)) for mj in mjets])
        if rows:
            ker = kernel(CycMatrix.from_rows(rows))
        else:
            ker = [CycVector([as_cyclotomic(1)])] if len(cands) == 1 else None
            if ker is None:
                raise GoodnessError("underdetermined ansatz")
        if len(ker) != 1:
            raise GoodnessError(f"x{alpha + 1}: solution space has dimension {len(ker)}, expected 1")
        v = ker[0]
        jt = sum((v[k] * as_cyclotomic(mj.terms.get(unit(n, alpha), 0)) for k, mj in enumerate(mjets)),
                 as_cyclotomic(0))
        if not jt:
            raise GoodnessError(f"x{alpha + 1}: Jacobian entry vanishes (q not regular?)")
        target = frame.norms[0] ** (d - 1) * frame.norms[alpha]
        with mpmath.workdps(digits):
            lam_num = _sqrt_numeric(target, digits) / jt.embed(digits)
            lam = recognize(lam_num, digits=digits, tol=tol, max_den=max_den)
        if lam is not None and lam * lam * jt * jt == target:
            cmap = {b: v[k] * lam for k, b in enumerate(cands) if v[k]}
            coeffs.append(cmap)
            numeric.append(None)
        else:
            exact_all = False
            with mpmath.workdps(digits):
                numeric.append({b: v[k].embed(digits) * lam_num for k, b in enumerate(cands) if v[k]})
            coeffs.append({b: v[k] for k, b in enumerate(cands) if v[k]})
    return SolveResult(ComposedInvariants(sig, coeffs), exact_all, numeric)


def rescale_good_basis(x, a, degrees):
    """x_alpha -> a_1^(1-d_alpha) a_alpha^(-1) x_alpha."""
    a = [as_cyclotomic(v) for v in a]
    if any(not v for v in a):
        raise ValueError("scale factors must be nonzero")
    factors = [a[0] ** (1 - d) * a[k] ** -1 for k, d in enumerate(degrees)]
    if isinstance(x, InvariantSet):
        return ScaledInvariants(x, factors)
    return [p * f for p, f in zip(x, factors)]
