"""Sparse multivariate polynomials, weighted truncated jets, and weighted index sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import factorial

from .scalar import Cyclotomic, as_cyclotomic


def _is_scalar(x) -> bool:
    return not isinstance(x, MultiPoly)


class MultiPoly:
    """Polynomial in ``nvars`` variables stored as {exponent tuple: coefficient}.

    Coefficients may be ints, Fractions, Cyclotomic elements, or mpmath numbers;
    zero coefficients are never stored.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError("exponent length must equal nvars")
                if c:
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    def _new(self, terms):
        return type(self)._raw(self.nvars, terms)

    @classmethod
    def variable(cls, i: int, nvars: int, coeff=1) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): coeff})

    @classmethod
    def constant(cls, c, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def linear_form(cls, coeffs, constant=0) -> "MultiPoly":
        n = len(coeffs)
        terms = {}
        if constant:
            terms[(0,) * n] = constant
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms)

    # -- inspection ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def weighted_degrees(self, weights) -> set:
        return {sum(a * w for a, w in zip(e, weights)) for e in self.terms}

    def is_homogeneous(self, weights=None) -> bool:
        weights = weights or [1] * self.nvars
        return len(self.weighted_degrees(weights)) <= 1

    def sorted_terms(self):
        """Terms in graded-lex order (total degree descending, then lex descending)."""
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-a for a in t[0])))

    def map_coeffs(self, f) -> "MultiPoly":
        return self._new({e: v for e, c in self.terms.items() if (v := f(c))})

    # -- arithmetic ------------------------------------------------------
    def _keep(self, e) -> bool:
        return True

    def __add__(self, other):
        if _is_scalar(other):
            if not other:
                return self
            other = MultiPoly._raw(self.nvars, {(0,) * self.nvars: other})
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e)
            if v is None:
                terms[e] = c
            else:
                s = v + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return self._new({})
            return self._new({e: v for e, c in self.terms.items() if (v := c * other)})
        terms = {}
        keep = self._keep
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if not keep(e):
                    continue
                v = terms.get(e)
                terms[e] = c1 * c2 if v is None else v + c1 * c2
        return self._new({e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not _is_scalar(c):
            raise TypeError("division by a polynomial is not supported")
        if isinstance(c, int):
            c = Fraction(1, c)
            return self * c
        return self * (1 / c)

    def _affine_parts(self):
        """(constant, {var: coeff}) when self has degree <= 1, else None."""
        const, lin = 0, {}
        for e, c in self.terms.items():
            s = sum(e)
            if s == 0:
                const = c
            elif s == 1:
                lin[e.index(1)] = c
            else:
                return None
        return const, lin

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        if k == 0:
            return self._new({(0,) * self.nvars: 1})
        if k == 1:
            return self
        parts = self._affine_parts()
        if parts is not None and len(self.terms) > 1:
            return self._affine_power(parts, k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _affine_power(self, parts, k):
        """Multinomial expansion of (c + sum b_j t_j)^k, honouring truncation."""
        const, lin = parts
        vars_ = sorted(lin)
        coeffs = [lin[v] for v in vars_]
        pows = [[1] for _ in coeffs]
        for j, c in enumerate(coeffs):
            for _ in range(k):
                pows[j].append(pows[j][-1] * c)
        cpows = [1]
        if const:
            for _ in range(k):
                cpows.append(cpows[-1] * const)
        fk = factorial(k)
        terms = {}
        zero = [0] * self.nvars

        def rec(j, remaining, exps, denom):
            if j == len(vars_):
                if remaining and not const:
                    return
                e = list(zero)
                for v, a in zip(vars_, exps):
                    e[v] = a
                e = tuple(e)
                if not self._keep(e):
                    return
                c = Fraction(fk, denom * factorial(remaining))
                val = None
                for jj, a in enumerate(exps):
                    if a:
                        val = pows[jj][a] if val is None else val * pows[jj][a]
                if remaining:
                    val = cpows[remaining] if val is None else val * cpows[remaining]
                if val is None:
                    val = 1
                val = val * (c.numerator if c.denominator == 1 else c)
                if val:
                    terms[e] = val
                return
            for a in range(remaining + 1):
                e = list(zero)
                for v, aa in zip(vars_, exps + [a]):
                    e[v] = aa
                if a and not self._keep_partial(tuple(e)):
                    break
                rec(j + 1, remaining - a, exps + [a], denom * factorial(a))

        rec(0, k, [], 1)
        return self._new(terms)

    def _keep_partial(self, e) -> bool:
        return True

    def __eq__(self, other):
        if _is_scalar(other):
            other = MultiPoly(self.nvars, {(0,) * self.nvars: other} if other else {})
        if not isinstance(other, MultiPoly) or other.nvars != self.nvars:
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[e] for e, c in self.terms.items())

    def __hash__(self):
        return hash(frozenset(self.terms))

    # -- calculus and evaluation ----------------------------------------
    def derivative(self, var: int, times: int = 1) -> "MultiPoly":
        return derivative(self, var, times)

    def substitute(self, values):
        """Evaluate at ``values``, which may be scalars, polynomials, or jets."""
        values = list(values)
        if len(values) != self.nvars:
            raise ValueError("need one value per variable")
        cache = {}

        def power(i, a):
            key = (i, a)
            if key not in cache:
                cache[key] = values[i] if a == 1 else power(i, a - 1) * values[i]
            return cache[key]

        acc = 0
        for e, c in self.terms.items():
            term = c
            for i, a in enumerate(e):
                if a:
                    term = power(i, a) * term if not _is_scalar(power(i, a)) else term * power(i, a)
            acc = term + acc if not _is_scalar(term) else acc + term
        return acc

    def to_json(self):
        def enc(c):
            if isinstance(c, Cyclotomic):
                return c.to_json()
            if isinstance(c, (int, Fraction)):
                return as_cyclotomic(c).to_json()
            return {"re": str(c.real), "im": str(c.imag)}
        return {"nvars": self.nvars,
                "terms": [{"exp": list(e), "coeff": enc(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data):
        terms = {}
        for t in data["terms"]:
            c = t["coeff"]
            if "order" in c:
                terms[tuple(t["exp"])] = Cyclotomic.from_json(c)
            else:
                import mpmath
                terms[tuple(t["exp"])] = mpmath.mpc(c["re"], c["im"])
        return cls(int(data["nvars"]), terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(e) if a)
            out.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(out)


class Jet(MultiPoly):
    """A polynomial truncated above a weighted degree ``cap``.

    Products and powers drop every monomial whose weighted degree exceeds the cap,
    so a jet of f(q + sum t_b v_b) holds exactly the Taylor coefficients up to the cap.
    """

    __slots__ = ("weights", "cap")

    def __init__(self, nvars, terms, weights, cap):
        super().__init__(nvars, terms)
        self.weights = tuple(weights)
        self.cap = cap
        self.terms = {e: c for e, c in self.terms.items() if self._keep(e)}

    def _new(self, terms):
        obj = Jet.__new__(Jet)
        obj.nvars = self.nvars
        obj.terms = terms
        obj.weights = self.weights
        obj.cap = self.cap
        return obj

    def _keep(self, e) -> bool:
        return sum(a * w for a, w in zip(e, self.weights)) <= self.cap

    _keep_partial = _keep

    def weight(self, e) -> int:
        return sum(a * w for a, w in zip(e, self.weights))

    def __add__(self, other):
        if isinstance(other, MultiPoly) and not isinstance(other, Jet):
            other = Jet(other.nvars, other.terms, self.weights, self.cap)
        return MultiPoly.__add__(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        if _is_scalar(other):
            return MultiPoly.__mul__(self, other)
        wt = self.weight
        left = sorted(((wt(e), e, c) for e, c in self.terms.items()), key=lambda t: t[0])
        right = sorted(((wt(e), e, c) for e, c in other.terms.items()), key=lambda t: t[0])
        cap = self.cap
        terms = {}
        for wa, ea, ca in left:
            room = cap - wa
            if room < 0:
                break
            for wb, eb, cb in right:
                if wb > room:
                    break
                e = tuple(a + b for a, b in zip(ea, eb))
                v = terms.get(e)
                terms[e] = ca * cb if v is None else v + ca * cb
        return self._new({e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def coefficient_of_weight(self, target: int) -> dict:
        return {e: c for e, c in self.terms.items() if self.weight(e) == target}

    @classmethod
    def affine(cls, constant, coeffs, weights, cap) -> "Jet":
        """The jet c + sum_b coeffs[b] t_b."""
        n = len(coeffs)
        terms = {}
        if constant:
            terms[(0,) * n] = constant
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms, weights, cap)


@dataclass(frozen=True)
class IndexSet:
    degrees: tuple
    target: int
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, item):
        return tuple(item) in self.entries


def weighted_monomials(degrees, target: int, min_total: int = 0) -> IndexSet:
    """Exponent tuples a with sum(a_i d_i) == target and sum(a_i) >= min_total."""
    degrees = tuple(degrees)
    if any(d <= 0 for d in degrees):
        raise ValueError("degrees must be positive")
    out = []

    def rec(i, remaining, acc):
        if i == len(degrees):
            if remaining == 0 and sum(acc) >= min_total:
                out.append(tuple(acc))
            return
        for a in range(remaining // degrees[i], -1, -1):
            rec(i + 1, remaining - a * degrees[i], acc + [a])

    if target >= 0:
        rec(0, target, [])
    return IndexSet(degrees, target, tuple(out))


def weighted_monomials_upto(degrees, cap: int):
    """All exponent tuples of weighted degree <= cap."""
    out = []
    for t in range(cap + 1):
        out.extend(weighted_monomials(degrees, t).entries)
    return out


def derivative(p: MultiPoly, var: int, times: int = 1) -> MultiPoly:
    if not 0 <= var < p.nvars:
        raise ValueError("variable index out of range")
    if times == 0:
        return p
    terms = {}
    for e, c in p.terms.items():
        a = e[var]
        if a < times:
            continue
        f = 1
        for k in range(a - times + 1, a + 1):
            f *= k
        ne = list(e)
        ne[var] = a - times
        terms[tuple(ne)] = c * f
    return MultiPoly(p.nvars, terms)


def evaluate(p: MultiPoly, point):
    point = list(point)
    if len(point) != p.nvars:
        raise ValueError("point length must equal nvars")
    return p.substitute(point)


def linear_substitute(p: MultiPoly, A) -> MultiPoly:
    """p(A z): substitute u_i = sum_j A[i, j] z_j."""
    if A.rows != p.nvars or A.cols != p.nvars:
        raise ValueError("matrix size must equal nvars")
    forms = [MultiPoly.linear_form(list(A.row(i))) for i in range(A.rows)]
    return substitute_polys(p, forms, A.cols)


def substitute_polys(p: MultiPoly, values, nvars: int) -> MultiPoly:
    out = p.substitute(values)
    if _is_scalar(out):
        return MultiPoly.constant(out, nvars) if out else MultiPoly(nvars)
    return out


def monomial_product(sigma, exps, cache=None):
    """prod sigma_j^{exps_j}, with an optional power cache keyed by (j, power)."""
    cache = {} if cache is None else cache
    result = None
    for j, a in enumerate(exps):
        if not a:
            continue
        key = (j, a)
        if key not in cache:
            cache[key] = sigma[j] ** a
        result = cache[key] if result is None else result * cache[key]
    return result


def compose_invariants(coeffs: dict, sigma) -> MultiPoly:
    """sum_a c_a prod_j sigma_j^{a_j} expanded in the underlying variables."""
    sigma = list(sigma)
    nvars = sigma[0].nvars
    total = MultiPoly(nvars)
    cache = {}
    for a, c in coeffs.items():
        if len(a) != len(sigma):
            raise ValueError("exponent length must match the number of generators")
        if not c:
            continue
        mono = monomial_product(sigma, a, cache)
        total = total + (MultiPoly.constant(c, nvars) if mono is None else mono * c)
    return total


class NotInSubring(ValueError):
    pass


def decompose_in_generators(p: MultiPoly, sigma, degrees) -> dict:
    """Coefficients c_a with compose_invariants(c, sigma) == p.

    The candidate products are the sigma-monomials of weighted degree deg(p);
    raises NotInSubring if no exact combination reproduces p.
    """
    from .linalg import CycMatrix, solve

    sigma = list(sigma)
    if p.is_zero():
        return {}
    degs = p.weighted_degrees([1] * p.nvars)
    if len(degs) != 1:
        raise NotInSubring("polynomial is not homogeneous")
    deg = degs.pop()
    cands = weighted_monomials(degrees, deg).entries
    if not cands:
        raise NotInSubring("no generator products of the right degree")
    cache = {}
    prods = [monomial_product(sigma, a, cache) or MultiPoly.constant(1, p.nvars) for a in cands]
    monos = set(p.terms)
    for q in prods:
        monos.update(q.terms)
    monos = sorted(monos)
    A = CycMatrix.from_rows([[as_cyclotomic(q.terms.get(m, 0)) for q in prods] for m in monos])
    b = [as_cyclotomic(p.terms.get(m, 0)) for m in monos]
    try:
        x = solve(A, b)
    except ValueError as exc:
        raise NotInSubring("polynomial is not in the span of generator products") from exc
    if A.rank() < len(cands):
        raise NotInSubring("generator products are linearly dependent")
    return {a: c for a, c in zip(cands, x.entries) if c}


def random_poly(rng, nvars: int, nterms: int, max_deg: int, order: int = 12, height: int = 5):
    """A random sparse polynomial with small cyclotomic coefficients (for tests)."""
    from .scalar import euler_phi
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, max_deg) for _ in range(nvars))
        c = Cyclotomic(order, [rng.randint(-height, height) for _ in range(euler_phi(order))])
        terms[e] = c
    return MultiPoly(nvars, terms)


def all_exponents(nvars: int, max_deg: int):
    return iproduct(range(max_deg + 1), repeat=nvars)
