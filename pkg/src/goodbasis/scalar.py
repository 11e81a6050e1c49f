"""Exact arithmetic in cyclotomic fields Q(zeta_N) and high-precision embeddings.

Elements are stored over the power basis 1, z, ..., z^(phi(N)-1) reduced modulo
the N-th cyclotomic polynomial, with integer numerators over one positive common
denominator.  Mixed-order arithmetic lifts both operands to the lcm of their
orders.  Numeric values use mpmath complex numbers (``BigComplex``).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import mpmath

DEFAULT_DIGITS = 60
DEFAULT_TOL = "1e-40"

BigComplex = mpmath.mpc


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Integer coefficients (lowest degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        den = cyclotomic_polynomial(d)
        # exact division by a monic polynomial
        quot = [0] * (len(num) - len(den) + 1)
        rem = list(num)
        for k in range(len(quot) - 1, -1, -1):
            c = rem[k + len(den) - 1]
            quot[k] = c
            if c:
                for j, dj in enumerate(den):
                    rem[k + j] -= c * dj
        num = quot
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple:
    """Reduced coordinates of zeta_n^j for j = 0..n-1."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    cur = [1] + [0] * (phi - 1)
    rows = []
    for _ in range(n):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * poly[j]
    return tuple(rows)


@lru_cache(maxsize=None)
def _trace_weights(n: int) -> tuple:
    # normalized trace of zeta_n^k is mu(n/g)/phi(n/g) with g = gcd(k, n)
    out = []
    for k in range(euler_phi(n)):
        m = n // gcd(k, n)
        out.append(Fraction(_mobius(m), euler_phi(m)))
    return tuple(out)


@lru_cache(maxsize=None)
def _units(n: int) -> tuple:
    return tuple(k for k in range(1, n + 1) if gcd(k, n) == 1)


def _reduce(coeffs: list, n: int) -> list:
    """Reduce an integer coefficient list modulo the n-th cyclotomic polynomial."""
    phi = euler_phi(n)
    if len(coeffs) <= phi:
        return coeffs + [0] * (phi - len(coeffs))
    poly = cyclotomic_polynomial(n)
    for k in range(len(coeffs) - 1, phi - 1, -1):
        c = coeffs[k]
        if c:
            base = k - phi
            for j in range(phi):
                pj = poly[j]
                if pj:
                    coeffs[base + j] -= c * pj
    return coeffs[:phi]


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class Cyclotomic:
    """An exact element of Q(zeta_N)."""

    __slots__ = ("order", "_num", "_den", "_hash")

    def __init__(self, order: int, coeffs=None):
        if order < 1:
            raise ValueError("order must be positive")
        phi = euler_phi(order)
        if coeffs is None:
            coeffs = [0] * phi
        if len(coeffs) != phi:
            raise ValueError(f"expected {phi} coefficients for order {order}, got {len(coeffs)}")
        fr = [_to_fraction(c) for c in coeffs]
        den = 1
        for f in fr:
            den = lcm(den, f.denominator)
        nums = [f.numerator * (den // f.denominator) for f in fr]
        self._set(order, nums, den)

    def _set(self, order, nums, den):
        g = gcd(den, *nums)
        if g == 0:
            nums, den = [0] * len(nums), 1
        elif g != 1:
            nums = [c // g for c in nums]
            den //= g
        self.order = order
        self._num = tuple(nums)
        self._den = den
        self._hash = None

    @classmethod
    def _make(cls, order, nums, den):
        obj = cls.__new__(cls)
        obj._set(order, nums, den)
        return obj

    @classmethod
    def rational(cls, value, order: int = 1) -> "Cyclotomic":
        f = _to_fraction(value)
        nums = [f.numerator] + [0] * (euler_phi(order) - 1)
        return cls._make(order, nums, f.denominator)

    # -- accessors -------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(c, self._den) for c in self._num)

    def key(self) -> tuple:
        """Canonical hashable key, valid for comparisons within one order."""
        return (self.order, self._num, self._den)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self._num[0], self._den)

    def height(self) -> int:
        return max([abs(c) for c in self._num] + [self._den])

    # -- order changes ---------------------------------------------------
    def lift(self, order: int) -> "Cyclotomic":
        """Re-express in Q(zeta_order); order must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        step = order // self.order
        table = _power_table(order)
        out = [0] * euler_phi(order)
        for k, c in enumerate(self._num):
            if c:
                for j, t in enumerate(table[k * step]):
                    if t:
                        out[j] += c * t
        return Cyclotomic._make(order, out, self._den)

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.order == self.order:
                return self, other
            m = lcm(self.order, other.order)
            return self.lift(m), other.lift(m)
        if isinstance(other, (int, Fraction)):
            return self, Cyclotomic.rational(other, self.order)
        return None

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            nums = list(self._num)
            nums[0] += other * self._den
            return Cyclotomic._make(self.order, nums, self._den)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        da, db = a._den, b._den
        nums = [x * db + y * da for x, y in zip(a._num, b._num)]
        return Cyclotomic._make(a.order, nums, da * db)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._make(self.order, [-c for c in self._num], self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return Cyclotomic._make(self.order, [c * other for c in self._num], self._den)
        if isinstance(other, Fraction):
            return Cyclotomic._make(self.order, [c * other.numerator for c in self._num],
                                    self._den * other.denominator)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if b.is_rational():
            return Cyclotomic._make(a.order, [c * b._num[0] for c in a._num], a._den * b._den)
        if a.is_rational():
            return Cyclotomic._make(a.order, [c * a._num[0] for c in b._num], a._den * b._den)
        an, bn = a._num, b._num
        prod = [0] * (len(an) + len(bn) - 1)
        for i, x in enumerate(an):
            if x:
                for j, y in enumerate(bn):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic._make(a.order, _reduce(prod, a.order), a._den * b._den)

    __rmul__ = __mul__

    def galois(self, k: int) -> "Cyclotomic":
        """Apply the automorphism zeta -> zeta^k (k coprime to the order)."""
        n = self.order
        if gcd(k, n) != 1:
            raise ValueError("Galois exponent must be coprime to the order")
        table = _power_table(n)
        out = [0] * euler_phi(n)
        for j, c in enumerate(self._num):
            if c:
                for i, t in enumerate(table[(j * k) % n]):
                    if t:
                        out[i] += c * t
        return Cyclotomic._make(n, out, self._den)

    def conj(self) -> "Cyclotomic":
        return self.galois(-1)

    def norm(self) -> Fraction:
        """Field norm down to Q."""
        prod = self
        for k in _units(self.order)[1:]:
            prod = prod * self.galois(k)
        return prod.to_fraction()

    def inverse(self) -> "Cyclotomic":
        if not self:
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if self.is_rational():
            return Cyclotomic.rational(Fraction(self._den, self._num[0]), self.order)
        others = None
        for k in _units(self.order)[1:]:
            c = self.galois(k)
            others = c if others is None else others * c
        nrm = (self * others).to_fraction()
        return others * (1 / nrm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            return self * (Fraction(1) / other)
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison and hashing -----------------------------------------
    def __bool__(self):
        return any(self._num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        if isinstance(other, Cyclotomic):
            if other.order == self.order:
                return self._num == other._num and self._den == other._den
            a, b = self._coerce(other)
            return a._num == b._num and a._den == b._den
        return NotImplemented

    def normalized_trace(self) -> Fraction:
        w = _trace_weights(self.order)
        return sum((c * wk for c, wk in zip(self._num, w) if c), Fraction(0)) / self._den

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._num[0], self._den))
            else:
                self._hash = hash((self.normalized_trace(), (self * self).normalized_trace()))
        return self._hash

    # -- real/imaginary parts --------------------------------------------
    def real_part(self) -> "Cyclotomic":
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self) -> "Cyclotomic":
        i = root_of_unity(4, 1)
        return (self - self.conj()) * Fraction(1, 2) / i

    # -- numerics --------------------------------------------------------
    def embed(self, digits: int = DEFAULT_DIGITS) -> mpmath.mpc:
        return embed(self, digits)

    def __complex__(self):
        return complex(embed(self, 20))

    def __repr__(self):
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_rational():
            return str(self.to_fraction())
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}*z{self.order}^{k}" if k else str(c))
        return " + ".join(parts)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "Cyclotomic":
        return cls(int(data["order"]), [Fraction(c) for c in data["coeffs"]])


def as_cyclotomic(x, order: int = 1) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    return Cyclotomic.rational(x, order)


def cyc_arith(a: Cyclotomic, b: Cyclotomic, op: str) -> Cyclotomic:
    """Strict same-order field operation; ``op`` is one of add, sub, mul, div."""
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def root_of_unity(n: int, k: int = 1) -> Cyclotomic:
    if n < 1:
        raise ValueError("order must be positive")
    row = _power_table(n)[k % n]
    return Cyclotomic._make(n, list(row), 1)


def conj(c: Cyclotomic) -> Cyclotomic:
    return c.conj()


@lru_cache(maxsize=256)
def _numeric_powers(n: int, prec: int) -> tuple:
    with mpmath.workprec(prec):
        z = mpmath.expjpi(mpmath.mpf(2) / n)
        out = [mpmath.mpc(1)]
        for _ in range(1, euler_phi(n)):
            out.append(out[-1] * z)
        return tuple(out)


def embed(c: Cyclotomic, digits: int = DEFAULT_DIGITS) -> mpmath.mpc:
    """Numeric value under zeta_N = exp(2 pi i / N), accurate to about ``digits`` digits."""
    with mpmath.workdps(digits + 10):
        powers = _numeric_powers(c.order, mpmath.mp.prec)
        total = mpmath.mpc(0)
        for num, p in zip(c._num, powers):
            if num:
                total += num * p
        total = total / c._den
    return total


def _factor(n: int) -> dict:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> Cyclotomic:
    if p == 2:
        return root_of_unity(8, 1) + root_of_unity(8, 7)
    # quadratic Gauss sum: g^2 = (-1)^((p-1)/2) p, with positive imaginary or real part
    g = Cyclotomic(p)
    for a in range(1, p):
        chi = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
        g = g + root_of_unity(p, a) * chi
    if p % 4 == 3:
        g = g * (-root_of_unity(4, 1))
    if mpmath.re(embed(g, 20)) < 0:
        g = -g
    return g


def sqrt_rational(r) -> Cyclotomic:
    """The principal square root of a rational number as a cyclotomic element."""
    r = _to_fraction(r) if not isinstance(r, Cyclotomic) else r.to_fraction()
    if r == 0:
        return Cyclotomic.rational(0)
    result = Cyclotomic.rational(1)
    if r < 0:
        result = root_of_unity(4, 1)
        r = -r
    # sqrt(p/q) = sqrt(p*q)/q
    n, q = r.numerator * r.denominator, r.denominator
    outside = 1
    for p, e in _factor(n).items():
        outside *= p ** (e // 2)
        if e % 2:
            result = result * _sqrt_prime(p)
    return result * Fraction(outside, q)


# -- recognition of numeric values ---------------------------------------

def _real_basis():
    return [(Cyclotomic.rational(1), 1), (sqrt_rational(2), 2), (sqrt_rational(3), 3),
            (sqrt_rational(6), 6)]


def _recognize_real(x, tol, max_den):
    if abs(x) <= tol:
        return Cyclotomic.rational(0)
    basis = _real_basis()
    for elem, sq in basis:
        ratio = x / mpmath.sqrt(sq)
        scale = 10 ** mpmath.mp.dps
        f = Fraction(int(mpmath.nint(ratio * scale)), scale).limit_denominator(max_den)
        if abs(ratio - mpmath.mpf(f.numerator) / f.denominator) <= tol * (1 + abs(ratio)):
            if abs(f.numerator) <= max_den ** 2:
                return elem * f
    vec = [x] + [mpmath.sqrt(sq) for _, sq in basis]
    rel = mpmath.pslq(vec, tol=tol, maxcoeff=max_den, maxsteps=20000)
    if rel is None or rel[0] == 0:
        return None
    val = Cyclotomic.rational(0)
    for c, (elem, _) in zip(rel[1:], basis):
        val = val + elem * Fraction(-c, rel[0])
    return val


def recognize(value, digits: int = DEFAULT_DIGITS, tol=None, max_den: int = 10 ** 6):
    """Find an element of Q(sqrt2, sqrt3, i) matching ``value`` within ``tol``, else None.

    Candidates are tried first as a single term (p/q)*b for b in {1, sqrt2, sqrt3, sqrt6},
    then by an integer-relation search over that basis, separately on the real and
    imaginary parts.
    """
    with mpmath.workdps(digits):
        tol = mpmath.mpf(tol if tol is not None else DEFAULT_TOL)
        value = mpmath.mpc(value)
        re_part = _recognize_real(mpmath.re(value), tol, max_den)
        im_part = _recognize_real(mpmath.im(value), tol, max_den)
        if re_part is None or im_part is None:
            return None
        result = re_part + im_part * root_of_unity(4, 1)
        if abs(embed(result, digits) - value) > tol * (1 + abs(value)) * 10:
            return None
        return result
