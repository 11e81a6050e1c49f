"""Exact vectors and matrices over cyclotomic fields."""

from __future__ import annotations

from math import lcm

import mpmath

from .scalar import Cyclotomic, as_cyclotomic, embed


def _common_order(values) -> int:
    order = 1
    for v in values:
        order = lcm(order, v.order)
    return order


def _normalize(values):
    values = [as_cyclotomic(v) for v in values]
    order = _common_order(values)
    return tuple(v.lift(order) for v in values)


class CycVector:
    __slots__ = ("entries",)

    def __init__(self, entries):
        entries = _normalize(entries)
        if not entries:
            raise ValueError("vector must have dimension >= 1")
        self.entries = entries

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return self.entries[0].order

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __add__(self, other):
        return CycVector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return CycVector([a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return CycVector([-a for a in self.entries])

    def __mul__(self, c):
        return CycVector([a * c for a in self.entries])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CycVector):
            return NotImplemented
        return self.dim == other.dim and all(a == b for a, b in zip(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def conj(self) -> "CycVector":
        return CycVector([a.conj() for a in self.entries])

    def normalized_line(self) -> "CycVector":
        """Scale so that the first nonzero entry is 1 (a canonical line representative)."""
        for a in self.entries:
            if a:
                inv = a.inverse()
                return CycVector([b * inv for b in self.entries])
        raise ValueError("zero vector has no line")

    def embed(self, digits: int):
        return [embed(a, digits) for a in self.entries]

    def to_json(self):
        return [a.to_json() for a in self.entries]

    def __repr__(self):
        return f"CycVector([{', '.join(str(a) for a in self.entries)}])"


def unit_vector(n: int, i: int) -> CycVector:
    return CycVector([1 if j == i else 0 for j in range(n)])


class CycMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = _normalize(entries)
        if len(entries) != rows * cols:
            raise ValueError("entries length must equal rows*cols")
        self.rows, self.cols, self.entries = rows, cols, entries

    @classmethod
    def from_rows(cls, rows) -> "CycMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, columns) -> "CycMatrix":
        columns = [list(c) for c in columns]
        return cls.from_rows([[c[i] for c in columns] for i in range(len(columns[0]))])

    @classmethod
    def identity(cls, n: int) -> "CycMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def diagonal(cls, values) -> "CycMatrix":
        values = list(values)
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @property
    def order(self) -> int:
        return self.entries[0].order

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j) -> CycVector:
        return CycVector([self.entries[i * self.cols + j] for i in range(self.rows)])

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __matmul__(self, other):
        if isinstance(other, CycVector):
            if other.dim != self.cols:
                raise ValueError("dimension mismatch")
            out = []
            for i in range(self.rows):
                acc = Cyclotomic(self.order)
                for a, b in zip(self.row(i), other.entries):
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
            return CycVector(out)
        if isinstance(other, CycMatrix):
            if other.rows != self.cols:
                raise ValueError("dimension mismatch")
            cols = [other.column(j).entries for j in range(other.cols)]
            out = []
            for i in range(self.rows):
                r = self.row(i)
                for c in cols:
                    acc = None
                    for a, b in zip(r, c):
                        if a and b:
                            acc = a * b if acc is None else acc + a * b
                    out.append(acc if acc is not None else Cyclotomic(self.order))
            return CycMatrix(self.rows, other.cols, out)
        return NotImplemented

    def __mul__(self, c):
        return CycMatrix(self.rows, self.cols, [a * c for a in self.entries])

    __rmul__ = __mul__

    def __add__(self, other):
        return CycMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return CycMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return CycMatrix(self.rows, self.cols, [-a for a in self.entries])

    def __pow__(self, k: int):
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = CycMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            a == b for a, b in zip(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries)

    def key(self) -> tuple:
        """Hashable canonical key for matrices sharing one cyclotomic order."""
        return tuple(a.key() for a in self.entries)

    def lift(self, order: int) -> "CycMatrix":
        return CycMatrix(self.rows, self.cols, [a.lift(order) for a in self.entries])

    def transpose(self) -> "CycMatrix":
        return CycMatrix.from_rows([[self[i, j] for i in range(self.rows)] for j in range(self.cols)])

    def conj_transpose(self) -> "CycMatrix":
        return CycMatrix.from_rows([[self[i, j].conj() for i in range(self.rows)]
                                    for j in range(self.cols)])

    def is_identity(self) -> bool:
        return self.is_square() and all(
            (a == 1) if i % (self.cols + 1) == 0 else (not a) for i, a in enumerate(self.entries))

    def inverse(self) -> "CycMatrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = [list(self.row(i)) + [Cyclotomic.rational(1 if i == j else 0) for j in range(n)]
               for i in range(n)]
        red, pivots = _row_echelon(aug, n)
        if len(pivots) < n:
            raise ZeroDivisionError("matrix is singular")
        return CycMatrix.from_rows([r[n:] for r in red[:n]])

    def rank(self) -> int:
        return len(_row_echelon(self.to_rows(), self.cols)[1])

    def embed(self, digits: int):
        with mpmath.workdps(digits + 10):
            return mpmath.matrix([[embed(self[i, j], digits) for j in range(self.cols)]
                                  for i in range(self.rows)])

    def to_json(self):
        return [[a.to_json() for a in self.row(i)] for i in range(self.rows)]

    def __repr__(self):
        return "CycMatrix(" + "; ".join(", ".join(str(a) for a in self.row(i))
                                        for i in range(self.rows)) + ")"


def _row_echelon(rows, ncols):
    """Reduced row echelon form over the first ``ncols`` columns.

    Elimination is fraction-free in the Bareiss sense: each step combines rows with
    pivot products and divides by the previous pivot, which keeps entry heights
    bounded; rows are normalized only at the end.
    """
    rows = [[as_cyclotomic(x) for x in r] for r in rows]
    m = len(rows)
    pivots = []
    prev = Cyclotomic.rational(1)
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, m) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        prev_inv = prev.inverse()
        for i in range(m):
            if i == r:
                continue
            f = rows[i][c]
            if not f and i > r:
                # still scale to keep the Bareiss invariant for rows below the pivot
                rows[i] = [x * piv * prev_inv for x in rows[i]]
                continue
            if not f:
                continue
            rows[i] = [(x * piv - f * y) * prev_inv for x, y in zip(rows[i], rows[r])]
        prev = piv
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i, c in enumerate(pivots):
        inv = rows[i][c].inverse()
        rows[i] = [x * inv for x in rows[i]]
    return rows, pivots


def kernel(M: CycMatrix) -> list:
    """Exact basis of the null space of M."""
    red, pivots = _row_echelon(M.to_rows(), M.cols)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Cyclotomic.rational(0)] * M.cols
        v[f] = Cyclotomic.rational(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        basis.append(CycVector(v))
    return basis


def solve(A: CycMatrix, b) -> CycVector:
    """A solution x of A x = b; raises ValueError when the system is inconsistent."""
    b = list(b)
    aug = [list(A.row(i)) + [b[i]] for i in range(A.rows)]
    red, pivots = _row_echelon(aug, A.cols)
    for i in range(len(pivots), A.rows):
        if red[i][A.cols]:
            raise ValueError("inconsistent linear system")
    x = [Cyclotomic.rational(0)] * A.cols
    for i, c in enumerate(pivots):
        x[c] = red[i][A.cols]
    return CycVector(x)


def reflection(v: CycVector, lam) -> CycMatrix:
    """s(v, lam): w -> w - (1 - lam) (w, v)/(v, v) v."""
    lam = as_cyclotomic(lam)
    if v.is_zero():
        raise ValueError("zero root vector")
    if lam == 1:
        raise ValueError("eigenvalue of a reflection must differ from 1")
    vv = hermitian(v, v)
    factor = (1 - lam) / vv
    n = v.dim
    vbar = [a.conj() for a in v.entries]
    return CycMatrix(n, n, [(1 if i == j else 0) - factor * v[i] * vbar[j]
                            for i in range(n) for j in range(n)])


def hermitian(v: CycVector, w: CycVector):
    """(v, w) = sum v_i conj(w_i)."""
    if v.dim != w.dim:
        raise ValueError("dimension mismatch")
    acc = Cyclotomic.rational(0)
    for a, b in zip(v.entries, w.entries):
        if a and b:
            acc = acc + a * b.conj()
    return acc


def eigenspace(M: CycMatrix, lam) -> list:
    if not M.is_square():
        raise ValueError("eigenspace of a non-square matrix")
    return kernel(M - CycMatrix.identity(M.rows) * as_cyclotomic(lam))


def matrix_order(M: CycMatrix, cap: int = 1000) -> int:
    if not M.is_square():
        raise ValueError("order of a non-square matrix")
    P = M
    for k in range(1, cap + 1):
        if P.is_identity():
            return k
        P = P @ M
    raise ValueError(f"matrix order exceeds cap {cap}")


def in_span(vectors, v: CycVector) -> bool:
    A = CycMatrix.from_columns([u.entries for u in vectors])
    try:
        solve(A, v.entries)
    except ValueError:
        return False
    return True


def coordinates(vectors, v: CycVector) -> CycVector:
    """Coefficients of v in the basis ``vectors`` (raises if v is outside their span)."""
    A = CycMatrix.from_columns([u.entries for u in vectors])
    return solve(A, v.entries)
