"""Reflection group catalog: primitive groups from data files, monomial families, cyclic groups."""

from __future__ import annotations

import ast
import json
import random
import re
from dataclasses import dataclass, field
from math import prod
from pathlib import Path

from .expr import EXACT, Expr, Program, Ring, parse_matrix
from .linalg import CycMatrix, CycVector, hermitian, matrix_order, reflection
from .poly import MultiPoly
from .scalar import Cyclotomic, as_cyclotomic, root_of_unity

CATALOG_DIR = Path(__file__).parent / "catalog"
PRIMITIVE = ("G35", "G28", "G25", "G8", "G5", "G31", "G9", "G10")


class CatalogError(ValueError):
    pass


_ACTIVE = {"dir": CATALOG_DIR}


def set_catalog_dir(path=None) -> None:
    """Point catalog lookups at another directory (None restores the packaged one)."""
    _ACTIVE["dir"] = Path(path) if path else CATALOG_DIR
    _CACHE.clear()


def catalog_dir() -> Path:
    return _ACTIVE["dir"]


def _catalog_path(catalog_dir) -> Path:
    return Path(catalog_dir) if catalog_dir else _ACTIVE["dir"]


class InvariantSet:
    """A list of polynomial functions evaluated together, sharing intermediate definitions."""

    def __init__(self, nvars: int, exprs, program: Program | None = None, names=None):
        self.nvars = nvars
        self.exprs = [Expr(e) if isinstance(e, str) else e for e in exprs]
        self.program = program or Program([])
        self.names = list(names) if names else [f"x{k + 1}" for k in range(len(self.exprs))]
        self._polys = None

    @classmethod
    def from_polys(cls, polys) -> "InvariantSet":
        polys = list(polys)
        obj = cls(polys[0].nvars, [])
        obj._polys = polys
        obj.names = [f"x{k + 1}" for k in range(len(polys))]
        return obj

    def __len__(self):
        return len(self._polys) if self._polys is not None and not self.exprs else len(self.exprs)

    def evaluate(self, values, ring: Ring = EXACT) -> list:
        values = list(values)
        if len(values) != self.nvars:
            raise ValueError("need one value per variable")
        if not self.exprs and self._polys is not None:
            return [p.substitute(values) for p in self._polys]
        env = {f"u{k + 1}": v for k, v in enumerate(values)}
        env = self.program.run(env, ring)
        return [e.eval(env, ring) for e in self.exprs]

    def polys(self) -> list:
        """Exact expansion into MultiPoly (cached)."""
        if self._polys is None:
            variables = [MultiPoly.variable(k, self.nvars) for k in range(self.nvars)]
            out = []
            for v in self.evaluate(variables):
                if not isinstance(v, MultiPoly):
                    v = MultiPoly.constant(v, self.nvars) if v else MultiPoly(self.nvars)
                out.append(v)
            self._polys = out
        return self._polys

    def subset(self, indices) -> "InvariantSet":
        if not self.exprs:
            return InvariantSet.from_polys([self._polys[i] for i in indices])
        return InvariantSet(self.nvars, [self.exprs[i] for i in indices], self.program,
                            [self.names[i] for i in indices])


def as_invariant_set(x) -> InvariantSet:
    if isinstance(x, InvariantSet):
        return x
    return InvariantSet.from_polys(list(x))


@dataclass
class FrameData:
    g: CycMatrix
    zeta: Cyclotomic
    zeta_spec: tuple
    eigenvectors: list


@dataclass
class GroupSpec:
    name: str
    rank: int
    degrees: tuple
    duality: bool
    generators: dict
    roots: list = field(default_factory=list)
    program: Program = field(default_factory=lambda: Program([]))
    sigma: list = field(default_factory=list)
    good: list = field(default_factory=list)
    potential: dict | None = None
    frame_data: FrameData | None = None
    reflection_count: int | None = None
    cataloged_roots: list = field(default_factory=list)
    order: int | None = None
    title: str = ""
    mixed_sigma: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def codegrees(self):
        if not self.duality:
            return None
        return tuple(self.degrees[0] - d for d in self.degrees)

    @property
    def field_order(self) -> int:
        from math import lcm
        n = 1
        for m in self.generators.values():
            n = lcm(n, m.order)
        return n

    def generator_list(self) -> list:
        return list(self.generators.values())

    def expected_order(self) -> int:
        return prod(self.degrees)

    def sigma_set(self) -> InvariantSet:
        return InvariantSet(self.rank, self.sigma, self.program)

    def good_set(self) -> InvariantSet:
        if not self.good:
            raise CatalogError(f"{self.name} has no cataloged good invariants")
        return InvariantSet(self.rank, self.good, self.program)

    def mixed_sigma_set(self) -> InvariantSet:
        return InvariantSet(self.rank, self.mixed_sigma, self.program)

    def element(self, text: str) -> CycMatrix:
        """Evaluate a word in the generators (and g, the frame element) as a matrix."""
        env = dict(self.generators)
        if self.frame_data is not None:
            env["g"] = self.frame_data.g
        return _eval_matrix(text, env)

    def a(self, d: int) -> int:
        return count_divisible(self.degrees, d)

    def b(self, d: int) -> int | None:
        cd = self.codegrees
        return None if cd is None else count_divisible(cd, d)


def count_divisible(values, d: int) -> int:
    return sum(1 for v in values if v % d == 0)


def i_set(degrees, delta: int) -> list:
    """0-based indices alpha with delta | d_alpha."""
    return [k for k, d in enumerate(degrees) if d % delta == 0]


def ic_set(degrees, delta: int) -> list:
    return [k for k, d in enumerate(degrees) if d % delta != 0]


# -- matrix words with reflections -------------------------------------------
def _eval_matrix(text: str, env: dict) -> CycMatrix:

    tree = ast.parse(re.sub(r"\^", "**", text.strip()), mode="eval").body

    def visit(node):
        if isinstance(node, ast.Name):
            if node.id not in env or env[node.id] is None:
                raise CatalogError(f"unknown matrix name {node.id!r}")
            return env[node.id]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "refl":
            vec = [as_cyclotomic(Expr(ast.unparse(e)).eval({})) for e in node.args[0].elts]
            lam = as_cyclotomic(Expr(ast.unparse(node.args[1])).eval({})) if len(node.args) > 1 else -1
            return reflection(CycVector(vec), as_cyclotomic(lam))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
            return visit(node.left) @ visit(node.right)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            return visit(node.left) ** int(ast.literal_eval(node.right) if not isinstance(node.right, ast.UnaryOp)
                                           else -node.right.operand.value)
        raise CatalogError(f"unsupported matrix word {text!r}")

    return visit(tree)


# -- loading -------------------------------------------------------------------
def _vector(entries) -> CycVector:
    return CycVector([as_cyclotomic(Expr(str(e)).eval({})) for e in entries])


def spec_from_dict(data: dict) -> GroupSpec:
    rank = int(data["rank"])
    generators = {}
    roots = []
    for gname, gdata in data["generators"].items():
        if "matrix" in gdata:
            m = parse_matrix(gdata["matrix"])
        else:
            v = _vector(gdata["root"])
            lam = as_cyclotomic(Expr(str(gdata.get("eigenvalue", "-1"))).eval({}))
            m = reflection(v, lam)
            roots.append((v, lam))
        if m.rows != rank or m.cols != rank:
            raise CatalogError(f"generator {gname} has the wrong size")
        generators[gname] = m
    program = Program([(d[0], d[1]) for d in data.get("definitions", [])])
    frame = None
    if "frame" in data:
        fd = data["frame"]
        env = dict(generators)
        g = _eval_matrix(fd["g"], env)
        n_, k_ = fd["zeta"]
        zeta = root_of_unity(int(n_), int(k_))
        vecs = [_vector(v) for v in fd["eigenvectors"]]
        frame = FrameData(g, zeta, (int(n_), int(k_)), vecs)
    cat_roots = [_vector(r) for r in data.get("reflection_lines", [])]
    spec = GroupSpec(
        name=data["name"], rank=rank, degrees=tuple(int(d) for d in data["degrees"]),
        duality=bool(data.get("duality", True)), generators=generators, roots=roots,
        program=program, sigma=[Expr(s) for s in data.get("basic_invariants", [])],
        good=[Expr(s) for s in data.get("good_invariants", [])],
        potential=data.get("potential"), frame_data=frame,
        reflection_count=data.get("reflection_count"), cataloged_roots=cat_roots,
        order=data.get("order"), title=data.get("title", ""),
        mixed_sigma=[Expr(s) for s in data.get("mixed_basic_invariants", [])],
        extra={k: v for k, v in data.items() if k.startswith("x_")},
    )
    validate_spec(spec)
    return spec


def validate_spec(spec: GroupSpec) -> None:
    degs = spec.degrees
    if len(degs) != spec.rank:
        raise CatalogError(f"{spec.name}: degree count differs from rank")
    for name, m in spec.generators.items():
        if not _is_reflection(m):
            raise CatalogError(f"{spec.name}: generator {name} is not a reflection")
    if spec.frame_data is not None:
        fd = spec.frame_data
        if len(fd.eigenvectors) != spec.rank:
            raise CatalogError(f"{spec.name}: need one eigenvector per degree")
        for v, d in zip(fd.eigenvectors, degs):
            if fd.g @ v != v * (fd.zeta ** (1 - d)):
                raise CatalogError(f"{spec.name}: eigenvector for degree {d} fails g q = zeta^(1-d) q")


def _is_reflection(m: CycMatrix) -> bool:
    diff = m - CycMatrix.identity(m.rows)
    if diff.rank() != 1:
        return False
    try:
        matrix_order(m, 64)
    except ValueError:
        return False
    return True


_CACHE: dict = {}


def catalog_names(catalog_dir: Path | None = None) -> list:
    d = _catalog_path(catalog_dir)
    return sorted(p.stem for p in d.glob("G*.json"))


def catalog_group(name: str, catalog_dir: Path | None = None) -> GroupSpec:
    """Load a primitive group by name (e.g. "G8"), or build "mu(d)", "G(m,1,n)", "G(m,m,n)"."""
    name = name.replace(" ", "")
    if name.startswith("mu(") and name.endswith(")"):
        return cyclic_group(int(name[3:-1]))
    fam = re.fullmatch(r"G\((\d+),(\d+),(\d+)\)", name)
    if fam:
        m, p, r = (int(v) for v in fam.groups())
        key = (name, "family")
        if key not in _CACHE:
            if p == 1:
                _CACHE[key] = monomial_group(m, 1, r)
            elif p == m and r >= 2:
                _CACHE[key] = monomial_group(m, m, r - 1)
            else:
                raise CatalogError(f"unsupported monomial group {name}")
        return _CACHE[key]
    d = _catalog_path(catalog_dir)
    key = (name, str(d))
    if key not in _CACHE:
        path = d / f"{name}.json"
        if not path.exists():
            raise CatalogError(f"unknown group {name!r}")
        with open(path) as fh:
            _CACHE[key] = spec_from_dict(json.load(fh))
    return _CACHE[key]


def load_reductions(catalog_dir: Path | None = None) -> list:
    d = _catalog_path(catalog_dir)
    with open(d / "reductions.json") as fh:
        return json.load(fh)["reductions"]


# -- families ------------------------------------------------------------------
def cyclic_group(d: int) -> GroupSpec:
    if d < 2:
        raise CatalogError("mu(d) needs d >= 2")
    z = f"zeta({d},1)"
    return spec_from_dict({
        "name": f"mu({d})", "rank": 1, "degrees": [d], "duality": True,
        "generators": {"r": {"matrix": [[z]]}},
        "basic_invariants": [f"u1^{d}"],
        "good_invariants": [f"u1^{d}/{d}"],
        "frame": {"g": "r", "zeta": [d, 1], "eigenvectors": [["1"]]},
        "order": d,
    })


def _perm_matrix_rows(n, i, j, a="1", b="1"):
    rows = [["1" if r == c else "0" for c in range(n)] for r in range(n)]
    rows[i][i] = rows[j][j] = "0"
    rows[i][j] = a
    rows[j][i] = b
    return rows


def monomial_group(m: int, p: int, n: int) -> GroupSpec:
    """G(m,1,n) for p = 1 (rank n) or G(m,m,n+1) for p = m (rank n + 1)."""
    if p == 1 and m >= 2 and n >= 1:
        return _g_m1n(m, n)
    if p == m and m >= 2 and n >= 1:
        return _g_mmn(m, n)
    raise CatalogError(f"unsupported monomial group parameters ({m},{p},{n})")


def _frame_vectors_m1n(m, n, total):
    """Unnormalized eigenvectors (1, l, ..., l^(n-1), [0]) with l = zeta^(1+(i-1)m)."""
    vecs = []
    for i in range(1, n + 1):
        k = 1 + (i - 1) * m
        vec = [f"zeta({n * m},{(k * j) % (n * m)})" for j in range(n)]
        vecs.append(vec + ["0"] * (total - n))
    return vecs


def _g_m1n(m: int, n: int) -> GroupSpec:
    gens = {}
    for i in range(n - 1):
        gens[f"s{i + 1}"] = {"matrix": _perm_matrix_rows(n, i, i + 1)}
    diag = [["0"] * n for _ in range(n)]
    for r in range(n):
        diag[r][r] = "1"
    diag[0][0] = f"zeta({m},1)"
    gens["t"] = {"matrix": diag}
    N = n * m
    gbar = [["0"] * n for _ in range(n)]
    for r in range(n - 1):
        gbar[r][r + 1] = "1"
    gbar[n - 1][0] = f"zeta({N},{n % N})"
    powers = ",".join(f"u{k + 1}^{m}" for k in range(n))
    sigma = [f"esym({n + 1 - a}, [{powers}])" for a in range(1, n + 1)]
    data = {
        "name": f"G({m},1,{n})", "rank": n, "degrees": [(n + 1 - a) * m for a in range(1, n + 1)],
        "duality": True, "generators": gens, "basic_invariants": sigma,
        "order": prod((n + 1 - a) * m for a in range(1, n + 1)),
    }
    spec = spec_from_dict(data)
    g = parse_matrix(gbar)
    spec.frame_data = FrameData(g, root_of_unity(N, 1), (N, 1),
                                [_vector(v) for v in _frame_vectors_m1n(m, n, n)])
    spec.extra["family"] = ("m1n", m, n)
    validate_spec(spec)
    return spec


def _g_mmn(m: int, n: int) -> GroupSpec:
    r = n + 1
    gens = {}
    for i in range(r - 1):
        gens[f"s{i + 1}"] = {"matrix": _perm_matrix_rows(r, i, i + 1)}
    gens["t"] = {"matrix": _perm_matrix_rows(r, 0, 1, f"zeta({m},{m - 1})", f"zeta({m},1)")}
    N = n * m
    g = [["0"] * r for _ in range(r)]
    for k in range(n - 1):
        g[k][k + 1] = "1"
    g[n - 1][0] = f"zeta({N},{n % N})"
    g[n][n] = f"zeta({N},{(-n) % N})"
    powers = ",".join(f"u{k + 1}^{m}" for k in range(r))
    sigma = [f"esym({n + 1 - a}, [{powers}])" for a in range(1, n + 1)]
    sigma.append("*".join(f"u{k + 1}" for k in range(r)))
    degrees = [(n + 1 - a) * m for a in range(1, n + 1)] + [n + 1]
    data = {
        "name": f"G({m},{m},{r})", "rank": r, "degrees": degrees,
        "duality": True, "generators": gens, "basic_invariants": sigma,
        "order": prod(degrees),
    }
    spec = spec_from_dict(data)
    vecs = _frame_vectors_m1n(m, n, r) + [["0"] * n + ["1"]]
    spec.frame_data = FrameData(parse_matrix(g), root_of_unity(N, 1), (N, 1),
                                [_vector(v) for v in vecs])
    spec.extra["family"] = ("mmn", m, n)
    validate_spec(spec)
    return spec


# -- reflections and regularity ----------------------------------------------
@dataclass
class ReflectionSet:
    entries: list
    method: str

    def lines(self) -> list:
        seen = {}
        for v, _ in self.entries:
            seen.setdefault(v.normalized_line(), v)
        return list(seen.values())

    def __len__(self):
        return len(self.entries)


def _reflection_data(m: CycMatrix):
    """(root, eigenvalue) of a reflection matrix."""
    diff = m - CycMatrix.identity(m.rows)
    col = next(c for c in diff.columns() if not c.is_zero())
    lam = 1 + sum((diff[i, i] for i in range(m.rows)), as_cyclotomic(0))
    return col, lam


def reflections(spec: GroupSpec, cap: int = 5000) -> ReflectionSet:
    """All (line, eigenvalue) pairs of reflections, by conjugation closure of the generators."""
    gens = spec.generator_list()
    inv = [g.inverse() for g in gens]
    start = []
    for m in gens:
        v, lam = _reflection_data(m)
        k = matrix_order(m, 64)
        for j in range(1, k):
            start.append((v, lam ** j))
    for v in spec.cataloged_roots:
        start.append((v, as_cyclotomic(-1)))
    seen = {}
    queue = []
    for v, lam in start:
        key = (v.normalized_line(), lam)
        if key not in seen:
            seen[key] = (v, lam)
            queue.append((v, lam))
    while queue:
        v, lam = queue.pop()
        for h in gens + inv:
            w = h @ v
            key = (w.normalized_line(), lam)
            if key not in seen:
                seen[key] = (w, lam)
                queue.append((w, lam))
                if len(seen) > cap:
                    raise ValueError("reflection closure exceeded cap")
    method = "conjugation-closure" + ("+catalog" if spec.cataloged_roots else "")
    return ReflectionSet(list(seen.values()), method)


def is_regular_vector(q: CycVector, refl: ReflectionSet) -> bool:
    return all(hermitian(q, v) for v in refl.lines())


def random_exact_point(rng: random.Random, n: int, order: int = 4, bound: int = 10 ** 6) -> list:
    """A random point with Gaussian-integer-like cyclotomic coordinates."""
    from .scalar import euler_phi
    return [Cyclotomic(order, [rng.randint(-bound, bound) for _ in range(euler_phi(order))])
            for _ in range(n)]


def is_invariant(p, spec: GroupSpec, trials: int = 2, seed: int = 0, exact_limit: int = 300) -> bool:
    """Invariance under every generator.

    Small polynomials are compared after exact substitution; larger ones (and expression-backed
    invariants) are compared by exact evaluation at random points, where a nonzero polynomial
    of degree d vanishes on a random point from a set of size S with probability at most d/S.
    """
    from .poly import linear_substitute
    if isinstance(p, MultiPoly) and len(p.terms) <= exact_limit:
        return all(linear_substitute(p, s) == p for s in spec.generator_list())
    fs = p if isinstance(p, InvariantSet) else InvariantSet.from_polys([p])
    rng = random.Random(seed)
    for _ in range(trials):
        w = random_exact_point(rng, spec.rank)
        base = fs.evaluate(w)
        for s in spec.generator_list():
            moved = fs.evaluate(list((s @ CycVector(w)).entries))
            if any(as_cyclotomic(a) != as_cyclotomic(b) for a, b in zip(base, moved)):
                return False
    return True


def generated_order(mats, cap: int = 5000) -> int | None:
    """Order of the group generated by ``mats`` by closure; None when it exceeds ``cap``."""
    mats = list(mats)
    ident = CycMatrix.identity(mats[0].rows)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in mats:
                y = x @ s
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        return None
        frontier = nxt
    return len(seen)


def group_order_check(spec: GroupSpec, cap: int = 5000) -> int | None:
    """Order of the generated group by closure; None when it exceeds ``cap``."""
    order = generated_order(spec.generator_list(), cap)
    if order is None:
        return None
    if order != spec.expected_order():
        raise ValueError(f"{spec.name}: group order {order} differs from product of degrees "
                         f"{spec.expected_order()}")
    return order


def frame_element_order(spec: GroupSpec) -> int:
    return matrix_order(spec.frame_data.g, 1000)
