from itertools import product

import pytest
from hypothesis import given, strategies as st

from goodbasis.goodness import build_frame
from goodbasis.groups import catalog_group, monomial_group
from goodbasis.linalg import CycMatrix
from goodbasis.poly import (
    MultiPoly,
    NotInSubring,
    compose_invariants,
    decompose_in_generators,
    derivative,
    evaluate,
    linear_substitute,
    weighted_monomials,
)
from goodbasis.reduction import make_context, pullback
from goodbasis.scalar import Cyclotomic, root_of_unity, sqrt_rational

I = root_of_unity(4, 1)


def brute_force(degrees, target, min_total=0):
    ranges = [range(target // d + 1) for d in degrees]
    return {a for a in product(*ranges)
            if sum(x * d for x, d in zip(a, degrees)) == target and sum(a) >= min_total}


@given(st.lists(st.integers(1, 12), min_size=1, max_size=6), st.integers(0, 40), st.integers(0, 3))
def test_weighted_monomials_match_brute_force(degrees, target, min_total):
    got = weighted_monomials(degrees, target, min_total).entries
    assert len(got) == len(set(got))
    assert set(got) == brute_force(degrees, target, min_total)


def test_weighted_monomial_examples():
    assert set(weighted_monomials((12, 8), 24)) == {(2, 0), (0, 3)}
    assert set(weighted_monomials((12, 9, 8, 6, 5, 2), 2, 2)) == set()
    assert set(weighted_monomials((24, 8), 24, 2)) == {(0, 3)}


def u(n):
    return [MultiPoly.variable(k, n) for k in range(n)]


def cyc(order):
    return st.lists(st.integers(-4, 4), min_size=2, max_size=2).map(
        lambda cs: Cyclotomic(order, cs) if order in (3, 4, 6) else Cyclotomic.rational(cs[0]))


@st.composite
def polys(draw, nvars=3, max_deg=4):
    nterms = draw(st.integers(0, 5))
    terms = {}
    for _ in range(nterms):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        terms[e] = draw(cyc(4))
    return MultiPoly(nvars, terms)


@given(polys(), polys())
def test_ring_laws(p, q):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) * p == p * p + q * p
    assert (p - p).is_zero()


@given(polys(), st.integers(0, 2), st.integers(0, 2))
def test_mixed_partials_commute(p, i, j):
    assert derivative(derivative(p, i), j) == derivative(derivative(p, j), i)


@given(polys(), polys())
def test_leibniz_rule(p, q):
    assert derivative(p * q, 1) == derivative(p, 1) * q + p * derivative(q, 1)


@given(polys(), st.lists(cyc(4), min_size=9, max_size=9), st.lists(cyc(4), min_size=3, max_size=3))
def test_linear_substitution_agrees_with_evaluation(p, entries, point):
    A = CycMatrix.from_rows([entries[0:3], entries[3:6], entries[6:9]])
    image = A @ CycMatrix.from_columns([point])
    assert evaluate(linear_substitute(p, A), point) == evaluate(p, [image[i, 0] for i in range(3)])


def test_derivative_and_evaluation_examples():
    tO = catalog_group("G8").sigma_set().polys()[0]
    x1 = MultiPoly.variable(0, 2)
    assert derivative(tO, 1, 4).coefficient((8, 0)) == -33 * 24
    assert (derivative(tO, 1, 4) - (x1 ** 8) * (-33 * 24)).coefficient((8, 0)) == 0
    a, b = u(2)
    assert evaluate(a * b, [I, I]) == -1


def test_power_of_affine_form_matches_repeated_product():
    a, b, c = u(3)
    p = a * 2 + b * I - c + 3
    q = MultiPoly.constant(1, 3)
    for _ in range(5):
        q = q * p
    assert p ** 5 == q


def test_invariance_examples():
    a, b = u(2)
    r3 = catalog_group("G9").generators["r3"]
    p = a * a + b * b
    assert linear_substitute(p, r3) == p
    tO = catalog_group("G8").sigma_set().polys()[0]
    assert linear_substitute(tO, CycMatrix.diagonal([1, I])) == tO


def test_compose_decompose_round_trip():
    sigma = monomial_group(2, 1, 2).sigma_set().polys()
    degrees = (4, 2)
    coeffs = {(1, 0): Cyclotomic.rational(3), (0, 2): I}
    p = compose_invariants(coeffs, sigma)
    assert decompose_in_generators(p, sigma, degrees) == coeffs
    a, b = u(2)
    assert decompose_in_generators(a * a + b * b, sigma, degrees) == {(0, 1): 1}
    with pytest.raises(NotInSubring):
        decompose_in_generators(a, sigma, degrees)


def test_restricted_f4_invariant_decomposes_over_octahedral_invariants():
    # x1 of the rank-4 catalog restricted to the delta = 4 eigenspace
    from goodbasis.reduction import identification_map, find_reduction
    spec = catalog_group("G28")
    ctx = make_context(build_frame(spec), 4)
    child = build_frame(catalog_group("G8"))
    entry = find_reduction("G28", 4, "G8")
    ident = identification_map(ctx, child, entry["basis_map"])
    x1 = spec.good_set().polys()[0]
    restricted = pullback([x1], ident.matrix)[0] / ident.degree_scale(12)
    sigma = catalog_group("G8").sigma_set().polys()
    assert decompose_in_generators(restricted, sigma, (12, 8)) == {(1, 0): sqrt_rational(3) / 16}


def test_json_round_trip():
    a, b = u(2)
    p = a ** 3 * I - b * sqrt_rational(2) + 1
    assert MultiPoly.from_json(p.to_json()) == p
