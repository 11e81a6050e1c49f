from fractions import Fraction

import pytest

from goodbasis.goodness import build_frame
from goodbasis.groups import catalog_group
from goodbasis.poly import MultiPoly
from goodbasis.potential import (
    associativity_check,
    catalog_potential,
    parse_x_poly,
    potential_vector_field,
    structure_constants,
    unit_property,
    verify_potential_function,
)
from goodbasis.scalar import sqrt_rational

DUALITY = ["G35", "G28", "G25", "G8", "G5", "G9", "G10"]
SMALL = ["G28", "G25", "G8", "G5", "G9", "G10", "G31"]


def computed(name):
    spec = catalog_group(name)
    return potential_vector_field(spec.good_set(), build_frame(spec))


@pytest.mark.parametrize("name", SMALL)
def test_computed_fields_match_catalog(name):
    P = computed(name)
    assert P.exact
    expected, _, _ = catalog_potential(catalog_group(name))
    assert P.components == expected.components


def test_octahedral_field_coefficients():
    P = computed("G8")
    assert P.components[0].coefficient((2, 0)) == Fraction(1, 2)
    assert P.components[0].coefficient((0, 3)) == 1 / (3 * sqrt_rational(2))
    assert P.components[1] == parse_x_poly("x1*x2", 2)


def test_tetrahedral_field():
    P = computed("G5")
    assert P.components[0] == parse_x_poly("x1^2/2 - x2^4/4", 2)


def test_non_duality_third_component():
    P = computed("G31")
    assert not P.duality
    want = parse_x_poly("x1*x3 + x3^3/9 - x2*x4^2/sqrt(2) - 3/sqrt(2)*x3*x4^3", 4)
    assert P.components[2] == want


@pytest.mark.parametrize("name", ["G35", "G28"])
def test_potential_function_generates_field(name):
    spec = catalog_group(name)
    P = potential_vector_field(spec.good_set(), build_frame(spec))
    _, F, pairing = catalog_potential(spec)
    assert verify_potential_function(F, P, pairing)
    n = spec.rank
    nudged = F + MultiPoly.variable(0, n) ** 2 * MultiPoly.variable(n - 1, n)
    assert not verify_potential_function(nudged, P, pairing)


@pytest.mark.parametrize("name", DUALITY)
def test_duality_potentials_are_associative(name):
    P, _, _ = catalog_potential(catalog_group(name))
    assert associativity_check(P).associative
    assert unit_property(P)


def test_non_duality_potential_is_not_associative():
    P, _, _ = catalog_potential(catalog_group("G31"))
    res = associativity_check(P)
    assert not res.associative
    assert res.to_json()["counterexample"] == [2, 2, 3, 1]
    assert res.difference


@pytest.mark.parametrize("name", DUALITY + ["G31"])
def test_structure_constants_are_symmetric(name):
    P, _, _ = catalog_potential(catalog_group(name))
    C = structure_constants(P)
    n = P.rank
    for a in range(n):
        for b in range(n):
            assert C[a][b] == C[b][a]


@pytest.mark.parametrize("name", DUALITY + ["G31"])
def test_fields_are_weighted_homogeneous(name):
    P, _, _ = catalog_potential(catalog_group(name))
    assert P.is_weighted_homogeneous()

