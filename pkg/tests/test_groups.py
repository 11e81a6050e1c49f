import pytest

from goodbasis.groups import (
    CatalogError,
    catalog_group,
    catalog_names,
    cyclic_group,
    generated_order,
    group_order_check,
    i_set,
    ic_set,
    is_invariant,
    is_regular_vector,
    load_reductions,
    monomial_group,
    reflections,
)
from goodbasis.linalg import CycMatrix, CycVector, unit_vector
from goodbasis.poly import MultiPoly
from goodbasis.scalar import root_of_unity

PRIMITIVE = ["G35", "G28", "G25", "G8", "G5", "G31", "G9", "G10"]
DUALITY = ["G35", "G28", "G25", "G8", "G5", "G9", "G10"]


def test_catalog_contents():
    assert sorted(catalog_names()) == sorted(PRIMITIVE)
    assert list(catalog_group("G8").generators) == ["r4", "r4p"]
    assert len(catalog_group("G31").generators) == 5
    assert len(load_reductions()) == 8


def test_unknown_group_raises():
    with pytest.raises(CatalogError):
        catalog_group("G99")


def test_cyclic_group():
    spec = cyclic_group(12)
    assert spec.degrees == (12,)
    assert group_order_check(spec) == 12


@pytest.mark.parametrize("name,count", [("G35", 36), ("G31", 60)])
def test_reflection_counts(name, count):
    assert len(reflections(catalog_group(name))) == count


def test_monomial_reflection_count():
    assert len(reflections(monomial_group(2, 1, 2))) == 4


@pytest.mark.parametrize("name", ["G5", "G8", "G9", "G10", "G25", "G28"])
def test_group_orders_match_degree_products(name):
    spec = catalog_group(name)
    assert group_order_check(spec, cap=2000) == spec.expected_order()


@pytest.mark.parametrize("m,p,n", [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2), (3, 3, 2), (4, 1, 2)])
def test_monomial_group_orders(m, p, n):
    spec = monomial_group(m, p, n)
    assert group_order_check(spec, cap=2000) == spec.expected_order()


def test_order_cap():
    assert generated_order(catalog_group("G35").generator_list(), cap=5000) is None


@pytest.mark.parametrize("name", PRIMITIVE)
def test_frame_eigen_laws(name):
    spec = catalog_group(name)
    fd = spec.frame_data
    for v, d in zip(fd.eigenvectors, spec.degrees):
        assert fd.g @ v == v * fd.zeta ** (1 - d)


@pytest.mark.parametrize("name", PRIMITIVE)
def test_cataloged_q_is_regular(name):
    spec = catalog_group(name)
    assert is_regular_vector(spec.frame_data.eigenvectors[0], reflections(spec))


def test_regularity_examples():
    spec = monomial_group(2, 1, 2)
    refl = reflections(spec)
    assert is_regular_vector(spec.frame_data.eigenvectors[0], refl)
    assert not is_regular_vector(unit_vector(2, 0), refl)


def test_invariance_examples():
    spec = monomial_group(2, 1, 2)
    assert is_invariant(spec.sigma_set().polys()[1], spec)
    assert not is_invariant(MultiPoly.variable(0, 2), catalog_group("G8"))
    e6 = catalog_group("G35")
    assert is_invariant(e6.sigma_set().subset([0]), e6)


@pytest.mark.parametrize("name", DUALITY)
def test_regular_number_counts(name):
    spec = catalog_group(name)
    d1 = spec.degrees[0]
    assert spec.a(d1) == spec.b(d1)


def test_non_duality_group_has_no_codegrees():
    spec = catalog_group("G31")
    assert not spec.duality
    assert spec.codegrees is None


def test_g212_data():
    spec = monomial_group(2, 1, 2)
    assert spec.degrees == (4, 2)
    assert spec.frame_data.g == CycMatrix.from_rows([[0, 1], [-1, 0]])
    u1, u2 = (MultiPoly.variable(k, 2) for k in range(2))
    s1, s2 = spec.sigma_set().polys()
    assert s1 == u1 ** 2 * u2 ** 2
    assert s2 == u1 ** 2 + u2 ** 2


def test_gmmn_data():
    assert monomial_group(3, 3, 2).degrees == (6, 3, 3)
    spec = monomial_group(2, 2, 2)
    u = [MultiPoly.variable(k, 3) for k in range(3)]
    assert spec.sigma_set().polys()[2] == u[0] * u[1] * u[2]
    assert catalog_group("G(2,2,3)").degrees == (4, 2, 3)
    assert catalog_group("G(4,1,2)").degrees == (8, 4)


def test_g212_frame_eigenvalues():
    spec = monomial_group(2, 1, 2)
    assert spec.frame_data.zeta == root_of_unity(4, 1)
    for v, d in zip(spec.frame_data.eigenvectors, spec.degrees):
        assert spec.frame_data.g @ v == v * root_of_unity(4, 1) ** (1 - d)


def test_index_sets():
    e6 = (12, 9, 8, 6, 5, 2)
    assert i_set(e6, 2) == [0, 2, 3, 5]
    assert ic_set(e6, 2) == [1, 4]
    assert i_set(e6, 3) == [0, 1, 3]
    assert i_set((24, 20, 12, 8), 8) == [0, 3]
    assert i_set((12, 8, 6, 2), 1) == [0, 1, 2, 3]


def test_word_evaluation():
    spec = catalog_group("G8")
    r4 = spec.generators["r4"]
    assert spec.element("r4^2") == r4 @ r4
    assert spec.element("g") == spec.frame_data.g
    assert spec.element("r4*r4p") == r4 @ spec.generators["r4p"]
    assert spec.element("r4") @ CycVector([1, 1]) == CycVector([1, root_of_unity(4, 1)])


def test_cyclic_catalog_name():
    spec = catalog_group("mu(12)")
    assert spec.rank == 1
    assert spec.degrees == (12,)
