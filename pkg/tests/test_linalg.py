import pytest
from hypothesis import given, strategies as st

from goodbasis.groups import catalog_group
from goodbasis.linalg import (
    CycMatrix,
    CycVector,
    coordinates,
    eigenspace,
    hermitian,
    in_span,
    kernel,
    matrix_order,
    reflection,
    unit_vector,
)
from goodbasis.scalar import Cyclotomic, root_of_unity, sqrt_rational

I = root_of_unity(4, 1)
OMEGA = root_of_unity(3, 1)


def proportional(u, v):
    return CycMatrix.from_columns([u.entries, v.entries]).rank() == 1


def test_reflection_examples():
    assert reflection(unit_vector(3, 0), -1) == CycMatrix.diagonal([-1, 1, 1])
    r = reflection(unit_vector(2, 1), I)
    assert r == CycMatrix.diagonal([1, I])
    assert r == catalog_group("G8").generators["r4"]
    m = reflection(CycVector([1, 0, 0]), OMEGA)
    assert m @ m @ m == CycMatrix.identity(3)
    assert matrix_order(m) == 3


def test_reflection_rejects_degenerate_input():
    with pytest.raises(ValueError):
        reflection(CycVector([0, 0]), -1)
    with pytest.raises(ValueError):
        reflection(CycVector([1, 0]), 1)


small = st.integers(min_value=-3, max_value=3)


@given(st.lists(small, min_size=3, max_size=3).filter(any), st.sampled_from([(2, 1), (3, 1), (4, 1), (6, 1)]))
def test_reflection_structure(entries, lam_spec):
    v = CycVector([Cyclotomic.rational(e) + I * (e % 2) for e in entries])
    lam = root_of_unity(*lam_spec)
    r = reflection(v, lam)
    assert r @ v == v * lam
    assert matrix_order(r) == lam_spec[0]
    for w in kernel(CycMatrix.from_rows([v.conj().entries])):
        assert r @ w == w


def test_kernel_is_independent_and_annihilated():
    M = CycMatrix.from_rows([[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, I, 0]])
    ker = kernel(M)
    assert len(ker) == 2
    assert CycMatrix.from_columns([v.entries for v in ker]).rank() == 2
    for v in ker:
        assert (M @ v).is_zero()


def test_identity_eigenspace_is_everything():
    assert len(eigenspace(CycMatrix.identity(4), 1)) == 4


def test_g5_frame_eigenspace():
    g = catalog_group("G5").frame_data.g
    space = eigenspace(g, root_of_unity(12, 1))
    assert len(space) == 1
    assert proportional(space[0], CycVector([1, 1]))


def test_g28_kernel_is_q():
    spec = catalog_group("G28")
    g = spec.frame_data.g
    space = eigenspace(g, root_of_unity(12, 1))
    assert len(space) == 1
    assert proportional(space[0], spec.frame_data.eigenvectors[0])


def test_g31_square_eigenspace_dimension():
    g = catalog_group("G31").frame_data.g
    assert len(eigenspace(g @ g, root_of_unity(24, 2))) == 2


def test_matrix_orders():
    assert matrix_order(catalog_group("G35").frame_data.g) == 12
    assert matrix_order(CycMatrix.identity(3)) == 1
    assert matrix_order(catalog_group("G8").generators["r4"]) == 4
    with pytest.raises(ValueError):
        matrix_order(CycMatrix.diagonal([2, 1]), cap=50)


def test_hermitian_form():
    v = CycVector([1, I])
    assert hermitian(v, v) == 2
    assert hermitian(CycVector([1, 1]), CycVector([1, -1])) == 0
    w = CycVector([sqrt_rational(2), OMEGA])
    assert hermitian(w, v) == hermitian(v, w).conj()


def test_inverse_and_span():
    M = CycMatrix.from_rows([[1, I], [OMEGA, 2]])
    assert (M @ M.inverse()).is_identity()
    basis = [CycVector([1, 0, 1]), CycVector([0, 1, 1])]
    assert in_span(basis, CycVector([2, I, 2 + I]))
    assert not in_span(basis, CycVector([0, 0, 1]))
    assert coordinates(basis, CycVector([2, I, 2 + I])) == CycVector([2, I])
