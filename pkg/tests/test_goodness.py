from fractions import Fraction

import mpmath
import pytest
import sympy

from goodbasis.goodness import (
    GoodnessError,
    build_frame,
    check_goodness,
    numeric_check,
    rescale_good_basis,
    solve_good_basis,
)
from goodbasis.groups import InvariantSet, catalog_group, monomial_group
from goodbasis.scalar import root_of_unity, sqrt_rational

PRIMITIVE = ["G35", "G28", "G25", "G8", "G5", "G31", "G9", "G10"]


@pytest.mark.parametrize("name", PRIMITIVE)
def test_cataloged_good_sets_pass(name):
    spec = catalog_group(name)
    report = check_goodness(spec.good_set(), build_frame(spec))
    assert report.good
    assert report.compatible
    assert report.jacobian_residual <= mpmath.mpf("1e-40")


def test_degree_two_invariant_has_no_conditions():
    report = check_goodness(catalog_group("G35").good_set(), build_frame(catalog_group("G35")))
    assert not [c for c in report.conditions if c.alpha == 5]


def test_perturbed_coefficient_fails_at_expected_index():
    spec = catalog_group("G9")
    broken = InvariantSet(spec.rank, ["9/128*(tO^2 - 12/16*hO^3)", spec.good[1]], spec.program)
    report = check_goodness(broken, build_frame(spec))
    assert not report.good
    assert [(c.alpha, c.multi_index) for c in report.failures()] == [(0, (0, 3))]


def test_non_invariant_input_is_rejected():
    spec = catalog_group("G8")
    with pytest.raises(GoodnessError):
        check_goodness(InvariantSet(2, ["u1^12", "hO"], spec.program), build_frame(spec))


def test_inhomogeneous_input_is_rejected():
    spec = catalog_group("G8")
    with pytest.raises(GoodnessError):
        check_goodness(InvariantSet(2, ["tO + hO", "hO"], spec.program), build_frame(spec))


def test_frame_eigenvalues():
    f8 = build_frame(catalog_group("G8"))
    assert f8.eigenvalue(0) == root_of_unity(12, 1)
    assert f8.eigenvalue(1) == root_of_unity(12, 5)
    f212 = build_frame(monomial_group(2, 1, 2))
    assert f212.eigenvalue(0) == root_of_unity(4, 1)
    assert f212.eigenvalue(1) == root_of_unity(4, 3)


def test_solver_octahedral_coefficients():
    spec = catalog_group("G8")
    res = solve_good_basis(spec, build_frame(spec))
    assert res.exact
    assert res.invariants.coeffs == [{(1, 0): sqrt_rational(3) / 16},
                                     {(0, 1): Fraction(3, 8) / sqrt_rational(2)}]


def test_solver_g9_sign():
    spec = catalog_group("G9")
    res = solve_good_basis(spec, build_frame(spec))
    assert res.invariants.coeffs[1] == {(0, 1): Fraction(-3, 8) / sqrt_rational(2)}
    assert res.invariants.coeffs[0] == {(1, 0): Fraction(9, 128), (0, 3): Fraction(-99, 2048)}


def sympy_good_basis_g212():
    """Independent oracle: solve the conditions for x1 = a s1 + b s2^2, x2 = c s2 by hand."""
    a, b, c, t1, t2 = sympy.symbols("a b c t1 t2")
    e1 = sympy.Matrix([1, sympy.I]) / sympy.sqrt(2)
    e2 = sympy.Matrix([1, -sympy.I]) / sympy.sqrt(2)
    u = e1 + t1 * e1 + t2 * e2
    s1 = u[0] ** 2 * u[1] ** 2
    s2 = u[0] ** 2 + u[1] ** 2
    x1 = a * s1 + b * s2 ** 2
    x2 = c * s2
    at0 = {t1: 0, t2: 0}
    eqs = [
        sympy.diff(x1, t2, 2).subs(at0),
        sympy.diff(x1, t1).subs(at0) - 1,
        sympy.diff(x2, t2).subs(at0) - 1,
    ]
    sol = sympy.solve(eqs, [a, b, c], dict=True)
    assert len(sol) == 1
    return {k: complex(sympy.N(v, 30)) for k, v in sol[0].items()}, (a, b, c)


def test_solver_matches_independent_oracle():
    oracle, (a, b, c) = sympy_good_basis_g212()
    spec = monomial_group(2, 1, 2)
    res = solve_good_basis(spec, build_frame(spec))
    got = res.invariants.coeffs
    assert abs(complex(got[0].get((1, 0), 0)) - oracle[a]) < 1e-12
    assert abs(complex(got[0].get((0, 2), 0)) - oracle[b]) < 1e-12
    assert abs(complex(got[1].get((0, 1), 0)) - oracle[c]) < 1e-12


@pytest.mark.parametrize("name", ["G8", "G9", "G10", "G5", "G25"])
def test_solver_from_mixed_basis_agrees(name):
    spec = catalog_group(name)
    frame = build_frame(spec)
    base = solve_good_basis(spec, frame).invariants
    mixed = solve_good_basis(spec, frame, sigma=spec.mixed_sigma_set()).invariants
    assert base.polys() == mixed.polys()
    assert base.polys() == spec.good_set().polys()


@pytest.mark.parametrize("name", ["G8", "G25", "G28"])
def test_numeric_path_agrees_with_exact_path(name):
    spec = catalog_group(name)
    digits = 50
    worst, J = numeric_check(spec.good_set(), build_frame(spec), digits)
    assert worst < mpmath.mpf(10) ** (20 - digits)
    n = spec.rank
    assert max(abs(J[i, j] - (1 if i == j else 0)) for i in range(n) for j in range(n)) < mpmath.mpf(10) ** (20 - digits)


def test_numeric_path_on_solver_output():
    spec = monomial_group(2, 1, 3)
    frame = build_frame(spec)
    res = solve_good_basis(spec, frame)
    worst, J = numeric_check(res.invariants, frame, 60)
    assert worst < mpmath.mpf(10) ** -40
    assert check_goodness(res.invariants, frame).verdict


def test_numeric_path_detects_perturbation():
    spec = catalog_group("G9")
    broken = InvariantSet(spec.rank, ["9/128*(tO^2 - 12/16*hO^3)", spec.good[1]], spec.program)
    worst, _ = numeric_check(broken, build_frame(spec), 50)
    assert worst > mpmath.mpf("1e-10")


def test_rescaling_scale_factors():
    # invariant factor a_1^(1-d) / a_alpha for the E6 and F4 basis maps
    e6 = (12, 9, 8, 6, 5, 2)
    one = sqrt_rational(1)
    a = [root_of_unity(8, 5), one, one, root_of_unity(8, 3), one, one]
    factors = [a[0] ** (1 - d) * a[k] ** -1 for k, d in enumerate(e6)]
    assert [factors[k] for k in (0, 1, 3)] == [-1, 1, -1]
    f4 = (12, 8, 6, 2)
    b = [root_of_unity(8, 5), one, root_of_unity(4, 1), one]
    got = [b[0] ** (1 - d) * b[k] ** -1 for k, d in enumerate(f4)]
    assert [got[0], got[2]] == [-1, root_of_unity(8, 5)]


def test_rescale_good_basis_on_polynomials():
    spec = catalog_group("G8")
    polys = spec.good_set().polys()
    a = [root_of_unity(8, 1), root_of_unity(4, 1)]
    out = rescale_good_basis(polys, a, spec.degrees)
    assert out[0] == polys[0] * (a[0] ** -11 * a[0] ** -1)
    assert out[1] == polys[1] * (a[0] ** -7 * a[1] ** -1)
    with pytest.raises(ValueError):
        rescale_good_basis(polys, [0, 1], spec.degrees)


def test_rescaled_basis_is_good_on_rescaled_frame():
    spec = catalog_group("G8")
    frame = build_frame(spec)
    a = [root_of_unity(8, 1), root_of_unity(4, 1)]
    x = rescale_good_basis(spec.good_set(), a, spec.degrees)
    assert check_goodness(x, frame.rescaled(a)).verdict
