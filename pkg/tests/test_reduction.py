import json
import random
import shutil

import pytest
from hypothesis import given, strategies as st

from goodbasis.golden import RunConfig, golden_suite, witness_check
from goodbasis.goodness import build_frame, check_goodness
from goodbasis.groups import catalog_dir, catalog_group, load_reductions
from goodbasis.poly import MultiPoly, derivative, random_poly
from goodbasis.potential import potential_vector_field
from goodbasis.reduction import (
    ReductionError,
    check_lift,
    find_reduction,
    lift_constant,
    make_context,
    monomial_subquotient,
    phi_E,
    reduce_good_basis,
    reduce_potential,
    reduction_sequence,
    reduction_table,
    sigma_pattern,
    verify_cataloged_reduction,
)
from goodbasis.scalar import as_cyclotomic, root_of_unity

E6 = None


def e6_context(delta):
    global E6
    if E6 is None:
        E6 = build_frame(catalog_group("G35"))
    return make_context(E6, delta)


def test_context_examples():
    ctx = e6_context(2)
    assert ctx.i_set == [0, 2, 3, 5]
    assert ctx.ic_set == [1, 4]
    assert ctx.child_degrees == (12, 8, 6, 2)
    assert e6_context(3).child_degrees == (12, 9, 6)
    assert e6_context(1).i_set == list(range(6))


def test_invalid_delta():
    with pytest.raises(ReductionError, match="5 does not divide 12"):
        e6_context(5)


def test_override_must_keep_first_index():
    with pytest.raises(ReductionError):
        make_context(build_frame(catalog_group("G28")), 2, [1, 2])


def test_phi_example():
    frame = build_frame(catalog_group("G5"), check_regular=False)
    ctx = make_context(frame, 12)
    z1, z2 = (MultiPoly.variable(k, 2) for k in range(2))
    # keep z1 only: z1*z2 + z1^2 -> z1^2
    assert ctx.i_set == [0]
    assert phi_E(z1 * z2 + z1 ** 2, ctx) == MultiPoly.variable(0, 1) ** 2


def test_phi_drops_second_coordinate():
    spec = catalog_group("G28")
    ctx = make_context(build_frame(spec), 6)
    assert ctx.i_set == [0, 2]
    z = [MultiPoly.variable(k, 4) for k in range(4)]
    w = [MultiPoly.variable(k, 2) for k in range(2)]
    assert phi_E(z[0] * z[1] + z[2] ** 2, ctx) == w[1] ** 2


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_phi_is_a_ring_homomorphism(seed):
    rng = random.Random(seed)
    ctx = e6_context(2)
    p, q = random_poly(rng, 6, 4, 3), random_poly(rng, 6, 4, 3)
    assert phi_E(p + q, ctx) == phi_E(p, ctx) + phi_E(q, ctx)
    assert phi_E(p * q, ctx) == phi_E(p, ctx) * phi_E(q, ctx)


@given(seeds)
def test_phi_commutes_with_evaluation_at_q(seed):
    rng = random.Random(seed)
    ctx = e6_context(3)
    p = random_poly(rng, 6, 5, 3)
    at_q = [1, 0, 0, 0, 0, 0]
    assert as_cyclotomic(p.substitute(at_q)) == as_cyclotomic(phi_E(p, ctx).substitute([1, 0, 0]))


@given(seeds)
def test_phi_commutes_with_surviving_derivatives(seed):
    rng = random.Random(seed)
    ctx = e6_context(2)
    p = random_poly(rng, 6, 5, 3)
    for k, a in enumerate(ctx.i_set):
        assert phi_E(derivative(p, a), ctx) == derivative(phi_E(p, ctx), k)


def test_e6_invariants_vanish_on_eigenspace():
    ctx = e6_context(2)
    reduced = reduce_good_basis(catalog_group("G35").good_set(), ctx)
    assert len(reduced) == 4
    assert check_goodness(reduced, ctx.child, validate=False).verdict


@pytest.mark.parametrize("name,delta", [("G35", 2), ("G35", 3), ("G28", 4), ("G31", 12)])
def test_reduced_potential_equals_potential_on_eigenspace(name, delta):
    spec = catalog_group(name)
    frame = build_frame(spec)
    ctx = make_context(frame, delta)
    parent = potential_vector_field(spec.good_set(), frame)
    reduced_x = reduce_good_basis(spec.good_set(), ctx)
    child = potential_vector_field(reduced_x, ctx.child)
    assert reduce_potential(parent, ctx) == child.components


@pytest.mark.parametrize("entry", load_reductions(), ids=lambda e: e["id"])
def test_cataloged_reductions(entry):
    rep = verify_cataloged_reduction(entry)
    assert rep.passed, rep.checks


def test_e6_to_f4_table():
    rows = reduction_table(find_reduction("G35", 2, "G28"))
    assert rows == [("x1", "x1"), ("x2", "0"), ("x3", "x2"), ("x4", "x3"), ("x5", "0"), ("x6", "x4")]


@pytest.mark.parametrize("entry", [e for e in load_reductions() if not e["parent"].startswith("G(")],
                         ids=lambda e: e["id"])
def test_witnesses_and_swapped_pairing(entry):
    cfg = RunConfig()
    assert witness_check(entry, cfg).passed
    assert not witness_check(entry, cfg, swap=True).passed


def test_witness_report_serializes():
    res = witness_check(find_reduction("G28", 4, "G8"), RunConfig())
    data = json.loads(json.dumps(res.to_json()))
    assert data["passed"] is True


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (2, 4)])
def test_monomial_subquotients(m, n):
    rep = monomial_subquotient(m, n)
    assert rep.passed, rep.checks
    assert rep.details["remark_case"] == ((n + 1) % m == 0)


def test_hyperoctahedral_sigma_pattern():
    pattern = sigma_pattern(find_reduction("G(2,1,4)", 4, "G(4,1,2)"))
    assert [(a, b) for a, b, _ in pattern] == [(1, 1), (2, 0), (3, 2), (4, 0)]
    assert pattern[0][2] == 1
    assert pattern[2][2] == -1


def test_lift_constants():
    assert lift_constant(2, 2) == 2 * root_of_unity(4, 1)
    for m in (2, 3, 4):
        assert lift_constant(m, 1) == root_of_unity(m, -1)
    assert lift_constant(2, 2, "compatible") == -2 * root_of_unity(4, 1)
    with pytest.raises(ValueError):
        lift_constant(2, 2, "other")


def test_lift_goodness():
    stated = check_lift(2, 2, "stated")
    assert stated.good and not stated.compatible
    assert check_lift(2, 2, "compatible").verdict


def test_sequence_e6():
    steps = {s.delta: s for s in reduction_sequence(catalog_group("G35"))}
    assert sorted(steps) == [2, 3, 4, 6, 12]
    assert steps[2].candidates == ["G28"] and steps[2].status == "verified"
    assert steps[3].candidates == ["G25"] and steps[3].status == "verified"
    assert steps[4].status == "degrees-match-only"
    assert steps[4].to_json()["paths"] == [["G28 (delta=2)", "G8 (delta=4)"]]
    assert "G5" in steps[6].candidates
    assert len(steps[6].paths) == 2
    assert steps[12].candidates == ["mu(12)"]


def test_sequence_rank_four_non_duality():
    steps = {s.delta: s for s in reduction_sequence(catalog_group("G31"))}
    assert steps[8].degrees == (24, 8) and steps[8].candidates == ["G9"]
    assert steps[12].degrees == (24, 12) and "G10" in steps[12].candidates
    assert all(s.status == "verified" for s in steps.values())


def test_sequence_hyperoctahedral():
    steps = {s.delta: s for s in reduction_sequence(catalog_group("G(2,1,4)"))}
    assert steps[4].candidates == ["G(4,1,2)"]
    assert steps[8].candidates == ["mu(8)"]


def test_corrupted_catalog_failures_stay_isolated(tmp_path):
    src = catalog_dir()
    dst = tmp_path / "catalog"
    shutil.copytree(src, dst)
    path = dst / "G35.json"
    text = path.read_text()
    assert "209/2304" in text
    path.write_text(text.replace("209/2304", "210/2304"))
    summary = golden_suite(RunConfig(catalog=str(dst)), criteria=[1, 2, 3, 4])
    failed = [c.id for c in summary.checks if not c.passed]
    assert failed
    assert all("G35" in cid for cid in failed)
    assert "c01.goodness.G35" in failed
    assert catalog_dir() == src
