from fractions import Fraction as F

import pytest

from conftest import unital
from filtered_ainfty import testgen
from filtered_ainfty.core import StructureError, check_ainfty, check_bar_square, check_units
from filtered_ainfty.deformation import check_mc, deformed_differential, floer_cohomology
from filtered_ainfty.modules import check_module_relation, solve_mc_from_cyclic
from filtered_ainfty.novikov import GroundRing

Q, Z2, Z = GroundRing.Q, GroundRing.Z2, GroundRing.Z


def test_size_one_is_unit_only():
    A = testgen.gen_strict_dga(0, dim=1)
    (u,) = A.generators
    assert A.units == {"c": u}
    assert A.ops == {(u, u): {(u, F(0)): 1}}


def test_seed_determinism():
    for seed in (0, 5, 2**40 + 3):
        a = testgen.gen_corpus_item(seed, Q).structure
        b = testgen.gen_corpus_item(seed, Q).structure
        assert a.same_tables(b) and a.generators == b.generators
    assert not testgen.gen_corpus_item(1, Q).structure.same_tables(testgen.gen_corpus_item(2, Q).structure)


def test_identity_pushforward():
    A = testgen.gen_corpus_item(4, Q).structure
    assert testgen.pushforward(A, testgen.identity_automorphism()).same_tables(A)


def idempotent_algebra():
    # e unit, x idempotent in degree 0, y in degree 1 with y.x = y and x.y = 0
    return unital({"x": -1, "y": 0}, ops={("x", "x"): [("x", 0, 1)], ("y", "x"): [("y", 0, -1)]})


def test_quadratic_component_creates_m3():
    A = idempotent_algebra()
    assert check_ainfty(A, 4).passed
    phi = testgen.FilteredAutomorphism(higher={("x", "y"): {("x", F(1)): 1}})
    B = testgen.pushforward(A, phi)
    # expanding Phi d Phi^-1 with Phi_2(x, y) = T x:
    # m3'(a,b,c) = phi(m2(a,b),c) + (-1)^|a|' phi(a,m2(b,c)) - m2(phi(a,b),c) - m2(a,phi(b,c))
    assert B.ops[("y", "x", "y")] == {("y", F(1)): 1}
    assert ("x", "x", "y") not in B.ops and ("x", "y", "x") not in B.ops
    assert check_ainfty(B, 4).passed and check_units(B).passed


def test_pushforward_rejects_unit_components():
    A = idempotent_algebra()
    with pytest.raises(StructureError):
        testgen.pushforward(A, testgen.FilteredAutomorphism(higher={("e", "y"): {("x", F(1)): 1}}))
    with pytest.raises(StructureError, match="cap"):
        testgen.pushforward(A, testgen.FilteredAutomorphism(higher={("x", "y"): {("x", F(1)): 1}}), max_arity=1)


@pytest.mark.parametrize("ring", [Z2, Q, Z])
def test_corpus_valid_by_construction(ring):
    for seed in range(5):
        item = testgen.gen_corpus_item(seed, ring, n_objects=2)
        A = item.structure
        assert check_ainfty(A, 3).passed and check_units(A).passed and check_bar_square(A, 3).passed
        for b in item.bounding.values():
            assert check_mc(A, b) == {}


def test_pushforward_preserves_torsion():
    for ring in (Z2, Q):
        for seed in range(6):
            plain = testgen.gen_corpus_item(seed, ring, automorphism=False)
            moved = testgen.gen_corpus_item(seed, ring)
            for c in plain.structure.objects:
                p0 = floer_cohomology(deformed_differential(plain.structure, c, c, plain.bounding[c], plain.bounding[c]))
                p1 = floer_cohomology(deformed_differential(moved.structure, c, c, moved.bounding[c], moved.bounding[c]))
                assert (p0.lambda_rank, p0.torsion_exponents) == (p1.lambda_rank, p1.torsion_exponents)


def test_cyclic_planted_zero_and_single_term():
    sc = testgen.gen_cyclic_scenario(0, Q, planted={})
    assert solve_mc_from_cyclic(sc.module, sc.one).element == {}
    probe = testgen.gen_cyclic_scenario(0, Q, automorphism=False)
    x = testgen.degree_zero_generators(probe.category, "c")[0]
    sc = testgen.gen_cyclic_scenario(0, Q, planted={(x, F(1)): 1}, automorphism=False)
    assert sc.planted.element == {(x, F(1)): 1}
    assert solve_mc_from_cyclic(sc.module, sc.one).element == {(x, F(1)): 1}


def test_cyclic_modules_valid():
    for seed in range(4):
        sc = testgen.gen_cyclic_scenario(seed, Z2)
        assert check_module_relation(sc.module, 2).passed


@pytest.mark.parametrize("ring", [Z2, Q])
def test_mutations_detected(ring):
    hits = total = 0
    for seed in range(40):
        A = testgen.gen_corpus_item(seed, ring).structure
        mu = testgen.random_mutation(A, testgen.rng_for(seed))
        if mu is None:
            continue
        total += 1
        B = testgen.apply_mutation(A, mu)
        hits += not check_ainfty(B, 4).passed
    assert total >= 35 and hits == total
