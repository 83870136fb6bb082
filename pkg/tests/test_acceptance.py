"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import io
import random
import sys
import time
from fractions import Fraction as F
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from filtered_ainfty import testgen  # noqa: E402
from filtered_ainfty.category import (  # noqa: E402
    check_functor,
    compose_functors,
    opposite,
    yoneda_object,
)
from filtered_ainfty.cli import run  # noqa: E402
from filtered_ainfty.core import check_ainfty, check_bar_square, check_units  # noqa: E402
from filtered_ainfty.deformation import (  # noqa: E402
    Matrix,
    check_mc,
    deform,
    deformed_differential,
    floer_cohomology,
)
from filtered_ainfty.instanton import (  # noqa: E402
    InstantonComplex,
    duality_pairing,
    euler_from_generators,
    homology,
    verify,
)
from filtered_ainfty.interchange import (  # noqa: E402
    ModuleDocument,
    TriModuleDocument,
    parse_document,
    print_document,
)
from filtered_ainfty.modules import (  # noqa: E402
    CyclicElement,
    check_module_relation,
    correspondence_pipeline,
    d_of_one,
    reduce_trimodule,
    solve_mc_from_cyclic,
)
from filtered_ainfty.novikov import GroundRing, Novikov  # noqa: E402
from oracles import conjugate, kernel_mod_image_rank  # noqa: E402

Z2, Q = GroundRing.Z2, GroundRing.Q
RINGS = (Z2, Q)


@lru_cache(maxsize=None)
def corpus(ring, n=200):
    return [testgen.gen_corpus_item(s, ring) for s in range(n)]


@lru_cache(maxsize=None)
def mixed_corpus(ring, n=24):
    # odd seeds carry two objects, so homs between distinct objects are covered
    return [testgen.gen_corpus_item(s, ring, n_objects=1 + s % 2) for s in range(n)]


# --------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    failures = 0
    for ring in RINGS:
        for item in corpus(ring):
            A = item.structure
            ok = check_ainfty(A, 5).passed and check_units(A).passed and check_bar_square(A, 5).passed
            failures += not ok
    elapsed = time.perf_counter() - t0
    hits = runs = 0
    for ring in RINGS:
        for seed, item in enumerate(corpus(ring)):
            mu = testgen.random_mutation(item.structure, testgen.rng_for(seed + 10**6))
            if mu is None:
                continue
            runs += 1
            hits += not check_ainfty(testgen.apply_mutation(item.structure, mu), 5).passed
    rate = hits / runs if runs else 0.0
    ok = failures == 0 and elapsed < 60 and rate >= 0.99
    return ok, (f"structures=400 failures={failures} seconds={elapsed:.1f} "
                f"mutations_detected={hits}/{runs} rate={rate:.3f}")


def criterion_2():
    n = bad = pairs = 0
    for ring in RINGS:
        for item in mixed_corpus(ring):
            n += 1
            D = deform(item.structure, item.bounding)
            if D.curvature or not check_ainfty(D, 4 if len(D.objects) == 1 else 3).passed:
                bad += 1
            A = item.structure
            for c in A.objects:
                for c2 in A.objects:
                    pairs += 1
                    d = deformed_differential(A, c, c2, item.bounding[c], item.bounding[c2])
                    bad += not d.square().is_zero()
    return bad == 0, f"structures={n} differentials={pairs} failures={bad}"


def _permuted_ok(sc, rng, ref):
    for _ in range(10):
        D2, one2, back = testgen.relabel_module(sc.module, sc.one, rng)
        b = solve_mc_from_cyclic(D2, one2)
        if {(back[x], e): c for (x, e), c in b.element.items()} != ref:
            return False
    return True


def criterion_3():
    rng = random.Random(2024)
    n = bad = perm_bad = 0
    for ring in RINGS:
        for seed in range(50):
            sc = testgen.gen_cyclic_scenario(seed, ring)
            n += 1
            b = solve_mc_from_cyclic(sc.module, sc.one)
            if (b.element != sc.planted.element or check_mc(sc.module.base, b)
                    or d_of_one(sc.module, sc.one.element, b)):
                bad += 1
            perm_bad += not _permuted_ok(sc, rng, b.element)
    strict_bad = 0
    for seed in range(10):
        A = testgen.gen_strict_dga(seed, ring=RINGS[seed % 2])
        (obj,) = A.objects
        one = CyclicElement({(A.units[obj], F(0)): 1})
        strict_bad += solve_mc_from_cyclic(testgen.hom_module(A, obj, obj), one).element != {}
    ok = bad == 0 and perm_bad == 0 and strict_bad == 0
    return ok, f"instances={n} mismatches={bad} permutation_failures={perm_bad} strict_unit_failures={strict_bad}"


def criterion_4():
    n = bad = 0
    for ring in RINGS:
        for seed in range(25):
            sc = testgen.gen_trimodule_scenario(seed, ring, cyclic=True)
            n += 1
            D = reduce_trimodule(sc.trimodule, sc.b1, sc.b12)
            b2 = correspondence_pipeline(sc.trimodule, sc.b1, sc.b12, sc.one)
            if not check_module_relation(D, 3).passed or check_mc(sc.trimodule.right, b2):
                bad += 1
    return bad == 0, f"instances={n} failures={bad}"


def _moves(rng, n, ring, E):
    out = []
    for _ in range(4):
        if n > 1:
            i, j = rng.sample(range(n), 2)
            out.append(("add", i, j, Novikov([(rng.choice([0, F(1, 2), 1]), rng.choice([1, -1, 2]))], E, ring)))
        c = 1 if ring is Z2 else rng.choice([1, -1, 2])
        out.append(("scale", rng.randrange(n), Novikov([(0, c), (F(1, 3), 1)], E, ring)))
    return out


def criterion_5():
    rng = random.Random(5)
    checked = rank_bad = basis_bad = 0
    for ring in RINGS:
        for item in mixed_corpus(ring):
            A = item.structure
            for c in A.objects:
                for c2 in A.objects:
                    d = deformed_differential(A, c, c2, item.bounding[c], item.bounding[c2])
                    if len(d.basis) > 6:
                        continue
                    checked += 1
                    prof = floer_cohomology(d)
                    rank_bad += prof.lambda_rank != kernel_mod_image_rank(d)
                    for _ in range(20):
                        rows = conjugate(d.rows(), _moves(rng, len(d.basis), ring, d.cutoff), ring, d.cutoff)
                        p = floer_cohomology(Matrix.from_rows(d.basis, rows, ring, d.cutoff))
                        if (p.lambda_rank, p.torsion_exponents) != (prof.lambda_rank, prof.torsion_exponents):
                            basis_bad += 1
                            break
    ok = checked > 0 and rank_bad == 0 and basis_bad == 0
    return ok, f"complexes={checked} rank_mismatches={rank_bad} basis_change_failures={basis_bad}"


def _chain(A, seed, n):
    rng = testgen.rng_for(seed)
    out = []
    for _ in range(n):
        Fn = testgen.automorphism_functor(A, testgen.random_automorphism(A, rng))
        out.append(Fn)
        A = Fn.target
    return out


def criterion_6():
    opp_bad = assoc_bad = yon_bad = 0
    structures = [item.structure for ring in RINGS for item in mixed_corpus(ring)]
    for A in structures:
        opp_bad += not opposite(opposite(A)).same_tables(A)
    for seed in range(12):
        A = corpus(RINGS[seed % 2])[seed].structure
        F1, F2, F3 = _chain(A, seed, 3)
        left = compose_functors(compose_functors(F1, F2, 4), F3, 4)
        right = compose_functors(F1, compose_functors(F2, F3, 4), 4)
        assoc_bad += not left.same_tables(right)
    strict = 0
    for ring in RINGS:
        for item in mixed_corpus(ring):
            S = deform(item.structure, item.bounding)
            for c in S.objects:
                strict += 1
                yon_bad += not check_functor(yoneda_object(S, c).functor, 3).passed
    ok = opp_bad == assoc_bad == yon_bad == 0
    return ok, (f"opposite={len(structures)} failures={opp_bad} compose_chains=12 failures={assoc_bad} "
                f"yoneda_objects={strict} failures={yon_bad}")


def criterion_7():
    one = homology(InstantonComplex({"pt": 0}, 4)).total_rank()
    dual_bad = euler_bad = 0
    for seed in range(50):
        C = testgen.random_instanton_complex(seed, Z2)
        T = InstantonComplex(dict(C.generators), C.grading_mod, C.ring, {(b, a): n for (a, b), n in C.counts.items()})
        dual_bad += not duality_pairing(C, T).passed
        euler_bad += bool(verify(C)) or homology(C).euler_characteristic() != euler_from_generators(C)
    ok = one == 1 and dual_bad == 0 and euler_bad == 0
    return ok, f"single_generator_rank={one} duality_failures={dual_bad}/50 euler_failures={euler_bad}/50"


BAD_HEADER = ("kind ainfty\nground_ring Q\ngrading_modulus 0\ncutoff 5\ngap_generators 1/2\nobject c\nobject d\n"
              "generator x source=c target=c shifted_degree=0 tag=plain\n"
              "generator y source=c target=c shifted_degree=1 tag=plain\n"
              "generator f source=d target=c shifted_degree=0 tag=plain\n")
INVALID = {
    "unknown_generator": BAD_HEADER + "op inputs=z output=y coeff=1 exponent=1\n",
    "filtration": BAD_HEADER + "op inputs=x output=y coeff=1 exponent=-1\n",
    "degree": BAD_HEADER + "op inputs=x output=x coeff=1 exponent=1\n",
    "non_composable": BAD_HEADER + "op inputs=x,f output=y coeff=1 exponent=1\n",
    "gapping": BAD_HEADER + "op inputs=x output=y coeff=1 exponent=1/3\n",
}


def _exit_codes(tmp: Path) -> list:
    problems = []

    def call(*argv):
        return run([str(a) for a in argv], io.StringIO(), io.StringIO())

    for name, text in INVALID.items():
        p = tmp / f"{name}.ainf"
        p.write_text(text)
        if call("verify", p) != 2:
            problems.append(f"{name}!=2")
    good = tmp / "good.ainf"
    good.write_text(print_document(corpus(Q)[0].structure))
    if call("verify", good) != 0:
        problems.append("good!=0")
    mut = tmp / "mut.ainf"
    call("gen", "mutation", "--seed", 1, "--output", mut)
    if call("verify", mut, "--max-arity", 4) != 1:
        problems.append("mutant!=1")
    if call("truncate", good) != 3:
        problems.append("precondition!=3")
    return problems


def criterion_8(tmp: Path):
    docs = []
    for ring in RINGS:
        docs += [item.structure for item in corpus(ring)]
        docs += [b for item in corpus(ring)[:20] for b in item.bounding.values()]
        for seed in range(10):
            sc = testgen.gen_cyclic_scenario(seed, ring)
            docs += [ModuleDocument(sc.module, sc.one), sc.planted]
            tri = testgen.gen_trimodule_scenario(seed, ring, cyclic=True)
            docs.append(TriModuleDocument(tri.trimodule, tri.one))
        docs += [testgen.random_instanton_complex(s, Z2 if ring is Z2 else GroundRing.Z) for s in range(20)]
    for seed in range(5):
        docs += _chain(corpus(Q)[seed].structure, seed, 1)
    bad = 0
    for obj in docs:
        text = print_document(obj)
        bad += print_document(parse_document(text)) != text
    problems = _exit_codes(tmp)
    ok = bad == 0 and not problems
    return ok, f"documents={len(docs)} roundtrip_failures={bad} exit_code_problems={','.join(problems) or 'none'}"


# --------------------------------------------------------------------------

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def evaluate(n, tmp=None):
    fn = CRITERIA[n]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(tmp) if n == 8 else fn()
    except Exception as exc:  # a crash is a failure, reported on the same line
        ok, detail = False, f"error={type(exc).__name__}: {exc}"
    return ok, f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail} wall={time.perf_counter() - t0:.1f}s"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, tmp_path, capsys):
    ok, line = evaluate(n, tmp_path)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    import tempfile

    results = []
    with tempfile.TemporaryDirectory() as d:
        for n in sorted(CRITERIA):
            ok, line = evaluate(n, Path(d))
            print(line, flush=True)
            results.append(ok)
    sys.exit(0 if all(results) else 1)
