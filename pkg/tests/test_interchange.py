import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtered_ainfty import testgen
from filtered_ainfty.category import identity_functor
from filtered_ainfty.instanton import InstantonComplex
from filtered_ainfty.interchange import (
    ModuleDocument,
    ParseError,
    TriModuleDocument,
    parse_as,
    parse_document,
    print_document,
    read_file,
    write_file,
)
from filtered_ainfty.core import AInftyStructure
from filtered_ainfty.novikov import GroundRing

Q, Z2, Z = GroundRing.Q, GroundRing.Z2, GroundRing.Z

BASE = """\
kind ainfty
ground_ring Q
grading_modulus 0
cutoff 5
gap_generators 1/2
object c
generator e source=c target=c shifted_degree=-1 tag=plain
generator x source=c target=c shifted_degree=0 tag=plain
generator y source=c target=c shifted_degree=1 tag=plain
unit c e
op inputs=x output=y coeff=2 exponent=1/2
"""


def doc(*extra):
    return BASE + "".join(line + "\n" for line in extra)


def roundtrip(obj):
    text = print_document(obj)
    again = print_document(parse_document(text))
    assert again == text
    return text


def test_base_parses():
    A = parse_document(BASE)
    assert A.ops == {("x",): {("y", 1 / 2): 2}}
    assert print_document(A) == BASE


def test_kind_colon_accepted_and_comments_ignored():
    A = parse_document(BASE.replace("kind ainfty", "kind: ainfty  # header"))
    assert print_document(A) == BASE


@pytest.mark.parametrize("ring", [Z2, Q, Z])
def test_corpus_roundtrip(ring):
    for seed in range(10):
        roundtrip(testgen.gen_corpus_item(seed, ring, n_objects=1 + seed % 2).structure)


def test_module_and_trimodule_roundtrip():
    for seed in range(4):
        sc = testgen.gen_cyclic_scenario(seed, Q)
        text = roundtrip(ModuleDocument(sc.module, sc.one))
        assert parse_document(text).cyclic.element == sc.one.element
        roundtrip(sc.planted)
        tri = testgen.gen_trimodule_scenario(seed, Z2, cyclic=True)
        roundtrip(TriModuleDocument(tri.trimodule, tri.one))
        roundtrip(tri.b1)


def test_functor_and_instanton_roundtrip():
    A = testgen.gen_corpus_item(0, Q).structure
    roundtrip(identity_functor(A))
    Fn = testgen.automorphism_functor(A, testgen.random_automorphism(A, testgen.rng_for(1)))
    text = roundtrip(Fn)
    assert parse_document(text).same_tables(Fn)
    for ring in (Z2, Z):
        C = testgen.random_instanton_complex(3, ring)
        C.metadata["connected_sum"] = "1,2,1"
        text = roundtrip(C)
        back = parse_document(text)
        assert back.counts == C.counts and back.generators == C.generators


def test_bare_count_rows():
    text = "kind instanton\ngrading_mod 4\nring Z2\ngenerator a 1\ngenerator b 0\na b 1\n"
    C = parse_document(text)
    assert isinstance(C, InstantonComplex) and C.counts == {("a", "b"): 1}


def test_file_helpers(tmp_path):
    A = testgen.gen_corpus_item(2, Z2).structure
    p = tmp_path / "a.ainf"
    write_file(p, A)
    assert read_file(p).same_tables(A)
    assert isinstance(parse_as(p.read_text(), AInftyStructure), AInftyStructure)
    with pytest.raises(ParseError, match="expected a InstantonComplex"):
        parse_as(p.read_text(), InstantonComplex)


# each invalid class is line-anchored: (text, line, message fragment)
ERRORS = [
    (doc("op inputs=x output=y coeff=1 exponent=-1/2"), 12, "filtration violation"),
    (doc("op inputs=z output=y coeff=1 exponent=1"), 12, "unknown generator"),
    (doc("op inputs=x,y output=y coeff=1 exponent=1"), 12, "degree mismatch"),
    (doc("op inputs=x,x output=y coeff=1 exponent=1/3"), 12, "gapping violation"),
    (doc("op inputs=x,x output=y coeff=1 exponent=5"), 12, "cutoff"),
    (doc("op inputs=x,x output=y coeff=0 exponent=1"), 12, "zero coefficient"),
    (doc("curvature object=c output=y coeff=1 exponent=0"), 12, "Lambda_+"),
    (doc("op inputs=x output=y coeff=1 exponent=1/2"), 12, "duplicate entry"),
    (BASE.replace("unit c e", "unit c q"), 10, "unknown generator"),
    (BASE.replace("object c\n", ""), 6, "unknown object"),
    (BASE.replace("cutoff 5\n", "").replace("object c\n", "object c\ncutoff 5\n"), 5, "must come first"),
    ("kind module\n", 0, "begin base"),
    ("ground_ring Q\n", 1, "kind"),
    ("kind sheaf\n", 1, "unknown kind"),
    ("", 1, "empty"),
]


@pytest.mark.parametrize("text,line,frag", ERRORS)
def test_error_classes(text, line, frag):
    with pytest.raises(ParseError) as info:
        parse_document(text)
    assert frag in info.value.message
    assert info.value.line == line


def test_non_composable_tuple():
    text = """\
kind ainfty
ground_ring Z2
grading_modulus 0
cutoff 5
gap_generators 1
object a
object b
generator f source=a target=b shifted_degree=0 tag=plain
generator g source=a target=b shifted_degree=0 tag=plain
op inputs=f,g output=f coeff=1 exponent=1
"""
    with pytest.raises(ParseError, match="non-composable") as info:
        parse_document(text)
    assert info.value.line == 10


def test_generator_before_declaration():
    text = BASE.replace("generator x source=c target=c shifted_degree=0 tag=plain\n", "")
    text += "generator x source=c target=c shifted_degree=0 tag=plain\n"
    with pytest.raises(ParseError, match="unknown generator") as info:
        parse_document(text)
    assert info.value.line == 10


def test_instanton_errors():
    head = "kind instanton\ngrading_mod 8\nring Z2\ngenerator a 1\ngenerator b 0\n"
    for body, frag in [("count a z 1\n", "unknown generator"), ("count a b 0\n", "zero counts"),
                       ("count a b 1\ncount a b 1\n", "duplicate count")]:
        with pytest.raises(ParseError, match=frag):
            parse_document(head + body)
    with pytest.raises(ParseError, match="4 or 8"):
        parse_document(head.replace("grading_mod 8", "grading_mod 6"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([Z2, Q, Z]))
def test_roundtrip_property(seed, ring):
    roundtrip(testgen.gen_corpus_item(seed, ring).structure)
