import io
import shutil
import subprocess

import pytest

from filtered_ainfty import testgen
from filtered_ainfty.cli import RunConfig, config_from, build_parser, run
from filtered_ainfty.deformation import deform
from filtered_ainfty.interchange import parse_document, write_file
from filtered_ainfty.novikov import GroundRing


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def kv(report, key):
    for line in report.splitlines():
        for tok in line.split():
            if tok.startswith(key + "="):
                return tok[len(key) + 1 :]
    return None


@pytest.fixture
def corpus_file(tmp_path):
    p = tmp_path / "a.ainf"
    code, _, _ = call("gen", "ainfty", "--seed", 3, "--ring", "q", "--output", p)
    assert code == 0
    return p


def test_verify_corpus(corpus_file):
    code, out, _ = call("verify", corpus_file)
    assert code == 0
    assert out.splitlines()[-1] == "status=pass"
    assert "check=ainfty status=pass" in out


def test_verify_mutant_fails_with_witness(tmp_path):
    p = tmp_path / "m.ainf"
    assert call("gen", "mutation", "--seed", 4, "--output", p)[0] == 0
    code, out, _ = call("verify", p, "--max-arity", 4)
    assert code == 1
    lines = [l for l in out.splitlines() if l.startswith("residual")]
    assert lines and all("word=" in l and "valuation=" in l for l in lines)


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "bad.ainf"
    p.write_text("kind ainfty\nground_ring Q\ngrading_modulus 0\ncutoff 5\ngap_generators 1\n"
                 "object c\ngenerator y source=c target=c shifted_degree=1 tag=plain\n"
                 "curvature object=c output=y coeff=1 exponent=-1\n")
    code, _, err = call("verify", p)
    assert code == 2
    assert "line=8" in err and "filtration" in err
    assert call("verify", tmp_path / "missing.ainf")[0] == 2


def test_precondition_exit_code(corpus_file, tmp_path):
    assert call("truncate", corpus_file)[0] == 3
    assert call("verify", corpus_file, "--cutoff", "-1")[0] == 3
    assert call("yoneda", corpus_file, "--object", "nowhere")[0] == 3


def test_check_mc_and_deform(tmp_path):
    p = tmp_path / "a.ainf"
    code, out, _ = call("gen", "ainfty", "--seed", 1, "--output", p)
    bs = sorted(tmp_path.glob("a.ainf.b.*"))
    assert bs
    for b in bs:
        assert call("check-mc", p, b)[0] == 0
    code, out, _ = call("deform", p, *bs, "--output", tmp_path / "d.ainf")
    assert code == 0
    D = parse_document((tmp_path / "d.ainf").read_text())
    assert not D.curvature
    assert call("verify", tmp_path / "d.ainf")[0] == 0
    obj = D.objects[0]
    code, out, _ = call("cohomology", p, *bs, "--source", obj)
    assert code == 0 and kv(out, "lambda_rank") is not None


def test_solve_mc_prints_planted(tmp_path):
    m = tmp_path / "m.mod"
    code, out, _ = call("gen", "cyclic", "--seed", 7, "--output", m)
    assert code == 0
    planted = kv(out, "planted")
    code, out, _ = call("solve-mc", m, "--output", tmp_path / "b.coch")
    assert code == 0 and kv(out, "b") == planted
    assert (tmp_path / "b.coch").read_text() == (tmp_path / "m.mod.planted").read_text()


def test_pipeline_and_reduce(tmp_path):
    t = tmp_path / "t.tri"
    assert call("gen", "trimodule", "--seed", 2, "--output", t)[0] == 0
    b1, b12 = f"{t}.b1", f"{t}.b12"
    code, out, _ = call("pipeline", t, b1, b12, "--output", tmp_path / "b2.coch")
    assert code == 0
    assert (tmp_path / "b2.coch").read_text() == (tmp_path / "t.tri.b2").read_text()
    code, out, _ = call("reduce-tri", t, b1, b12, "--max-arity", 2)
    assert code == 0 and "begin_document module" in out


def test_oppose_involution(corpus_file, tmp_path):
    o1, o2 = tmp_path / "o1", tmp_path / "o2"
    assert call("oppose", corpus_file, "--output", o1)[0] == 0
    assert call("oppose", o1, "--output", o2)[0] == 0
    assert o2.read_text() == corpus_file.read_text()


def test_functor_commands(tmp_path):
    A = testgen.gen_corpus_item(0, GroundRing.Q).structure
    rng = testgen.rng_for(5)
    F1 = testgen.automorphism_functor(A, testgen.random_automorphism(A, rng))
    F2 = testgen.automorphism_functor(F1.target, testgen.random_automorphism(F1.target, rng))
    write_file(tmp_path / "f1", F1)
    write_file(tmp_path / "f2", F2)
    assert call("check-functor", tmp_path / "f1", "--max-arity", 3)[0] == 0
    code, out, _ = call("compose", tmp_path / "f1", tmp_path / "f2", "--max-arity", 3)
    assert code == 0
    assert call("compose", tmp_path / "f2", tmp_path / "f2")[0] == 3


def test_yoneda(tmp_path):
    item = testgen.gen_corpus_item(0, GroundRing.Q)
    write_file(tmp_path / "s", deform(item.structure, item.bounding))
    code, out, _ = call("yoneda", tmp_path / "s", "--max-arity", 3)
    assert code == 0 and "check=functor status=pass" in out


def test_instanton_commands(tmp_path):
    one = tmp_path / "one.inst"
    one.write_text("kind instanton\ngrading_mod 4\nring Z2\ngenerator pt 2\n")
    code, out, _ = call("instanton", "homology", one)
    assert code == 0
    assert "homology grading=2 rank=1 torsion=-" in out and kv(out, "total_rank") == "1"
    C = tmp_path / "c.inst"
    C.write_text("kind instanton\ngrading_mod 8\nring Z2\ngenerator a 1\ngenerator b 0\ncount a b 1\n")
    D = tmp_path / "d.inst"
    D.write_text("kind instanton\ngrading_mod 8\nring Z2\ngenerator a 1\ngenerator b 0\ncount b a 1\n")
    assert call("instanton", "pair", C, D)[0] == 0
    code, out, _ = call("instanton", "pair", C, C)
    assert code == 1 and "mismatch pair=" in out
    bad = tmp_path / "bad.inst"
    bad.write_text("kind instanton\ngrading_mod 4\nring Z2\ngenerator a 2\ngenerator b 1\ngenerator c 0\n"
                   "count a b 1\ncount b c 1\n")
    code, out, _ = call("instanton", "verify", bad)
    assert code == 1 and "dd(a)" in out
    assert call("instanton", "homology", bad)[0] == 3
    assert call("instanton", "pair", C)[0] == 3


def test_truncate(corpus_file, tmp_path):
    code, out, _ = call("truncate", corpus_file, "--cutoff", "1", "--output", tmp_path / "t")
    assert code == 0
    assert parse_document((tmp_path / "t").read_text()).cutoff == 1


def test_reports_are_deterministic(corpus_file):
    assert call("verify", corpus_file) == call("verify", corpus_file)
    assert call("gen", "cyclic", "--seed", 9) == call("gen", "cyclic", "--seed", 9)


def test_env_overrides(monkeypatch):
    args = build_parser().parse_args(["verify", "x"])
    monkeypatch.setenv("AINF_MAX_ARITY", "3")
    monkeypatch.setenv("AINF_RING", "z2")
    cfg = config_from(args)
    assert cfg.max_arity == 3 and cfg.ring is GroundRing.Z2
    args = build_parser().parse_args(["verify", "x", "--max-arity", "2"])
    assert config_from(args).max_arity == 2


def test_config_invariants():
    with pytest.raises(Exception):
        RunConfig(max_arity=0)


@pytest.mark.skipif(shutil.which("filtered-ainfty") is None, reason="console script not installed")
def test_console_script(tmp_path):
    p = tmp_path / "one.inst"
    p.write_text("kind instanton\ngrading_mod 8\nring Z\ngenerator pt 0\n")
    res = subprocess.run(["filtered-ainfty", "instanton", "homology", str(p)], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[-1] == "status=pass"
