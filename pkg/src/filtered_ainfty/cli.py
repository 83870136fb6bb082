"""Command-line front end.

Every subcommand prints ``key=value`` report lines and ends with a
``status=`` line.  Exit codes: 0 ok, 1 check failure, 2 parse error,
3 precondition error.  Flags may also be set through ``AINF_*`` environment
variables (``AINF_CUTOFF``, ``AINF_MAX_ARITY`` and so on); flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import instanton as inst
from . import testgen
from .category import (
    AInftyFunctor,
    PreconditionError,
    check_functor,
    compose_functors,
    opposite,
    yoneda_object,
)
from .core import (
    AInftyStructure,
    CheckReport,
    StructureError,
    check_ainfty,
    check_bar_square,
    check_units,
    format_vec,
    truncate,
    valuation,
)
from .deformation import (
    BoundingCochain,
    DeformationError,
    check_mc,
    deform,
    deformed_differential,
    floer_cohomology,
    validate_monotone_consequences,
)
from .interchange import ModuleDocument, ParseError, TriModuleDocument, parse_document, print_document
from .modules import (
    CyclicElement,
    SolverError,
    check_module_relation,
    check_trimodule_relation,
    correspondence_pipeline,
    d_of_one,
    reduce_trimodule,
    solve_mc_from_cyclic,
)
from .novikov import GroundRing, NovikovError, parse_rational, render_rational

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3
ENV_PREFIX = "AINF_"


class Precondition(Exception):
    pass


@dataclass
class RunConfig:
    cutoff: Optional[Fraction] = None
    max_arity: int = 5
    bar_cap: int = 4
    ring: GroundRing = GroundRing.Q
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if self.cutoff is not None and self.cutoff <= 0:
            raise Precondition("cutoff must be positive")
        if self.max_arity < 1 or self.bar_cap < 1:
            raise Precondition("caps must be at least 1")


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def config_from(args) -> RunConfig:
    def pick(name, conv, default):
        v = getattr(args, name, None)
        if v is None:
            v = _env(name)
        if v is None:
            return default
        try:
            return conv(v)
        except (ValueError, NovikovError) as exc:
            raise Precondition(f"bad value for {name}: {v!r} ({exc})") from None

    return RunConfig(
        cutoff=pick("cutoff", parse_rational, None),
        max_arity=pick("max_arity", int, 5),
        bar_cap=pick("bar_cap", int, 4),
        ring=pick("ring", GroundRing.parse, GroundRing.Q),
        seed=pick("seed", int, 0),
        output=pick("output", str, None),
    )


# --------------------------------------------------------------------------
# helpers


class Report:
    def __init__(self, command: str):
        self.lines = [f"command={command}"]
        self.ok = True

    def add(self, *lines):
        self.lines.extend(lines)

    def check(self, rep: CheckReport):
        self.lines.extend(rep.lines())
        self.ok = self.ok and rep.passed

    def residual(self, name: str, vec: dict, word="-"):
        if vec:
            self.ok = False
            self.add(f"residual check={name} word={word} valuation={valuation(vec)} value={format_vec(vec)}")
            self.add(f"check={name} status=fail")
        else:
            self.add(f"check={name} status=pass")


def _load(path, kind=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc.strerror}") from None
    obj = parse_document(text)
    if kind is not None and not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(1, f"{path}: expected {names}, got {type(obj).__name__}")
    return obj


def _structure(path, cfg: RunConfig) -> AInftyStructure:
    A = _load(path, AInftyStructure)
    if cfg.cutoff is not None and cfg.cutoff < A.cutoff:
        A = truncate(A, cfg.cutoff)
    return A


def _emit(cfg: RunConfig, obj, rep: Report, what="output"):
    text = print_document(obj)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.add(f"{what}={cfg.output}")
    else:
        rep.add(f"begin_document {what}")
        rep.add(*text.rstrip("\n").split("\n"))
        rep.add(f"end_document {what}")


def _write_companion(cfg: RunConfig, suffix: str, obj, rep: Report):
    if cfg.output:
        path = f"{cfg.output}.{suffix}"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(print_document(obj))
        rep.add(f"companion={path}")


def _cochains(paths) -> dict:
    out = {}
    for p in paths or []:
        b = _load(p, BoundingCochain)
        out[b.object] = b
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args, cfg, rep):
    obj = _load(args.file)
    rep.add(f"kind={type(obj).__name__}")
    if isinstance(obj, AInftyStructure):
        A = obj if cfg.cutoff is None or cfg.cutoff >= obj.cutoff else truncate(obj, cfg.cutoff)
        rep.check(check_ainfty(A, cfg.max_arity))
        rep.check(check_units(A))
        rep.check(check_bar_square(A, cfg.bar_cap))
        if str(A.metadata.get("weak_monotone", "")).lower() == "true":
            rep.check(validate_monotone_consequences(A))
    elif isinstance(obj, ModuleDocument):
        rep.check(check_module_relation(obj.module, cfg.max_arity))
    elif isinstance(obj, TriModuleDocument):
        rep.check(check_trimodule_relation(obj.trimodule, cfg.max_arity))
    elif isinstance(obj, AInftyFunctor):
        rep.check(check_functor(obj, cfg.max_arity))
    elif isinstance(obj, inst.InstantonComplex):
        _instanton_verify(obj, rep)
    else:
        raise Precondition(f"verify does not apply to {type(obj).__name__} documents")


def cmd_check_mc(args, cfg, rep):
    A = _structure(args.structure, cfg)
    b = _load(args.cochain, BoundingCochain)
    rep.residual("mc", check_mc(A, b), word=f"<b:{b.object}>")


def cmd_deform(args, cfg, rep):
    A = _structure(args.structure, cfg)
    bs = _cochains(args.cochain)
    B = deform(A, bs, require_mc=not args.allow_curved)
    rep.add(f"curved_objects={','.join(sorted(B.curvature)) or '-'}")
    if not args.allow_curved:
        rep.check(check_ainfty(B, cfg.max_arity))
    _emit(cfg, B, rep)


def cmd_cohomology(args, cfg, rep):
    A = _structure(args.structure, cfg)
    bs = _cochains(args.cochain)
    src, tgt = args.source, args.target or args.source
    for o in (src, tgt):
        if o not in A.objects:
            raise Precondition(f"unknown object {o!r}")
    d = deformed_differential(A, src, tgt, bs.get(src), bs.get(tgt))
    sq = d.square()
    if not sq.is_zero():
        rep.ok = False
        rep.add("check=d_squared status=fail")
        return
    rep.add("check=d_squared status=pass")
    prof = floer_cohomology(d, check_square=False)
    rep.add(f"source={src} target={tgt}", *prof.lines())


def cmd_solve_mc(args, cfg, rep):
    doc = _load(args.module, ModuleDocument)
    D = doc.module
    if isinstance(args.cyclic, str):
        if args.cyclic not in D.basis:
            raise Precondition(f"unknown module generator {args.cyclic!r}")
        doc.cyclic = CyclicElement({(args.cyclic, Fraction(0)): 1})
    if doc.cyclic is None:
        raise Precondition("module document has no cyclic element")
    if cfg.cutoff is not None and cfg.cutoff < D.base.cutoff:
        raise Precondition("truncate the base structure before solving")
    b = solve_mc_from_cyclic(D, doc.cyclic)
    rep.add(f"b={format_vec(b.element)}")
    rep.residual("mc", check_mc(D.base, b), word=f"<b:{b.object}>")
    rep.residual("d_of_one", d_of_one(D, doc.cyclic.element, b), word="<one>")
    _emit(cfg, b, rep, "cochain")


def _tri_inputs(args):
    doc = _load(args.trimodule, TriModuleDocument)
    b1 = _load(args.b1, BoundingCochain)
    b12 = _load(args.b12, BoundingCochain)
    return doc, b1, b12


def cmd_reduce_tri(args, cfg, rep):
    doc, b1, b12 = _tri_inputs(args)
    D = reduce_trimodule(doc.trimodule, b1, b12)
    rep.check(check_module_relation(D, cfg.max_arity))
    _emit(cfg, ModuleDocument(D, doc.cyclic), rep, "module")


def cmd_pipeline(args, cfg, rep):
    doc, b1, b12 = _tri_inputs(args)
    if doc.cyclic is None:
        raise Precondition("tri-module document has no cyclic element")
    b2 = correspondence_pipeline(doc.trimodule, b1, b12, doc.cyclic)
    rep.add(f"b2={format_vec(b2.element)}")
    rep.residual("mc", check_mc(doc.trimodule.right, b2), word=f"<b:{b2.object}>")
    _emit(cfg, b2, rep, "cochain")


def cmd_oppose(args, cfg, rep):
    A = _structure(args.structure, cfg)
    _emit(cfg, opposite(A), rep)


def cmd_compose(args, cfg, rep):
    F = _load(args.first, AInftyFunctor)
    G = _load(args.second, AInftyFunctor)
    H = compose_functors(F, G, cfg.max_arity)
    rep.check(check_functor(H, cfg.max_arity))
    _emit(cfg, H, rep, "functor")


def cmd_check_functor(args, cfg, rep):
    rep.check(check_functor(_load(args.functor, AInftyFunctor), cfg.max_arity))


def cmd_yoneda(args, cfg, rep):
    A = _structure(args.structure, cfg)
    objs = [args.object] if args.object else list(A.objects)
    for c in objs:
        if c not in A.objects:
            raise Precondition(f"unknown object {c!r}")
        Y = yoneda_object(A, c)
        rep.add(f"object={c} components={len(Y.functor.components)}")
        rep.check(check_functor(Y.functor, cfg.max_arity))
        if args.object:
            _emit(cfg, Y.functor, rep, "functor")


def cmd_truncate(args, cfg, rep):
    A = _load(args.structure, AInftyStructure)
    if cfg.cutoff is None:
        raise Precondition("truncate needs --cutoff")
    _emit(cfg, truncate(A, cfg.cutoff), rep)


def _instanton_verify(C, rep):
    problems = inst.verify(C) + inst.lint_metadata(C)
    for p in problems:
        rep.add(f"violation check=instanton {p}")
    rep.ok = rep.ok and not problems
    rep.add(f"check=instanton status={'fail' if problems else 'pass'} generators={len(C.generators)}")


def _chain(text: Optional[str]) -> dict:
    out = {}
    for part in (text or "").split(","):
        if not part:
            continue
        g, _, c = part.partition("=")
        try:
            out[g] = int(c or 1)
        except ValueError:
            raise Precondition(f"bad chain entry {part!r}") from None
    return out


def cmd_instanton(args, cfg, rep):
    C = _load(args.file, inst.InstantonComplex)
    if args.action == "verify":
        _instanton_verify(C, rep)
    elif args.action == "homology":
        h = inst.homology(C)
        rep.add(*h.lines())
    else:
        if not args.dual:
            raise Precondition("instanton pair needs a second complex")
        C2 = _load(args.dual, inst.InstantonComplex)
        d = inst.duality_pairing(C, C2)
        rep.add(*d.lines())
        rep.ok = d.passed
        if args.z1 is not None or args.z2 is not None:
            rep.add(f"pairing={inst.relative_invariant_pair(C, C2, _chain(args.z1), _chain(args.z2))}")


GEN_KINDS = ("ainfty", "cyclic", "trimodule", "instanton", "mutation")


def cmd_gen(args, cfg, rep):
    E = cfg.cutoff if cfg.cutoff is not None else Fraction(5)
    rep.add(f"kind={args.kind} seed={cfg.seed} ring={cfg.ring.value} cutoff={render_rational(E)}")
    if args.kind in ("ainfty", "mutation"):
        item = testgen.gen_corpus_item(cfg.seed, cfg.ring, cutoff=E, n_objects=args.objects)
        A = item.structure
        if args.kind == "mutation":
            mu = testgen.random_mutation(A, testgen.rng_for(cfg.seed + 1))
            A = testgen.apply_mutation(A, mu)
            rep.add(f"mutation word={','.join(mu.word)} output={mu.output} exponent={render_rational(mu.exponent)} coeff={mu.coeff}")
        _emit(cfg, A, rep)
        if args.kind == "ainfty":
            for o, b in sorted(item.bounding.items()):
                _write_companion(cfg, f"b.{o}", b, rep)
    elif args.kind == "cyclic":
        sc = testgen.gen_cyclic_scenario(cfg.seed, cfg.ring, cutoff=E)
        rep.add(f"planted={format_vec(sc.planted.element)}")
        _emit(cfg, ModuleDocument(sc.module, sc.one), rep, "module")
        _write_companion(cfg, "planted", sc.planted, rep)
    elif args.kind == "trimodule":
        sc = testgen.gen_trimodule_scenario(cfg.seed, cfg.ring, cutoff=E, cyclic=True)
        _emit(cfg, TriModuleDocument(sc.trimodule, sc.one), rep, "trimodule")
        _write_companion(cfg, "b1", sc.b1, rep)
        _write_companion(cfg, "b12", sc.b12, rep)
        _write_companion(cfg, "b2", sc.b2, rep)
    else:
        ring = cfg.ring if cfg.ring is not GroundRing.Q else GroundRing.Z2
        _emit(cfg, testgen.random_instanton_complex(cfg.seed, ring), rep)


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", help="energy cutoff E (rational p/q)")
    common.add_argument("--max-arity", dest="max_arity", help="arity cap for relation checks")
    common.add_argument("--bar-cap", dest="bar_cap", help="word-length cap for the bar check")
    common.add_argument("--ring", help="z2, z or q")
    common.add_argument("--seed", help="64-bit seed for generators")
    common.add_argument("--output", help="write the produced document here")

    p = argparse.ArgumentParser(prog="filtered-ainfty", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("verify", cmd_verify, "run every applicable checker on a document")
    sp.add_argument("file")
    sp = add("check-mc", cmd_check_mc, "Maurer-Cartan residual of a cochain")
    sp.add_argument("structure")
    sp.add_argument("cochain")
    sp = add("deform", cmd_deform, "deform a structure by bounding cochains")
    sp.add_argument("structure")
    sp.add_argument("cochain", nargs="*")
    sp.add_argument("--allow-curved", action="store_true", help="skip the MC requirement")
    sp = add("cohomology", cmd_cohomology, "Floer cohomology of hom(c, c') with deformed differential")
    sp.add_argument("structure")
    sp.add_argument("cochain", nargs="*")
    sp.add_argument("--source", required=True)
    sp.add_argument("--target")
    sp = add("solve-mc", cmd_solve_mc, "solve for b from a cyclic element")
    sp.add_argument("module")
    sp.add_argument("--cyclic", nargs="?", const=True, default=True, metavar="ID",
                    help="module generator to use as the cyclic element (default: the one stored in the document)")
    for name, fn, h in (("reduce-tri", cmd_reduce_tri, "reduce a tri-module to a right module"),
                        ("pipeline", cmd_pipeline, "reduce a tri-module and solve for b2")):
        sp = add(name, fn, h)
        sp.add_argument("trimodule")
        sp.add_argument("b1")
        sp.add_argument("b12")
    sp = add("oppose", cmd_oppose, "opposite category")
    sp.add_argument("structure")
    sp = add("compose", cmd_compose, "compose two functors (first, then second)")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = add("check-functor", cmd_check_functor, "check the functor relations")
    sp.add_argument("functor")
    sp = add("yoneda", cmd_yoneda, "Yoneda functor of an object")
    sp.add_argument("structure")
    sp.add_argument("--object")
    sp = add("instanton", cmd_instanton, "instanton complexes from counts")
    sp.add_argument("action", choices=("verify", "homology", "pair"))
    sp.add_argument("file")
    sp.add_argument("dual", nargs="?")
    sp.add_argument("--z1")
    sp.add_argument("--z2")
    sp = add("gen", cmd_gen, "emit a seeded valid-by-construction document")
    sp.add_argument("kind", choices=GEN_KINDS)
    sp.add_argument("--objects", type=int, default=1)
    sp = add("truncate", cmd_truncate, "lower the cutoff of a structure")
    sp.add_argument("structure")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Report(args.command if args.command != "instanton" else f"instanton-{args.action}")
    try:
        cfg = config_from(args)
        args.func(args, cfg, rep)
    except ParseError as exc:
        print(f"error=parse line={exc.line} message={exc.message}", file=err)
        return EXIT_PARSE
    except (Precondition, PreconditionError, StructureError, DeformationError, SolverError,
            inst.InstantonError, NovikovError) as exc:
        out.write("\n".join(rep.lines) + "\n")
        print(f"error=precondition class={type(exc).__name__} message={exc}", file=err)
        return EXIT_PRECONDITION
    rep.add(f"status={'pass' if rep.ok else 'fail'}")
    out.write("\n".join(rep.lines) + "\n")
    return EXIT_OK if rep.ok else EXIT_CHECK


def main(argv=None):
    sys.exit(run(argv))
