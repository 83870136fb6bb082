"""Line-oriented text format for structures, modules, tri-modules, cochains, functors
and instanton complexes.

Every document starts with ``kind <name>``.  Rows are ``keyword`` followed by
positional tokens or ``key=value`` tokens separated by single spaces; ``#``
starts a comment line.  Algebras nested in module, tri-module and functor
documents sit between ``begin <role>`` and ``end``.  Printing is canonical:
``print_document(parse_document(text)) == text`` for printed documents.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .category import AInftyFunctor
from .core import AInftyStructure, Generator, StructureError, TAGS
from .deformation import BoundingCochain
from .instanton import InstantonComplex, InstantonError
from .modules import CyclicElement, RightModule, TriModule
from .novikov import GapMonoid, GroundRing, NovikovError, render_rational

ID_RE = re.compile(r"^[^\s=,#]+$")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


@dataclass
class ModuleDocument:
    module: RightModule
    cyclic: CyclicElement | None = None


@dataclass
class TriModuleDocument:
    trimodule: TriModule
    cyclic: CyclicElement | None = None


# --------------------------------------------------------------------------
# printing


def _r(q) -> str:
    return render_rational(Fraction(q))


def _gen_index(A: AInftyStructure) -> dict:
    return {g: i for i, g in enumerate(A.generators)}


def _vec_rows(vec: dict, index: dict) -> list:
    return sorted(vec.items(), key=lambda kv: (index[kv[0][0]], kv[0][1]))


def _algebra_lines(A: AInftyStructure) -> list:
    idx = _gen_index(A)
    out = [
        f"ground_ring {A.ring.value}",
        f"grading_modulus {A.grading_modulus}",
        f"cutoff {_r(A.cutoff)}",
        "gap_generators " + " ".join(_r(g) for g in A.gap.generators),
    ]
    out += [f"object {o}" for o in A.objects]
    for g in A.generators.values():
        row = f"generator {g.id} source={g.source} target={g.target} shifted_degree={g.shifted_degree} tag={g.tag}"
        if g.switch_pair:
            row += f" pair={g.switch_pair[0]},{g.switch_pair[1]}"
        if g.energy_class is not None:
            row += f" energy={_r(g.energy_class)}"
        out.append(row)
    for o in A.objects:
        if o in A.units:
            out.append(f"unit {o} {A.units[o]}")
    for o in A.objects:
        for (z, e), c in _vec_rows(A.curvature.get(o, {}), idx):
            out.append(f"curvature object={o} output={z} coeff={_r(c)} exponent={_r(e)}")
    for w in sorted(A.ops, key=lambda w: (len(w), [idx[x] for x in w])):
        for (z, e), c in _vec_rows(A.ops[w], idx):
            out.append(f"op inputs={','.join(w)} output={z} coeff={_r(c)} exponent={_r(e)}")
    for k in sorted(A.metadata):
        out.append(f"meta {k} {A.metadata[k]}")
    return out


def _section(role: str, A: AInftyStructure) -> list:
    return [f"begin {role}"] + _algebra_lines(A) + ["end"]


def _words_key(idx, w):
    return (len(w), [idx[x] for x in w])


def print_document(obj) -> str:
    if isinstance(obj, AInftyStructure):
        lines = ["kind ainfty"] + _algebra_lines(obj)
    elif isinstance(obj, (RightModule, ModuleDocument)):
        doc = obj if isinstance(obj, ModuleDocument) else ModuleDocument(obj)
        lines = _module_lines(doc)
    elif isinstance(obj, (TriModule, TriModuleDocument)):
        doc = obj if isinstance(obj, TriModuleDocument) else TriModuleDocument(obj)
        lines = _trimodule_lines(doc)
    elif isinstance(obj, BoundingCochain):
        lines = ["kind cochain", f"object {obj.object}"]
        if obj.switching_supported:
            lines.append("switching_supported true")
        for (g, e), c in sorted(obj.element.items()):
            lines.append(f"term generator={g} coeff={_r(c)} exponent={_r(e)}")
    elif isinstance(obj, AInftyFunctor):
        lines = _functor_lines(obj)
    elif isinstance(obj, InstantonComplex):
        lines = ["kind instanton", f"grading_mod {obj.grading_mod}", f"ring {obj.ring.value}"]
        lines += [f"generator {g} {mu}" for g, mu in obj.generators.items()]
        order = {g: i for i, g in enumerate(obj.generators)}
        for (a, b) in sorted(obj.counts, key=lambda k: (order[k[0]], order[k[1]])):
            lines.append(f"count {a} {b} {obj.counts[(a, b)]}")
        lines += [f"meta {k} {obj.metadata[k]}" for k in sorted(obj.metadata)]
    else:
        raise TypeError(f"cannot print {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def _module_lines(doc: ModuleDocument) -> list:
    D = doc.module
    lines = ["kind module"] + _section("base", D.base)
    idx = _gen_index(D.base)
    midx = {y: i for i, y in enumerate(D.basis)}
    lines += [f"module_generator {y} shifted_degree={d}" for y, d in D.basis.items()]
    for key in sorted(D.n_ops, key=lambda k: (midx[k[0]],) + tuple(_words_key(idx, k[1:]))):
        y, w = key[0], key[1:]
        for (z, e), c in sorted(D.n_ops[key].items(), key=lambda kv: (midx[kv[0][0]], kv[0][1])):
            lines.append(f"n_op module={y} inputs={','.join(w)} output={z} coeff={_r(c)} exponent={_r(e)}")
    if doc.cyclic is not None:
        for (y, e), c in sorted(doc.cyclic.element.items(), key=lambda kv: (midx[kv[0][0]], kv[0][1])):
            lines.append(f"cyclic generator={y} coeff={_r(c)} exponent={_r(e)}")
    lines += [f"meta {k} {D.metadata[k]}" for k in sorted(D.metadata)]
    return lines


def _trimodule_lines(doc: TriModuleDocument) -> list:
    T = doc.trimodule
    lines = ["kind trimodule"] + _section("left1", T.left1) + _section("left12", T.left12) + _section("right", T.right)
    i1, i12, i2 = _gen_index(T.left1), _gen_index(T.left12), _gen_index(T.right)
    midx = {y: i for i, y in enumerate(T.basis)}
    lines += [f"module_generator {y} shifted_degree={d}" for y, d in T.basis.items()]

    def key(k):
        u, v, y, w = k
        return (len(u) + len(v) + len(w), _words_key(i1, u), _words_key(i12, v), midx[y], _words_key(i2, w))

    for k in sorted(T.n_ops, key=key):
        u, v, y, w = k
        for (z, e), c in sorted(T.n_ops[k].items(), key=lambda kv: (midx[kv[0][0]], kv[0][1])):
            lines.append(
                f"n_op left1={','.join(u)} left12={','.join(v)} module={y} right={','.join(w)} "
                f"output={z} coeff={_r(c)} exponent={_r(e)}"
            )
    if doc.cyclic is not None:
        for (y, e), c in sorted(doc.cyclic.element.items(), key=lambda kv: (midx[kv[0][0]], kv[0][1])):
            lines.append(f"cyclic generator={y} coeff={_r(c)} exponent={_r(e)}")
    lines += [f"meta {k} {T.metadata[k]}" for k in sorted(T.metadata)]
    return lines


def _functor_lines(F: AInftyFunctor) -> list:
    lines = ["kind functor"] + _section("source", F.source) + _section("target", F.target)
    lines += [f"object_map {a} {F.object_map[a]}" for a in F.source.objects]
    si, ti = _gen_index(F.source), _gen_index(F.target)
    for w in sorted(F.components, key=lambda w: _words_key(si, w)):
        for (z, e), c in _vec_rows(F.components[w], ti):
            lines.append(f"fop inputs={','.join(w)} output={z} coeff={_r(c)} exponent={_r(e)}")
    return lines


# --------------------------------------------------------------------------
# parsing


class _Lines:
    def __init__(self, text: str):
        self.rows = []
        for n, raw in enumerate(text.splitlines(), 1):
            s = raw.split("#", 1)[0].rstrip()  # ids never contain '#'
            if not s.strip():
                continue
            self.rows.append((n, s))
        self.pos = 0

    def peek(self):
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def next(self):
        r = self.peek()
        self.pos += 1
        return r


def _split(n: int, line: str):
    parts = line.split()
    kw, rest = parts[0], parts[1:]
    pos, kv = [], {}
    for p in rest:
        if "=" in p:
            k, v = p.split("=", 1)
            if k in kv:
                raise ParseError(n, f"duplicate field {k!r}")
            kv[k] = v
        else:
            pos.append(p)
    return kw, pos, kv


def _need(n, kv, *keys):
    missing = [k for k in keys if k not in kv]
    if missing:
        raise ParseError(n, f"missing field(s) {', '.join(missing)}")
    extra = sorted(set(kv) - set(keys))
    return extra


def _rat(n, text, what="number") -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(n, f"bad {what} {text!r}") from None


def _int(n, text, what="integer") -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(n, f"bad {what} {text!r}") from None


def _ident(n, text, what="identifier") -> str:
    if not ID_RE.match(text):
        raise ParseError(n, f"bad {what} {text!r}")
    return text


def _word(n, text, known: dict, what="generator") -> tuple:
    if text == "":
        return ()
    out = []
    for g in text.split(","):
        if g not in known:
            raise ParseError(n, f"unknown {what} {g!r}")
        out.append(g)
    return tuple(out)


def _coeff(n, text, ring: GroundRing):
    c = _rat(n, text, "coefficient")
    try:
        c = ring.coerce(c)
    except (NovikovError, ValueError) as exc:
        raise ParseError(n, str(exc)) from None
    if c == 0:
        raise ParseError(n, "zero coefficient rows are not canonical")
    return c


def _exponent(n, text, gap: GapMonoid, cutoff) -> Fraction:
    e = _rat(n, text, "exponent")
    if e < 0:
        raise ParseError(n, f"filtration violation: negative exponent {text}")
    if e >= cutoff:
        raise ParseError(n, f"exponent {text} is at or above the cutoff {render_rational(cutoff)}")
    if not gap.contains(e):
        raise ParseError(n, f"gapping violation: exponent {text} is not in the gap monoid")
    return e


def _put(n, table: dict, key, out, e, c):
    vec = table.setdefault(key, {})
    if (out, e) in vec:
        raise ParseError(n, f"duplicate entry for output {out} at exponent {render_rational(e)}")
    vec[(out, e)] = c


def _parse_algebra(L: _Lines, stop_at_end: bool) -> AInftyStructure:
    header = {}
    objects, gens, units, ops, curv, meta = [], {}, {}, {}, {}, {}
    first_line = L.peek()[0] if L.peek() else 0
    while True:
        r = L.peek()
        if r is None:
            if stop_at_end:
                raise ParseError(first_line, "section is missing its 'end'")
            break
        n, line = r
        kw, pos, kv = _split(n, line)
        if kw == "end":
            if not stop_at_end:
                raise ParseError(n, "'end' outside a section")
            L.next()
            break
        if kw not in ("ground_ring", "grading_modulus", "cutoff", "gap_generators", "object", "generator",
                      "unit", "curvature", "op", "meta"):
            if stop_at_end:
                raise ParseError(n, f"unexpected keyword {kw!r} inside an algebra section")
            break
        L.next()
        if kw in ("ground_ring", "grading_modulus", "cutoff", "gap_generators"):
            if kw in header:
                raise ParseError(n, f"duplicate {kw}")
            if objects or gens:
                raise ParseError(n, f"{kw} must precede objects and generators")
            if kw == "ground_ring":
                try:
                    header[kw] = GroundRing.parse(pos[0] if pos else "")
                except (NovikovError, ValueError) as exc:
                    raise ParseError(n, str(exc)) from None
            elif kw == "grading_modulus":
                m = _int(n, pos[0] if pos else "", "grading modulus")
                if m < 0 or m % 2:
                    raise ParseError(n, "grading modulus must be 0 or even")
                header[kw] = m
            elif kw == "cutoff":
                e = _rat(n, pos[0] if pos else "", "cutoff")
                if e <= 0:
                    raise ParseError(n, "cutoff must be positive")
                header[kw] = e
            else:
                gs = [_rat(n, p, "gap generator") for p in pos]
                if not gs or any(g <= 0 for g in gs):
                    raise ParseError(n, "gap generators must be positive rationals")
                header[kw] = GapMonoid(gs)
            continue
        missing = [k for k in ("ground_ring", "cutoff", "gap_generators") if k not in header]
        if missing:
            raise ParseError(n, f"header field(s) {', '.join(missing)} must come first")
        ring, E, gap = header["ground_ring"], header["cutoff"], header["gap_generators"]
        mod = header.get("grading_modulus", 0)

        def red(d):
            return d % mod if mod else d

        if kw == "object":
            if len(pos) != 1:
                raise ParseError(n, "object takes one name")
            o = _ident(n, pos[0], "object name")
            if o in objects:
                raise ParseError(n, f"duplicate object {o!r}")
            objects.append(o)
        elif kw == "generator":
            if len(pos) != 1:
                raise ParseError(n, "generator takes one id")
            gid = _ident(n, pos[0], "generator id")
            if gid in gens:
                raise ParseError(n, f"duplicate generator {gid!r}")
            extra = _need(n, kv, "source", "target", "shifted_degree", "tag")
            if set(extra) - {"pair", "energy"}:
                raise ParseError(n, f"unknown field(s) {', '.join(sorted(set(extra) - {'pair', 'energy'}))}")
            for k in ("source", "target"):
                if kv[k] not in objects:
                    raise ParseError(n, f"unknown object {kv[k]!r}")
            if kv["tag"] not in TAGS:
                raise ParseError(n, f"unknown tag {kv['tag']!r}")
            pair = tuple(kv["pair"].split(",")) if "pair" in kv else None
            if pair is not None and len(pair) != 2:
                raise ParseError(n, "pair takes two comma-separated points")
            energy = _rat(n, kv["energy"], "energy") if "energy" in kv else None
            try:
                gens[gid] = Generator(gid, kv["source"], kv["target"], _int(n, kv["shifted_degree"], "degree"),
                                      kv["tag"], pair, energy)
            except StructureError as exc:
                raise ParseError(n, str(exc)) from None
        elif kw == "unit":
            if len(pos) != 2:
                raise ParseError(n, "unit takes an object and a generator")
            o, g = pos
            if o not in objects:
                raise ParseError(n, f"unknown object {o!r}")
            if g not in gens:
                raise ParseError(n, f"unknown generator {g!r}")
            if o in units:
                raise ParseError(n, f"object {o} already has a unit")
            G = gens[g]
            if (G.source, G.target) != (o, o) or red(G.degree) != 0:
                raise ParseError(n, f"degree mismatch: unit {g} must be a degree-0 element of hom({o},{o})")
            units[o] = g
        elif kw in ("op", "curvature"):
            need = ("inputs", "output", "coeff", "exponent") if kw == "op" else ("object", "output", "coeff", "exponent")
            extra = _need(n, kv, *need)
            if extra:
                raise ParseError(n, f"unknown field(s) {', '.join(extra)}")
            if kw == "op":
                w = _word(n, kv["inputs"], gens)
                if not w:
                    raise ParseError(n, "op needs at least one input; use curvature rows for m_0")
                for a, b in zip(w, w[1:]):
                    if gens[a].target != gens[b].source:
                        raise ParseError(n, f"non-composable tuple: {a} ends at {gens[a].target}, {b} starts at {gens[b].source}")
                src, tgt = gens[w[0]].source, gens[w[-1]].target
                deg = 1 + sum(gens[x].shifted_degree for x in w)
            else:
                if kv["object"] not in objects:
                    raise ParseError(n, f"unknown object {kv['object']!r}")
                w = ()
                src = tgt = kv["object"]
                deg = 1
            z = kv["output"]
            if z not in gens:
                raise ParseError(n, f"unknown generator {z!r}")
            if (gens[z].source, gens[z].target) != (src, tgt):
                raise ParseError(n, f"output {z} is not in hom({src},{tgt})")
            if red(gens[z].shifted_degree) != red(deg):
                raise ParseError(n, f"degree mismatch: output {z} has shifted degree {gens[z].shifted_degree}, expected {deg}")
            c = _coeff(n, kv["coeff"], ring)
            e = _exponent(n, kv["exponent"], gap, E)
            if kw == "op":
                _put(n, ops, w, z, e, c)
            else:
                if e <= 0:
                    raise ParseError(n, "curvature must vanish modulo Lambda_+ (exponent 0 given)")
                _put(n, curv, src, z, e, c)
        elif kw == "meta":
            parts = line.split(None, 2)
            if len(parts) < 3:
                raise ParseError(n, "meta takes a key and a value")
            if parts[1] in meta:
                raise ParseError(n, f"duplicate meta key {parts[1]!r}")
            meta[parts[1]] = parts[2]
    missing = [k for k in ("ground_ring", "cutoff", "gap_generators") if k not in header]
    if missing:
        raise ParseError(first_line, f"missing header field(s) {', '.join(missing)}")
    return AInftyStructure(
        ring=header["ground_ring"],
        objects=tuple(objects),
        generators=gens,
        ops=ops,
        curvature=curv,
        units=units,
        gap=header["gap_generators"],
        cutoff=header["cutoff"],
        grading_modulus=header.get("grading_modulus", 0),
        metadata=meta,
    )


def _expect_section(L: _Lines, role: str) -> AInftyStructure:
    r = L.next()
    if r is None:
        raise ParseError(0, f"missing 'begin {role}' section")
    n, line = r
    if line.split() != ["begin", role]:
        raise ParseError(n, f"expected 'begin {role}'")
    return _parse_algebra(L, stop_at_end=True)


def _module_generators(L: _Lines, mod: int) -> dict:
    basis = {}
    while L.peek() and L.peek()[1].split()[0] == "module_generator":
        n, line = L.next()
        kw, pos, kv = _split(n, line)
        if len(pos) != 1:
            raise ParseError(n, "module_generator takes one id")
        y = _ident(n, pos[0], "module generator id")
        if y in basis:
            raise ParseError(n, f"duplicate module generator {y!r}")
        if _need(n, kv, "shifted_degree"):
            raise ParseError(n, "unknown field on module_generator")
        basis[y] = _int(n, kv["shifted_degree"], "degree")
    return basis


def _cyclic_rows(L: _Lines, basis, R: AInftyStructure):
    el = {}
    while L.peek() and L.peek()[1].split()[0] == "cyclic":
        n, line = L.next()
        _, _, kv = _split(n, line)
        if _need(n, kv, "generator", "coeff", "exponent"):
            raise ParseError(n, "unknown field on cyclic row")
        y = kv["generator"]
        if y not in basis:
            raise ParseError(n, f"unknown module generator {y!r}")
        e = _exponent(n, kv["exponent"], R.gap, R.cutoff)
        if (y, e) in el:
            raise ParseError(n, "duplicate cyclic entry")
        el[(y, e)] = _coeff(n, kv["coeff"], R.ring)
    return CyclicElement(el) if el else None


def _meta_rows(L: _Lines) -> dict:
    meta = {}
    while L.peek() and L.peek()[1].split()[0] == "meta":
        n, line = L.next()
        parts = line.split(None, 2)
        if len(parts) < 3:
            raise ParseError(n, "meta takes a key and a value")
        meta[parts[1]] = parts[2]
    return meta


def _trailing(L: _Lines):
    r = L.peek()
    if r is not None:
        raise ParseError(r[0], f"unexpected row {r[1].split()[0]!r}")


def _module_op_check(n, R: AInftyStructure, basis, y, word_deg, z):
    red = R.reduce_degree
    if red(basis[z]) != red(1 + basis[y] + word_deg):
        raise ParseError(n, f"degree mismatch: output {z} has shifted degree {basis[z]}, expected {1 + basis[y] + word_deg}")


def _parse_module(L: _Lines) -> ModuleDocument:
    C = _expect_section(L, "base")
    if len(C.objects) != 1:
        raise ParseError(1, "module base must have exactly one object")
    basis = _module_generators(L, C.grading_modulus)
    ops: dict = {}
    while L.peek() and L.peek()[1].split()[0] == "n_op":
        n, line = L.next()
        _, _, kv = _split(n, line)
        if _need(n, kv, "module", "inputs", "output", "coeff", "exponent"):
            raise ParseError(n, "unknown field on n_op row")
        y, z = kv["module"], kv["output"]
        for m in (y, z):
            if m not in basis:
                raise ParseError(n, f"unknown module generator {m!r}")
        w = _word(n, kv["inputs"], C.generators)
        _module_op_check(n, C, basis, y, sum(C.gen(x).shifted_degree for x in w), z)
        e = _exponent(n, kv["exponent"], C.gap, C.cutoff)
        _put(n, ops, (y,) + w, z, e, _coeff(n, kv["coeff"], C.ring))
    cyc = _cyclic_rows(L, basis, C)
    meta = _meta_rows(L)
    _trailing(L)
    return ModuleDocument(RightModule(C, basis, ops, meta), cyc)


def _parse_trimodule(L: _Lines) -> TriModuleDocument:
    C1 = _expect_section(L, "left1")
    C12 = _expect_section(L, "left12")
    C2 = _expect_section(L, "right")
    for C, role in ((C1, "left1"), (C12, "left12"), (C2, "right")):
        if len(C.objects) != 1:
            raise ParseError(1, f"{role} algebra must have exactly one object")
    basis = _module_generators(L, C2.grading_modulus)
    ops: dict = {}
    while L.peek() and L.peek()[1].split()[0] == "n_op":
        n, line = L.next()
        _, _, kv = _split(n, line)
        if _need(n, kv, "left1", "left12", "module", "right", "output", "coeff", "exponent"):
            raise ParseError(n, "unknown field on n_op row")
        y, z = kv["module"], kv["output"]
        for m in (y, z):
            if m not in basis:
                raise ParseError(n, f"unknown module generator {m!r}")
        u = _word(n, kv["left1"], C1.generators)
        v = _word(n, kv["left12"], C12.generators)
        w = _word(n, kv["right"], C2.generators)
        deg = sum(C1.gen(x).shifted_degree for x in u) + sum(C12.gen(x).shifted_degree for x in v)
        deg += sum(C2.gen(x).shifted_degree for x in w)
        _module_op_check(n, C2, basis, y, deg, z)
        e = _exponent(n, kv["exponent"], C2.gap, C2.cutoff)
        _put(n, ops, (u, v, y, w), z, e, _coeff(n, kv["coeff"], C2.ring))
    cyc = _cyclic_rows(L, basis, C2)
    meta = _meta_rows(L)
    _trailing(L)
    return TriModuleDocument(TriModule(C1, C12, C2, basis, ops, meta), cyc)


def _parse_cochain(L: _Lines) -> BoundingCochain:
    r = L.next()
    if r is None or r[1].split()[0] != "object":
        raise ParseError(r[0] if r else 0, "cochain needs an 'object' row first")
    n, line = r
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(n, "object takes one name")
    obj = parts[1]
    switching = False
    if L.peek() and L.peek()[1].split()[0] == "switching_supported":
        n, line = L.next()
        switching = line.split()[1:] == ["true"]
    el = {}
    while L.peek() and L.peek()[1].split()[0] == "term":
        n, line = L.next()
        _, _, kv = _split(n, line)
        if _need(n, kv, "generator", "coeff", "exponent"):
            raise ParseError(n, "unknown field on term row")
        g = _ident(n, kv["generator"], "generator id")
        e = _rat(n, kv["exponent"], "exponent")
        if e < 0:
            raise ParseError(n, f"filtration violation: negative exponent {kv['exponent']}")
        if (g, e) in el:
            raise ParseError(n, "duplicate term")
        el[(g, e)] = _rat(n, kv["coeff"], "coefficient")
        if el[(g, e)] == 0:
            raise ParseError(n, "zero coefficient rows are not canonical")
        if el[(g, e)].denominator == 1:
            el[(g, e)] = int(el[(g, e)])
    _trailing(L)
    return BoundingCochain(obj, el, switching)


def _parse_functor(L: _Lines) -> AInftyFunctor:
    S = _expect_section(L, "source")
    T = _expect_section(L, "target")
    omap = {}
    while L.peek() and L.peek()[1].split()[0] == "object_map":
        n, line = L.next()
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(n, "object_map takes two objects")
        if parts[1] not in S.objects or parts[2] not in T.objects:
            raise ParseError(n, f"unknown object in object_map {parts[1]} {parts[2]}")
        omap[parts[1]] = parts[2]
    comps: dict = {}
    while L.peek() and L.peek()[1].split()[0] == "fop":
        n, line = L.next()
        _, _, kv = _split(n, line)
        if _need(n, kv, "inputs", "output", "coeff", "exponent"):
            raise ParseError(n, "unknown field on fop row")
        w = _word(n, kv["inputs"], S.generators)
        if not w:
            raise ParseError(n, "fop needs at least one input")
        if not S.is_composable(w):
            raise ParseError(n, f"non-composable tuple {kv['inputs']}")
        z = kv["output"]
        if z not in T.generators:
            raise ParseError(n, f"unknown generator {z!r}")
        a, b = S.word_ends(w)
        if (T.gen(z).source, T.gen(z).target) != (omap.get(a), omap.get(b)):
            raise ParseError(n, f"output {z} is not in hom(F {a}, F {b})")
        if T.reduce_degree(T.gen(z).shifted_degree - sum(S.gen(x).shifted_degree for x in w)) != 0:
            raise ParseError(n, f"degree mismatch: functor output {z}")
        e = _exponent(n, kv["exponent"], T.gap, T.cutoff)
        _put(n, comps, w, z, e, _coeff(n, kv["coeff"], T.ring))
    _trailing(L)
    missing = [o for o in S.objects if o not in omap]
    if missing:
        raise ParseError(0, f"object_map misses {missing}")
    return AInftyFunctor(S, T, omap, comps)


def _parse_instanton(L: _Lines) -> InstantonComplex:
    mod, ring = None, None
    gens, counts, meta = {}, {}, {}
    while L.peek():
        n, line = L.next()
        parts = line.split()
        kw = parts[0]
        if kw == "grading_mod":
            mod = _int(n, parts[1] if len(parts) > 1 else "", "grading modulus")
            if mod not in (4, 8):
                raise ParseError(n, f"grading modulus must be 4 or 8, got {mod}")
        elif kw == "ring":
            try:
                ring = GroundRing.parse(parts[1] if len(parts) > 1 else "")
            except (NovikovError, ValueError) as exc:
                raise ParseError(n, str(exc)) from None
            if ring is GroundRing.Q:
                raise ParseError(n, "instanton complexes use Z2 or Z")
        elif kw == "generator":
            if mod is None or ring is None:
                raise ParseError(n, "grading_mod and ring must precede generators")
            if len(parts) != 3:
                raise ParseError(n, "generator takes a name and a grading")
            g = _ident(n, parts[1], "generator name")
            if g in gens:
                raise ParseError(n, f"duplicate generator {g!r}")
            mu = _int(n, parts[2], "grading")
            if not 0 <= mu < mod:
                raise ParseError(n, f"grading {mu} is outside 0..{mod - 1}")
            gens[g] = mu
        elif kw == "count" or len(parts) == 3 and kw not in ("generator", "meta"):
            if kw != "count":
                parts = ["count"] + parts  # bare `a b n` row
            if len(parts) != 4:
                raise ParseError(n, "count takes two generators and an integer")
            a, b = parts[1], parts[2]
            for g in (a, b):
                if g not in gens:
                    raise ParseError(n, f"unknown generator {g!r}")
            if (a, b) in counts:
                raise ParseError(n, f"duplicate count for ({a},{b})")
            k = _int(n, parts[3], "count")
            if k == 0:
                raise ParseError(n, "zero counts are not canonical")
            counts[(a, b)] = k
        elif kw == "meta":
            p = line.split(None, 2)
            if len(p) < 3:
                raise ParseError(n, "meta takes a key and a value")
            meta[p[1]] = p[2]
        else:
            raise ParseError(n, f"unexpected row {kw!r}")
    if mod is None or ring is None:
        raise ParseError(1, "instanton document needs grading_mod and ring")
    try:
        return InstantonComplex(gens, mod, ring, counts, meta)
    except InstantonError as exc:
        raise ParseError(1, str(exc)) from None


def parse_document(text: str):
    """Parse any document; returns the object for its ``kind``."""
    obj = _parse_any(text)
    check = getattr(obj.trimodule if isinstance(obj, TriModuleDocument) else
                    obj.module if isinstance(obj, ModuleDocument) else obj, "validate", None)
    if check is not None and not isinstance(obj, BoundingCochain):
        try:
            check()
        except (StructureError, NovikovError) as exc:
            raise ParseError(1, f"invalid document: {exc}") from None
    return obj


def _parse_any(text: str):
    L = _Lines(text)
    r = L.next()
    if r is None:
        raise ParseError(1, "empty document")
    n, line = r
    parts = line.replace("kind:", "kind ", 1).split()
    if parts[0] != "kind" or len(parts) != 2:
        raise ParseError(n, "document must start with 'kind <name>'")
    kind = parts[1]
    if kind == "ainfty":
        A = _parse_algebra(L, stop_at_end=False)
        _trailing(L)
        return A
    if kind == "module":
        return _parse_module(L)
    if kind == "trimodule":
        return _parse_trimodule(L)
    if kind == "cochain":
        return _parse_cochain(L)
    if kind == "functor":
        return _parse_functor(L)
    if kind == "instanton":
        return _parse_instanton(L)
    raise ParseError(n, f"unknown kind {kind!r}")


def parse_as(text: str, kind: type):
    obj = parse_document(text)
    if isinstance(obj, kind):
        return obj
    raise ParseError(1, f"expected a {kind.__name__} document, got {type(obj).__name__}")


def read_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


def write_file(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_document(obj))
