"""Seeded generators for valid-by-construction corpus instances.

Strict dg categories come from endomorphisms of random two-step complexes.
Higher and curved structures are produced by deforming with a random
degree-0 element and then conjugating the bar coderivation by a filtered
coalgebra automorphism, so the A-infinity relation holds automatically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .complexes import ChainComplex, elem_id, endomorphism_category
from .core import AInftyStructure, StructureError, vacc, vadd_into
from .deformation import BoundingCochain, _series_product, deform
from .modules import CyclicElement, RightModule, TriModule
from .novikov import GapMonoid, GroundRing

DEFAULT_GAP = (Fraction(1, 2), Fraction(1, 3))


def rng_for(seed) -> random.Random:
    return random.Random(int(seed) & 0xFFFFFFFFFFFFFFFF)


def _coeff(rng, ring: GroundRing):
    if ring is GroundRing.Z2:
        return 1
    return rng.choice([1, -1, 2, -2, 3])


def _exponents(gap: GapMonoid, cutoff, low=0) -> list:
    return [e for e in gap.elements_below(cutoff) if e >= low]


def random_complex(rng, prefix: str, dim: int, ring, gap, cutoff, density=0.6, mixed=False) -> ChainComplex:
    """Two-step complex: degree-0 vectors map to degree-1 vectors, so the differential squares to zero.

    ``mixed`` forces both degrees to occur (when ``dim >= 2``), which guarantees
    degree-0 cochains in the shifted grading of its endomorphisms.
    """
    degs = [0] + [rng.choice([0, 1]) for _ in range(dim - 1)]
    if mixed and dim >= 2 and 1 not in degs:
        degs[-1] = 1
    basis = [(f"{prefix}{i}", d) for i, d in enumerate(degs)]
    exps = _exponents(gap, cutoff)
    diff: dict = {}
    for v, dv in basis:
        if dv != 0:
            continue
        img: dict = {}
        for w, dw in basis:
            if dw == 1 and rng.random() < density:
                vacc(img, w, rng.choice(exps), _coeff(rng, ring), ring, cutoff)
        if img:
            diff[v] = img
    return ChainComplex(basis, diff)


def gen_strict_dga(
    seed,
    n_objects: int = 1,
    dim: int = 2,
    ring: GroundRing = GroundRing.Q,
    cutoff=5,
    gap_generators=DEFAULT_GAP,
    grading_modulus: int = 0,
    rng: Optional[random.Random] = None,
) -> AInftyStructure:
    """Strict dg category of random complexes; ``dim`` may be an int or a per-object list."""
    rng = rng or rng_for(seed)
    gap = GapMonoid(gap_generators)
    dims = dim if isinstance(dim, (list, tuple)) else [dim] * n_objects
    complexes = {}
    for i, d in enumerate(dims):
        name = "c" if len(dims) == 1 else f"c{i}"
        complexes[name] = random_complex(rng, f"{name}v", d, ring, gap, cutoff)
    A, _ = endomorphism_category(complexes, ring, cutoff, gap, grading_modulus, {"generator": "strict_dga"})
    return A


# --------------------------------------------------------------------------
# filtered coalgebra automorphisms


@dataclass
class FilteredAutomorphism:
    """Components ``Phi_1 = id + N`` and higher ``Phi_k`` keyed by input words.

    ``linear[x]`` is ``N(x)`` (positive valuation), ``higher[word]`` is
    ``Phi_k(word)`` for ``k >= 2``.  Units are fixed and never produced.
    """

    linear: dict = field(default_factory=dict)
    higher: dict = field(default_factory=dict)

    def is_identity(self) -> bool:
        return not self.linear and not self.higher

    def arity(self) -> int:
        return max((len(w) for w in self.higher), default=1)

    def min_higher_valuation(self):
        vals = [min(e for _, e in v) for v in self.higher.values() if v]
        return min(vals, default=math.inf)

    def phi(self, word: tuple) -> dict:
        if len(word) == 1:
            out = {(word[0], Fraction(0)): 1}
            for k, c in self.linear.get(word[0], {}).items():
                out[k] = out.get(k, 0) + c
            return out
        return self.higher.get(word, {})


def identity_automorphism() -> FilteredAutomorphism:
    return FilteredAutomorphism()


def random_automorphism(
    A: AInftyStructure, rng, linear_density=0.3, quadratic_terms=2, min_quadratic=2
) -> FilteredAutomorphism:
    ring, E = A.ring, A.cutoff
    units = set(A.units.values())
    plain = [g for g in A.generators.values() if g.id not in units]
    pos = [e for e in A.gap.elements_below(E) if e > 0]
    high = [e for e in pos if e >= min_quadratic]
    lin: dict = {}
    for x in plain:
        for y in plain:
            if x.id == y.id or (x.source, x.target) != (y.source, y.target):
                continue
            if A.reduce_degree(x.shifted_degree - y.shifted_degree) != 0:
                continue
            if rng.random() < linear_density:
                vacc(lin.setdefault(x.id, {}), y.id, rng.choice(pos), _coeff(rng, ring), ring, E)
    lin = {k: v for k, v in lin.items() if v}
    higher: dict = {}
    if high:
        pairs = [(x, y) for x in plain for y in plain if x.target == y.source]
        for _ in range(quadratic_terms):
            if not pairs:
                break
            x, y = rng.choice(pairs)
            want = A.reduce_degree(x.shifted_degree + y.shifted_degree)
            outs = [z for z in plain if z.source == x.source and z.target == y.target
                    and A.reduce_degree(z.shifted_degree) == want]
            if outs:
                z = rng.choice(outs)
                vacc(higher.setdefault((x.id, y.id), {}), z.id, rng.choice(high), _coeff(rng, ring), ring, E)
    higher = {k: v for k, v in higher.items() if v}
    return FilteredAutomorphism(lin, higher)


def pushforward_arity_bound(A: AInftyStructure, phi: FilteredAutomorphism) -> int:
    """Largest arity at which the conjugated structure can be nonzero below the cutoff."""
    n = max(A.max_arity(), 1)
    if not phi.higher:
        return n
    s = phi.arity()
    lam = phi.min_higher_valuation()
    # blocks of the inverse lose (k - r) / (s - 1) of valuation lam in total
    k = s + n - 1
    while (k + 1 - s - n + 1) * lam < (s - 1) * A.cutoff:
        k += 1
    return k


class _Conjugator:
    def __init__(self, A: AInftyStructure, phi: FilteredAutomorphism):
        self.A, self.phi = A, phi
        self.ring, self.E = A.ring, A.cutoff
        self._psi: dict = {}
        self._hat: dict = {}

    def _apply_phi(self, barvec: dict) -> dict:
        out: dict = {}
        for (w, e), c in barvec.items():
            vadd_into(out, self.phi.phi(w), self.ring, self.E, c, e)
        return out

    def _tensor(self, vecs: list) -> dict:
        """Bar vector of the tensor product of element vectors."""
        acc = {((), Fraction(0)): 1}
        for v in vecs:
            nxt: dict = {}
            for (w, e1), c1 in acc.items():
                for (g, e2), c2 in v.items():
                    vacc(nxt, w + (g,), e1 + e2, c1 * c2, self.ring, self.E)
            acc = nxt
            if not acc:
                break
        return acc

    def _psi1(self, x) -> dict:
        acc = {(x, Fraction(0)): 1}
        cur = dict(acc)
        while cur:
            nxt: dict = {}
            for (g, e), c in cur.items():
                vadd_into(nxt, self.phi.linear.get(g, {}), self.ring, self.E, -c, e)
            vadd_into(acc, nxt, self.ring, self.E)
            cur = nxt
        return acc

    def psi(self, w: tuple) -> dict:
        if w in self._psi:
            return self._psi[w]
        if len(w) == 1:
            out = self._psi1(w[0])
        else:
            inner = self._apply_phi(self.hat(w, min_blocks=2))
            out = {}
            for (g, e), c in inner.items():
                vadd_into(out, self._psi1(g), self.ring, self.E, -c, e)
        self._psi[w] = out
        return out

    def hat(self, w: tuple, min_blocks: int = 1) -> dict:
        """``sum`` over decompositions of ``w`` into blocks of ``psi(b1) x ... x psi(br)``."""
        key = (w, min_blocks)
        if key in self._hat:
            return self._hat[key]
        out: dict = {}
        n = len(w)
        if n == 0:
            if min_blocks <= 0:
                out = {((), Fraction(0)): 1}
        else:
            for j in range(1, n + 1):
                if j == n:
                    if min_blocks > 1:
                        continue
                    rest = {((), Fraction(0)): 1}
                else:
                    rest = self.hat(w[j:], max(min_blocks - 1, 1))
                for (g, e1), c1 in self.psi(w[:j]).items():
                    for (tail, e2), c2 in rest.items():
                        vacc(out, (g,) + tail, e1 + e2, c1 * c2, self.ring, self.E)
        self._hat[key] = out
        return out

    def new_op(self, w: tuple, obj=None) -> dict:
        from .core import bar_apply

        if not w:
            return self._apply_phi(bar_apply(self.A, {((), Fraction(0)): 1}, obj))
        return self._apply_phi(bar_apply(self.A, self.hat(w), obj))


def pushforward(
    A: AInftyStructure, phi: FilteredAutomorphism, max_arity: Optional[int] = None, only=None
) -> AInftyStructure:
    """Structure whose bar coderivation is ``Phi-hat o d-hat o Phi-hat^{-1}``.

    ``only`` is an optional predicate on words; when given, tables are computed
    just for the accepted words (it must accept every subword of an accepted word).
    """
    units = set(A.units.values())
    for x, v in phi.linear.items():
        if x in units or any(g in units for g, _ in v):
            raise StructureError("automorphism must fix units")
    for w, v in phi.higher.items():
        if units.intersection(w) or any(g in units for g, _ in v):
            raise StructureError("automorphism components must vanish on units")
    if phi.is_identity():
        return A.copy()
    bound = pushforward_arity_bound(A, phi)
    if max_arity is not None and bound > max_arity:
        raise StructureError(f"pushforward needs arity {bound}, above the cap {max_arity}")
    conj = _Conjugator(A, phi)
    # letters whose Phi_1^-1 image meets a higher component; a longer word free of
    # them keeps its length under Phi-hat^-1, so d-hat cannot bring it down to Phi's arity
    hot = {x for w in phi.higher for x in w}
    live = {g for g in A.generators if any(z in hot for (z, _) in conj._psi1(g))}
    short = A.max_arity() + phi.arity() - 1
    ops: dict = {}
    for w, obj in A.words(bound, min_len=1):
        if only is not None and not only(w):
            continue
        if len(w) > short and live.isdisjoint(w):
            continue
        v = conj.new_op(w, obj)
        if v:
            ops[w] = v
    curv = {}
    for obj in A.objects:
        v = conj.new_op((), obj)
        if v:
            curv[obj] = v
    out = A.copy(ops=ops, curvature=curv)
    return out


def _phi_sum(A: AInftyStructure, phi: FilteredAutomorphism, head: Optional[dict], b: dict) -> dict:
    """``sum_k Phi_{k+1}(head, b, ..., b)``, or ``sum_k Phi_k(b, ..., b)`` when ``head`` is None."""
    ring, E = A.ring, A.cutoff
    ser = BoundingCochain("", b).series()
    out: dict = {}
    if head is not None:
        for (g, e), c in head.items():
            vadd_into(out, phi.phi((g,)), ring, E, c, e)
    else:
        for (g, e), c in b.items():
            vadd_into(out, phi.phi((g,)), ring, E, c, e)
    for w, vec in phi.higher.items():
        tail = w[1:] if head is not None else w
        if not all(x in ser for x in tail):
            continue
        weight = _series_product([ser[x] for x in tail], ring, E)
        if head is not None:
            hs = [(e, c) for (g, e), c in head.items() if g == w[0]]
            weight = [(e1 + e2, c1 * c2) for e1, c1 in hs for e2, c2 in weight if e1 + e2 < E]
        for e, c in weight:
            vadd_into(out, vec, ring, E, c, e)
    return out


def automorphism_functor(A: AInftyStructure, phi: FilteredAutomorphism, target: Optional[AInftyStructure] = None):
    """``Phi`` as a strict functor ``A -> pushforward(A, Phi)``."""
    from .category import AInftyFunctor

    target = target if target is not None else pushforward(A, phi)
    comps = {(g,): phi.phi((g,)) for g in A.generators}
    comps.update(phi.higher)
    return AInftyFunctor(A, target, {o: o for o in A.objects}, comps)


def transport_cochain(A: AInftyStructure, phi: FilteredAutomorphism, b: BoundingCochain) -> BoundingCochain:
    """``sum_k Phi_k(b, ..., b)``, the image of a bounding cochain."""
    return BoundingCochain(b.object, _phi_sum(A, phi, None, b.element), b.switching_supported)


def transport_module_element(A: AInftyStructure, phi: FilteredAutomorphism, y: dict, b: dict) -> dict:
    """``sum_k Phi_{k+1}(y, b, ..., b)``: the image of ``y`` under the twisted first component."""
    return _phi_sum(A, phi, y, b)


# --------------------------------------------------------------------------
# corpora


def degree_zero_generators(A: AInftyStructure, obj) -> list:
    return [g for g in A.hom(obj, obj) if A.reduce_degree(A.gen(g).shifted_degree) == 0]


def random_element(A, rng, gens, density=0.6, low=None, nonempty=False) -> dict:
    ring, E = A.ring, A.cutoff
    pos = [e for e in A.gap.elements_below(E) if e > 0 and (low is None or e >= low)]
    out: dict = {}
    for g in gens:
        if rng.random() < density:
            vacc(out, g, rng.choice(pos), _coeff(rng, ring), ring, E)
    if nonempty and not out and gens and pos:
        vacc(out, rng.choice(gens), rng.choice(pos), 1, ring, E)
    return out


@dataclass
class CorpusItem:
    structure: AInftyStructure
    bounding: dict  # object -> BoundingCochain
    seed: int = 0


def gen_corpus_item(
    seed,
    ring: GroundRing = GroundRing.Q,
    cutoff=5,
    n_objects: int = 1,
    dim=2,
    deform_prob: float = 0.7,
    automorphism: bool = True,
) -> CorpusItem:
    """Strict category, deformed by random ``beta`` (curved), then conjugated.

    For each object ``-beta`` is a bounding cochain of the curved structure;
    its transport is a bounding cochain of the output.
    """
    rng = rng_for(seed)
    A = gen_strict_dga(seed, n_objects, dim, ring, cutoff, rng=rng)
    betas = {}
    for obj in A.objects:
        gens = degree_zero_generators(A, obj)
        if gens and rng.random() < deform_prob:
            el = random_element(A, rng, gens)
            if el:
                betas[obj] = BoundingCochain(obj, el)
    B = deform(A, betas, require_mc=False) if betas else A
    phi = random_automorphism(B, rng) if automorphism else identity_automorphism()
    C = pushforward(B, phi)
    C.metadata["generator"] = "pushforward"
    bound = {}
    for obj in C.objects:
        beta = betas.get(obj)
        b = BoundingCochain(obj, {k: ring.norm(-c) for k, c in beta.element.items()}) if beta else BoundingCochain(obj, {})
        bound[obj] = transport_cochain(B, phi, b)
    return CorpusItem(C, bound, int(seed))


def gen_corpus(n: int, ring: GroundRing = GroundRing.Q, base_seed: int = 0, **kw) -> list:
    return [gen_corpus_item(base_seed + i, ring, **kw) for i in range(n)]


# --------------------------------------------------------------------------
# cyclic scenarios


def _copy_complex(cx: ChainComplex, prefix: str) -> tuple[ChainComplex, dict]:
    ren = {v: f"{prefix}{i}" for i, (v, _) in enumerate(cx.basis)}
    basis = [(ren[v], d) for v, d in cx.basis]
    diff = {ren[v]: {(ren[w], e): c for (w, e), c in img.items()} for v, img in cx.differential.items()}
    return ChainComplex(basis, diff), ren


@dataclass
class CyclicScenario:
    module: RightModule
    one: CyclicElement
    planted: BoundingCochain
    category: Optional[AInftyStructure] = None


def hom_module(A: AInftyStructure, src, base_obj) -> RightModule:
    """``D = hom(src, base_obj)`` as a right module over ``End(base_obj)`` via ``n_k(y; x) = m_{k+1}(y, x)``."""
    basis = {g: A.gen(g).shifted_degree for g in A.hom(src, base_obj)}
    base = A.full_subcategory([base_obj])
    ops: dict = {}
    for y in basis:
        v = A.ops.get((y,))
        if v:
            ops[(y,)] = v
    for w, vec in A.ops.items():
        if len(w) >= 2 and w[0] in basis and all(x in base.generators for x in w[1:]):
            ops[w] = vec
    return RightModule(base, basis, ops)


def gen_cyclic_scenario(
    seed,
    ring: GroundRing = GroundRing.Q,
    cutoff=5,
    dim: int = 2,
    planted: Optional[dict] = None,
    automorphism: bool = True,
) -> CyclicScenario:
    """Module ``hom(c', c)`` over ``End(c)`` where ``c'`` is a copy of ``c``.

    ``c`` is deformed by ``beta`` (``planted`` overrides the random choice of
    ``-beta``); ``1`` is the transported identity map ``c' -> c``.  The planted
    bounding cochain is ``-beta`` transported along the automorphism.
    """
    rng = rng_for(seed)
    gap = GapMonoid(DEFAULT_GAP)
    cx = random_complex(rng, "v", dim, ring, gap, cutoff, mixed=True)
    cx2, ren = _copy_complex(cx, "w")
    A, model = endomorphism_category({"c": cx, "c'": cx2}, ring, cutoff, gap, 0, {"generator": "cyclic"})
    one = {}
    for v, _ in cx.basis:
        vacc(one, elem_id(v, ren[v]), 0, 1, ring, cutoff)
    if planted is None:
        gens = degree_zero_generators(A, "c")
        beta_el = random_element(A, rng, gens, nonempty=True) if gens else {}
    else:
        beta_el = {k: ring.norm(-c) for k, c in planted.items()}
    B = deform(A, {"c": BoundingCochain("c", beta_el)}, require_mc=False) if beta_el else A
    phi = random_automorphism(B, rng) if automorphism else identity_automorphism()
    # only hom(c', c) followed by End(c), and End(c) words, feed the module
    kind = {g.id: (g.source, g.target) for g in B.generators.values()}

    def wanted(w):
        if kind[w[0]] not in (("c'", "c"), ("c", "c")):
            return False
        return all(kind[x] == ("c", "c") for x in w[1:])

    C = pushforward(B, phi, only=wanted)
    b = BoundingCochain("c", {k: ring.norm(-c) for k, c in beta_el.items()})
    b2 = transport_cochain(B, phi, b)
    one2 = transport_module_element(B, phi, one, b.element)
    D = hom_module(C, "c'", "c")
    D.metadata["one_degree"] = "0"
    return CyclicScenario(D, CyclicElement(one2), b2, C)


def relabel_module(D: RightModule, one: CyclicElement, rng):
    """Copy of ``(D, one)`` with fresh generator names and shuffled table order.

    Returns the copy and the map from new base generator names back to the old ones.
    """
    C = D.base
    gens = list(C.generators)
    mods = list(D.basis)
    rng.shuffle(gens)
    rng.shuffle(mods)
    gname = {g: f"q{i}" for i, g in enumerate(gens)}
    mname = {y: f"p{i}" for i, y in enumerate(mods)}

    def shuffled(d):
        items = list(d.items())
        rng.shuffle(items)
        return items

    def vec(v, names):
        return {(names[z], e): c for (z, e), c in shuffled(v)}

    generators = {gname[g]: replace(C.generators[g], id=gname[g]) for g in gens}
    ops = {tuple(gname[x] for x in w): vec(v, gname) for w, v in shuffled(C.ops)}
    curv = {o: vec(v, gname) for o, v in C.curvature.items()}
    units = {o: gname[g] for o, g in C.units.items()}
    C2 = replace(C, generators=generators, ops=ops, curvature=curv, units=units)
    basis = {mname[y]: D.basis[y] for y in mods}
    n_ops = {(mname[k[0]],) + tuple(gname[x] for x in k[1:]): vec(v, mname) for k, v in shuffled(D.n_ops)}
    D2 = RightModule(C2, basis, n_ops, dict(D.metadata))
    one2 = CyclicElement(vec(one.element, mname))
    return D2, one2, {v: k for k, v in gname.items()}


# --------------------------------------------------------------------------
# tri-modules


def tensor_trimodule(A: AInftyStructure, B: AInftyStructure, objs_a=("c1", "c2"), objs_b=("r", "s")) -> TriModule:
    """``D = hom(c1, c2) (x) hom(r, s)``.

    The first factor is a bimodule over ``End(c1)`` (left) and ``End(c2)``
    (right) through the operations of ``A``; the second is a left module over
    ``End(r)`` through ``B`` (``s`` must be uncurved).  Left ``End(c1)`` and
    right ``End(c2)`` words act on the first factor, ``End(r)`` words on the
    second, and mixed words act by zero.  First-factor operations carry the
    sign ``(-1)^(|w| + deg' y2 (1 + |u|))``.
    """
    c1, c2 = objs_a
    r, s = objs_b
    if B.curvature.get(s):
        raise StructureError(f"object {s} must be uncurved")
    ring, E = A.ring, A.cutoff
    C1, C2, C12 = A.full_subcategory([c1]), A.full_subcategory([c2]), B.full_subcategory([r])
    Y1 = {g: A.gen(g).shifted_degree for g in A.hom(c1, c2)}
    Y2 = {g: B.gen(g).shifted_degree for g in B.hom(r, s)}
    basis = {f"{a}|{b}": Y1[a] + Y2[b] + 1 for a in Y1 for b in Y2}
    ops: dict = {}
    for w, vec in A.ops.items():
        pos = [i for i, x in enumerate(w) if x in Y1]
        if len(pos) != 1:
            continue
        i = pos[0]
        u, y, ww = w[:i], w[i], w[i + 1 :]
        if not all(x in C1.generators for x in u) or not all(x in C2.generators for x in ww):
            continue
        pu = sum(A.parity(x) for x in u)
        pw = sum(A.parity(x) for x in ww)
        for y2, d2 in Y2.items():
            sign = -1 if (pw + d2 * (1 + pu)) % 2 else 1
            out = ops.setdefault((u, (), f"{y}|{y2}", ww), {})
            for (z, e), c in vec.items():
                vacc(out, f"{z}|{y2}", e, sign * c, ring, E)
    for w, vec in B.ops.items():
        if w[-1] not in Y2 or not all(x in C12.generators for x in w[:-1]):
            continue
        for y1 in Y1:
            out = ops.setdefault(((), w[:-1], f"{y1}|{w[-1]}", ()), {})
            for (z, e), c in vec.items():
                vacc(out, f"{y1}|{z}", e, c, ring, E)
    return TriModule(C1, C12, C2, basis, ops)


@dataclass
class TriScenario:
    trimodule: TriModule
    b1: BoundingCochain
    b12: BoundingCochain
    b2: BoundingCochain
    one: Optional[CyclicElement] = None


def _quiver_filter(A: AInftyStructure, loops: tuple, bridge: tuple):
    """Accept words in ``End(a)*``, ``End(b)*`` and ``End(a)* hom(a, b) End(b)*`` for ``bridge = (a, b)``."""
    kind = {g.id: (g.source, g.target) for g in A.generators.values()}
    a, b = bridge

    def ok(w):
        ks = [kind[x] for x in w]
        if all(k == ks[0] and k[0] == k[1] and k[0] in loops for k in ks):
            return True
        cross = [i for i, k in enumerate(ks) if k == (a, b)]
        if len(cross) != 1:
            return False
        i = cross[0]
        return all(k == (a, a) for k in ks[:i]) and all(k == (b, b) for k in ks[i + 1 :])

    return ok


def _deform_random(A, rng, objs, active=True):
    betas = {}
    for obj in objs if active else ():
        gens = degree_zero_generators(A, obj)
        el = random_element(A, rng, gens, nonempty=True) if gens else {}
        if el:
            betas[obj] = BoundingCochain(obj, el)
    B = deform(A, betas, require_mc=False) if betas else A
    tilde = {o: BoundingCochain(o, {k: A.ring.norm(-c) for k, c in betas[o].element.items()} if o in betas else {})
             for o in A.objects}
    return B, tilde


def gen_trimodule_scenario(
    seed, ring: GroundRing = GroundRing.Q, cutoff=5, dim: int = 2, r_dim: int = 2, cyclic: bool = False,
    planted: bool = True,
) -> TriScenario:
    """Tensor tri-module with planted bounding cochains on all three algebras.

    With ``cyclic=True`` the object ``c1`` is a copy of ``c2`` and ``r`` is
    one-dimensional, so the reduced module has a cyclic element: the image of
    the identity map.  The planted ``b2`` is then the unique solution.
    ``planted=False`` skips the deformations, so every cochain is zero.
    """
    rng = rng_for(seed)
    gap = GapMonoid(DEFAULT_GAP)
    cx2 = random_complex(rng, "v", dim, ring, gap, cutoff, mixed=True)
    if cyclic:
        cx1, ren = _copy_complex(cx2, "u")
        r_dim = 1
    else:
        cx1 = random_complex(rng, "u", dim, ring, gap, cutoff, mixed=True)
    A, _ = endomorphism_category({"c1": cx1, "c2": cx2}, ring, cutoff, gap)
    A1, tA = _deform_random(A, rng, ("c1", "c2"), planted)
    phiA = random_automorphism(A1, rng)
    A2 = pushforward(A1, phiA, only=_quiver_filter(A1, ("c1", "c2"), ("c1", "c2")))
    rx = random_complex(rng, "r", r_dim, ring, gap, cutoff, mixed=True)
    sx = ChainComplex([("s0", rng.choice([0, 1]))], {})
    B, _ = endomorphism_category({"r": rx, "s": sx}, ring, cutoff, gap)
    B1, tB = _deform_random(B, rng, ("r",), planted)
    phiB = random_automorphism(B1, rng)
    B2 = pushforward(B1, phiB, only=_quiver_filter(B1, ("r",), ("r", "s")))
    T = tensor_trimodule(A2, B2)
    b1 = transport_cochain(A1, phiA, tA["c1"])
    b2 = transport_cochain(A1, phiA, tA["c2"])
    b12 = transport_cochain(B1, phiB, tB["r"])
    one = None
    if cyclic:
        ident: dict = {}
        for v, _ in cx2.basis:
            vacc(ident, elem_id(v, ren[v]), 0, 1, ring, cutoff)
        # the twisted image of the identity: b-tilde on c1 sits to the left, on c2 to the right
        img = _phi_sum_two_sided(A1, phiA, ident, tA["c1"].element, tA["c2"].element)
        (y2,) = B2.hom("r", "s")
        one = CyclicElement({(f"{g}|{y2}", e): c for (g, e), c in img.items()})
    return TriScenario(T, b1, b12, b2, one)


def _phi_sum_two_sided(A, phi, y: dict, left: dict, right: dict) -> dict:
    """``sum Phi(left^i, y, right^j)``."""
    ring, E = A.ring, A.cutoff
    ls = BoundingCochain("", left).series()
    rs = BoundingCochain("", right).series()
    ys = BoundingCochain("", y).series()
    out: dict = {}
    for (g, e), c in y.items():
        vadd_into(out, phi.phi((g,)), ring, E, c, e)
    for w, vec in phi.higher.items():
        for i, g in enumerate(w):
            if g not in ys:
                continue
            if not all(x in ls for x in w[:i]) or not all(x in rs for x in w[i + 1 :]):
                continue
            factors = [ls[x] for x in w[:i]] + [ys[g]] + [rs[x] for x in w[i + 1 :]]
            for e, c in _series_product(factors, ring, E):
                vadd_into(out, vec, ring, E, c, e)
    return out


# --------------------------------------------------------------------------
# mutation fuzz


@dataclass
class Mutation:
    word: tuple
    output: str
    exponent: Fraction
    coeff: object


def random_mutation(A: AInftyStructure, rng, max_k: int = 3) -> Optional[Mutation]:
    """A single extra term for some m_k, k <= max_k, respecting hom and degree."""
    words = [w for w, _ in A.words(max_k, 1)]
    rng.shuffle(words)
    exps = _exponents(A.gap, A.cutoff)
    for w in words:
        src, tgt = A.word_ends(w)
        deg = A.reduce_degree(1 + sum(A.gen(x).shifted_degree for x in w))
        outs = [z for z in A.hom(src, tgt) if A.reduce_degree(A.gen(z).shifted_degree) == deg]
        if outs:
            return Mutation(w, rng.choice(outs), rng.choice(exps), _coeff(rng, A.ring))
    return None


def apply_mutation(A: AInftyStructure, mu: Mutation) -> AInftyStructure:
    ops = {k: dict(v) for k, v in A.ops.items()}
    vec = ops.setdefault(mu.word, {})
    vacc(vec, mu.output, mu.exponent, mu.coeff, A.ring, A.cutoff)
    return A.copy(ops=ops)


# --------------------------------------------------------------------------
# instanton complexes


def random_instanton_complex(seed, ring: GroundRing = GroundRing.Z2, grading_mod: int = 8,
                             n_pairs: int = 3, n_free: int = 2, n_moves: int = 6, rng=None):
    """Acyclic pairs plus free generators, hidden by grading-preserving elementary basis changes."""
    from .instanton import InstantonComplex

    rng = rng or rng_for(seed)
    gens: dict = {}
    for i in range(n_pairs):
        mu = rng.randrange(2)  # few gradings, so basis changes have room to mix
        gens[f"p{i}"] = mu
        gens[f"q{i}"] = (mu - 1) % grading_mod
    for i in range(n_free):
        gens[f"f{i}"] = rng.randrange(grading_mod)
    names = list(gens)
    idx = {g: i for i, g in enumerate(names)}
    n = len(names)
    # M[b][a] = <d a, b>
    M = [[0] * n for _ in range(n)]
    for i in range(n_pairs):
        M[idx[f"q{i}"]][idx[f"p{i}"]] = 1
    for _ in range(n_moves):
        g = rng.choice(names)
        peers = [h for h in names if h != g and gens[h] == gens[g]]
        if not peers:
            continue
        h = rng.choice(peers)
        c = 1 if ring is GroundRing.Z2 else rng.choice([1, -1, 2])
        gi, hi = idx[g], idx[h]
        # new basis vector e_g + c e_h: M <- P^-1 M P with P = I + c E[h][g]
        for row in M:
            row[gi] += c * row[hi]
        for j in range(n):
            M[hi][j] -= c * M[gi][j]
    if ring is GroundRing.Z2:
        M = [[x % 2 for x in row] for row in M]
    perm = names[:]
    rng.shuffle(perm)
    counts = {(a, b): M[idx[b]][idx[a]] for a in perm for b in perm if M[idx[b]][idx[a]]}
    return InstantonComplex({g: gens[g] for g in perm}, grading_mod, ring, counts)
