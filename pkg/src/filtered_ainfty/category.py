"""Opposite categories, A-infinity functors, multi-functors, homotopy witnesses, Yoneda."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .complexes import ChainComplex, endomorphism_category
from .core import (
    AInftyStructure,
    CheckReport,
    Generator,
    Residual,
    StructureError,
    bar_coderivation,
    format_vec,
    vacc,
    vadd_into,
)
from .novikov import GroundRing


class PreconditionError(ValueError):
    pass


# --------------------------------------------------------------------------
# opposite


def _opp_sign(A: AInftyStructure, word: tuple) -> int:
    par = [A.parity(x) for x in word]
    s = 1
    tot = 0
    for p in par:
        s += tot * p
        tot += p
    return -1 if s % 2 else 1


def opposite(A: AInftyStructure) -> AInftyStructure:
    """``m_k^op(x_1..x_k) = (-1)^(1 + sum_{i<j} deg' x_i deg' x_j) m_k(x_k..x_1)``."""
    gens = {
        g.id: Generator(g.id, g.target, g.source, g.shifted_degree, g.tag, g.switch_pair, g.energy_class)
        for g in A.generators.values()
    }
    ring = A.ring
    ops = {}
    for w, vec in A.ops.items():
        rw = tuple(reversed(w))
        sg = _opp_sign(A, rw)
        ops[rw] = {k: ring.norm(sg * c) for k, c in vec.items()}
    curv = {o: {k: ring.norm(-c) for k, c in v.items()} for o, v in A.curvature.items()}
    meta = dict(A.metadata)
    meta["opposite"] = "false" if meta.get("opposite") == "true" else "true"
    if meta["opposite"] == "false":
        del meta["opposite"]
    return A.copy(generators=gens, ops=ops, curvature=curv, metadata=meta)


# --------------------------------------------------------------------------
# functors


@dataclass
class AInftyFunctor:
    """Strict functor: ``components[word]`` is ``F_k(word)`` in the target, ``k >= 1``."""

    source: AInftyStructure
    target: AInftyStructure
    object_map: dict
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        ring, cut = self.target.ring, self.target.cutoff
        clean = {}
        for w, v in self.components.items():
            if not w:
                raise StructureError("only strict functors are supported (no component on the empty word)")
            out: dict = {}
            vadd_into(out, v, ring, cut)
            if out:
                clean[tuple(w)] = out
        self.components = clean

    @property
    def strict(self) -> bool:
        return True

    def max_arity(self) -> int:
        return max((len(w) for w in self.components), default=0)

    def validate(self) -> None:
        S, T = self.source, self.target
        for o in S.objects:
            if self.object_map.get(o) not in T.objects:
                raise StructureError(f"object {o} has no image in the target")
        for w, vec in self.components.items():
            if not S.is_composable(w):
                raise StructureError(f"functor component on non-composable word {w}")
            a, b = S.word_ends(w)
            want = (self.object_map[a], self.object_map[b])
            deg = sum(S.gen(x).shifted_degree for x in w)
            for (z, e), _ in vec.items():
                g = T.gen(z)
                if (g.source, g.target) != want:
                    raise StructureError(f"F{w} has output {z} outside hom{want}")
                if T.reduce_degree(g.shifted_degree - deg) != 0:
                    raise StructureError(f"F{w} has output {z} of the wrong degree")
                if e < 0:
                    raise StructureError(f"F{w}: negative exponent {e} breaks the filtration")

    def image(self, word: tuple) -> dict:
        return self.components.get(tuple(word), {})

    def same_tables(self, other: "AInftyFunctor") -> bool:
        return self.object_map == other.object_map and self.components == other.components


def apply_table(table: dict, args: list, ring, cutoff) -> dict:
    """Multilinear extension of a word table to a list of element vectors."""
    out: dict = {}
    acc = [((), Fraction(0), 1)]
    for v in args:
        if not v:
            return {}
        acc = [(w + (g,), e1 + e2, c1 * c2) for w, e1, c1 in acc for (g, e2), c2 in v.items() if e1 + e2 < cutoff]
        if not acc:
            return {}
    for w, e, c in acc:
        vec = table.get(w)
        if vec:
            vadd_into(out, vec, ring, cutoff, c, e)
    return out


def _compositions(n: int):
    """Ordered splittings of ``range(n)`` into consecutive nonempty blocks, as boundary lists."""
    for mask in range(1 << max(n - 1, 0)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        yield cuts


def functor_residual(F: AInftyFunctor, word: tuple, obj=None) -> dict:
    S, T = F.source, F.target
    ring, cut = T.ring, min(S.cutoff, T.cutoff)
    out: dict = {}
    for (v, e), c in bar_coderivation(S, word, obj).items():
        vadd_into(out, F.image(v), ring, cut, c, e)
    if not word:
        vadd_into(out, T.curvature.get(F.object_map[obj], {}), ring, cut, -1)
        return out
    top = T.max_arity()
    for cuts in _compositions(len(word)):
        if len(cuts) - 1 > top:
            continue
        args = [F.image(word[a:b]) for a, b in zip(cuts, cuts[1:])]
        if any(not x for x in args):
            continue
        vadd_into(out, apply_table(T.ops, args, ring, cut), ring, cut, -1)
    return out


def check_functor(F: AInftyFunctor, max_arity: int) -> CheckReport:
    """``F-hat o d-hat = d-hat o F-hat`` on words up to the cap, plus the unit axioms."""
    rep = CheckReport("functor")
    S, T = F.source, F.target
    try:
        F.validate()
    except StructureError as exc:
        rep.messages.append(str(exc))
        return rep
    for word, obj in S.words(max_arity):
        rep.checked += 1
        res = functor_residual(F, word, obj)
        if res:
            rep.residuals.append(Residual(word, res, obj))
    units = set(S.units.values())
    for o, e in S.units.items():
        want = T.units.get(F.object_map[o])
        got = F.image((e,))
        if want is None or got != {(want, Fraction(0)): 1}:
            rep.messages.append(f"unit F({e}) = {format_vec(got)} expected {want}")
    for w, vec in F.components.items():
        if len(w) >= 2 and units.intersection(w):
            rep.messages.append(f"F({','.join(w)}) = {format_vec(vec)} must vanish on unit input")
    return rep


def identity_functor(A: AInftyStructure) -> AInftyFunctor:
    return AInftyFunctor(A, A, {o: o for o in A.objects}, {(g,): {(g, Fraction(0)): 1} for g in A.generators})


def compose_functors(F: AInftyFunctor, G: AInftyFunctor, max_arity: int) -> AInftyFunctor:
    """``G o F`` on words of length up to ``max_arity``."""
    if (F.target.objects != G.source.objects or F.target.generators != G.source.generators
            or not F.target.same_tables(G.source)):
        raise PreconditionError("functors are not composable: target of F differs from source of G")
    S, T = F.source, G.target
    ring, cut = T.ring, min(S.cutoff, T.cutoff)
    comps: dict = {}
    for word, _ in S.words(max_arity, min_len=1):
        out: dict = {}
        for cuts in _compositions(len(word)):
            args = [F.image(word[a:b]) for a, b in zip(cuts, cuts[1:])]
            if any(not x for x in args):
                continue
            vadd_into(out, apply_table(G.components, args, ring, cut), ring, cut)
        if out:
            comps[word] = out
    omap = {o: G.object_map[F.object_map[o]] for o in S.objects}
    return AInftyFunctor(S, T, omap, comps)


# --------------------------------------------------------------------------
# multi-functors and currying


@dataclass
class MultiFunctor:
    """``components[((c_1, w_1), ..., (c_n, w_n))]`` with ``c_i`` the start object of ``w_i``."""

    sources: tuple
    target: AInftyStructure
    object_map: dict  # tuple of objects -> target object
    components: dict = field(default_factory=dict)

    def image(self, key) -> dict:
        return self.components.get(key, {})


def _words_from(A: AInftyStructure, obj, max_len: int):
    for w, o in A.words(max_len):
        if o == obj:
            yield w


def _end(A, obj, w):
    return A.gen(w[-1]).target if w else obj


def multifunctor_residual(F: MultiFunctor, key: tuple) -> dict:
    """Chain-map defect of the induced map on the tensor product of bar complexes."""
    T = F.target
    ring, cut = T.ring, T.cutoff
    srcs = F.sources
    n = len(srcs)
    out: dict = {}
    pre = 0
    for i, (c, w) in enumerate(key):
        A = srcs[i]
        sg = -1 if pre % 2 else 1
        for (v, e), coef in bar_coderivation(A, w, c).items():
            nk = key[:i] + ((c, v),) + key[i + 1 :]
            vadd_into(out, F.image(nk), ring, cut, sg * coef, e)
        pre += sum(A.parity(x) for x in w)
    # coproduct: each factor word is cut into r consecutive (possibly empty) pieces
    lens = [len(w) for _, w in key]
    total = sum(lens)
    for r in range(1, total + 1):
        for cutlists in itertools.product(*[list(_cuts(L, r)) for L in lens]):
            sign = 0
            pieces = []
            for i, cl in enumerate(cutlists):
                c, w = key[i]
                A = srcs[i]
                row = []
                obj = c
                for a in range(r):
                    piece = w[cl[a] : cl[a + 1]]
                    row.append((obj, piece, sum(A.parity(x) for x in piece)))
                    obj = _end(A, obj, piece)
                pieces.append(row)
            if any(all(not pieces[i][a][1] for i in range(n)) for a in range(r)):
                continue
            # Koszul sign: piece (i, a) passes piece (j, b) for i < j, a > b
            for i in range(n):
                for j in range(i + 1, n):
                    for a in range(r):
                        for b in range(a):
                            sign += pieces[i][a][2] * pieces[j][b][2]
            args = []
            for a in range(r):
                args.append(F.image(tuple((pieces[i][a][0], pieces[i][a][1]) for i in range(n))))
            if any(not x for x in args):
                continue
            sg = -1 if sign % 2 else 1
            vadd_into(out, apply_table(T.ops, args, ring, cut), ring, cut, -sg)
    return out


def _cuts(L: int, r: int):
    for mids in itertools.combinations_with_replacement(range(L + 1), r - 1):
        yield (0,) + mids + (L,)


def check_multifunctor(F: MultiFunctor, max_arity: int) -> CheckReport:
    rep = CheckReport("multifunctor")
    per = []
    for A in F.sources:
        per.append([(o, w) for w, o in A.words(max_arity)])
    for key in itertools.product(*per):
        if sum(len(w) for _, w in key) > max_arity or all(not w for _, w in key):
            continue
        rep.checked += 1
        res = multifunctor_residual(F, key)
        if res:
            rep.residuals.append(Residual(tuple(x for _, w in key for x in w), res))
    return rep


@dataclass
class CurriedFunctor:
    """A functor ``C1 -> Func(C2, C)``.

    ``object_map[c1]`` is the object map of the functor ``F(c1, -)``;
    ``components[(c1, w1)][(c2, w2)]`` is the value of the ``w1`` component
    on the ``C2`` word ``w2``.  ``w1 = ()`` gives the functor ``F(c1, -)``.
    """

    source: AInftyStructure
    inner: AInftyStructure
    target: AInftyStructure
    object_map: dict
    components: dict = field(default_factory=dict)

    def functor_at(self, c1) -> AInftyFunctor:
        comps = {w2: v for (c2, w2), v in self.components.get((c1, ()), {}).items() if w2}
        return AInftyFunctor(self.inner, self.target, dict(self.object_map[c1]), comps)


def curry(F: MultiFunctor) -> CurriedFunctor:
    if len(F.sources) != 2:
        raise PreconditionError(f"curry needs a bifunctor, got {len(F.sources)} factors")
    C1, C2 = F.sources
    omap: dict = {}
    for (a, b), o in F.object_map.items():
        omap.setdefault(a, {})[b] = o
    comps: dict = {}
    for (k1, k2), v in F.components.items():
        comps.setdefault(k1, {})[k2] = dict(v)
    return CurriedFunctor(C1, C2, F.target, omap, comps)


def uncurry(G: CurriedFunctor) -> MultiFunctor:
    omap = {(a, b): o for a, inner in G.object_map.items() for b, o in inner.items()}
    comps = {(k1, k2): dict(v) for k1, inner in G.components.items() for k2, v in inner.items()}
    return MultiFunctor((G.source, G.inner), G.target, omap, comps)


def projection_bifunctor(C1: AInftyStructure, G: AInftyFunctor) -> MultiFunctor:
    """``(c1, c2) -> G(c2)`` with components ``G`` on ``((c1, ()), (c2, w))`` and zero elsewhere."""
    omap = {(a, b): G.object_map[b] for a in C1.objects for b in G.source.objects}
    comps = {}
    for a in C1.objects:
        for w, v in G.components.items():
            comps[((a, ()), (G.source.gen(w[0]).source, w))] = v
    return MultiFunctor((C1, G.source), G.target, omap, comps)


# --------------------------------------------------------------------------
# homotopy equivalence of objects


@dataclass
class HomotopyWitness:
    x: dict
    x_inv: dict
    h: dict
    h_inv: dict


def _require_strict(A: AInftyStructure, what: str):
    if A.curvature:
        raise PreconditionError(f"{what} needs a strict (uncurved) structure")


def _m(A, args, obj=None):
    from .core import evaluate

    return evaluate(A, args, obj)


def verify_homotopy_witness(A: AInftyStructure, c, c2, w: HomotopyWitness) -> bool:
    _require_strict(A, "homotopy equivalence")
    ring, E = A.ring, A.cutoff
    checks = []
    checks.append(_m(A, [w.x]))
    checks.append(_m(A, [w.x_inv]))
    for (a, b, h, e) in ((w.x, w.x_inv, w.h, A.units[c]), (w.x_inv, w.x, w.h_inv, A.units[c2])):
        r = dict(_m(A, [a, b]))
        vacc(r, e, 0, -1, ring, E)
        vadd_into(r, _m(A, [h]) if h else {}, ring, E, -1)
        checks.append(r)
    # homogeneity: every term of x, x' in the right hom
    for vec, want in ((w.x, (c, c2)), (w.x_inv, (c2, c)), (w.h, (c, c)), (w.h_inv, (c2, c2))):
        for (g, _), _ in vec.items():
            gen = A.gen(g)
            if (gen.source, gen.target) != want:
                return False
    return not any(checks)


class SearchBudgetExceeded(RuntimeError):
    pass


def _grid(A: AInftyStructure, src, dst, degree: int, levels=None) -> list:
    """Basis of the Z2 grid: ``(generator, level)`` with the given unshifted degree."""
    if levels is None:
        levels = A.gap.elements_below(A.cutoff)
    gens = [g for g in A.hom(src, dst) if A.reduce_degree(A.gen(g).degree - degree) == 0]
    return [(g, lam) for g in gens for lam in levels]


def _image_bits(A, vec, index) -> int:
    bits = 0
    for key, c in vec.items():
        if c % 2:
            bits ^= 1 << index[key]
    return bits


def _gf2_solve(cols: list, target: int) -> Optional[int]:
    """Find ``s`` with ``xor of cols[i] for bits i of s == target``; cols are int bitsets."""
    basis: dict = {}  # pivot bit -> (vector, combination)
    for i, v in enumerate(cols):
        comb = 1 << i
        while v:
            p = v.bit_length() - 1
            if p not in basis:
                basis[p] = (v, comb)
                break
            bv, bc = basis[p]
            v ^= bv
            comb ^= bc
    comb = 0
    t = target
    while t:
        p = t.bit_length() - 1
        if p not in basis:
            return None
        bv, bc = basis[p]
        t ^= bv
        comb ^= bc
    return comb


def _kernel_gf2(cols: list) -> list:
    basis: dict = {}
    kernel = []
    for i, v in enumerate(cols):
        comb = 1 << i
        while v:
            p = v.bit_length() - 1
            if p not in basis:
                basis[p] = (v, comb)
                break
            bv, bc = basis[p]
            v ^= bv
            comb ^= bc
        if not v:
            kernel.append(comb)
    return kernel


def search_homotopy_witness(
    A: AInftyStructure, c, c2, budget: int = 1 << 16, levels=(Fraction(0),)
) -> Optional[HomotopyWitness]:
    """Exhaustive search for ``x, x'`` over Z2 combinations of ``generator * T^level``.

    ``levels`` are the allowed exponents of ``x`` and ``x'`` (``None`` means
    every monoid element below the cutoff).  Candidates are the degree-0
    cycles of that grid, enumerated through a kernel basis, so there are
    ``2^(dim ker)`` of each; ``h`` and ``h'`` are solved by linear algebra
    over the full grid.  Sound always, complete on the grid; raises
    ``SearchBudgetExceeded`` when the pair count exceeds ``budget``.
    """
    _require_strict(A, "homotopy witness search")
    if A.ring is not GroundRing.Z2:
        raise PreconditionError("homotopy witness search runs over Z2 only")
    ring, E = A.ring, A.cutoff

    if levels is not None:
        levels = [Fraction(x) for x in levels if A.gap.contains(x) and Fraction(x) < E]

    def space(src, dst, deg, lv=None):
        grid = _grid(A, src, dst, deg, lv)
        return grid, {k: i for i, k in enumerate(grid)}

    def elem(grid, bits):
        return {grid[i]: 1 for i in range(len(grid)) if bits >> i & 1}

    def m1_cols(src, dst, grid, tgt_index):
        cols = []
        for g, lam in grid:
            v: dict = {}
            vadd_into(v, A.ops.get((g,), {}), ring, E, 1, lam)
            cols.append(_image_bits(A, v, tgt_index))
        return cols

    gx, ix = space(c, c2, 0, levels)
    gxi, ixi = space(c2, c, 0, levels)
    g1x, i1x = space(c, c2, 1)
    g1xi, i1xi = space(c2, c, 1)
    kx = _kernel_gf2(m1_cols(c, c2, gx, i1x))
    kxi = _kernel_gf2(m1_cols(c2, c, gxi, i1xi))
    total = (1 << len(kx)) * (1 << len(kxi))
    if total > budget:
        raise SearchBudgetExceeded(f"{total} candidate pairs exceed the budget {budget}")
    gh, _ = space(c, c, -1)
    ghi, _ = space(c2, c2, -1)
    g0c, i0c = space(c, c, 0)
    g0c2, i0c2 = space(c2, c2, 0)
    hcols = m1_cols(c, c, gh, i0c)
    hicols = m1_cols(c2, c2, ghi, i0c2)

    def combos(kernel):
        for mask in range(1 << len(kernel)):
            bits = 0
            for i, k in enumerate(kernel):
                if mask >> i & 1:
                    bits ^= k
            yield bits

    unit_c = {(A.units[c], Fraction(0)): 1}
    unit_c2 = {(A.units[c2], Fraction(0)): 1}
    for bx in combos(kx):
        x = elem(gx, bx)
        for bxi in combos(kxi):
            xi = elem(gxi, bxi)
            r1 = dict(_m(A, [x, xi]))
            vadd_into(r1, unit_c, ring, E, -1)
            s1 = _gf2_solve(hcols, _image_bits(A, r1, i0c))
            if s1 is None:
                continue
            r2 = dict(_m(A, [xi, x]))
            vadd_into(r2, unit_c2, ring, E, -1)
            s2 = _gf2_solve(hicols, _image_bits(A, r2, i0c2))
            if s2 is None:
                continue
            w = HomotopyWitness(x, xi, elem(gh, s1), elem(ghi, s2))
            if verify_homotopy_witness(A, c, c2, w):
                return w
    return None


# --------------------------------------------------------------------------
# Yoneda


def _vid(i: int) -> str:
    return f"Y{i}"


@dataclass
class YonedaData:
    functor: AInftyFunctor
    complexes: dict  # object -> ChainComplex
    vector_of: dict  # hom generator id -> complex vector id


def yoneda_object(A: AInftyStructure, c) -> YonedaData:
    """The functor ``c' -> C(c, c')`` on ``A^op`` with values in chain complexes.

    The complex of ``c'`` is ``C(c, c')`` with differential ``m_1``; a word
    ``x_1..x_k`` of ``A^op`` acts by
    ``y -> (-1)^(deg y * sum deg' x_i + sum_{i<j} deg' x_i deg' x_j) m_{k+1}(y, x_k, ..., x_1)``.
    The target is the opposite of the dg category of these complexes.
    """
    _require_strict(A, "Yoneda")
    ring, E = A.ring, A.cutoff
    vector_of = {}
    owner = {}
    complexes = {}
    n = 0
    for o in A.objects:
        basis = []
        for g in A.hom(c, o):
            vector_of[g] = _vid(n)
            owner[_vid(n)] = g
            basis.append((_vid(n), A.gen(g).degree))
            n += 1
        if not basis:
            raise PreconditionError(f"hom({c},{o}) is zero; the complex would be empty")
        diff = {}
        for g in A.hom(c, o):
            img = {(vector_of[z], e): cf for (z, e), cf in A.ops.get((g,), {}).items()}
            if img:
                diff[vector_of[g]] = img
        complexes[o] = ChainComplex(basis, diff)
    ch, model = endomorphism_category(complexes, ring, E, A.gap, A.grading_modulus, {"generator": "yoneda"})
    target = opposite(ch)
    source = opposite(A)
    comps: dict = {}
    for word, _ in source.words(A.max_arity() - 1 if A.max_arity() > 1 else 1, min_len=1):
        rw = tuple(reversed(word))
        src_obj = A.gen(rw[0]).source  # y must end here
        dst_obj = A.gen(rw[-1]).target
        pars = [A.parity(x) for x in word]
        px = sum(pars)
        # reversal sign, as in the opposite structure
        rev = sum(a * b for i, a in enumerate(pars) for b in pars[i + 1 :]) % 2
        mat: dict = {}
        for y in A.hom(c, src_obj):
            sg = -1 if (A.gen(y).degree * px + rev) % 2 else 1
            for (z, e), cf in A.ops.get((y,) + rw, {}).items():
                vacc(mat, (vector_of[z], vector_of[y]), e, sg * cf, ring, E)
        if mat:
            comps[word] = model.to_generators(src_obj, dst_obj, mat)
    F = AInftyFunctor(source, target, {o: o for o in A.objects}, comps)
    return YonedaData(F, complexes, vector_of)
