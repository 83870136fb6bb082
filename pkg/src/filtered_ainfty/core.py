"""Filtered A-infinity categories as finite tables of structure constants.

Elements of hom modules are sparse dicts ``{(generator_id, exponent): coeff}``
meaning ``sum coeff * T^exponent * generator``.  Words in the bar construction
use the same layout with a tuple of generator ids in place of the id.

All degrees stored on generators are *shifted* degrees (degree in ``C[1]``).
Koszul signs are computed from shifted degrees: inserting an operation after
``x_1, ..., x_i`` costs ``(-1)^(deg' x_1 + ... + deg' x_i)``.  This is the same
parity as ``i + sum deg x_j`` read with unshifted degrees, and is the only
choice compatible with the strict unit identities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional

from .novikov import INF, GapMonoid, GroundRing, Novikov, NovikovError, as_fraction

Vec = dict  # {(key, Fraction exponent): coeff}


class StructureError(ValueError):
    """Raised when tables violate composability, degree, filtration or gapping."""


# --------------------------------------------------------------------------
# sparse vector helpers


def vacc(out: dict, key, exp, coeff, ring: GroundRing, cutoff) -> None:
    if exp >= cutoff or coeff == 0:
        return
    k = (key, exp)
    c = ring.norm(out.get(k, 0) + coeff)
    if c == 0:
        out.pop(k, None)
    else:
        out[k] = c


def vadd_into(out: dict, vec: Mapping, ring: GroundRing, cutoff, scale=1, shift=0) -> None:
    mod2 = ring is GroundRing.Z2
    for k, c in vec.items():
        if shift:
            k = (k[0], k[1] + shift)
            if k[1] >= cutoff:
                continue
        elif k[1] >= cutoff:
            continue
        c = out.get(k, 0) + c * scale
        if mod2:
            c %= 2
        if c == 0:
            out.pop(k, None)
        else:
            out[k] = c


def vclean(vec: Mapping, ring: GroundRing, cutoff) -> dict:
    out: dict = {}
    vadd_into(out, vec, ring, cutoff)
    return out


def vneg(vec: Mapping, ring: GroundRing) -> dict:
    return {k: ring.norm(-c) for k, c in vec.items()}


def valuation(vec: Mapping):
    return min((e for _, e in vec), default=INF)


def vec_from(items, ring: GroundRing = GroundRing.Q, cutoff=INF) -> dict:
    """Build a vector from ``{gen: Novikov | number}`` or ``[(gen, exp, coeff)]``."""
    out: dict = {}
    if isinstance(items, Mapping):
        for gen, val in items.items():
            if isinstance(val, Novikov):
                for e, c in val.terms:
                    vacc(out, gen, e, ring.coerce(c), ring, cutoff)
            else:
                vacc(out, gen, Fraction(0), ring.coerce(val), ring, cutoff)
    else:
        for gen, exp, c in items:
            vacc(out, gen, as_fraction(exp), ring.coerce(c), ring, cutoff)
    return out


def to_novikov(vec: Mapping, ring: GroundRing, cutoff) -> dict:
    """Group a sparse vector as ``{key: Novikov}``."""
    grouped: dict = {}
    for (key, exp), c in vec.items():
        grouped.setdefault(key, []).append((exp, c))
    return {k: Novikov(terms, cutoff, ring) for k, terms in sorted(grouped.items(), key=lambda kv: _sort_key(kv[0]))}


def _sort_key(key):
    if isinstance(key, tuple):
        return (len(key), key)
    return (0, (key,))


def sorted_items(vec: Mapping):
    return sorted(vec.items(), key=lambda kv: (_sort_key(kv[0][0]), kv[0][1]))


def format_vec(vec: Mapping) -> str:
    if not vec:
        return "0"
    parts = []
    for (key, exp), c in sorted_items(vec):
        name = "(" + ",".join(key) + ")" if isinstance(key, tuple) else key
        parts.append(f"{Fraction(c)}*T^({exp})*{name}")
    return " + ".join(parts)


# --------------------------------------------------------------------------
# generators and structures

TAGS = ("plain", "diagonal", "switching")


@dataclass(frozen=True)
class Generator:
    id: str
    source: str
    target: str
    shifted_degree: int
    tag: str = "plain"
    switch_pair: Optional[tuple[str, str]] = None
    energy_class: Optional[Fraction] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise StructureError(f"generator {self.id}: unknown tag {self.tag!r}")
        if self.tag == "switching":
            if self.switch_pair is None or len(self.switch_pair) != 2:
                raise StructureError(f"generator {self.id}: switching tag needs an ordered pair (p,q)")
            if self.switch_pair[0] == self.switch_pair[1]:
                raise StructureError(f"generator {self.id}: switching pair needs p != q")
        elif self.switch_pair is not None:
            raise StructureError(f"generator {self.id}: only switching generators carry a pair")

    @property
    def degree(self) -> int:
        """Unshifted degree."""
        return self.shifted_degree + 1


def _reduce_degree(d: int, modulus: int) -> int:
    return d % modulus if modulus else d


@dataclass
class AInftyStructure:
    """Finite filtered A-infinity category.

    ``ops`` maps a composable tuple of generator ids (length >= 1) to the
    sparse vector ``m_k(tuple)``; ``curvature`` maps an object to ``m_0(1)``.
    """

    ring: GroundRing
    objects: tuple
    generators: dict  # id -> Generator, insertion order is canonical
    ops: dict = field(default_factory=dict)
    curvature: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)  # object -> generator id
    gap: GapMonoid = field(default_factory=lambda: GapMonoid([1]))
    cutoff: Fraction = Fraction(5)
    grading_modulus: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.objects = tuple(self.objects)
        self.cutoff = as_fraction(self.cutoff)
        if self.grading_modulus < 0 or self.grading_modulus % 2:
            raise StructureError("grading modulus must be 0 or even")
        self._parity = {g.id: g.shifted_degree % 2 for g in self.generators.values()}
        self._by_source: dict = {}
        for g in self.generators.values():
            if g.source not in self.objects or g.target not in self.objects:
                raise StructureError(f"generator {g.id}: unknown object")
            self._by_source.setdefault(g.source, []).append(g.id)
        self.ops = {k: vclean(v, self.ring, self.cutoff) for k, v in self.ops.items()}
        self.ops = {k: v for k, v in self.ops.items() if v}
        self.curvature = {k: vclean(v, self.ring, self.cutoff) for k, v in self.curvature.items()}
        self.curvature = {k: v for k, v in self.curvature.items() if v}
        self._top = None

    # basic queries

    def gen(self, gid: str) -> Generator:
        try:
            return self.generators[gid]
        except KeyError:
            raise StructureError(f"unknown generator {gid!r}") from None

    def parity(self, gid: str) -> int:
        return self._parity[gid]

    def hom(self, c, c2) -> list[str]:
        return [g.id for g in self.generators.values() if g.source == c and g.target == c2]

    def reduce_degree(self, d: int) -> int:
        return _reduce_degree(d, self.grading_modulus)

    def max_arity(self) -> int:
        # tables are treated as frozen after construction; use copy(ops=...) to change them
        if self._top is None:
            self._top = max((len(k) for k in self.ops), default=0)
        return self._top

    def is_strict(self) -> bool:
        return not self.curvature

    def word_ends(self, word: tuple, obj=None) -> tuple:
        if not word:
            if obj is None:
                raise StructureError("empty word needs an object")
            return obj, obj
        return self.gen(word[0]).source, self.gen(word[-1]).target

    def is_composable(self, word: Iterable[str]) -> bool:
        word = tuple(word)
        for a, b in zip(word, word[1:]):
            if self.gen(a).target != self.gen(b).source:
                return False
        return True

    def words(self, max_len: int, min_len: int = 0) -> Iterator[tuple[tuple, str]]:
        """Composable words of length ``min_len..max_len`` as ``(word, start_object)``."""
        for obj in self.objects:
            if min_len == 0:
                yield (), obj
            frontier = [((), obj)]
            for length in range(1, max_len + 1):
                nxt = []
                for word, end in frontier:
                    for gid in self._by_source.get(end, ()):
                        nxt.append((word + (gid,), self.generators[gid].target))
                if length >= min_len:
                    for word, _ in nxt:
                        yield word, obj
                frontier = nxt

    def mk(self, word: tuple, obj=None) -> dict:
        """Table lookup of ``m_k`` on a basis word (``obj`` names the object for ``k = 0``)."""
        if not word:
            return self.curvature.get(obj, {})
        return self.ops.get(word, {})

    def copy(self, **changes) -> "AInftyStructure":
        base = dict(
            ring=self.ring,
            objects=self.objects,
            generators=dict(self.generators),
            ops={k: dict(v) for k, v in self.ops.items()},
            curvature={k: dict(v) for k, v in self.curvature.items()},
            units=dict(self.units),
            gap=self.gap,
            cutoff=self.cutoff,
            grading_modulus=self.grading_modulus,
            metadata=dict(self.metadata),
        )
        base.update(changes)
        return AInftyStructure(**base)

    def full_subcategory(self, objects: Iterable) -> "AInftyStructure":
        objs = tuple(o for o in self.objects if o in set(objects))
        gens = {g.id: g for g in self.generators.values() if g.source in objs and g.target in objs}
        ops = {k: v for k, v in self.ops.items() if all(x in gens for x in k)}
        return self.copy(
            objects=objs,
            generators=gens,
            ops=ops,
            curvature={o: v for o, v in self.curvature.items() if o in objs},
            units={o: u for o, u in self.units.items() if o in objs},
        )

    def same_tables(self, other: "AInftyStructure") -> bool:
        return (
            self.ops == other.ops
            and self.curvature == other.curvature
            and self.generators == other.generators
            and self.units == other.units
        )

    # validation

    def validate(self) -> None:
        """Load-time invariants: composability, degree +1, filtration, gapping, m_0 = 0 mod T^eps."""
        for word, vec in self.ops.items():
            self._validate_entry(word, None, vec)
        for obj, vec in self.curvature.items():
            if obj not in self.objects:
                raise StructureError(f"curvature on unknown object {obj!r}")
            self._validate_entry((), obj, vec)
            if valuation(vec) < max(self.gap.epsilon, Fraction(0)) or valuation(vec) <= 0:
                raise StructureError(f"m_0 of {obj} is not 0 modulo T^eps")
        for obj, uid in self.units.items():
            u = self.gen(uid)
            if u.source != obj or u.target != obj:
                raise StructureError(f"unit {uid} does not lie in hom({obj},{obj})")
            if self.reduce_degree(u.degree) != 0:
                raise StructureError(f"unit {uid} must have degree 0 (shifted degree -1)")

    def _validate_entry(self, word, obj, vec):
        if not self.is_composable(word):
            raise StructureError(f"non-composable input tuple {word}")
        src, tgt = self.word_ends(word, obj)
        want = self.reduce_degree(1 + sum(self.gen(w).shifted_degree for w in word))
        for (out, exp), _c in vec.items():
            g = self.gen(out)
            if (g.source, g.target) != (src, tgt):
                raise StructureError(f"m_{len(word)}{word}: output {out} lies in the wrong hom module")
            if exp < 0:
                raise StructureError(f"m_{len(word)}{word}: negative exponent {exp} breaks the filtration")
            if self.reduce_degree(g.shifted_degree) != want:
                raise StructureError(
                    f"m_{len(word)}{word}: output {out} has shifted degree {g.shifted_degree}, expected {want}"
                )
            if not self.gap.contains(exp):
                raise StructureError(f"m_{len(word)}{word}: exponent {exp} is not in the gap monoid")


# --------------------------------------------------------------------------
# operations


def apply_mk(A: AInftyStructure, inputs: Iterable[str], obj=None) -> dict:
    """``m_k`` on a basis tuple; ``k = 0`` returns ``m_0(1)`` of ``obj``."""
    word = tuple(inputs)
    for gid in word:
        A.gen(gid)
    if not A.is_composable(word):
        raise StructureError(f"non-composable tuple {word}")
    return dict(A.mk(word, obj))


def evaluate(A: AInftyStructure, args: list, obj=None) -> dict:
    """Multilinear extension of ``m_k`` to sparse vectors; non-composable products vanish."""
    out: dict = {}
    if not args:
        vadd_into(out, A.mk((), obj), A.ring, A.cutoff)
        return out
    for combo in itertools.product(*(list(a.items()) for a in args)):
        word = tuple(k[0] for k, _ in combo)
        if not A.is_composable(word):
            continue
        exp = sum(k[1] for k, _ in combo)
        if exp >= A.cutoff:
            continue
        coeff = 1
        for _, c in combo:
            coeff *= c
        vadd_into(out, A.mk(word), A.ring, A.cutoff, coeff, exp)
    return out


def object_at(A: AInftyStructure, word: tuple, i: int, obj=None):
    """Object sitting between ``word[i-1]`` and ``word[i]``."""
    if i > 0:
        return A.generators[word[i - 1]].target
    if word:
        return A.generators[word[0]].source
    return obj


@dataclass
class Residual:
    word: tuple
    value: dict
    obj: Optional[str] = None

    @property
    def valuation(self):
        return valuation(self.value)


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    residuals: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.residuals and not self.messages

    def __bool__(self):
        return self.passed

    def lines(self) -> list[str]:
        out = [f"check={self.name} status={'pass' if self.passed else 'fail'} checked={self.checked}"]
        for r in self.residuals:
            word = ",".join(r.word) if r.word else f"<empty:{r.obj}>"
            out.append(f"residual check={self.name} word={word} valuation={r.valuation} value={format_vec(r.value)}")
        for m in self.messages:
            out.append(f"violation check={self.name} {m}")
        return out


def relation_residual(A: AInftyStructure, word: tuple, obj=None, cache=None) -> dict:
    """Left side of the A-infinity relation on one composable word."""
    ring, cutoff = A.ring, A.cutoff
    k = len(word)
    out: dict = {}
    sign_prefix = [0]
    for g in word:
        sign_prefix.append(sign_prefix[-1] + A._parity[g])
    for i in range(k + 1):
        sgn = -1 if sign_prefix[i] % 2 else 1
        for k2 in range(0, k - i + 1):
            inner_word = word[i : i + k2]
            inner = A.mk(inner_word, object_at(A, word, i, obj)) if k2 == 0 else A.ops.get(inner_word)
            if not inner:
                continue
            head, tail = word[:i], word[i + k2 :]
            for (z, e), c in inner.items():
                outer = A.ops.get(head + (z,) + tail)
                if outer:
                    vadd_into(out, outer, ring, cutoff, sgn * c, e)
    return out


def check_ainfty(A: AInftyStructure, max_arity: int) -> CheckReport:
    rep = CheckReport("ainfty")
    for word, obj in A.words(max_arity):
        rep.checked += 1
        res = relation_residual(A, word, obj)
        if res:
            rep.residuals.append(Residual(word, res, obj))
    return rep


def check_units(A: AInftyStructure) -> CheckReport:
    rep = CheckReport("units")
    unit_ids = set(A.units.values())
    for obj in A.objects:
        if obj not in A.units:
            rep.messages.append(f"object={obj} has no unit")
    for obj, e in A.units.items():
        g = A.generators.get(e)
        if g is None or g.source != obj or g.target != obj or A.reduce_degree(g.degree) != 0:
            rep.messages.append(f"unit={e} object={obj} malformed")
            continue
        for x in A.generators.values():
            if x.source == obj:
                rep.checked += 1
                got = A.ops.get((e, x.id), {})
                want = {(x.id, Fraction(0)): 1}
                if got != want:
                    rep.messages.append(f"constant m2({e},{x.id}) = {format_vec(got)} expected {x.id}")
            if x.target == obj:
                rep.checked += 1
                got = A.ops.get((x.id, e), {})
                want = {(x.id, Fraction(0)): A.ring.norm(-1 if x.degree % 2 else 1)}
                if got != want:
                    rep.messages.append(f"constant m2({x.id},{e}) = {format_vec(got)} expected {format_vec(want)}")
    for word, vec in sorted(A.ops.items()):
        if len(word) != 2 and unit_ids.intersection(word):
            rep.checked += 1
            rep.messages.append(f"constant m{len(word)}({','.join(word)}) = {format_vec(vec)} must vanish")
    return rep


# --------------------------------------------------------------------------
# bar construction


def bar_coderivation(A: AInftyStructure, word: tuple, obj=None, bar_cap: Optional[int] = None) -> dict:
    """The coderivation ``d-hat`` on a basis word, as ``{(word, exp): coeff}``."""
    word = tuple(word)
    if bar_cap is not None and len(word) > bar_cap:
        raise StructureError(f"word of length {len(word)} exceeds bar cap {bar_cap}")
    mod2 = A.ring is GroundRing.Z2
    ops, curv = A.ops, A.curvature
    top = A.max_arity()
    n = len(word)
    out: dict = {}
    parity = 0
    for i in range(n + 1):
        sgn = -1 if parity % 2 else 1
        for k2 in range(0, min(n - i, top) + 1):
            if k2 == 0:
                inner = curv.get(object_at(A, word, i, obj)) if curv else None
            else:
                inner = ops.get(word[i : i + k2])
            if not inner:
                continue
            head, tail = word[:i], word[i + k2 :]
            for (z, e), c in inner.items():
                key = (head + (z,) + tail, e)
                c = out.get(key, 0) + sgn * c
                if mod2:
                    c %= 2
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        if i < n:
            parity += A._parity[word[i]]
    return out


def bar_apply(A: AInftyStructure, barvec: Mapping, obj=None, cache=None) -> dict:
    out: dict = {}
    for (w, e), c in barvec.items():
        if cache is None:
            img = bar_coderivation(A, w, obj)
        else:
            img = cache.get((w, obj if not w else None))
            if img is None:
                img = cache[(w, obj if not w else None)] = bar_coderivation(A, w, obj)
        vadd_into(out, img, A.ring, A.cutoff, c, e)
    return out


def _exponent_scale(A: AInftyStructure) -> int:
    """Common denominator of every exponent in the tables."""
    den = 1
    for tab in (A.ops, A.curvature):
        for vec in tab.values():
            for (_, e) in vec:
                den = math.lcm(den, Fraction(e).denominator)
    return den


def check_bar_square(A: AInftyStructure, max_len: int) -> CheckReport:
    """``d-hat o d-hat = 0`` on every composable word of length ``<= max_len``."""
    rep = CheckReport("bar_square")
    # exponents are rescaled to integers so the inner loop avoids Fraction arithmetic
    L = _exponent_scale(A)
    cut = math.ceil(A.cutoff * L)
    mod2 = A.ring is GroundRing.Z2
    cache: dict = {}

    def dhat(w, obj):
        key = (w, obj if not w else None)
        img = cache.get(key)
        if img is None:
            img = cache[key] = [(k, int(e * L), c) for (k, e), c in bar_coderivation(A, w, obj).items()]
        return img

    for word, obj in A.words(max_len):
        rep.checked += 1
        sq: dict = {}
        for w1, e1, c1 in dhat(word, obj):
            for w2, e2, c2 in dhat(w1, obj):
                e = e1 + e2
                if e >= cut:
                    continue
                k = (w2, e)
                c = sq.get(k, 0) + c1 * c2
                if mod2:
                    c %= 2
                if c:
                    sq[k] = c
                else:
                    sq.pop(k, None)
        if sq:
            rep.residuals.append(Residual(word, {(w, Fraction(e, L)): c for (w, e), c in sq.items()}, obj))
    return rep


def truncate(A: AInftyStructure, E) -> AInftyStructure:
    """Drop constants with exponent >= E.

    ``E = 0`` means reduction modulo Lambda_+: the cutoff becomes the least
    positive gap element, which for a gapped table keeps exactly the classical part.
    """
    E = as_fraction(E)
    if E < 0:
        raise StructureError("cutoff must be non-negative")
    if E > A.cutoff:
        raise StructureError(f"cannot raise cutoff from {A.cutoff} to {E}")
    if E == 0:
        E = min(A.gap.epsilon, A.cutoff)
    return A.copy(cutoff=E)


def degree_report(A: AInftyStructure) -> CheckReport:
    rep = CheckReport("load")
    try:
        A.validate()
    except (StructureError, NovikovError) as exc:
        rep.messages.append(str(exc))
    return rep
