"""Dg categories of finite chain complexes over Lambda_0, written as A-infinity tables.

``hom(P, Q)`` is the space of linear maps ``V_P -> V_Q``.  Maps are stored as
sparse vectors keyed by matrix positions ``(q, p)`` (the map sending ``p`` to
``q``).  With unshifted degrees ``|f|``:

    m_1(f) = delta_Q f - (-1)^|f| f delta_P
    m_2(x1, x2) = (-1)^(|x1| (|x2| + 1)) x2 o x1

The generator basis of ``hom(P, P)`` replaces the elementary map at the first
basis vector by the identity, so that the unit is a basis element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import AInftyStructure, Generator, vacc, vadd_into
from .novikov import GapMonoid, GroundRing


@dataclass
class ChainComplex:
    basis: list  # [(vector_id, unshifted degree)]
    differential: dict = field(default_factory=dict)  # v -> {(w, exp): coeff}

    def degree(self, v) -> int:
        return dict(self.basis)[v]

    def ids(self) -> list:
        return [v for v, _ in self.basis]


def unit_id(obj) -> str:
    return f"1_{obj}"


def elem_id(q, p) -> str:
    return f"{q}<{p}"


def compose(g: dict, f: dict, ring: GroundRing, cutoff) -> dict:
    """``g o f`` for maps stored as ``{((row, col), exp): coeff}``."""
    by_row: dict = {}
    for ((q, p), e), c in f.items():
        by_row.setdefault(q, []).append((p, e, c))
    out: dict = {}
    for ((r, q), e1), c1 in g.items():
        for p, e2, c2 in by_row.get(q, ()):
            vacc(out, (r, p), e1 + e2, c1 * c2, ring, cutoff)
    return out


class EndModel:
    """Book-keeping between matrix form and the generator basis."""

    def __init__(self, complexes: dict, ring: GroundRing, cutoff):
        self.complexes = complexes
        self.ring = ring
        self.cutoff = Fraction(cutoff)
        self.owner = {}
        for obj, cx in complexes.items():
            for v, _ in cx.basis:
                if v in self.owner:
                    raise ValueError(f"vector id {v!r} used by two complexes")
                self.owner[v] = obj

    def delta(self, obj) -> dict:
        out: dict = {}
        for v, img in self.complexes[obj].differential.items():
            for (w, e), c in img.items():
                vacc(out, (w, v), e, c, self.ring, self.cutoff)
        return out

    def map_degree(self, q, p) -> int:
        return self.complexes[self.owner[q]].degree(q) - self.complexes[self.owner[p]].degree(p)

    def generator_matrix(self, gid) -> dict:
        if gid.startswith("1_") and gid[2:] in self.complexes:
            return {((v, v), Fraction(0)): 1 for v in self.complexes[gid[2:]].ids()}
        q, p = gid.split("<", 1)
        return {((q, p), Fraction(0)): 1}

    def to_generators(self, P, Q, mat: dict) -> dict:
        out: dict = {}
        ring, cut = self.ring, self.cutoff
        if P != Q:
            for ((q, p), e), c in mat.items():
                vacc(out, elem_id(q, p), e, c, ring, cut)
            return out
        first = self.complexes[P].ids()[0]
        diag0 = {e: c for ((q, p), e), c in mat.items() if q == p == first}
        for ((q, p), e), c in mat.items():
            if q == p == first:
                vacc(out, unit_id(P), e, c, ring, cut)
            else:
                vacc(out, elem_id(q, p), e, c, ring, cut)
        for v in self.complexes[P].ids()[1:]:
            for e, c in diag0.items():
                vacc(out, elem_id(v, v), e, -c, ring, cut)
        return out

    def to_matrix(self, vec: dict) -> dict:
        out: dict = {}
        for (g, e), c in vec.items():
            vadd_into(out, self.generator_matrix(g), self.ring, self.cutoff, c, e)
        return out


def endomorphism_category(
    complexes: dict,
    ring: GroundRing,
    cutoff,
    gap: GapMonoid,
    grading_modulus: int = 0,
    metadata=None,
) -> tuple[AInftyStructure, EndModel]:
    model = EndModel(complexes, ring, cutoff)
    objs = list(complexes)
    gens: dict = {}
    homs: dict = {}
    for P in objs:
        for Q in objs:
            ids = []
            first = complexes[P].ids()[0]
            for q, dq in complexes[Q].basis:
                for p, dp in complexes[P].basis:
                    if P == Q and q == p == first:
                        gid = unit_id(P)
                    else:
                        gid = elem_id(q, p)
                    gens[gid] = Generator(gid, P, Q, dq - dp - 1)
                    ids.append(gid)
            if P == Q:
                ids.remove(unit_id(P))
                ids.insert(0, unit_id(P))
            homs[P, Q] = ids
    # canonical generator order: by (source, target), unit first
    ordered = {}
    for P in objs:
        for Q in objs:
            for gid in homs[P, Q]:
                ordered[gid] = gens[gid]
    deltas = {P: model.delta(P) for P in objs}
    mats = {gid: model.generator_matrix(gid) for gid in ordered}
    ops: dict = {}
    for x, gx in ordered.items():
        P, Q = gx.source, gx.target
        dx = gx.degree
        m = mats[x]
        D: dict = {}
        vadd_into(D, compose(deltas[Q], m, ring, cutoff), ring, cutoff)
        vadd_into(D, compose(m, deltas[P], ring, cutoff), ring, cutoff, -(-1) ** (dx % 2))
        v = model.to_generators(P, Q, D)
        if v:
            ops[(x,)] = v
        for y, gy in ordered.items():
            if gy.source != Q:
                continue
            dy = gy.degree
            sign = -1 if (dx * (dy + 1)) % 2 else 1
            prod = compose(mats[y], m, ring, cutoff)
            v = model.to_generators(P, gy.target, prod)
            if v:
                ops[(x, y)] = {k: ring.norm(sign * c) for k, c in v.items()}
    A = AInftyStructure(
        ring=ring,
        objects=tuple(objs),
        generators=ordered,
        ops=ops,
        curvature={},
        units={P: unit_id(P) for P in objs},
        gap=gap,
        cutoff=Fraction(cutoff),
        grading_modulus=grading_modulus,
        metadata=dict(metadata or {}),
    )
    return A, model
