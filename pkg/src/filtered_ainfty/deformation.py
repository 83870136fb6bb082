"""Bounding cochains, deformed operations and Floer cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .core import (
    AInftyStructure,
    CheckReport,
    format_vec,
    vacc,
    vadd_into,
    valuation,
)
from .novikov import INF, GroundRing, Novikov


class DeformationError(ValueError):
    pass


@dataclass
class BoundingCochain:
    object: str
    element: dict  # {(generator_id, exponent): coeff}
    switching_supported: bool = False
    relaxed: bool = False

    def support(self) -> list[str]:
        return sorted({g for g, _ in self.element})

    def series(self) -> dict:
        """``{generator: [(exp, coeff), ...]}``."""
        out: dict = {}
        for (g, e), c in sorted(self.element.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            out.setdefault(g, []).append((e, c))
        return out

    def validate(self, A: AInftyStructure) -> None:
        if self.object not in A.objects:
            raise DeformationError(f"unknown object {self.object!r}")
        for g, e in self.element:
            gen = A.gen(g)
            if gen.source != self.object or gen.target != self.object:
                raise DeformationError(f"bounding cochain term {g} is not in hom({self.object},{self.object})")
            if A.reduce_degree(gen.shifted_degree) != 0:
                raise DeformationError(f"bounding cochain term {g} has shifted degree {gen.shifted_degree}, expected 0")
            if self.switching_supported and gen.tag != "switching":
                raise DeformationError(f"bounding cochain flagged switching-supported but {g} is {gen.tag}")
        if valuation(self.element) <= 0:
            if self.relaxed:
                raise DeformationError("relaxed (valuation-0) bounding cochains are not supported")
            raise DeformationError("bounding cochain must have positive valuation (b = 0 mod Lambda_+)")


def zero_cochain(obj: str) -> BoundingCochain:
    return BoundingCochain(obj, {})


def _series_product(factors, ring: GroundRing, cutoff) -> list:
    """Product of coefficient series, each a list of ``(exp, coeff)``; truncated."""
    acc = [(Fraction(0), 1)]
    for f in factors:
        nxt: dict = {}
        for e1, c1 in acc:
            for e2, c2 in f:
                e = e1 + e2
                if e < cutoff:
                    nxt[e] = ring.norm(nxt.get(e, 0) + c1 * c2)
        acc = [(e, c) for e, c in nxt.items() if c != 0]
        if not acc:
            return []
    return acc


def _b_series(assignment: Mapping[str, BoundingCochain]) -> dict:
    return {obj: b.series() for obj, b in assignment.items()}


def mc_residual(A: AInftyStructure, b: BoundingCochain, cutoff=None) -> dict:
    """``sum_k m_k(b, ..., b)`` truncated at the cutoff."""
    cutoff = A.cutoff if cutoff is None else min(cutoff, A.cutoff)
    ring = A.ring
    ser = b.series()
    out: dict = {}
    vadd_into(out, A.curvature.get(b.object, {}), ring, cutoff)
    for word, vec in A.ops.items():
        if not all(g in ser for g in word):
            continue
        for e, c in _series_product([ser[g] for g in word], ring, cutoff):
            vadd_into(out, vec, ring, cutoff, c, e)
    return out


def check_mc(A: AInftyStructure, b: BoundingCochain) -> dict:
    b.validate(A)
    return mc_residual(A, b)


def _object_path(A: AInftyStructure, word: tuple) -> list:
    objs = [A.generators[word[0]].source]
    objs.extend(A.generators[g].target for g in word)
    return objs


def deform(
    A: AInftyStructure,
    assignment: Mapping[str, BoundingCochain],
    require_mc: bool = True,
) -> AInftyStructure:
    """The associated strict category: every ``m_k`` absorbs insertions of the assigned cochains.

    With ``require_mc=False`` the cochains need not be bounding; the output is
    then a curved structure with ``m_0 = sum m_k(b, ..., b)``.
    """
    ring, cutoff = A.ring, A.cutoff
    for obj, b in assignment.items():
        if b.object != obj:
            raise DeformationError(f"cochain for {obj} is attached to {b.object}")
        if b.element:
            b.validate(A)
        if require_mc:
            res = mc_residual(A, b)
            if res:
                raise DeformationError(f"MC residual of {obj} is nonzero: {format_vec(res)}")
    series = _b_series(assignment)
    ops: dict = {}
    curv: dict = {}

    def emit(key, obj, weight, vec):
        target = curv.setdefault(obj, {}) if not key else ops.setdefault(key, {})
        for e, c in weight:
            vadd_into(target, vec, ring, cutoff, c, e)

    for obj, vec in A.curvature.items():
        emit((), obj, [(Fraction(0), 1)], vec)
    for word, vec in A.ops.items():
        objs = _object_path(A, word)
        k = len(word)
        # position j is an insertion of b at the object on which word[j] lives
        insertable = []
        for j, g in enumerate(word):
            gen = A.generators[g]
            ser = series.get(gen.source, {}) if gen.source == gen.target else {}
            insertable.append(ser.get(g))
        for mask in range(1 << k):
            keep = tuple(word[j] for j in range(k) if not mask >> j & 1)
            ins = [insertable[j] for j in range(k) if mask >> j & 1]
            if any(s is None for s in ins):
                continue
            weight = _series_product(ins, ring, cutoff) if ins else [(Fraction(0), 1)]
            if not weight:
                continue
            emit(keep, objs[0], weight, vec)
    out = A.copy(ops=ops, curvature=curv)
    out.metadata = dict(A.metadata)
    return out


# --------------------------------------------------------------------------
# matrices over Lambda_0


@dataclass
class Matrix:
    """Square matrix over the truncated Novikov ring acting on ``basis``.

    ``columns[x]`` is the image of basis element ``x`` as a sparse vector.
    """

    basis: list
    columns: dict
    ring: GroundRing
    cutoff: Fraction

    def entry(self, row, col) -> Novikov:
        terms = [(e, c) for (g, e), c in self.columns.get(col, {}).items() if g == row]
        return Novikov(terms, self.cutoff, self.ring)

    def rows(self) -> list[list[Novikov]]:
        return [[self.entry(r, c) for c in self.basis] for r in self.basis]

    def apply(self, vec: Mapping) -> dict:
        out: dict = {}
        for (g, e), c in vec.items():
            vadd_into(out, self.columns.get(g, {}), self.ring, self.cutoff, c, e)
        return out

    def compose(self, other: "Matrix") -> "Matrix":
        """``self o other``."""
        return Matrix(self.basis, {x: self.apply(other.columns.get(x, {})) for x in self.basis}, self.ring, self.cutoff)

    def square(self) -> "Matrix":
        return self.compose(self)

    def is_zero(self) -> bool:
        return not any(self.columns.get(x) for x in self.basis)

    @classmethod
    def from_rows(cls, basis, rows, ring, cutoff) -> "Matrix":
        cols: dict = {x: {} for x in basis}
        for i, r in enumerate(basis):
            for j, c in enumerate(basis):
                a = rows[i][j]
                if not isinstance(a, Novikov):
                    a = Novikov(((0, a),), cutoff, ring)
                for e, co in a.terms:
                    vacc(cols[c], r, e, co, ring, cutoff)
        return cls(list(basis), cols, ring, Fraction(cutoff))


def deformed_differential(
    A: AInftyStructure,
    c: str,
    c2: str,
    b: Optional[BoundingCochain] = None,
    b2: Optional[BoundingCochain] = None,
    require_mc: bool = True,
) -> Matrix:
    """Matrix of ``m_1^{b,b'}(x) = sum m_{k+l+1}(b^k, x, b'^l)`` on ``hom(c, c2)``."""
    b = b or zero_cochain(c)
    b2 = b2 or zero_cochain(c2)
    for bb, obj in ((b, c), (b2, c2)):
        if bb.object != obj:
            raise DeformationError(f"cochain attached to {bb.object}, expected {obj}")
        if bb.element:
            bb.validate(A)
        if require_mc:
            res = mc_residual(A, bb)
            if res:
                raise DeformationError(f"MC residual of {obj} is nonzero: {format_vec(res)}")
    ring, cutoff = A.ring, A.cutoff
    basis = A.hom(c, c2)
    bs, bs2 = b.series(), b2.series()
    cols: dict = {x: {} for x in basis}
    bset = set(basis)
    for word, vec in A.ops.items():
        for pos, x in enumerate(word):
            if x not in bset:
                continue
            before, after = word[:pos], word[pos + 1 :]
            if not all(g in bs for g in before) or not all(g in bs2 for g in after):
                continue
            # before-words must live on c, after-words on c2
            if before and A.generators[before[0]].source != c:
                continue
            factors = [bs[g] for g in before] + [bs2[g] for g in after]
            weight = _series_product(factors, ring, cutoff) if factors else [(Fraction(0), 1)]
            for e, co in weight:
                vadd_into(cols[x], vec, ring, cutoff, co, e)
    return Matrix(basis, cols, ring, cutoff)


# --------------------------------------------------------------------------
# Floer cohomology


@dataclass
class TorsionProfile:
    lambda_rank: int
    torsion_exponents: list = field(default_factory=list)
    dimension: int = 0
    cutoff: Fraction = Fraction(0)

    @property
    def pivots(self) -> int:
        return (self.dimension - self.lambda_rank) // 2

    def lines(self) -> list[str]:
        tors = ",".join(str(t) for t in self.torsion_exponents) or "-"
        return [f"dimension={self.dimension} lambda_rank={self.lambda_rank} torsion={tors} cutoff={self.cutoff}"]


def pivot_valuations(d: Matrix) -> list[Fraction]:
    """Valuations of the diagonal entries after valuation-pivot elimination over Lambda_0.

    Each step picks an entry of minimal valuation, clears its row and column by
    Lambda_0 operations, and records the valuation.  Entries are handled as
    Novikov scalars modulo ``T^E``; divisions by the pivot are carried out at
    the reduced precision ``E - v`` and shifted back, which is exact modulo
    ``T^E`` since every eliminated entry has valuation ``>= v``.
    """
    ring, E = d.ring, d.cutoff
    if not ring.is_field:
        raise DeformationError("cohomology ranks need a field ground ring (Z2 or Q)")
    M = d.rows()
    rows = list(range(len(M)))
    cols = list(range(len(M)))
    out = []
    while True:
        best = None
        for i in rows:
            for j in cols:
                v = M[i][j].valuation()
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            return sorted(out)
        v, pi, pj = best
        out.append(v)
        low = E - v
        unit = M[pi][pj].shift(-v).truncate(low)
        uinv = unit.invert().truncate(low)
        prow = [M[pi][c].shift(-v).truncate(low) for c in range(len(M))]
        for r in rows:
            if r == pi or M[r][pj].is_zero():
                continue
            q = (M[r][pj].shift(-v).truncate(low) * uinv).truncate(low)
            for c in cols:
                if prow[c].is_zero():
                    continue
                delta = (q * prow[c]).shift(v)
                M[r][c] = Novikov(M[r][c].terms + tuple((e, ring.norm(-a)) for e, a in delta.terms), E, ring)
        # column clearing does not change the remaining block once the pivot row is removed
        rows.remove(pi)
        cols.remove(pj)


def floer_cohomology(d: Matrix, check_square: bool = True) -> TorsionProfile:
    if not d.ring.is_field:
        raise DeformationError("cohomology ranks need a field ground ring (Z2 or Q)")
    if check_square and not d.square().is_zero():
        raise DeformationError("d o d is nonzero modulo the cutoff")
    piv = pivot_valuations(d)
    n = len(d.basis)
    return TorsionProfile(n - 2 * len(piv), [v for v in piv if v > 0], n, d.cutoff)


def classical_reduction_rank(d: Matrix) -> int:
    """Rank of ``d mod Lambda_+`` over the ground field."""
    from .linalg import rank

    rows = [[d.entry(r, c).constant_term() for c in d.basis] for r in d.basis]
    return rank(rows, d.ring)


# --------------------------------------------------------------------------
# monotonicity lints


def validate_monotone_consequences(A: AInftyStructure) -> CheckReport:
    rep = CheckReport("monotone")
    meta = A.metadata
    monotone = str(meta.get("weak_monotone", "false")).lower() == "true"
    maslov = meta.get("min_maslov")
    if monotone:
        rep.checked += 1
        if maslov is None:
            rep.messages.append("weak_monotone set but min_maslov missing")
        elif int(maslov) <= 2:
            rep.messages.append(f"min_maslov={maslov} but weak monotonicity needs minimal Maslov number > 2")
        for obj, vec in sorted(A.curvature.items()):
            rep.checked += 1
            bad = sorted({g for g, _ in vec if A.generators[g].tag != "switching"})
            if bad:
                rep.messages.append(f"object={obj} m0 has non-switching (diagonal) component on {','.join(bad)}")
    if str(meta.get("instanton_derived", "false")).lower() == "true":
        rep.checked += 1
        if maslov is None or int(maslov) % 4 != 0:
            rep.messages.append(f"instanton-derived input needs min_maslov = 0 mod 4, got {maslov}")
    return rep
