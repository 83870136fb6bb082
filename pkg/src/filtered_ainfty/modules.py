"""Right filtered A-infinity modules, tri-modules and the cyclic-element MC solver."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import (
    AInftyStructure,
    CheckReport,
    Residual,
    StructureError,
    format_vec,
    vacc,
    vadd_into,
    valuation,
)
from .deformation import BoundingCochain, DeformationError, Matrix, _series_product, mc_residual
from .linalg import SingularError, inverse


class SolverError(ValueError):
    pass


def _single_object(C: AInftyStructure, role: str) -> str:
    if len(C.objects) != 1:
        raise StructureError(f"{role} must be a one-object algebra, got objects {C.objects}")
    return C.objects[0]


def _algebra_words(C: AInftyStructure, max_len: int):
    gens = list(C.generators)
    for k in range(max_len + 1):
        yield from itertools.product(gens, repeat=k)


@dataclass
class RightModule:
    """``n_ops[(y,) + (x_1, ..., x_k)]`` is ``n_k(y; x_1, ..., x_k)``; degrees are shifted."""

    base: AInftyStructure
    basis: dict  # module generator id -> shifted degree
    n_ops: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        _single_object(self.base, "module base")
        ring, cut = self.base.ring, self.base.cutoff
        clean = {}
        for k, v in self.n_ops.items():
            out: dict = {}
            vadd_into(out, v, ring, cut)
            if out:
                clean[tuple(k)] = out
        self.n_ops = clean

    @property
    def ring(self):
        return self.base.ring

    @property
    def cutoff(self):
        return self.base.cutoff

    def validate(self) -> None:
        C = self.base
        for key, vec in self.n_ops.items():
            y, xs = key[0], key[1:]
            if y not in self.basis:
                raise StructureError(f"n_{len(xs)}: unknown module generator {y!r}")
            for x in xs:
                C.gen(x)
            want = C.reduce_degree(1 + self.basis[y] + sum(C.gen(x).shifted_degree for x in xs))
            for (z, e), _ in vec.items():
                if z not in self.basis:
                    raise StructureError(f"n_{len(xs)}{key}: unknown output {z!r}")
                if e < 0:
                    raise StructureError(f"n_{len(xs)}{key}: negative exponent {e} breaks the filtration")
                if C.reduce_degree(self.basis[z]) != want:
                    raise StructureError(f"n_{len(xs)}{key}: output {z} has degree {self.basis[z]}, expected {want}")
                if not C.gap.contains(e):
                    raise StructureError(f"n_{len(xs)}{key}: exponent {e} is not in the gap monoid")

    def max_arity(self) -> int:
        return max((len(k) - 1 for k in self.n_ops), default=0)

    def nk(self, y, xs: tuple) -> dict:
        return self.n_ops.get((y,) + tuple(xs), {})


def check_module_relation(D: RightModule, max_arity: int) -> CheckReport:
    C = D.base
    ring, cut = C.ring, C.cutoff
    obj = C.objects[0]
    par = {g: C.parity(g) for g in C.generators}
    rep = CheckReport("module")
    for y in D.basis:
        py = D.basis[y] % 2
        for w in _algebra_words(C, max_arity):
            rep.checked += 1
            out: dict = {}
            k = len(w)
            for l in range(k + 1):
                inner = D.n_ops.get((y,) + w[:l])
                if not inner:
                    continue
                for (z, e), c in inner.items():
                    outer = D.n_ops.get((z,) + w[l:])
                    if outer:
                        vadd_into(out, outer, ring, cut, c, e)
            pre = py
            for i in range(k + 1):
                sgn = -1 if pre % 2 else 1
                for j in range(i, k + 1):
                    inner = C.mk(w[i:j], obj) if j > i else C.curvature.get(obj, {})
                    if not inner:
                        continue
                    for (z, e), c in inner.items():
                        outer = D.n_ops.get((y,) + w[:i] + (z,) + w[j:])
                        if outer:
                            vadd_into(out, outer, ring, cut, sgn * c, e)
                if i < k:
                    pre += par[w[i]]
            if out:
                rep.residuals.append(Residual((y,) + w, out))
    return rep


def module_db(D: RightModule, b: BoundingCochain, require_mc: bool = True, cutoff=None) -> Matrix:
    """Matrix of ``d^b(y) = sum_k n_k(y; b, ..., b)``."""
    C = D.base
    if b.object != C.objects[0]:
        raise DeformationError(f"cochain lives on {b.object}, base object is {C.objects[0]}")
    if b.element:
        b.validate(C)
    if require_mc:
        res = mc_residual(C, b)
        if res:
            raise DeformationError(f"MC residual is nonzero: {format_vec(res)}")
    ring = C.ring
    cut = C.cutoff if cutoff is None else min(cutoff, C.cutoff)
    ser = b.series()
    cols: dict = {y: {} for y in D.basis}
    for key, vec in D.n_ops.items():
        y, xs = key[0], key[1:]
        if not all(x in ser for x in xs):
            continue
        weight = _series_product([ser[x] for x in xs], ring, cut) if xs else [(Fraction(0), 1)]
        for e, c in weight:
            vadd_into(cols[y], vec, ring, cut, c, e)
    return Matrix(list(D.basis), cols, ring, cut)


# --------------------------------------------------------------------------
# cyclic elements and the MC solver


@dataclass
class CyclicElement:
    element: dict  # {(module generator, exp): coeff}


def n1_matrix(D: RightModule, one: Mapping) -> dict:
    """``x -> n_1(1, x)`` as ``{x: vector}`` over every base generator."""
    C = D.base
    out: dict = {}
    for x in C.generators:
        col: dict = {}
        for (y, e), c in one.items():
            vadd_into(col, D.nk(y, (x,)), C.ring, C.cutoff, c, e)
        out[x] = col
    return out


def classical_part(D: RightModule, one: Mapping) -> list:
    """The mod-Lambda_+ reduction of ``x -> n_1(1, x)`` as a ground-ring matrix (rows: module basis)."""
    cols = n1_matrix(D, one)
    xs = list(D.base.generators)
    ys = list(D.basis)
    return [[cols[x].get((y, Fraction(0)), 0) for x in xs] for y in ys]


def check_cyclic(D: RightModule, one: CyclicElement) -> None:
    C = D.base
    for (y, e), _ in one.element.items():
        if y not in D.basis:
            raise SolverError(f"cyclic element uses unknown module generator {y!r}")
    if len(D.basis) != len(C.generators):
        raise SolverError(f"n_1(1, -) cannot be an isomorphism: rank {len(C.generators)} -> {len(D.basis)}")
    try:
        inverse(classical_part(D, one.element), C.ring)
    except SingularError as exc:
        raise SolverError(f"n_1(1, -) is not invertible modulo Lambda_+: {exc}") from None
    n0: dict = {}
    for (y, e), c in one.element.items():
        vadd_into(n0, D.nk(y, ()), C.ring, C.cutoff, c, e)
    if valuation(n0) <= 0:
        raise SolverError("n_0(1) is not zero modulo Lambda_+")


def d_of_one(D: RightModule, one: Mapping, b: BoundingCochain, cutoff=None) -> dict:
    m = module_db(D, b, require_mc=False, cutoff=cutoff)
    return m.apply(one)


def solve_mc_from_cyclic(D: RightModule, one: CyclicElement) -> BoundingCochain:
    """The unique gapped bounding cochain ``b`` with ``d^b(1) = 0``, by induction on energy.

    At energy level ``lam`` the coefficient of ``T^lam`` in ``d^b(1)`` equals
    ``L0(b_lam)`` plus terms built from strictly lower levels of ``b``, where
    ``L0`` is ``x -> n_1(1, x)`` modulo ``Lambda_+``.  Solving level by level
    fixes ``b``; afterwards both ``d^b(1)`` and the MC residual are verified.
    """
    C = D.base
    ring, E = C.ring, C.cutoff
    obj = C.objects[0]
    check_cyclic(D, one)
    xs = list(C.generators)
    ys = list(D.basis)
    L0inv = inverse(classical_part(D, one.element), ring)
    levels = [lam for lam in C.gap.elements_below(E) if lam > 0]
    element: dict = {}
    for idx, lam in enumerate(levels):
        nxt = levels[idx + 1] if idx + 1 < len(levels) else E
        r = d_of_one(D, one.element, BoundingCochain(obj, element), cutoff=nxt)
        low = [key for key in r if key[1] < lam]
        if low:
            raise SolverError(f"residual below level {lam} on {sorted(low)}; inputs are not gapped")
        rhs = [r.get((y, lam), 0) for y in ys]
        if not any(rhs):
            continue
        for i, x in enumerate(xs):
            coeff = ring.norm(-sum(L0inv[i][j] * rhs[j] for j in range(len(ys))))
            vacc(element, x, lam, coeff, ring, E)
    b = BoundingCochain(obj, element)
    if element:
        try:
            b.validate(C)
        except DeformationError as exc:
            raise SolverError(f"solved cochain violates cochain invariants: {exc}") from None
    res_one = d_of_one(D, one.element, b)
    res_mc = mc_residual(C, b)
    if res_one or res_mc:
        raise SolverError(
            f"nonzero residual after sweep: d^b(1)={format_vec(res_one)} mc={format_vec(res_mc)}"
        )
    return b


# --------------------------------------------------------------------------
# tri-modules


@dataclass
class TriModule:
    """Operations ``n_{k1,k12,k2}(u; v; y; w)`` keyed by ``(u_tuple, v_tuple, y, w_tuple)``."""

    left1: AInftyStructure
    left12: AInftyStructure
    right: AInftyStructure
    basis: dict  # id -> shifted degree
    n_ops: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for C, role in ((self.left1, "left1"), (self.left12, "left12"), (self.right, "right")):
            _single_object(C, role)
        ring, cut = self.right.ring, self.right.cutoff
        clean = {}
        for (u, v, y, w), vec in self.n_ops.items():
            out: dict = {}
            vadd_into(out, vec, ring, cut)
            if out:
                clean[(tuple(u), tuple(v), y, tuple(w))] = out
        self.n_ops = clean

    @property
    def ring(self):
        return self.right.ring

    @property
    def cutoff(self):
        return self.right.cutoff

    def validate(self) -> None:
        R = self.right
        for (u, v, y, w), vec in self.n_ops.items():
            if y not in self.basis:
                raise StructureError(f"tri-module op: unknown module generator {y!r}")
            deg = 1 + self.basis[y]
            for C, xs in ((self.left1, u), (self.left12, v), (self.right, w)):
                deg += sum(C.gen(x).shifted_degree for x in xs)
            want = R.reduce_degree(deg)
            for (z, e), _ in vec.items():
                if z not in self.basis:
                    raise StructureError(f"tri-module op: unknown output {z!r}")
                if e < 0:
                    raise StructureError(f"tri-module op {u};{v};{y};{w}: negative exponent {e}")
                if R.reduce_degree(self.basis[z]) != want:
                    raise StructureError(f"tri-module op {u};{v};{y};{w}: output {z} has the wrong degree")
                if not R.gap.contains(e):
                    raise StructureError(f"tri-module op {u};{v};{y};{w}: exponent {e} not gapped")


def _par(C: AInftyStructure, xs) -> int:
    return sum(C.parity(x) for x in xs) % 2


def trimodule_residual(T: TriModule, u: tuple, v: tuple, y, w: tuple) -> dict:
    """Residual of the tri-module relation.

    The relation is the module relation for ``B C1 (x) B C12 (x) D (x) B C2``
    with Koszul order ``u, v, y, w``: an inner operation takes a suffix of the
    ``u`` word, a suffix of the ``v`` word and a prefix of the ``w`` word.
    """
    ring, cut = T.ring, T.cutoff
    C1, C12, C2 = T.left1, T.left12, T.right
    out: dict = {}
    n = T.n_ops
    for i in range(len(u) + 1):
        for j in range(len(v) + 1):
            sgn_base = _par(C1, u[i:]) * _par(C12, v[:j]) + _par(C1, u[:i]) + _par(C12, v[:j])
            sgn = -1 if sgn_base % 2 else 1
            for l in range(len(w) + 1):
                inner = n.get((u[i:], v[j:], y, w[:l]))
                if not inner:
                    continue
                for (z, e), c in inner.items():
                    outer = n.get((u[:i], v[:j], z, w[l:]))
                    if outer:
                        vadd_into(out, outer, ring, cut, sgn * c, e)
    pu, pv, py = _par(C1, u), _par(C12, v), T.basis[y] % 2

    def insert(C, word, build, pre0):
        obj = C.objects[0]
        pre = pre0
        for i in range(len(word) + 1):
            sgn = -1 if pre % 2 else 1
            for j in range(i, len(word) + 1):
                inner = C.mk(word[i:j], obj) if j > i else C.curvature.get(obj, {})
                if not inner:
                    continue
                for (z, e), c in inner.items():
                    outer = n.get(build(word[:i] + (z,) + word[j:]))
                    if outer:
                        vadd_into(out, outer, ring, cut, sgn * c, e)
            if i < len(word):
                pre += C.parity(word[i])

    insert(C1, u, lambda uu: (uu, v, y, w), 0)
    insert(C12, v, lambda vv: (u, vv, y, w), pu)
    insert(C2, w, lambda ww: (u, v, y, ww), pu + pv + py)
    return out


def check_trimodule_relation(T: TriModule, max_arity: int) -> CheckReport:
    rep = CheckReport("trimodule")
    g1, g12, g2 = list(T.left1.generators), list(T.left12.generators), list(T.right.generators)
    for total in range(max_arity + 1):
        for a in range(total + 1):
            for bb in range(total - a + 1):
                c = total - a - bb
                for u in itertools.product(g1, repeat=a):
                    for v in itertools.product(g12, repeat=bb):
                        for w in itertools.product(g2, repeat=c):
                            for y in T.basis:
                                rep.checked += 1
                                res = trimodule_residual(T, u, v, y, w)
                                if res:
                                    rep.residuals.append(Residual(u + v + (y,) + w, res))
    return rep


def reduce_trimodule(
    T: TriModule, b1: BoundingCochain, b12: BoundingCochain, require_mc: bool = True
) -> RightModule:
    """Right module over the right algebra with ``n_k(y; x) = sum n_{k1,k12,k}(b1^k1; b12^k12; y; x)``."""
    ring, cut = T.ring, T.cutoff
    for b, C in ((b1, T.left1), (b12, T.left12)):
        if b.object != C.objects[0]:
            raise DeformationError(f"cochain lives on {b.object}, expected {C.objects[0]}")
        if b.element:
            b.validate(C)
        if require_mc:
            res = mc_residual(C, b)
            if res:
                raise DeformationError(f"MC residual on {b.object} is nonzero: {format_vec(res)}")
    s1, s12 = b1.series(), b12.series()
    ops: dict = {}
    for (u, v, y, w), vec in T.n_ops.items():
        if not all(x in s1 for x in u) or not all(x in s12 for x in v):
            continue
        factors = [s1[x] for x in u] + [s12[x] for x in v]
        weight = _series_product(factors, ring, cut) if factors else [(Fraction(0), 1)]
        tgt = ops.setdefault((y,) + w, {})
        for e, c in weight:
            vadd_into(tgt, vec, ring, cut, c, e)
    return RightModule(T.right, dict(T.basis), ops, dict(T.metadata))


def correspondence_pipeline(
    T: TriModule, b1: BoundingCochain, b12: BoundingCochain, one: CyclicElement
) -> BoundingCochain:
    return solve_mc_from_cyclic(reduce_trimodule(T, b1, b12), one)
