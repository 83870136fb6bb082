"""Ground-ring matrices (Z2, Z, Q) backed by sympy's DomainMatrix."""

from __future__ import annotations

from fractions import Fraction

from sympy import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .novikov import GroundRing


class SingularError(ValueError):
    pass


def _domain(ring: GroundRing):
    return {GroundRing.Z2: GF(2), GroundRing.Z: ZZ, GroundRing.Q: QQ}[ring]


def _dm(rows, ring: GroundRing, ncols=None) -> DomainMatrix:
    K = _domain(ring)
    if ring is GroundRing.Q:
        conv = lambda c: K(Fraction(c).numerator, Fraction(c).denominator)
    else:
        conv = lambda c: K(int(c))
    n = len(rows)
    m = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    return DomainMatrix([[conv(c) for c in r] for r in rows], (n, m), K)


def _back(x, ring: GroundRing):
    if ring is GroundRing.Q:
        q = Fraction(int(x.numerator), int(x.denominator))
        return int(q) if q.denominator == 1 else q
    if ring is GroundRing.Z2:
        return int(x) % 2
    return int(x)


def rank(rows, ring: GroundRing) -> int:
    if not rows or not rows[0]:
        return 0
    if ring is GroundRing.Z:
        ring = GroundRing.Q
    return _dm(rows, ring).rank()


def inverse(rows, ring: GroundRing) -> list:
    """Inverse over the ground ring; over Z the determinant must be a unit."""
    n = len(rows)
    if n == 0:
        return []
    if any(len(r) != n for r in rows):
        raise SingularError("matrix is not square")
    if ring is GroundRing.Z:
        det = _dm(rows, ring).det()
        if det not in (1, -1):
            raise SingularError(f"determinant {det} is not a unit in Z")
        inv = _dm(rows, GroundRing.Q).inv()
        return [[int(_back(x, GroundRing.Q)) for x in r] for r in inv.rep.to_ddm()]
    M = _dm(rows, ring)
    if M.rank() < n:
        raise SingularError("matrix is singular")
    inv = M.inv()
    return [[_back(x, ring) for x in r] for r in inv.rep.to_ddm()]


def nullspace(rows, ring: GroundRing) -> list:
    """Basis of the right kernel over a field ground ring."""
    if ring is GroundRing.Z:
        ring = GroundRing.Q
    if not rows:
        return []
    M = _dm(rows, ring)
    ns = M.nullspace()
    return [[_back(x, ring) for x in r] for r in ns.rep.to_ddm()]
