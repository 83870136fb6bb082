"""Independent reference computations used by the tests."""

import math
from fractions import Fraction

import sympy
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from filtered_ainfty.novikov import GroundRing, Novikov

t = sympy.Symbol("t")


def _field(ring):
    return (GF(2) if ring is GroundRing.Z2 else QQ).frac_field(t)


def novikov_rank(rows, ring):
    """Rank over the Novikov field of a matrix of truncated scalars.

    Exponents are rescaled by their common denominator, so each entry becomes a
    polynomial in ``t = T^(1/den)``; the rank is taken over the rational function
    field, a subfield of the Novikov field.
    """
    if not rows or not rows[0]:
        return 0
    den = 1
    for r in rows:
        for a in r:
            for e, _ in a.terms:
                den = math.lcm(den, Fraction(e).denominator)
    K = _field(ring)
    conv = []
    for r in rows:
        out = []
        for a in r:
            expr = sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * t ** int(e * den)
                       for e, c in a.terms)
            out.append(K.from_sympy(sympy.sympify(expr)))
        conv.append(out)
    return DomainMatrix(conv, (len(rows), len(rows[0])), K).rank()


def kernel_mod_image_rank(d):
    """Lambda-rank of Ker d / Im d for a square-zero matrix: dim - 2 rank."""
    return len(d.basis) - 2 * novikov_rank(d.rows(), d.ring)


def series_root(step, cutoff, ring=GroundRing.Q, iters=None):
    """Fixed point of ``beta -> step(beta)`` by repeated substitution modulo ``T^cutoff``."""
    beta = Novikov.zero(cutoff, ring)
    for _ in range(iters or 4 * int(cutoff) + 4):
        beta = step(beta)
    return beta


def conjugate(rows, moves, ring, cutoff):
    """``P^-1 d P`` for a product of elementary and diagonal moves.

    ``("add", i, j, a)``: new basis vector ``e_j + a e_i``.
    ``("scale", i, u)``: new basis vector ``u e_i`` with ``u`` a unit of Lambda_0.
    """
    M = [list(r) for r in rows]
    n = len(M)
    for mv in moves:
        if mv[0] == "add":
            _, i, j, a = mv
            for r in range(n):
                M[r][j] = M[r][j] + a * M[r][i]
            for c in range(n):
                M[i][c] = M[i][c] - a * M[j][c]
        else:
            _, i, u = mv
            inv = u.invert()
            for r in range(n):
                M[r][i] = M[r][i] * u
            for c in range(n):
                M[i][c] = M[i][c] * inv
    return M


def ground_rank(rows, ring):
    """Rank of an integer matrix over GF(2) or QQ."""
    if not rows or not rows[0]:
        return 0
    K = GF(2) if ring is GroundRing.Z2 else QQ
    return DomainMatrix([[K(int(x)) for x in r] for r in rows], (len(rows), len(rows[0])), K).rank()
