"""Instanton Floer chain complexes assembled from supplied moduli counts."""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from .linalg import nullspace, rank
from .novikov import GroundRing


class InstantonError(ValueError):
    pass


@dataclass
class InstantonComplex:
    generators: dict  # name -> grading in Z/grading_mod
    grading_mod: int = 8
    ring: GroundRing = GroundRing.Z2
    counts: dict = field(default_factory=dict)  # (a, b) -> integer count of M(a, b; 0)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grading_mod not in (4, 8):
            raise InstantonError(f"grading modulus must be 4 or 8, got {self.grading_mod}")
        if self.ring not in (GroundRing.Z2, GroundRing.Z):
            raise InstantonError("instanton complexes are defined over Z2 or Z")
        self.generators = {g: int(mu) % self.grading_mod for g, mu in self.generators.items()}
        for (a, b) in self.counts:
            for g in (a, b):
                if g not in self.generators:
                    raise InstantonError(f"count ({a},{b}) names unknown generator {g!r}")

    def entry(self, a, b) -> int:
        n = int(self.counts.get((a, b), 0))
        return n % 2 if self.ring is GroundRing.Z2 else n

    def names(self) -> list:
        return list(self.generators)

    def in_degree(self, mu) -> list:
        mu %= self.grading_mod
        return [g for g, d in self.generators.items() if d == mu]


def grading_violations(C: InstantonComplex) -> list:
    bad = []
    for (a, b), _ in sorted(C.counts.items()):
        if C.entry(a, b) and (C.generators[b] - C.generators[a] + 1) % C.grading_mod:
            bad.append(f"count ({a},{b}) joins grading {C.generators[a]} to {C.generators[b]}; needs mu(b) = mu(a) - 1")
    return bad


def build_boundary(C: InstantonComplex) -> dict:
    """``{(a, b): <d a, b>}`` over the coefficient ring, zero entries dropped."""
    bad = grading_violations(C)
    if bad:
        raise InstantonError("; ".join(bad))
    return {k: C.entry(*k) for k in C.counts if C.entry(*k)}


def boundary_square(C: InstantonComplex) -> dict:
    d = build_boundary(C)
    out: dict = {}
    for (a, b), x in d.items():
        for (b2, c), y in d.items():
            if b2 == b:
                out[(a, c)] = out.get((a, c), 0) + x * y
    if C.ring is GroundRing.Z2:
        out = {k: v % 2 for k, v in out.items()}
    return {k: v for k, v in out.items() if v}


def verify(C: InstantonComplex) -> list:
    """Problems found: grading violations and nonzero entries of ``d o d``."""
    bad = grading_violations(C)
    if bad:
        return bad
    return [f"dd({a}) has coefficient {v} on {c}" for (a, c), v in sorted(boundary_square(C).items())]


def _block(C: InstantonComplex, mu) -> list:
    """Matrix of ``d : C_mu -> C_{mu-1}`` with rows indexed by the target."""
    src, dst = C.in_degree(mu), C.in_degree(mu - 1)
    return [[C.entry(a, b) for a in src] for b in dst]


@dataclass
class HomologyReport:
    ranks: dict  # grading -> rank
    torsion: dict  # grading -> invariant factors > 1 (over Z)
    grading_mod: int

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** mu * r for mu, r in self.ranks.items())

    def lines(self) -> list:
        out = []
        for mu in range(self.grading_mod):
            t = ",".join(str(x) for x in self.torsion.get(mu, [])) or "-"
            out.append(f"homology grading={mu} rank={self.ranks.get(mu, 0)} torsion={t}")
        out.append(f"homology total_rank={self.total_rank()} euler={self.euler_characteristic()}")
        return out


def _invariant_factors(rows) -> list:
    if not rows or not rows[0]:
        return []
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    out = []
    for i in range(min(snf.shape)):
        v = abs(int(snf[i, i]))
        if v > 1:
            out.append(v)
    return sorted(out)


def homology(C: InstantonComplex) -> HomologyReport:
    problems = verify(C)
    if problems:
        raise InstantonError("; ".join(problems))
    ranks, torsion = {}, {}
    for mu in range(C.grading_mod):
        n = len(C.in_degree(mu))
        r_out = rank(_block(C, mu), C.ring) if n else 0
        incoming = _block(C, mu + 1)
        r_in = rank(incoming, C.ring) if C.in_degree(mu + 1) and n else 0
        ranks[mu] = n - r_out - r_in
        if C.ring is GroundRing.Z and n and C.in_degree(mu + 1):
            tf = _invariant_factors(incoming)
            if tf:
                torsion[mu] = tf
    return HomologyReport(ranks, torsion, C.grading_mod)


def euler_from_generators(C: InstantonComplex) -> int:
    return sum((-1) ** mu for mu in C.generators.values())


# --------------------------------------------------------------------------
# duality


@dataclass
class DualityReport:
    mismatches: list
    descends: bool

    @property
    def passed(self) -> bool:
        return not self.mismatches and self.descends

    def lines(self) -> list:
        out = [f"check=duality status={'pass' if self.passed else 'fail'} descends={str(self.descends).lower()}"]
        out += [f"mismatch pair={a},{b} forward={x} dual={y}" for a, b, x, y in self.mismatches]
        return out


def _same_ring(C, C2):
    if set(C.generators) != set(C2.generators):
        missing = sorted(set(C.generators) ^ set(C2.generators))
        raise InstantonError(f"generator sets are not identified; unmatched: {missing}")
    if C.ring is not C2.ring:
        raise InstantonError("complexes use different coefficient rings")
    if C.grading_mod != C2.grading_mod:
        raise InstantonError(f"grading moduli differ ({C.grading_mod} vs {C2.grading_mod})")


def adjointness_mismatches(C: InstantonComplex, C2: InstantonComplex) -> list:
    """Pairs where ``<d a, b> != <a, d' b>``."""
    _same_ring(C, C2)
    out = []
    for a in C.generators:
        for b in C.generators:
            x, y = C.entry(a, b), C2.entry(b, a)
            if x != y:
                out.append((a, b, x, y))
    return out


def _cycles(C: InstantonComplex) -> list:
    names = C.names()
    rows = [[C.entry(a, b) for a in names] for b in names]
    return [dict(zip(names, v)) for v in nullspace(rows, C.ring)] if names else []


def _boundaries(C: InstantonComplex) -> list:
    out = []
    for a in C.generators:
        v = {b: C.entry(a, b) for b in C.generators if C.entry(a, b)}
        if v:
            out.append(v)
    return out


def _pair(z1: dict, z2: dict, ring) -> int:
    s = sum(c * z2.get(g, 0) for g, c in z1.items())
    return s % 2 if ring is GroundRing.Z2 else s


def pairing_descends(C: InstantonComplex, C2: InstantonComplex) -> bool:
    """Cycles of one side pair to zero with boundaries of the other, in both directions."""
    _same_ring(C, C2)
    for z in _cycles(C):
        if any(_pair(z, b, C.ring) for b in _boundaries(C2)):
            return False
    for z in _cycles(C2):
        if any(_pair(b, z, C.ring) for b in _boundaries(C)):
            return False
    return True


def duality_pairing(C: InstantonComplex, C2: InstantonComplex) -> DualityReport:
    return DualityReport(adjointness_mismatches(C, C2), pairing_descends(C, C2))


def apply_boundary(C: InstantonComplex, chain: dict) -> dict:
    out: dict = {}
    for a, c in chain.items():
        for b in C.generators:
            x = C.entry(a, b)
            if x:
                out[b] = out.get(b, 0) + c * x
    if C.ring is GroundRing.Z2:
        out = {k: v % 2 for k, v in out.items()}
    return {k: v for k, v in out.items() if v}


def relative_invariant_pair(C: InstantonComplex, C2: InstantonComplex, z1: dict, z2: dict) -> int:
    """``<z1, z2>`` for cycles ``z1`` of ``C`` and ``z2`` of the dual complex."""
    _same_ring(C, C2)
    for z, X, side in ((z1, C, "first"), (z2, C2, "second")):
        unknown = [g for g in z if g not in X.generators]
        if unknown:
            raise InstantonError(f"{side} chain uses unknown generators {unknown}")
        if apply_boundary(X, z):
            raise InstantonError(f"{side} chain is not a cycle")
    return _pair(z1, z2, C.ring)


def connected_sum_lint(n: int, n1: int, n2: int, orbits: int) -> list:
    """Generator-count identity for a declared connected-sum triple."""
    want = n1 + n2 + n1 * n2 * orbits
    if n != want:
        return [f"connected sum declares {n} generators, expected {n1} + {n2} + {n1}*{n2}*{orbits} = {want}"]
    return []


def lint_metadata(C: InstantonComplex) -> list:
    """Checks a ``connected_sum`` declaration ``n1,n2,orbits`` when present."""
    raw = C.metadata.get("connected_sum")
    if raw is None:
        return []
    try:
        n1, n2, s = (int(x) for x in str(raw).split(","))
    except ValueError:
        return [f"connected_sum metadata {raw!r} is not 'n1,n2,orbits'"]
    return connected_sum_lint(len(C.generators), n1, n2, s)
