"""Truncated universal Novikov ring arithmetic.

A scalar is a finite sum ``sum a_k T^{lambda_k}`` with exact rational exponents,
stored together with an energy cutoff ``E``: every exponent ``>= E`` has been
discarded, so the scalar is only meaningful modulo ``T^E``.
"""

from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Union

INF = math.inf

Number = Union[int, Fraction]


class NovikovError(ValueError):
    pass


class GroundRing(enum.Enum):
    Z2 = "Z2"
    Z = "Z"
    Q = "Q"

    @classmethod
    def parse(cls, text: str) -> "GroundRing":
        key = text.strip().upper()
        for ring in cls:
            if ring.value.upper() == key:
                return ring
        raise NovikovError(f"unknown ground ring {text!r}")

    @property
    def is_field(self) -> bool:
        return self is not GroundRing.Z

    def coerce(self, c) -> Number:
        if self is GroundRing.Z2:
            c = Fraction(c)
            if c.denominator % 2 == 0:
                raise NovikovError(f"{c} has no image in Z2")
            return (c.numerator * c.denominator) % 2
        if self is GroundRing.Z:
            c = Fraction(c)
            if c.denominator != 1:
                raise NovikovError(f"{c} is not an integer")
            return int(c)
        c = Fraction(c)
        return int(c) if c.denominator == 1 else c

    def norm(self, c: Number) -> Number:
        """Reduce a coefficient already known to be a valid ring element."""
        if self is GroundRing.Z2:
            return c % 2
        return c

    def inverse(self, c: Number) -> Number:
        if c == 0:
            raise ZeroDivisionError("inverse of zero")
        if self is GroundRing.Z2:
            return 1
        if self is GroundRing.Z:
            if c not in (1, -1):
                raise NovikovError(f"{c} is not a unit in Z")
            return c
        return Fraction(1) / c

    def is_unit(self, c: Number) -> bool:
        if self is GroundRing.Z:
            return c in (1, -1)
        return self.norm(c) != 0


def as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise NovikovError(f"bad rational {text!r}") from None


def render_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Novikov:
    """Immutable truncated Novikov scalar.

    ``terms`` is a tuple of ``(exponent, coeff)`` pairs with strictly increasing
    exponents, nonzero coefficients and every exponent below ``cutoff``.
    """

    __slots__ = ("ring", "terms", "cutoff")

    def __init__(self, terms=(), cutoff=INF, ring: GroundRing = GroundRing.Q):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "cutoff", cutoff if cutoff == INF else Fraction(cutoff))
        acc: dict[Fraction, Number] = {}
        for exp, c in terms:
            exp = as_fraction(exp)
            if exp >= self.cutoff:
                continue
            acc[exp] = acc.get(exp, 0) + ring.coerce(c)
        clean = []
        for exp in sorted(acc):
            c = ring.norm(acc[exp])
            if c != 0:
                clean.append((exp, c))
        object.__setattr__(self, "terms", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("Novikov scalars are immutable")

    # constructors

    @classmethod
    def zero(cls, cutoff=INF, ring=GroundRing.Q) -> "Novikov":
        return cls((), cutoff, ring)

    @classmethod
    def one(cls, cutoff=INF, ring=GroundRing.Q) -> "Novikov":
        return cls(((0, 1),), cutoff, ring)

    @classmethod
    def monomial(cls, coeff, exponent, cutoff=INF, ring=GroundRing.Q) -> "Novikov":
        return cls(((exponent, coeff),), cutoff, ring)

    @classmethod
    def _raw(cls, terms, cutoff, ring) -> "Novikov":
        obj = object.__new__(cls)
        object.__setattr__(obj, "ring", ring)
        object.__setattr__(obj, "cutoff", cutoff)
        object.__setattr__(obj, "terms", tuple(terms))
        return obj

    # predicates

    def is_zero(self) -> bool:
        return not self.terms

    def in_lambda0(self) -> bool:
        return all(e >= 0 for e, _ in self.terms)

    def in_lambda_plus(self) -> bool:
        return all(e > 0 for e, _ in self.terms)

    def valuation(self):
        return self.terms[0][0] if self.terms else INF

    def constant_term(self) -> Number:
        """Image under the quotient map Lambda_0 -> R."""
        for e, c in self.terms:
            if e == 0:
                return c
        return 0

    def coefficient(self, exponent) -> Number:
        exponent = as_fraction(exponent)
        for e, c in self.terms:
            if e == exponent:
                return c
        return 0

    def exponents(self) -> list[Fraction]:
        return [e for e, _ in self.terms]

    # arithmetic

    def _check(self, other: "Novikov"):
        if self.ring is not other.ring:
            raise NovikovError(f"ground ring mismatch: {self.ring.value} vs {other.ring.value}")

    def _lift(self, other) -> "Novikov":
        if isinstance(other, Novikov):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Novikov(((0, other),), self.cutoff, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        cutoff = min(self.cutoff, other.cutoff)
        return Novikov(self.terms + other.terms, cutoff, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return Novikov._raw(((e, self.ring.norm(-c)) for e, c in self.terms), self.cutoff, self.ring)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        cutoff = min(self.cutoff, other.cutoff)
        prod = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                if e1 + e2 < cutoff:
                    prod.append((e1 + e2, c1 * c2))
        return Novikov(prod, cutoff, self.ring)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        out = Novikov.one(self.cutoff, self.ring)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, exponent) -> "Novikov":
        """Multiply by ``T^exponent``; the cutoff moves with the terms."""
        exponent = as_fraction(exponent)
        cut = self.cutoff + exponent if self.cutoff != INF else INF
        return Novikov._raw(((e + exponent, c) for e, c in self.terms), cut, self.ring)

    def truncate(self, cutoff) -> "Novikov":
        cutoff = min(self.cutoff, as_fraction(cutoff) if cutoff != INF else INF)
        return Novikov(self.terms, cutoff, self.ring)

    def invert(self) -> "Novikov":
        """Inverse in the Novikov field, modulo ``T^(E - val)``.

        Writes ``a = c T^v (1 + u)`` with ``val(u) > 0`` and expands the geometric
        series in ``u``.
        """
        if not self.ring.is_field:
            raise NovikovError("inversion needs a field ground ring")
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Novikov element")
        v, c = self.terms[0]
        cinv = self.ring.inverse(c)
        if self.cutoff == INF and len(self.terms) > 1:
            raise NovikovError("cannot invert a non-monomial without a finite cutoff")
        new_cut = self.cutoff - v if self.cutoff != INF else INF
        u = Novikov(((e - v, cinv * a) for e, a in self.terms[1:]), new_cut, self.ring)
        out = Novikov.one(new_cut, self.ring)
        power = Novikov.one(new_cut, self.ring)
        while True:
            power = power * (-u)
            if power.is_zero():
                break
            out = out + power
        return Novikov(((e - v, cinv * a) for e, a in out.terms), new_cut, self.ring)

    # comparison / hashing

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        if not isinstance(other, Novikov):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms and self.cutoff == other.cutoff

    def same_mod(self, other: "Novikov") -> bool:
        """Equality modulo the smaller of the two cutoffs."""
        cut = min(self.cutoff, other.cutoff)
        return self.truncate(cut).terms == other.truncate(cut).terms

    def __hash__(self):
        return hash((self.ring, self.terms, self.cutoff))

    def __repr__(self):
        return f"Novikov({render(self)!r}, cutoff={self.cutoff}, ring={self.ring.value})"

    def __str__(self):
        return render(self)


def _render_coeff(c: Number) -> str:
    return render_rational(Fraction(c))


def render(a: Novikov) -> str:
    """Canonical text: ``c0*T^(p/q) + c1*T^(r/s)``; zero renders as ``0``."""
    if a.is_zero():
        return "0"
    return " + ".join(f"{_render_coeff(c)}*T^({render_rational(e)})" for e, c in a.terms)


_TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*\*\s*T\^\(\s*(-?\d+(?:/\d+)?)\s*\)\s*$")


def parse(text: str, cutoff=INF, ring: GroundRing = GroundRing.Q) -> Novikov:
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        return Novikov.zero(cutoff, ring)
    terms = []
    for chunk in text.split(" + "):
        m = _TERM.match(chunk)
        if not m:
            raise NovikovError(f"bad Novikov term {chunk!r}")
        terms.append((parse_rational(m.group(2)), parse_rational(m.group(1))))
    exps = [e for e, _ in terms]
    if exps != sorted(set(exps)):
        raise NovikovError("exponents must be strictly increasing")
    return Novikov(terms, cutoff, ring)


class GapMonoid:
    """Submonoid of the non-negative rationals generated by finitely many positive rationals."""

    def __init__(self, generators: Iterable):
        gens = sorted({as_fraction(g) for g in generators})
        if any(g <= 0 for g in gens):
            raise NovikovError("gap generators must be positive")
        self.generators: tuple[Fraction, ...] = tuple(gens)
        self.denominator = reduce(math.lcm, (g.denominator for g in gens), 1)
        self._ints = [int(g * self.denominator) for g in gens]
        self._member_cache: dict[int, bool] = {0: True}

    def __repr__(self):
        return f"GapMonoid({[render_rational(g) for g in self.generators]})"

    def __eq__(self, other):
        return isinstance(other, GapMonoid) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    @property
    def epsilon(self) -> Fraction:
        """Smallest positive element; plays the role of epsilon in ``m_0 = 0 mod T^eps``."""
        return self.generators[0] if self.generators else Fraction(0)

    def contains(self, x) -> bool:
        x = as_fraction(x)
        if x < 0:
            return False
        n = x * self.denominator
        if n.denominator != 1:
            return False
        return self._member(int(n))

    def _member(self, n: int) -> bool:
        # coin problem by dynamic programming up to n
        if n in self._member_cache:
            return self._member_cache[n]
        top = max(self._member_cache)
        for k in range(top + 1, n + 1):
            self._member_cache[k] = any(k - g >= 0 and self._member_cache[k - g] for g in self._ints)
        return self._member_cache[n]

    def elements_below(self, bound) -> list[Fraction]:
        """Sorted monoid elements ``< bound`` (includes 0)."""
        bound = as_fraction(bound)
        if not self.generators:
            return [Fraction(0)] if bound > 0 else []
        out = []
        n = 0
        while Fraction(n, self.denominator) < bound:
            if self._member(n):
                out.append(Fraction(n, self.denominator))
            n += 1
        return out


def is_gapped(a: Novikov, monoid: GapMonoid) -> bool:
    return all(monoid.contains(e) for e in a.exponents())
