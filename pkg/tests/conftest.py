from fractions import Fraction

import pytest

from filtered_ainfty.core import AInftyStructure, Generator
from filtered_ainfty.novikov import GapMonoid, GroundRing


def build(gens, ops=None, curvature=None, units=None, ring=GroundRing.Q, cutoff=5, gap=(1,), objects=None):
    """Small structure from ``{id: shifted_degree}`` (one object ``c``) or full Generator tuples.

    ``ops`` maps an input tuple to ``[(output, exponent, coeff), ...]``.
    """
    gmap = {}
    for g in gens:
        if isinstance(g, Generator):
            gmap[g.id] = g
        else:
            gid, deg = g
            gmap[gid] = Generator(gid, "c", "c", deg)
    objs = objects or sorted({o for g in gmap.values() for o in (g.source, g.target)})

    def vec(rows):
        return {(z, Fraction(e)): c for z, e, c in rows}

    return AInftyStructure(
        ring=ring,
        objects=tuple(objs),
        generators=gmap,
        ops={tuple(k): vec(v) for k, v in (ops or {}).items()},
        curvature={k: vec(v) for k, v in (curvature or {}).items()},
        units=units or {},
        gap=GapMonoid(gap),
        cutoff=Fraction(cutoff),
    )


def unital(extra, ring=GroundRing.Q, **kw):
    """One-object algebra with unit ``e`` and generators ``extra = {id: shifted degree}``."""
    gens = [("e", -1)] + list(extra.items())
    ops = {("e", "e"): [("e", 0, 1)]}
    for x, d in extra.items():
        ops[("e", x)] = [(x, 0, 1)]
        ops[(x, "e")] = [(x, 0, 1 if (d + 1) % 2 == 0 else -1)]
    ops.update(kw.pop("ops", {}))
    return build(gens, ops, units={"c": "e"}, ring=ring, **kw)


@pytest.fixture
def Q():
    return GroundRing.Q
