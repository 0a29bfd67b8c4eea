from itertools import product

from ihcalc.chain_builder import build_presentation
from ihcalc.homology_engine import homology
from ihcalc.perversity import make_perversity
from ihcalc.rings import QQ, ZZ, PrimeField

F2 = PrimeField(2)
RINGS = {"Z": ZZ, "Q": QQ, "F2": F2}


def groups(X, p, ring=ZZ, variant="intersection"):
    return [(g.free_rank, g.torsion) for g in homology(build_presentation(X, p, ring, variant))]


def padded(gs, length):
    return list(gs) + [(0, ())] * (length - len(gs))


def perversity_sweep(X, values):
    """Every assignment of the given values to the singular strata."""
    singular = [s.id for s in X.strata.singular()]
    for combo in product(values, repeat=len(singular)):
        yield make_perversity(X, dict(zip(singular, combo)))


def top_shift(X, delta):
    """t̄ + delta on every singular stratum."""
    return make_perversity(X, {s.id: s.codim - 2 + delta for s in X.strata.singular()})
