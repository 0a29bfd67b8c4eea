"""New filtered complexes from old ones.

Every builder has a ``build_*`` form returning a :class:`Construction`,
which remembers for each new vertex the simplex of the input it sits over.
That record is what lets a perversity on the input be carried to the output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Mapping, Sequence

from . import errors
from .complex_core import FilteredComplex, SimplexKey, simplex_key
from .perversity import Perversity, make_perversity

Carrier = tuple[int, SimplexKey] | None


@dataclass(frozen=True)
class Construction:
    complex: FilteredComplex
    inputs: tuple[FilteredComplex, ...]
    carrier: Mapping[str, Carrier]
    pieces: Mapping[str, frozenset] = field(default_factory=dict)


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def _require_nonempty(X: FilteredComplex, what: str) -> None:
    if not X.levels:
        raise errors.EmptyInput(f"{what} of an empty complex")


# -- cones and suspensions ---------------------------------------------------


def build_cone(X: FilteredComplex, apex: str = "w", name: str | None = None) -> Construction:
    apex = _fresh(apex, X.levels)
    levels = {v: lvl + 1 for v, lvl in X.levels.items()}
    levels[apex] = 0
    maximal = [s + (apex,) for s in X.maximal_simplices] or [(apex,)]
    order = (apex,) + tuple(X.vertex_order)
    K = FilteredComplex.from_maximal(name or f"cone({X.name})", X.formal_dim + 1, levels, maximal, order)
    carrier: dict[str, Carrier] = {v: (0, (v,)) for v in X.levels}
    carrier[apex] = None
    return Construction(K, (X,), carrier)


def cone(X: FilteredComplex, apex: str = "w") -> FilteredComplex:
    """Closed cone: apex at level 0, every other level shifted up by one."""
    return build_cone(X, apex).complex


def build_suspension(X: FilteredComplex, name: str | None = None) -> Construction:
    _require_nonempty(X, "suspension")
    north = _fresh("w+", X.levels)
    south = _fresh("w-", set(X.levels) | {north})
    levels = {v: lvl + 1 for v, lvl in X.levels.items()}
    levels[north] = levels[south] = 0
    maximal = [s + (apex,) for s in X.maximal_simplices for apex in (north, south)]
    order = (north, south) + tuple(X.vertex_order)
    K = FilteredComplex.from_maximal(name or f"susp({X.name})", X.formal_dim + 1, levels, maximal, order)
    carrier: dict[str, Carrier] = {v: (0, (v,)) for v in X.levels}
    carrier[north] = carrier[south] = None
    return Construction(K, (X,), carrier)


def suspension(X: FilteredComplex) -> FilteredComplex:
    """Two cones glued along X; the apexes are separate strata."""
    return build_suspension(X).complex


# -- products --------------------------------------------------------------


def product_vertex(v: str, t: int) -> str:
    return f"({v},{t})"


def _staircase(X: FilteredComplex, edges: Sequence[tuple[int, int]], times: Sequence[int], name: str) -> Construction:
    rank = {v: i for i, v in enumerate(X.vertex_order)}
    maximal = []
    for s in X.maximal_simplices:
        ordered = sorted(s, key=rank.__getitem__)
        for t0, t1 in edges:
            for j in range(len(ordered)):
                maximal.append(
                    [product_vertex(v, t0) for v in ordered[: j + 1]]
                    + [product_vertex(v, t1) for v in ordered[j:]]
                )
    levels = {product_vertex(v, t): X.levels[v] + 1 for v in X.levels for t in times}
    order = tuple(product_vertex(v, t) for v in X.vertex_order for t in times)
    K = FilteredComplex.from_maximal(name, X.formal_dim + 1, levels, maximal, order)
    carrier = {product_vertex(v, t): (0, (v,)) for v in X.levels for t in times}
    return Construction(K, (X,), carrier)


def build_product_interval(X: FilteredComplex, m: int = 1, name: str | None = None) -> Construction:
    if m < 1:
        raise errors.MTooSmall(f"interval needs at least 1 subdivision, got {m}")
    _require_nonempty(X, "product")
    edges = [(t, t + 1) for t in range(m)]
    return _staircase(X, edges, range(m + 1), name or f"{X.name}xI")


def product_interval(X: FilteredComplex, m: int = 1) -> FilteredComplex:
    """``X × [0, m]`` by staircase prisms; levels shift by one like for the cone."""
    return build_product_interval(X, m).complex


def build_product_circle(X: FilteredComplex, m: int = 3, name: str | None = None) -> Construction:
    if m < 3:
        raise errors.MTooSmall(f"a triangulated circle needs at least 3 vertices, got {m}")
    _require_nonempty(X, "product")
    edges = [tuple(sorted((t, (t + 1) % m))) for t in range(m)]
    return _staircase(X, edges, range(m), name or f"{X.name}xS1")


def product_circle(X: FilteredComplex, m: int = 3) -> FilteredComplex:
    return build_product_circle(X, m).complex


# -- subdivision -----------------------------------------------------------


def barycenter(simplex: SimplexKey) -> str:
    return "{" + ",".join(simplex) + "}"


def build_subdivision(X: FilteredComplex, name: str | None = None) -> Construction:
    flags = set()
    for s in X.maximal_simplices:
        for perm in permutations(s):
            flags.add(tuple(barycenter(simplex_key(perm[: i + 1])) for i in range(len(perm))))
    levels = {barycenter(s): X.level(s) for s in X.simplices}
    order = tuple(barycenter(s) for s in sorted(X.simplices, key=lambda s: (len(s), s)))
    K = FilteredComplex.from_maximal(name or f"sd({X.name})", X.formal_dim, levels, flags, order)
    return Construction(K, (X,), {barycenter(s): (0, s) for s in X.simplices})


def barycentric_subdivide(X: FilteredComplex, times: int = 1) -> FilteredComplex:
    """Barycenters sit at the level of their simplex, so every skeleton of the filtration is preserved."""
    for _ in range(times):
        X = build_subdivision(X).complex
    return X


# -- disjoint union --------------------------------------------------------


def build_disjoint_union(X: FilteredComplex, Y: FilteredComplex, name: str | None = None) -> Construction:
    if X.formal_dim != Y.formal_dim:
        raise errors.DimMismatch(f"formal dimensions differ: {X.formal_dim} vs {Y.formal_dim}")
    levels, maximal, order, carrier = {}, [], [], {}
    for idx, part in enumerate((X, Y)):
        prefix = f"{idx}:"
        for v, lvl in part.levels.items():
            levels[prefix + v] = lvl
            carrier[prefix + v] = (idx, (v,))
        maximal += [[prefix + v for v in s] for s in part.maximal_simplices]
        order += [prefix + v for v in part.vertex_order]
    K = FilteredComplex.from_maximal(name or f"{X.name}+{Y.name}", X.formal_dim, levels, maximal, order)
    return Construction(K, (X, Y), carrier)


def disjoint_union(X: FilteredComplex, Y: FilteredComplex) -> FilteredComplex:
    return build_disjoint_union(X, Y).complex


# -- composite spaces used by the exactness checks --------------------------


def build_collared_cone(X: FilteredComplex, name: str | None = None) -> Construction:
    """``X × I`` with a cone attached on ``X × {1}``.

    Pieces: ``cone`` (the attached cone), ``collar`` (``X × I``) and
    ``seam`` (their intersection ``X × {1}``).
    """
    collar = build_product_interval(X, 1)
    apex = _fresh("w", collar.complex.levels)
    levels = dict(collar.complex.levels)
    levels[apex] = 0
    top = [tuple(product_vertex(v, 1) for v in s) for s in X.maximal_simplices]
    maximal = list(collar.complex.maximal_simplices) + [s + (apex,) for s in top]
    order = (apex,) + tuple(collar.complex.vertex_order)
    K = FilteredComplex.from_maximal(name or f"ccone({X.name})", X.formal_dim + 1, levels, maximal, order)
    cone_part = K.closure(s + (apex,) for s in top)
    seam = K.closure(top)
    carrier = dict(collar.carrier)
    carrier[apex] = None
    return Construction(
        K, (X,), carrier, {"cone": cone_part, "collar": collar.complex.simplices, "seam": seam}
    )


def half_cone_cover(construction: Construction) -> tuple[frozenset, frozenset]:
    """Split a cone into the cones over two halves of its base's maximal simplices."""
    K = construction.complex
    (apex,) = [v for v, c in construction.carrier.items() if c is None]
    tops = [s for s in K.maximal_simplices if apex in s]
    half = (len(tops) + 1) // 2
    return K.closure(tops[:half]), K.closure(tops[half:])


# -- perversity transport --------------------------------------------------


def transport_perversity(
    construction: Construction,
    *perversities: Perversity,
    extra: Mapping[str, int] | None = None,
) -> Perversity:
    """Carry perversities on the inputs to the output.

    Each new stratum takes the value of the input stratum its vertices sit
    over.  Strata with nothing underneath (cone apexes) take their value
    from ``extra``.
    """
    if len(perversities) != len(construction.inputs):
        raise errors.ShapeMismatch(f"need {len(construction.inputs)} perversities, got {len(perversities)}")
    extra = dict(extra or {})
    K = construction.complex
    values = {}
    for st in K.strata.singular():
        below = set()
        for v in st.vertices:
            c = construction.carrier[v]
            if c is not None:
                idx, simplex = c
                below.add((idx, construction.inputs[idx].stratum_of(simplex)))
        if len(below) > 1:
            raise errors.InconsistentComplex(f"stratum {st.id} sits over several strata {sorted(below)}")
        if below:
            idx, sid = below.pop()
            values[st.id] = perversities[idx][sid]
        elif st.id in extra:
            values[st.id] = extra[st.id]
        else:
            raise errors.MissingStratum(f"no value for new stratum {st.id}", stratum=st.id)
    return make_perversity(K, values)


def apex_strata(construction: Construction) -> list[str]:
    K = construction.complex
    return sorted({K.strata.vertex_stratum[v] for v, c in construction.carrier.items() if c is None})
