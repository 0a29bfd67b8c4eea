"""Perverse degrees, admissibility, and intersection chain complexes.

Simplices are oriented by the sorted order of their vertex ids, so
``∂⟨v0..vk⟩ = Σ (−1)^i ⟨v0..v̂i..vk⟩`` is reproducible.  Chains are dicts
from simplex keys to ring elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import errors
from .complex_core import (
    NEG_INF,
    FilteredComplex,
    SimplexKey,
    StratifiedMapDescriptor,
    all_faces,
    boundary_faces,
    check_stratified_map,
    join_dim,
)
from .linalg import KernelBasis, QuotientMap, add_scaled
from .perversity import Perversity
from .rings import Ring

Chain = dict

VARIANTS = ("intersection", "tame", "ordinary")


# -- perverse degree and admissibility ------------------------------------


@dataclass(frozen=True)
class PerverseDegree:
    simplex: SimplexKey
    by_index: tuple
    by_stratum: dict


def perverse_degree(X: FilteredComplex, simplex: Iterable[str]) -> PerverseDegree:
    key = X.require(simplex)
    n = X.formal_dim
    levels = [X.levels[v] for v in key]
    by_index = tuple(join_dim(sum(1 for lv in levels if lv <= n - i)) for i in range(n + 1))
    met = {X.strata.vertex_stratum[v] for v in key}
    by_stratum = {}
    for s in X.strata:
        by_stratum[s.id] = by_index[s.codim] if s.id in met else NEG_INF
    return PerverseDegree(key, by_index, by_stratum)


def _slices(X: FilteredComplex, simplex: SimplexKey) -> list[tuple[int, str, int]]:
    """(level, stratum, number of vertices at level ≤ it) for each level met."""
    counts: dict[int, int] = {}
    anchor: dict[int, str] = {}
    for v in simplex:
        lv = X.levels[v]
        counts[lv] = counts.get(lv, 0) + 1
        anchor.setdefault(lv, v)
    out, running = [], 0
    vs = X.strata.vertex_stratum
    for lv in sorted(counts):
        running += counts[lv]
        out.append((lv, vs[anchor[lv]], running))
    return out


def _admissible(X: FilteredComplex, simplex: SimplexKey, p: Perversity) -> bool:
    n = X.formal_dim
    dim = len(simplex) - 1
    for lv, sid, below in _slices(X, simplex):
        if lv < n and below - 1 > dim - (n - lv) + p[sid]:
            return False
    return True


def is_admissible(X: FilteredComplex, simplex: Iterable[str], p: Perversity) -> bool:
    return _admissible(X, X.require(simplex), p)


def admissibility_table(X: FilteredComplex, p: Perversity, simplices: Iterable[SimplexKey] | None = None) -> dict:
    return {s: _admissible(X, s, p) for s in (X.simplices if simplices is None else simplices)}


# -- funest faces -----------------------------------------------------------


@dataclass(frozen=True)
class FunestReport:
    simplex: SimplexKey
    funest_face: SimplexKey | None
    guilty_stratum: str | None
    defect: int

    def as_dict(self) -> dict:
        return {
            "simplex": list(self.simplex),
            "funest_face": list(self.funest_face) if self.funest_face else None,
            "guilty_stratum": self.guilty_stratum,
            "defect": self.defect,
        }


def funest_report(X: FilteredComplex, simplex: Iterable[str], p: Perversity) -> FunestReport:
    """Smallest leading face ``F_S`` whose dimension hits the allowance exactly."""
    key = X.require(simplex)
    if not _admissible(X, key, p):
        raise errors.NotAdmissible(f"{list(key)} is not admissible", simplex=list(key))
    n = X.formal_dim
    dim = len(key) - 1
    for lv, sid, below in _slices(X, key):
        codim = n - lv
        if below != len(key) and below - 1 == dim - codim + p[sid]:
            face = tuple(v for v in key if X.levels[v] <= lv)
            return FunestReport(key, face, sid, codim)
    return FunestReport(key, None, None, 0)


def boundary_split(X: FilteredComplex, simplex: Iterable[str]) -> tuple[Chain, Chain]:
    """``∂σ = ∂_reg σ + ∂_sing σ`` by whether a face reaches the top level."""
    key = X.require(simplex)
    regular: Chain = {}
    singular: Chain = {}
    for sign, face in boundary_faces(key):
        (regular if X.is_regular_simplex(face) else singular)[face] = sign
    return regular, singular


def grandes_strates(X: FilteredComplex, p: Perversity) -> FilteredComplex:
    """Union of the closures of singular strata on which p̄ exceeds t̄."""
    simplices: set[SimplexKey] = set()
    for s in X.strata.singular():
        if p[s.id] > s.codim - 2:
            for t in s.simplices:
                simplices.update(all_faces(t))
    return X.subcomplex(simplices, f"{X.name}|large")


# -- chain arithmetic -------------------------------------------------------


def chain_boundary(chain: Mapping[SimplexKey, object], ring: Ring, keep=None) -> Chain:
    out: Chain = {}
    p = ring.modulus
    for s, c in chain.items():
        for sign, face in boundary_faces(s):
            if keep is not None and not keep(face):
                continue
            nv = out.get(face, 0) + sign * c
            if p:
                nv %= p
            if nv:
                out[face] = nv
            else:
                out.pop(face, None)
    return out


def pushforward_chain(
    f: StratifiedMapDescriptor, chain: Mapping[SimplexKey, object], p: Perversity, q: Perversity
) -> Chain:
    """Image of a p̄-admissible chain; degenerate simplices are dropped."""
    src, tgt = f.source, f.target
    smap = f.stratum_map or check_stratified_map(f).stratum_map
    for s in src.strata:
        image = smap[s.id]
        if tgt.strata[image].regular:
            continue
        if q.dual_value(image) > p.dual_value(s.id):
            raise errors.DualityInequalityViolated(
                f"Dq̄({image})={q.dual_value(image)} > Dp̄({s.id})={p.dual_value(s.id)}"
            )
    out: Chain = {}
    for s, c in chain.items():
        if not _admissible(src, src.require(s), p):
            raise errors.NotAdmissibleInput(f"{list(s)} is not admissible", simplex=list(s))
        image = [f.vertex_map[v] for v in s]
        if len(set(image)) < len(image):
            continue
        order = sorted(range(len(image)), key=lambda i: image[i])
        sign = _permutation_sign(order)
        key = tuple(image[i] for i in order)
        if not _admissible(tgt, key, q):
            raise AssertionError(f"image {key} of an admissible simplex is not admissible")
        out[key] = out.get(key, 0) + sign * c
        if not out[key]:
            del out[key]
    return out


def _permutation_sign(order: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- presentations ---------------------------------------------------------


@dataclass
class ChainComplexPresentation:
    """Per-degree bases (as chains) and boundary matrices in those bases.

    ``boundary[k][j]`` is ``d_k`` of the j-th degree-k basis element, given in
    coordinates of the degree ``k-1`` basis.
    """

    ring: Ring
    variant: str
    basis: list[list[Chain]]
    boundary: list[list[dict]]
    coordinate_maps: list = field(repr=False, default_factory=list)
    support_filter: object = field(repr=False, default=None)

    @property
    def top_degree(self) -> int:
        return len(self.basis) - 1

    def rank(self, k: int) -> int:
        return len(self.basis[k]) if 0 <= k < len(self.basis) else 0

    def dims(self) -> list[int]:
        return [len(b) for b in self.basis]

    def coordinates(self, k: int, chain: Mapping) -> dict:
        """Coordinates of a chain of this complex (for quotients: of its class)."""
        if self.support_filter is not None:
            chain = {s: c for s, c in chain.items() if self.support_filter(s)}
        return self.coordinate_maps[k](chain)

    def check_dd(self) -> None:
        for k in range(2, len(self.boundary)):
            for j, col in enumerate(self.boundary[k]):
                acc: dict = {}
                for i, c in col.items():
                    add_scaled(acc, c, self.boundary[k - 1][i], self.ring)
                if acc:
                    raise errors.InconsistentComplex(f"d∘d ≠ 0 at degree {k}, basis element {j}")


def _presentation(
    X: FilteredComplex,
    p: Perversity | None,
    ring: Ring,
    variant: str,
    within: frozenset | None = None,
) -> ChainComplexPresentation:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    pool = X.simplices if within is None else within
    if variant == "ordinary":
        allowed = {s: True for s in pool}
    else:
        allowed = {s: _admissible(X, s, p) for s in pool}
    tame = variant == "tame"
    top = X.formal_dim
    keep = (lambda face: X.level(face) == top) if tame else None

    by_dim: dict[int, list[SimplexKey]] = {}
    for s in sorted(pool):
        if allowed[s] and (not tame or X.level(s) == top):
            by_dim.setdefault(len(s) - 1, []).append(s)
    top_degree = max((len(s) - 1 for s in pool), default=-1)

    basis: list[list[Chain]] = []
    boundary: list[list[dict]] = []
    coords = []
    prev = None
    for k in range(top_degree + 1):
        ambient = by_dim.get(k, [])
        constraints = {}
        for s in ambient:
            col = {}
            for sign, face in boundary_faces(s):
                if keep is not None and not keep(face):
                    continue
                if not allowed.get(face, False):
                    col[face] = sign
            if col:
                constraints[s] = col
        kb = KernelBasis(ambient, constraints, ring)
        vectors = [{s: ring.norm(c) for s, c in v.items()} for v in kb.vectors]
        basis.append(vectors)
        coords.append(kb.coordinates)
        if k == 0:
            boundary.append([{} for _ in vectors])
        else:
            boundary.append([prev.coordinates(chain_boundary(v, ring, keep)) for v in vectors])
        prev = kb
    pres = ChainComplexPresentation(ring, variant, basis, boundary, coords, keep)
    pres.check_dd()
    return pres


def build_intersection_complex(
    X: FilteredComplex, p: Perversity, ring: Ring, within: Iterable[SimplexKey] | None = None
) -> ChainComplexPresentation:
    """Chains on admissible simplices whose boundary is again admissible.

    ``within`` restricts to a subcomplex (closed under faces) carrying the
    induced filtration.
    """
    return _presentation(X, p, ring, "intersection", _frozen(within))


def build_tame_complex(
    X: FilteredComplex, p: Perversity, ring: Ring, within: Iterable[SimplexKey] | None = None
) -> ChainComplexPresentation:
    """Admissible chains modulo those inside the singular part, with ∂ restricted to regular faces."""
    return _presentation(X, p, ring, "tame", _frozen(within))


def build_simplicial_complex(
    X: FilteredComplex, ring: Ring, within: Iterable[SimplexKey] | None = None
) -> ChainComplexPresentation:
    """Ordinary simplicial chains (no admissibility constraint)."""
    return _presentation(X, None, ring, "ordinary", _frozen(within))


def build_presentation(
    X: FilteredComplex, p: Perversity | None, ring: Ring, variant: str, within: Iterable[SimplexKey] | None = None
) -> ChainComplexPresentation:
    return _presentation(X, p, ring, variant, _frozen(within))


def _frozen(within):
    return None if within is None else frozenset(within)


@dataclass
class RelativePresentation(ChainComplexPresentation):
    """Quotient ``C(X)/C(L)`` together with the data of the pair sequence."""

    absolute: ChainComplexPresentation | None = None
    sub: ChainComplexPresentation | None = None
    inclusion: list[list[dict]] = field(default_factory=list)
    quotients: list[QuotientMap] = field(default_factory=list)

    def project(self, k: int, coords: Mapping[int, object]) -> dict:
        """Absolute coordinates -> relative coordinates."""
        return self.quotients[k].project(coords)

    def lift(self, k: int, q: int) -> dict:
        """Relative basis element -> absolute coordinates of a representative."""
        return self.quotients[k].lift(q)


def check_full_subcomplex(X: FilteredComplex, L: FilteredComplex) -> frozenset:
    if L.formal_dim != X.formal_dim:
        raise errors.NotFullSubcomplex("subcomplex must keep the formal dimension")
    for v, lv in L.levels.items():
        if X.levels.get(v) != lv:
            raise errors.NotFullSubcomplex(f"vertex {v!r} missing or relevelled in the subcomplex")
    expected = frozenset(s for s in X.simplices if all(v in L.levels for v in s))
    if L.simplices != expected:
        raise errors.NotFullSubcomplex("subcomplex is not the full subcomplex on its vertices")
    return expected


def build_relative_complex(
    X: FilteredComplex,
    L: FilteredComplex | Iterable[SimplexKey],
    p: Perversity | None,
    ring: Ring,
    variant: str = "intersection",
    require_full: bool = True,
) -> RelativePresentation:
    """Quotient of the X-complex by the complex of the subcomplex L."""
    if isinstance(L, FilteredComplex):
        within = check_full_subcomplex(X, L) if require_full else frozenset(L.simplices)
    else:
        within = frozenset(L)
        if require_full:
            verts = {v for s in within for v in s}
            if within != frozenset(s for s in X.simplices if verts.issuperset(s)):
                raise errors.NotFullSubcomplex("subcomplex is not the full subcomplex on its vertices")
    whole = _presentation(X, p, ring, variant)
    sub = _presentation(X, p, ring, variant, within)
    inclusion: list[list[dict]] = []
    quotients: list[QuotientMap] = []
    basis: list[list[Chain]] = []
    boundary: list[list[dict]] = []
    for k in range(whole.top_degree + 1):
        gens = [whole.coordinates(k, v) for v in (sub.basis[k] if k <= sub.top_degree else [])]
        inclusion.append(gens)
        qm = QuotientMap(whole.rank(k), gens, ring)
        quotients.append(qm)
        basis.append([_combine(whole.basis[k], qm.lift(q), ring) for q in range(qm.dim)])
        if k == 0:
            boundary.append([{} for _ in range(qm.dim)])
        else:
            prev = quotients[k - 1]
            cols = []
            for q in range(qm.dim):
                acc: dict = {}
                for i, c in qm.lift(q).items():
                    add_scaled(acc, c, whole.boundary[k][i], ring)
                cols.append(prev.project(acc))
            boundary.append(cols)

    def coordinate_map(k):
        return lambda chain: quotients[k].project(whole.coordinates(k, chain))

    rel = RelativePresentation(
        ring,
        f"relative-{variant}",
        basis,
        boundary,
        [coordinate_map(k) for k in range(len(basis))],
        whole.support_filter,
        absolute=whole,
        sub=sub,
        inclusion=inclusion,
        quotients=quotients,
    )
    rel.check_dd()
    return rel


def _combine(vectors: Sequence[Chain], coords: Mapping[int, object], ring: Ring) -> Chain:
    out: Chain = {}
    for i, c in coords.items():
        add_scaled(out, c, vectors[i], ring)
    return out
