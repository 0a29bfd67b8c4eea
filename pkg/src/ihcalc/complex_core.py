"""Finite filtered simplicial complexes, their strata and simplex decompositions.

A filtration is recorded per vertex: ``K_i`` is the full subcomplex spanned
by the vertices of level at most ``i``.  The level of a simplex is the
largest level among its vertices.

>>> X = build_complex({"name": "c", "formal_dim": 1,
...                    "vertices": [{"id": v, "level": 1} for v in "abc"],
...                    "simplices": [["a", "b"], ["b", "c"], ["a", "c"]]})
>>> len(X.simplices), [s.id for s in X.strata]
(6, ['S1.0'])
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from . import errors

SimplexKey = tuple[str, ...]


class _NegInf:
    """Dimension of the empty set; compares below every integer."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NEG_INF"

    def __lt__(self, other) -> bool:
        return other is not self

    def __le__(self, other) -> bool:
        return True

    def __gt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return other is self

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("NEG_INF")

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


def join_dim(vertex_count: int):
    """Dimension of a simplex with ``vertex_count`` vertices (NEG_INF if none)."""
    return vertex_count - 1 if vertex_count > 0 else NEG_INF


def simplex_key(vertices: Iterable[str]) -> SimplexKey:
    return tuple(sorted(vertices))


def boundary_faces(simplex: SimplexKey) -> Iterator[tuple[int, SimplexKey]]:
    """Yield ``(sign, face)`` for the codimension-one faces of a sorted simplex."""
    if len(simplex) < 2:
        return
    for i in range(len(simplex)):
        yield (1 if i % 2 == 0 else -1), simplex[:i] + simplex[i + 1:]


def all_faces(simplex: SimplexKey) -> Iterator[SimplexKey]:
    for size in range(1, len(simplex) + 1):
        yield from combinations(simplex, size)


@dataclass(frozen=True)
class Stratum:
    id: str
    level: int
    codim: int
    regular: bool
    vertices: tuple[str, ...]
    simplices: frozenset = field(repr=False)


@dataclass(frozen=True)
class StratumSet:
    strata: tuple[Stratum, ...]
    above: Mapping[str, frozenset]
    depth: Mapping[str, int]
    vertex_stratum: Mapping[str, str] = field(repr=False)

    def __iter__(self) -> Iterator[Stratum]:
        return iter(self.strata)

    def __len__(self) -> int:
        return len(self.strata)

    def __getitem__(self, sid: str) -> Stratum:
        return self._by_id[sid]

    def __contains__(self, sid: object) -> bool:
        return sid in self._by_id

    @cached_property
    def _by_id(self) -> dict[str, Stratum]:
        return {s.id: s for s in self.strata}

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.strata]

    def singular(self) -> list[Stratum]:
        return [s for s in self.strata if not s.regular]

    def regular(self) -> list[Stratum]:
        return [s for s in self.strata if s.regular]

    def leq(self, a: str, b: str) -> bool:
        """``a ⪯ b``: the stratum ``a`` lies in the closure of ``b``."""
        return b in self.above[a]

    def order_pairs(self) -> list[tuple[str, str]]:
        """Strict pairs ``(a, b)`` with ``a ≺ b``, sorted."""
        return sorted((a, b) for a, ups in self.above.items() for b in ups if a != b)


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    name: str
    formal_dim: int
    levels: Mapping[str, int]
    simplices: frozenset
    vertex_order: tuple[str, ...]

    @classmethod
    def from_maximal(
        cls,
        name: str,
        formal_dim: int,
        levels: Mapping[str, int],
        maximal: Iterable[Iterable[str]],
        vertex_order: Iterable[str] | None = None,
        require_top: bool = True,
    ) -> FilteredComplex:
        levels = dict(levels)
        for vid, lvl in levels.items():
            if not 0 <= lvl <= formal_dim:
                raise errors.LevelOutOfRange(
                    f"vertex {vid!r} has level {lvl} outside 0..{formal_dim}", vertex=vid
                )
        simplices: set[SimplexKey] = {(v,) for v in levels}
        for raw in maximal:
            key = simplex_key(raw)
            if len(set(key)) != len(key):
                raise errors.ParseError(f"simplex {list(raw)} repeats a vertex")
            for v in key:
                if v not in levels:
                    raise errors.DanglingVertexRef(f"simplex refers to unknown vertex {v!r}", vertex=v)
            if key not in simplices:
                simplices.update(all_faces(key))
        if require_top and not any(lvl == formal_dim for lvl in levels.values()):
            raise errors.EmptyTopLevel(f"no vertex reaches level {formal_dim}")
        if vertex_order is None:
            order = tuple(sorted(levels))
        else:
            order = tuple(vertex_order)
            if sorted(order) != sorted(levels):
                raise errors.ParseError("vertex_order must list every vertex exactly once")
        return cls(name, formal_dim, levels, frozenset(simplices), order)

    # -- basic queries -------------------------------------------------

    def __contains__(self, simplex: object) -> bool:
        return simplex in self.simplices

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return (
            self.formal_dim == other.formal_dim
            and dict(self.levels) == dict(other.levels)
            and self.simplices == other.simplices
        )

    def __hash__(self) -> int:
        return hash((self.formal_dim, self.simplices))

    def __repr__(self) -> str:
        return (
            f"FilteredComplex({self.name!r}, formal_dim={self.formal_dim}, "
            f"vertices={len(self.levels)}, simplices={len(self.simplices)})"
        )

    def level(self, simplex: SimplexKey) -> int:
        return max(self.levels[v] for v in simplex)

    def require(self, simplex: Iterable[str]) -> SimplexKey:
        key = simplex_key(simplex)
        if key not in self.simplices:
            raise errors.UnknownSimplex(f"{list(key)} is not a simplex of {self.name}", simplex=list(key))
        return key

    @cached_property
    def by_dim(self) -> tuple[tuple[SimplexKey, ...], ...]:
        top = max((len(s) for s in self.simplices), default=0)
        buckets: list[list[SimplexKey]] = [[] for _ in range(top)]
        for s in self.simplices:
            buckets[len(s) - 1].append(s)
        return tuple(tuple(sorted(b)) for b in buckets)

    @property
    def dim(self) -> int:
        return len(self.by_dim) - 1

    def simplices_of_dim(self, k: int) -> tuple[SimplexKey, ...]:
        if 0 <= k < len(self.by_dim):
            return self.by_dim[k]
        return ()

    @cached_property
    def maximal_simplices(self) -> tuple[SimplexKey, ...]:
        covered: set[SimplexKey] = set()
        for s in self.simplices:
            covered.update(face for _, face in boundary_faces(s))
        return tuple(sorted(s for s in self.simplices if s not in covered))

    @cached_property
    def strata(self) -> StratumSet:
        return compute_strata(self)

    def stratum_of(self, simplex: SimplexKey) -> str:
        """Id of the stratum containing the open simplex."""
        top = self.level(simplex)
        for v in simplex:
            if self.levels[v] == top:
                return self.strata.vertex_stratum[v]
        raise AssertionError("unreachable")

    def is_regular_simplex(self, simplex: SimplexKey) -> bool:
        return self.level(simplex) == self.formal_dim

    def full_subcomplex(self, vertices: Iterable[str], name: str | None = None) -> FilteredComplex:
        keep = set(vertices)
        missing = keep - set(self.levels)
        if missing:
            raise errors.DanglingVertexRef(f"unknown vertices {sorted(missing)}")
        simplices = frozenset(s for s in self.simplices if keep.issuperset(s))
        return self.subcomplex(simplices, name or f"{self.name}|sub")

    def subcomplex(self, simplices: Iterable[SimplexKey], name: str | None = None) -> FilteredComplex:
        """Subcomplex (closed under faces by the caller) carrying the induced levels."""
        simplices = frozenset(simplices)
        verts = {v for s in simplices for v in s}
        levels = {v: self.levels[v] for v in sorted(verts)}
        order = tuple(v for v in self.vertex_order if v in verts)
        return FilteredComplex(name or f"{self.name}|sub", self.formal_dim, levels, simplices, order)

    def closure(self, simplices: Iterable[SimplexKey]) -> frozenset:
        out: set[SimplexKey] = set()
        for s in simplices:
            out.update(all_faces(self.require(s)))
        return frozenset(out)

    def relevel(self, levels: Mapping[str, int], name: str | None = None) -> FilteredComplex:
        """Same simplices with new vertex levels."""
        new = dict(self.levels)
        new.update(levels)
        return FilteredComplex.from_maximal(
            name or self.name, self.formal_dim, new, self.maximal_simplices, self.vertex_order
        )

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "formal_dim": self.formal_dim,
            "vertices": [{"id": v, "level": self.levels[v]} for v in sorted(self.levels)],
            "simplices": [list(s) for s in self.maximal_simplices],
        }
        if self.vertex_order != tuple(sorted(self.levels)):
            out["vertex_order"] = list(self.vertex_order)
        return out


def build_complex(raw: Mapping) -> FilteredComplex:
    """Validate a parsed complex description and close it under faces."""
    if not isinstance(raw, Mapping):
        raise errors.ParseError("complex description must be a JSON object")
    try:
        n = raw["formal_dim"]
        vertex_list = raw["vertices"]
        maximal = raw["simplices"]
    except KeyError as exc:
        raise errors.ParseError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise errors.ParseError("formal_dim must be a non-negative integer")
    levels: dict[str, int] = {}
    for entry in vertex_list:
        try:
            vid, lvl = entry["id"], entry["level"]
        except (KeyError, TypeError):
            raise errors.ParseError("each vertex needs 'id' and 'level'") from None
        if not isinstance(vid, str) or not isinstance(lvl, int) or isinstance(lvl, bool):
            raise errors.ParseError(f"bad vertex entry {entry!r}")
        if vid in levels:
            raise errors.DuplicateVertex(f"vertex {vid!r} listed twice", vertex=vid)
        levels[vid] = lvl
    if not isinstance(maximal, list) or not all(isinstance(s, list) and s for s in maximal):
        raise errors.ParseError("simplices must be a list of non-empty vertex lists")
    for s in maximal:
        if not all(isinstance(v, str) for v in s):
            raise errors.ParseError("vertex references must be strings")
    return FilteredComplex.from_maximal(
        str(raw.get("name", "unnamed")), n, levels, maximal, raw.get("vertex_order")
    )


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def compute_strata(X: FilteredComplex) -> StratumSet:
    uf = _UnionFind(X.levels)
    for a, b in X.simplices_of_dim(1):
        if X.levels[a] == X.levels[b]:
            uf.union(a, b)

    members: dict[str, list[SimplexKey]] = {}
    for s in X.simplices:
        top = X.level(s)
        anchor = next(v for v in s if X.levels[v] == top)
        members.setdefault(uf.find(anchor), []).append(s)

    by_level: dict[int, list[tuple[SimplexKey, str]]] = {}
    for root, simplices in members.items():
        by_level.setdefault(X.levels[root], []).append((min(simplices), root))

    root_to_id: dict[str, str] = {}
    strata: list[Stratum] = []
    for lvl in sorted(by_level):
        for idx, (_, root) in enumerate(sorted(by_level[lvl])):
            sid = f"S{lvl}.{idx}"
            root_to_id[root] = sid
            verts = tuple(sorted(v for v in X.levels if X.levels[v] == lvl and uf.find(v) == root))
            strata.append(
                Stratum(sid, lvl, X.formal_dim - lvl, lvl == X.formal_dim, verts, frozenset(members[root]))
            )
    vertex_stratum = {v: root_to_id[uf.find(v)] for v in X.levels}

    # S ⪯ S' whenever a simplex of S' has a face in S.  The faces of a
    # simplex meet exactly the strata met by its vertices, so it is enough
    # to pair up the strata seen on each maximal simplex.
    level_of = {s.id: s.level for s in strata}
    direct: dict[str, set[str]] = {s.id: set() for s in strata}
    seen: set[frozenset] = set()
    for s in X.maximal_simplices:
        met = frozenset(vertex_stratum[v] for v in s)
        if met in seen:
            continue
        seen.add(met)
        for a in met:
            for b in met:
                if level_of[a] < level_of[b]:
                    direct[a].add(b)

    above: dict[str, frozenset] = {}
    for sid in direct:
        reach = {sid}
        stack = [sid]
        while stack:
            for nxt in direct[stack.pop()]:
                if nxt not in reach:
                    reach.add(nxt)
                    stack.append(nxt)
        above[sid] = frozenset(reach)

    depth: dict[str, int] = {}
    for st in sorted(strata, key=lambda s: -s.level):
        ups = [u for u in above[st.id] if u != st.id]
        depth[st.id] = 1 + max(depth[u] for u in ups) if ups else 0
    return StratumSet(tuple(strata), above, depth, vertex_stratum)


@dataclass(frozen=True)
class DecompositionView:
    simplex: SimplexKey
    parts: tuple[tuple[str, ...], ...]
    part_dims: tuple

    @property
    def join_dims(self) -> tuple:
        """``dim(Δ_0 ∗ ⋯ ∗ Δ_j)`` for each j."""
        out, count = [], 0
        for part in self.parts:
            count += len(part)
            out.append(join_dim(count))
        return tuple(out)


def decompose(X: FilteredComplex, simplex: Iterable[str]) -> DecompositionView:
    key = X.require(simplex)
    parts = tuple(tuple(v for v in key if X.levels[v] == i) for i in range(X.formal_dim + 1))
    return DecompositionView(key, parts, tuple(join_dim(len(p)) for p in parts))


@dataclass(frozen=True)
class PseudomanifoldReport:
    is_pm: bool
    witnesses: list[dict]


def check_pseudomanifold(X: FilteredComplex) -> PseudomanifoldReport:
    n = X.formal_dim
    witnesses: list[dict] = []
    for s in X.maximal_simplices:
        if len(s) - 1 != n:
            witnesses.append({"condition": "pure", "simplex": list(s)})
    cofaces: dict[SimplexKey, int] = {}
    for s in X.simplices_of_dim(n):
        for _, face in boundary_faces(s):
            cofaces[face] = cofaces.get(face, 0) + 1
    if n >= 1:
        for face in X.simplices_of_dim(n - 1):
            if X.is_regular_simplex(face) and cofaces.get(face, 0) != 2:
                witnesses.append({"condition": "two-sided", "simplex": list(face), "cofaces": cofaces.get(face, 0)})
    return PseudomanifoldReport(not witnesses, witnesses)


def link(X: FilteredComplex, simplex: SimplexKey) -> frozenset:
    """Simplicial link as a set of simplex keys."""
    own = set(simplex)
    out = set()
    for s in X.simplices:
        if own.issubset(s) and len(s) > len(own):
            rest = tuple(v for v in s if v not in own)
            out.add(rest)
    return frozenset(out)


@dataclass(frozen=True)
class NormalReport:
    is_normal: bool
    witnesses: list[list[str]]


def check_normal(X: FilteredComplex) -> NormalReport:
    cofaces: dict[SimplexKey, set[SimplexKey]] = {}
    limit = X.formal_dim - 2
    for s in X.simplices:
        if len(s) <= 1:
            continue
        for size in range(1, min(len(s), limit + 2)):
            for sub in combinations(s, size):
                cofaces.setdefault(sub, set()).add(s)
    witnesses = []
    for k in range(0, limit + 1):
        for s in X.simplices_of_dim(k):
            own = set(s)
            rests = [tuple(v for v in t if v not in own) for t in cofaces.get(s, ())]
            verts = {r[0] for r in rests if len(r) == 1}
            if not verts:
                witnesses.append(list(s))
                continue
            uf = _UnionFind(verts)
            for r in rests:
                if len(r) == 2:
                    uf.union(r[0], r[1])
            if len({uf.find(v) for v in verts}) > 1:
                witnesses.append(list(s))
    return NormalReport(not witnesses, witnesses)


@dataclass(frozen=True)
class StratifiedMapDescriptor:
    source: FilteredComplex
    target: FilteredComplex
    vertex_map: Mapping[str, str]
    stratum_map: Mapping[str, str] = field(default_factory=dict)

    def image(self, simplex: SimplexKey) -> SimplexKey:
        return simplex_key(set(self.vertex_map[v] for v in simplex))


@dataclass(frozen=True)
class MapReport:
    valid: bool
    stratum_map: dict[str, str]
    monotone: bool
    violations: list[dict]


def check_stratified_map(f: StratifiedMapDescriptor, strict: bool = True) -> MapReport:
    """Check simpliciality, stratum compatibility and codimension; report S ↦ S^f.

    With ``strict`` the first violation is raised as its error type.
    """
    src, tgt = f.source, f.target
    violations: list[dict] = []
    missing = sorted(set(src.levels) - set(f.vertex_map))
    if missing:
        violations.append({"kind": "NotSimplicial", "detail": f"vertex map undefined on {missing}"})
    hits: dict[str, set[str]] = {s.id: set() for s in src.strata}
    if not missing:
        for s in sorted(src.simplices):
            img = f.image(s)
            if img not in tgt.simplices:
                violations.append({"kind": "NotSimplicial", "detail": f"{list(s)} -> {list(img)} is not a simplex"})
                continue
            hits[src.stratum_of(s)].add(tgt.stratum_of(img))
    stratum_map: dict[str, str] = {}
    for sid in sorted(hits):
        targets = hits[sid]
        if len(targets) > 1:
            violations.append({"kind": "StratumSplit", "detail": f"{sid} meets {sorted(targets)}"})
        elif targets:
            (tid,) = targets
            stratum_map[sid] = tid
            if tgt.strata[tid].codim > src.strata[sid].codim:
                violations.append(
                    {"kind": "CodimViolation", "detail": f"codim {tid}={tgt.strata[tid].codim} > codim {sid}={src.strata[sid].codim}"}
                )
    for sid, tid in f.stratum_map.items():
        if stratum_map.get(sid, tid) != tid:
            violations.append({"kind": "StratumSplit", "detail": f"declared {sid}->{tid} but simplices land in {stratum_map[sid]}"})
    monotone = all(
        tgt.strata.leq(stratum_map[a], stratum_map[b])
        for a, b in src.strata.order_pairs()
        if a in stratum_map and b in stratum_map
    )
    if strict and violations:
        order = ["NotSimplicial", "StratumSplit", "CodimViolation"]
        first = min(violations, key=lambda v: order.index(v["kind"]))
        raise getattr(errors, first["kind"])(first["detail"])
    return MapReport(not violations, stratum_map, monotone, violations)


def stratified_map(source: FilteredComplex, target: FilteredComplex, vertex_map: Mapping[str, str]) -> StratifiedMapDescriptor:
    """Build a checked stratified map from a vertex map (raises on violations)."""
    f = StratifiedMapDescriptor(source, target, dict(vertex_map))
    report = check_stratified_map(f, strict=True)
    return StratifiedMapDescriptor(source, target, dict(vertex_map), report.stratum_map)


def identity_map(source: FilteredComplex, target: FilteredComplex) -> StratifiedMapDescriptor:
    return stratified_map(source, target, {v: v for v in source.levels})
