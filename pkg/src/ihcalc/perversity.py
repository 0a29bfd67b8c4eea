"""Perversities on the strata of a filtered complex.

A perversity assigns an integer to every stratum and vanishes on regular
strata.  Values are unrestricted integers; nothing is clamped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from . import errors
from .complex_core import FilteredComplex, StratifiedMapDescriptor, check_stratified_map


@dataclass(frozen=True)
class Perversity:
    complex_name: str
    values: Mapping[str, int]
    codims: Mapping[str, int] = field(repr=False)

    def __getitem__(self, sid: str) -> int:
        return self.values[sid]

    def singular_ids(self) -> list[str]:
        return [s for s in self.values if self.codims[s] > 0]

    def top(self, sid: str) -> int:
        c = self.codims[sid]
        return c - 2 if c > 0 else 0

    def dual_value(self, sid: str) -> int:
        return self.top(sid) - self.values[sid]

    def le(self, other: Perversity) -> bool:
        return all(self.values[s] <= other.values[s] for s in self.values)

    def with_values(self, updates: Mapping[str, int]) -> Perversity:
        values = dict(self.values)
        for sid, v in updates.items():
            if sid not in values:
                raise errors.UnknownStratum(f"unknown stratum {sid!r}", stratum=sid)
            if self.codims[sid] == 0 and v != 0:
                raise errors.RegularValueNonZero(f"regular stratum {sid} must carry 0")
            values[sid] = v
        return Perversity(self.complex_name, values, self.codims)

    def shifted(self, delta: int) -> Perversity:
        """Add ``delta`` on every singular stratum."""
        return Perversity(
            self.complex_name,
            {s: v + delta if self.codims[s] else 0 for s, v in self.values.items()},
            self.codims,
        )

    def to_dict(self) -> dict:
        return {"kind": "general", "values": {s: self.values[s] for s in self.singular_ids()}}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Perversity):
            return NotImplemented
        return dict(self.values) == dict(other.values)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.values.items())))


@dataclass(frozen=True)
class ClassicalPerversitySpec:
    by_codim: Mapping[int, int]

    def __call__(self, codim: int) -> int:
        return 0 if codim == 0 else self.by_codim[codim]


PerversityLike = Union[Perversity, ClassicalPerversitySpec]


def make_perversity(X: FilteredComplex, values: Mapping[str, int]) -> Perversity:
    """Perversity on ``X`` from per-stratum values; regular strata may be omitted."""
    strata = X.strata
    for sid, v in values.items():
        if sid not in strata:
            raise errors.UnknownStratum(f"{X.name} has no stratum {sid!r}", stratum=sid)
        if strata[sid].regular and v != 0:
            raise errors.RegularValueNonZero(f"regular stratum {sid} must carry 0, got {v}")
    full = {}
    for s in strata:
        if s.regular:
            full[s.id] = 0
        elif s.id in values:
            full[s.id] = int(values[s.id])
        else:
            raise errors.MissingStratum(f"no value for singular stratum {s.id}", stratum=s.id)
    return Perversity(X.name, full, {s.id: s.codim for s in strata})


def from_classical(spec: ClassicalPerversitySpec, X: FilteredComplex) -> Perversity:
    values = {}
    for s in X.strata.singular():
        if s.codim not in spec.by_codim:
            raise errors.MissingCodim(f"classical perversity has no value for codim {s.codim}", codim=s.codim)
        values[s.id] = spec.by_codim[s.codim]
    return make_perversity(X, values)


def constant_perversity(X: FilteredComplex, value: int) -> Perversity:
    return make_perversity(X, {s.id: value for s in X.strata.singular()})


def zero_perversity(X: FilteredComplex) -> Perversity:
    return constant_perversity(X, 0)


def top_perversity(X: FilteredComplex) -> Perversity:
    return make_perversity(X, {s.id: s.codim - 2 for s in X.strata.singular()})


def dual(p: Perversity) -> Perversity:
    """``Dp̄ = t̄ − p̄``."""
    return Perversity(p.complex_name, {s: p.dual_value(s) for s in p.values}, p.codims)


# -- classification --------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    is_classical: bool
    is_king: bool
    is_gm: bool
    by_codim: dict[int, int] | None = None

    def as_dict(self) -> dict:
        return {"is_classical": self.is_classical, "is_king": self.is_king, "is_gm": self.is_gm}


def _growth_extendable(known: Mapping[int, int]) -> bool:
    """Is there a map on 1..max with p(i) ≤ p(i+1) ≤ p(i)+1 agreeing with ``known``?"""
    points = sorted(known.items())
    for (c0, v0), (c1, v1) in zip(points, points[1:]):
        if not 0 <= v1 - v0 <= c1 - c0:
            return False
    return True


def classify(p: PerversityLike, X: FilteredComplex | None = None) -> Classification:
    """King/GM conditions over codimensions 1..n.

    Unrealized codimensions count as satisfiable if some integer values make
    the growth condition hold; a spec total on 1..n is checked verbatim.
    """
    if isinstance(p, ClassicalPerversitySpec):
        known = {c: v for c, v in p.by_codim.items() if c >= 1}
    else:
        known = {}
        for sid in p.singular_ids():
            c = p.codims[sid]
            if known.setdefault(c, p.values[sid]) != p.values[sid]:
                return Classification(False, False, False)
    if X is not None and isinstance(p, ClassicalPerversitySpec):
        known = {c: v for c, v in known.items() if c <= X.formal_dim}
    king = _growth_extendable(known)
    gm_known = dict(known)
    gm = gm_known.setdefault(1, 0) == 0 and gm_known.setdefault(2, 0) == 0 and _growth_extendable(gm_known)
    return Classification(True, king, gm, dict(sorted(known.items())))


# -- stratum equivalences --------------------------------------------------


@dataclass(frozen=True)
class EquivalenceDeclaration:
    pairs: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, pairs) -> EquivalenceDeclaration:
        return cls(tuple(sorted({tuple(sorted((a, b))) for a, b in pairs})))

    def validate(self, X: FilteredComplex) -> None:
        for a, b in self.pairs:
            for sid in (a, b):
                if sid not in X.strata:
                    raise errors.UnknownStratumInEquiv(f"{X.name} has no stratum {sid!r}", stratum=sid)

    def classes(self, ids) -> dict[str, frozenset]:
        """Transitive closure: stratum id -> its equivalence class."""
        parent = {s: s for s in ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: dict[str, set] = {}
        for s in ids:
            groups.setdefault(find(s), set()).add(s)
        return {s: frozenset(groups[find(s)]) for s in ids}

    def merged(self, other: EquivalenceDeclaration) -> EquivalenceDeclaration:
        return EquivalenceDeclaration.of(self.pairs + other.pairs)

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs]}


# -- transport along maps --------------------------------------------------


def _stratum_map(f: StratifiedMapDescriptor) -> Mapping[str, str]:
    if f.stratum_map and set(f.stratum_map) == set(f.source.strata.ids):
        return f.stratum_map
    return check_stratified_map(f).stratum_map


def pullback(f: StratifiedMapDescriptor, q: Perversity) -> Perversity:
    """``(f*q̄)(S) = q̄(S^f)``."""
    smap = _stratum_map(f)
    src = f.source
    return Perversity(src.name, {s.id: q[smap[s.id]] for s in src.strata}, {s.id: s.codim for s in src.strata})


def sources(coarsening: StratifiedMapDescriptor) -> dict[str, list[str]]:
    """Target stratum -> source strata of equal dimension mapping into it."""
    _require_refinement(coarsening)
    smap = _stratum_map(coarsening)
    out: dict[str, list[str]] = {t.id: [] for t in coarsening.target.strata}
    for s in coarsening.source.strata:
        t = smap[s.id]
        if coarsening.target.strata[t].level == s.level:
            out[t].append(s.id)
    return out


def _require_refinement(f: StratifiedMapDescriptor) -> None:
    same_vertices = all(f.vertex_map.get(v) == v for v in f.source.levels)
    if (
        not same_vertices
        or f.source.simplices != f.target.simplices
        or f.source.formal_dim != f.target.formal_dim
    ):
        raise errors.NotARefinement("a coarsening must be the identity on one underlying complex")
    try:
        check_stratified_map(f)
    except errors.IHError as exc:
        raise errors.NotARefinement(f"identity is not stratified: {exc.message}") from None


def pushforward(coarsening: StratifiedMapDescriptor, p: Perversity) -> Perversity:
    """``ν_*p̄(T)`` = the common value of p̄ on the sources of T."""
    tgt = coarsening.target
    values = {}
    for tid, srcs in sources(coarsening).items():
        if not srcs:
            raise errors.NoSource(f"stratum {tid} has no source", stratum=tid)
        vals = {p[s] for s in srcs}
        if len(vals) > 1:
            raise errors.SourceValueConflict(
                f"sources {srcs} of {tid} carry different values {sorted(vals)}", stratum=tid
            )
        values[tid] = vals.pop()
    return Perversity(tgt.name, values, {s.id: s.codim for s in tgt.strata})


# -- K-perversities -------------------------------------------------------


@dataclass
class ConditionResult:
    passed: bool = True
    witnesses: list = field(default_factory=list)

    def fail(self, witness) -> None:
        self.passed = False
        self.witnesses.append(witness)


@dataclass
class KReport:
    conditions: dict[str, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def failed(self) -> list[str]:
        return [name for name, c in self.conditions.items() if not c.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": {
                k: {"passed": c.passed, "witnesses": c.witnesses} for k, c in self.conditions.items()
            },
        }


def check_K_perversity(
    X: FilteredComplex,
    p: Perversity,
    equiv: EquivalenceDeclaration,
    coarsening: StratifiedMapDescriptor | None = None,
) -> KReport:
    """Check the three compatibility conditions against declared equivalences.

    Sources come from ``coarsening`` when given; otherwise the strata of
    maximal dimension inside each equivalence class play that role.
    """
    equiv.validate(X)
    strata = X.strata
    classes = equiv.classes(strata.ids)
    if coarsening is not None:
        groups = {t: ss for t, ss in sources(coarsening).items() if ss}
    else:
        groups = {}
        for cls in sorted({c for c in classes.values()}, key=min):
            top = max(strata[s].level for s in cls)
            groups[min(cls)] = sorted(s for s in cls if strata[s].level == top)
    source_ids = {s for ss in groups.values() for s in ss}

    same = ConditionResult()
    for key, ss in sorted(groups.items()):
        vals = sorted({p[s] for s in ss})
        if len(vals) > 1:
            same.fail({"sources": ss, "values": vals, "of": key})

    nonneg = ConditionResult()
    for s in strata.singular():
        if any(strata[o].regular for o in classes[s.id]) and p[s.id] < 0:
            nonneg.fail({"stratum": s.id, "value": p[s.id]})

    growth = ConditionResult()
    for src in sorted(source_ids):
        if strata[src].regular:
            continue
        for s in sorted(classes[src]):
            if s == src or not strata.leq(s, src):
                continue
            if not (p[src] <= p[s] and p.dual_value(src) <= p.dual_value(s)):
                growth.fail({"source": src, "stratum": s, "values": [p[src], p[s]]})
    return KReport({"i": same, "ii": nonneg, "iii": growth})


# -- JSON ------------------------------------------------------------------


def perversity_from_dict(X: FilteredComplex, raw: Mapping) -> Perversity:
    """``{"kind": "general", "values": {...}}`` or ``{"kind": "classical", "by_codim": {...}}``."""
    if not isinstance(raw, Mapping):
        raise errors.ParseError("perversity description must be a JSON object")
    kind = raw.get("kind", "general")
    try:
        if kind == "general":
            values = {str(k): _as_int(v) for k, v in dict(raw.get("values", {})).items()}
            return make_perversity(X, values)
        if kind == "classical":
            spec = ClassicalPerversitySpec({int(k): _as_int(v) for k, v in dict(raw["by_codim"]).items()})
            return from_classical(spec, X)
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ParseError(f"malformed perversity: {exc}") from None
    raise errors.ParseError(f"unknown perversity kind {kind!r}")


def classical_spec_from_dict(raw: Mapping) -> ClassicalPerversitySpec | None:
    if isinstance(raw, Mapping) and raw.get("kind") == "classical":
        try:
            return ClassicalPerversitySpec({int(k): _as_int(v) for k, v in dict(raw["by_codim"]).items()})
        except (KeyError, TypeError, ValueError) as exc:
            raise errors.ParseError(f"malformed perversity: {exc}") from None
    return None


def equivalence_from_dict(raw: Mapping) -> EquivalenceDeclaration:
    try:
        pairs = [(str(a), str(b)) for a, b in raw["pairs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ParseError(f"malformed equivalence declaration: {exc}") from None
    return EquivalenceDeclaration.of(pairs)


def _as_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"{v!r} is not an integer")
    return v
