"""Homology of chain complex presentations and exact-sequence checks.

Homology is computed by first cancelling boundary entries that are units
(a standard chain-complex reduction that preserves homology), then running
Smith normal form on whatever is left.  Over a field nothing is left.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import errors
from .chain_builder import ChainComplexPresentation, RelativePresentation, build_presentation
from .complex_core import FilteredComplex, SimplexKey, all_faces
from .linalg import (
    SNFResult,
    add_scaled,
    columns_to_dense,
    integer_kernel_basis,
    mat_mul,
    nullspace,
    rank,
    rref,
    smith_normal_form,
    solve,
    zeros,
)
from .perversity import Perversity
from .rings import Ring

__all__ = [
    "HomologyGroup",
    "SNFResult",
    "smith_normal_form",
    "integer_kernel_basis",
    "homology",
    "check_exactness",
    "FieldHomology",
    "pair_sequence",
    "mayer_vietoris",
    "induced_isomorphism",
]


@dataclass(frozen=True)
class HomologyGroup:
    ring: str
    free_rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def as_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        base = self.ring if self.ring == "Z" else self.ring.replace("F", "F_")
        parts = []
        if self.free_rank:
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts)


def _reduce(dims: list[int], boundary: list[list[dict]], ring: Ring):
    """Cancel unit boundary entries; return surviving cells and boundaries."""
    top = len(dims) - 1
    bd = [[dict(col) for col in boundary[k]] if k else [{} for _ in range(dims[0])] for k in range(top + 1)]
    cob = [[set() for _ in range(dims[k])] for k in range(top + 1)]
    for k in range(1, top + 1):
        for i, col in enumerate(bd[k]):
            for j in col:
                cob[k - 1][j].add(i)
    alive = [set(range(d)) for d in dims]
    changed = True
    while changed:
        changed = False
        for k in range(top, 0, -1):
            for i in sorted(alive[k]):
                if i not in alive[k]:
                    continue
                col = bd[k][i]
                best = None
                for j, v in col.items():
                    if ring.is_unit(v):
                        weight = len(cob[k - 1][j])
                        if best is None or weight < best[0]:
                            best = (weight, j, v)
                if best is None:
                    continue
                _, j, u = best
                inv = ring.inv(u)
                for i2 in sorted(cob[k - 1][j]):
                    if i2 == i:
                        continue
                    col2 = bd[k][i2]
                    f = ring.norm(-col2[j] * inv)
                    before = set(col2)
                    add_scaled(col2, f, col, ring)
                    for jj in before - set(col2):
                        cob[k - 1][jj].discard(i2)
                    for jj in set(col2) - before:
                        cob[k - 1][jj].add(i2)
                for jj in col:
                    cob[k - 1][jj].discard(i)
                bd[k][i] = {}
                if k < top:
                    for r in cob[k][i]:
                        bd[k + 1][r].pop(i, None)
                    cob[k][i] = set()
                if k >= 2:
                    for jj in bd[k - 1][j]:
                        cob[k - 2][jj].discard(j)
                bd[k - 1][j] = {}
                cob[k - 1][j] = set()
                alive[k].discard(i)
                alive[k - 1].discard(j)
                changed = True
    return alive, bd


def _homology_from(dims: list[int], boundary: list[list[dict]], ring: Ring) -> list[HomologyGroup]:
    top = len(dims) - 1
    alive, bd = _reduce(dims, boundary, ring)
    ranks = [0] * (top + 2)
    torsion: list[tuple[int, ...]] = [()] * (top + 2)
    for k in range(1, top + 1):
        cols = sorted(alive[k])
        rows = sorted(alive[k - 1])
        if not any(bd[k][i] for i in cols):
            continue
        if ring.is_field:
            raise AssertionError("reduction over a field left a nonzero boundary")
        pos = {r: idx for idx, r in enumerate(rows)}
        dense = [[0] * len(cols) for _ in rows]
        for c_idx, i in enumerate(cols):
            for j, v in bd[k][i].items():
                dense[pos[j]][c_idx] = v
        diag = [d for d in smith_normal_form(dense).diagonal if d]
        ranks[k] = len(diag)
        torsion[k - 1] = tuple(d for d in diag if d > 1)
    return [
        HomologyGroup(ring.name, len(alive[k]) - ranks[k] - ranks[k + 1], torsion[k])
        for k in range(top + 1)
    ]


def homology(P: ChainComplexPresentation, reduced: bool = False) -> list[HomologyGroup]:
    """Homology groups in degrees ``0..top`` of a presentation."""
    P.check_dd()
    dims = P.dims()
    if not dims:
        return []
    if not reduced or dims[0] == 0:
        return _homology_from(dims, P.boundary, P.ring)
    if isinstance(P, RelativePresentation):
        raise errors.NotAugmentable("reduced homology is only defined for absolute complexes")
    ring = P.ring
    eps = [ring.norm(sum(chain.values())) for chain in P.basis[0]]
    if len(P.basis) > 1:
        for j, col in enumerate(P.boundary[1]):
            if ring.norm(sum(c * eps[i] for i, c in col.items())) != 0:
                raise errors.NotAugmentable(f"augmentation does not vanish on boundaries (degree-1 element {j})")
    augmented = [[{}]] + [[{0: e} if e else {} for e in eps]] + P.boundary[1:]
    groups = _homology_from([1] + dims, augmented, ring)
    return groups[1:]


def homology_of(
    X: FilteredComplex, p: Perversity | None, ring: Ring, variant: str = "intersection", reduced: bool = False
) -> list[HomologyGroup]:
    return homology(build_presentation(X, p, ring, variant), reduced)


def ranks_and_torsion(groups: Sequence[HomologyGroup]) -> list[tuple[int, tuple[int, ...]]]:
    return [(g.free_rank, g.torsion) for g in groups]


def pad(groups: Sequence[HomologyGroup], length: int, ring_name: str | None = None) -> list[HomologyGroup]:
    name = ring_name or (groups[0].ring if groups else "Z")
    return list(groups) + [HomologyGroup(name, 0)] * (length - len(groups))


# -- exactness --------------------------------------------------------------


@dataclass
class ExactnessReport:
    exact: bool
    failures: list[dict] = field(default_factory=list)
    slots: int = 0

    def as_dict(self) -> dict:
        return {"exact": self.exact, "slots": self.slots, "failures": self.failures}


def check_exactness(maps: Sequence[Sequence[Sequence]], dims: Sequence[int], ring: Ring) -> ExactnessReport:
    """Check ``im maps[s-1] = ker maps[s]`` at every interior slot.

    ``maps[i]`` is a dense ``dims[i+1] × dims[i]`` matrix over a field.
    """
    if not ring.is_field:
        raise errors.ShapeMismatch("exactness is only checked over fields")
    if len(maps) != len(dims) - 1:
        raise errors.ShapeMismatch(f"{len(maps)} maps for {len(dims)} modules")
    for i, M in enumerate(maps):
        if len(M) != dims[i + 1] or any(len(row) != dims[i] for row in M):
            raise errors.ShapeMismatch(f"map {i} is not {dims[i + 1]}×{dims[i]}")
    failures = []
    for s in range(1, len(dims) - 1):
        r_in = rank(maps[s - 1], ring)
        ker = dims[s] - rank(maps[s], ring)
        composite = mat_mul(maps[s], maps[s - 1]) if dims[s + 1] and dims[s - 1] else []
        nonzero = any(ring.norm(x) != 0 for row in composite for x in row)
        if nonzero or r_in != ker:
            failures.append({"slot": s, "dim_ker": ker, "rank_im": r_in, "composite_zero": not nonzero})
    return ExactnessReport(not failures, failures, len(dims) - 2)


# -- homology with representatives over a field ------------------------------


@dataclass
class DenseComplex:
    ring: Ring
    dims: list[int]
    d: list[list[list]]  # d[k]: dims[k-1] × dims[k]; d[0] is empty

    @classmethod
    def of(cls, P: ChainComplexPresentation) -> DenseComplex:
        dims = P.dims()
        d = [[]] if dims else []
        d += [columns_to_dense(P.boundary[k], dims[k - 1]) for k in range(1, len(dims))]
        return cls(P.ring, dims, d)

    def apply(self, k: int, v: Sequence) -> list:
        if k == 0 or not self.dims[k - 1]:
            return [0] * (self.dims[k - 1] if k else 0)
        return [self.ring.norm(sum(a * b for a, b in zip(row, v))) for row in self.d[k]]


class FieldHomology:
    """Homology over a field with chosen cycle representatives."""

    def __init__(self, C: DenseComplex):
        self.C = C
        ring = C.ring
        self.reps: list[list[list]] = []
        self._bases: list[list[list]] = []
        for k, n in enumerate(C.dims):
            cycles = nullspace(C.d[k], n, ring) if k and C.dims[k - 1] else [[int(i == j) for i in range(n)] for j in range(n)]
            if k + 1 < len(C.dims) and C.dims[k + 1] and n:
                R, piv = rref(C.d[k + 1], ring)
                bounds = [[C.d[k + 1][i][j] for i in range(n)] for j in piv]
            else:
                bounds = []
            stacked = bounds + cycles
            if stacked and n:
                _, piv = rref([[vec[i] for vec in stacked] for i in range(n)], ring)
            else:
                piv = []
            reps = [stacked[j] for j in piv if j >= len(bounds)]
            self.reps.append(reps)
            self._bases.append(bounds + reps)

    def dim(self, k: int) -> int:
        return len(self.reps[k]) if 0 <= k < len(self.reps) else 0

    def coords(self, k: int, cycle: Sequence) -> list:
        basis = self._bases[k]
        n = self.C.dims[k]
        if not basis:
            return []
        M = [[vec[i] for vec in basis] for i in range(n)]
        x = solve(M, list(cycle), self.C.ring)
        if x is None:
            raise errors.InconsistentComplex("vector is not a cycle")
        return x[len(basis) - len(self.reps[k]):]


def _matrix_of(columns: Sequence[Sequence], rows: int) -> list[list]:
    return [[col[i] for col in columns] for i in range(rows)]


def _les(
    A: DenseComplex,
    B: DenseComplex,
    C: DenseComplex,
    f: list[list[list]],
    g: list[list[list]],
) -> tuple[ExactnessReport, dict]:
    """Long exact sequence of a short exact sequence of complexes, checked slot by slot."""
    ring = A.ring
    HA, HB, HC = FieldHomology(A), FieldHomology(B), FieldHomology(C)
    top = max(len(A.dims), len(B.dims), len(C.dims)) - 1
    maps: list = []
    dims: list[int] = [0]
    first = True

    def push(matrix, target_dim):
        dims.append(target_dim)
        maps.append(matrix)

    for k in range(top, -1, -1):
        a, b, c = HA.dim(k), HB.dim(k), HC.dim(k)
        fk = [HB.coords(k, _apply(f[k], rep, ring)) for rep in HA.reps[k]] if k < len(f) else []
        gk = [HC.coords(k, _apply(g[k], rep, ring)) for rep in HB.reps[k]] if k < len(g) else []
        if first:
            push(zeros(a, 0), a)
            first = False
        push(_matrix_of(fk, b) if a else zeros(b, 0), b)
        push(_matrix_of(gk, c) if b else zeros(c, 0), c)
        a_next = HA.dim(k - 1)
        if k >= 1:
            deltas = []
            for rep in HC.reps[k]:
                lift = solve(g[k], rep, ring)
                if lift is None:
                    raise errors.InconsistentComplex("quotient map is not surjective")
                y = B.apply(k, lift)
                pre = solve(f[k - 1], y, ring) if A.dims[k - 1] else []
                if pre is None:
                    raise errors.InconsistentComplex("boundary of a lift does not come from the subcomplex")
                deltas.append(HA.coords(k - 1, pre))
            push(_matrix_of(deltas, a_next) if c else zeros(a_next, 0), a_next)
        else:
            push(zeros(0, c), 0)
    report = check_exactness(maps, dims, ring)
    summary = {
        "A": [HA.dim(k) for k in range(len(A.dims))],
        "B": [HB.dim(k) for k in range(len(B.dims))],
        "C": [HC.dim(k) for k in range(len(C.dims))],
    }
    return report, summary


def _apply(M: Sequence[Sequence], v: Sequence, ring: Ring) -> list:
    return [ring.norm(sum(a * b for a, b in zip(row, v))) for row in M]


def _inclusion_matrix(src: ChainComplexPresentation, tgt: ChainComplexPresentation, k: int) -> list[list]:
    cols = [tgt.coordinates(k, chain) for chain in src.basis[k]] if k <= src.top_degree else []
    return columns_to_dense(cols, tgt.rank(k)) if cols else zeros(tgt.rank(k), 0)


def pair_sequence(rel: RelativePresentation) -> tuple[ExactnessReport, dict]:
    """Long exact sequence of the pair ``L ⊂ X`` (fields only)."""
    ring = rel.ring
    if not ring.is_field:
        raise errors.ShapeMismatch("exactness is only checked over fields")
    whole, sub = rel.absolute, rel.sub
    A, B, C = DenseComplex.of(sub), DenseComplex.of(whole), DenseComplex.of(rel)
    top = len(B.dims)
    A = _pad_dense(A, top)
    f = [
        columns_to_dense(rel.inclusion[k], whole.rank(k)) if rel.inclusion[k] else zeros(whole.rank(k), 0)
        for k in range(top)
    ]
    g = []
    for k in range(top):
        cols = [rel.project(k, {i: 1}) for i in range(whole.rank(k))]
        g.append(columns_to_dense(cols, rel.rank(k)) if cols else zeros(rel.rank(k), 0))
    return _les(A, B, C, f, g)


def _pad_dense(C: DenseComplex, length: int) -> DenseComplex:
    dims = list(C.dims) + [0] * (length - len(C.dims))
    d = list(C.d)
    for k in range(len(C.dims), length):
        d.append(zeros(dims[k - 1], 0) if k else [])
    assert len(d) == len(dims)
    return DenseComplex(C.ring, dims, d)


def induced_isomorphism(src: ChainComplexPresentation, tgt: ChainComplexPresentation) -> tuple[bool, list[dict]]:
    """Does the chain-level inclusion ``src → tgt`` induce an isomorphism (fields)?"""
    ring = src.ring
    A, B = DenseComplex.of(src), DenseComplex.of(tgt)
    top = max(len(A.dims), len(B.dims))
    A, B = _pad_dense(A, top), _pad_dense(B, top)
    HA, HB = FieldHomology(A), FieldHomology(B)
    detail, ok = [], True
    for k in range(top):
        M = _inclusion_matrix(src, tgt, k) if k <= src.top_degree and k <= tgt.top_degree else zeros(B.dims[k], A.dims[k])
        cols = [HB.coords(k, _apply(M, rep, ring)) for rep in HA.reps[k]]
        r = rank(_matrix_of(cols, HB.dim(k)), ring) if cols and HB.dim(k) else 0
        iso = HA.dim(k) == HB.dim(k) == r
        ok = ok and iso
        detail.append({"degree": k, "source": HA.dim(k), "target": HB.dim(k), "rank": r, "iso": iso})
    return ok, detail


# -- Mayer-Vietoris ---------------------------------------------------------


@dataclass
class MVReport:
    ring: str
    variant: str
    attempts: list[dict]
    stabilized_at: int | None

    @property
    def exact(self) -> bool:
        return all(a["les_exact"] for a in self.attempts)

    def as_dict(self) -> dict:
        return {
            "ring": self.ring,
            "variant": self.variant,
            "stabilized_at": self.stabilized_at,
            "attempts": self.attempts,
        }


def _neighbourhood(K: FilteredComplex, piece: frozenset) -> frozenset:
    verts = {v for s in piece for v in s}
    touching = [s for s in K.maximal_simplices if verts.intersection(s)]
    out = set(piece)
    for s in touching:
        out.update(all_faces(s))
    return frozenset(out)


def mayer_vietoris(
    X: FilteredComplex,
    p: Perversity,
    ring: Ring,
    piece_a: Iterable[SimplexKey],
    piece_b: Iterable[SimplexKey],
    variant: str = "intersection",
    max_subdivisions: int = 2,
) -> MVReport:
    """Mayer-Vietoris for a cover of ``X`` by two subcomplexes.

    At subdivision level ``m ≥ 1`` each piece is replaced by the closed
    simplicial neighbourhood of its subdivision, the simplicial stand-in for
    an open cover.  For each level the sequence built on the sum complex is
    checked for exactness, and the sum is compared with the whole complex.
    """
    from .constructors import build_subdivision, transport_perversity

    if not ring.is_field:
        raise errors.ShapeMismatch("exactness is only checked over fields")
    A0, B0 = X.closure(piece_a), X.closure(piece_b)
    if A0 | B0 != X.simplices:
        raise errors.ShapeMismatch("the two pieces do not cover the complex")
    K, pk, A, B = X, p, A0, B0
    attempts, stabilized = [], None
    for m in range(max_subdivisions + 1):
        if m:
            built = build_subdivision(K)
            carrier = built.carrier
            pk = transport_perversity(built, pk)
            A = _neighbourhood(built.complex, frozenset(s for s in built.complex.simplices if all(carrier[v][1] in A for v in s)))
            B = _neighbourhood(built.complex, frozenset(s for s in built.complex.simplices if all(carrier[v][1] in B for v in s)))
            K = built.complex
        les, iso, detail = _mv_once(K, pk, ring, A, B, variant)
        attempts.append({"subdivisions": m, "les_exact": les.exact, "sum_is_whole": iso, "degrees": detail, "failures": les.failures})
        if iso:
            stabilized = m
            break
    return MVReport(ring.name, variant, attempts, stabilized)


def _mv_once(K: FilteredComplex, p: Perversity, ring: Ring, A: frozenset, B: frozenset, variant: str):
    whole = build_presentation(K, p, ring, variant)
    PA = build_presentation(K, p, ring, variant, A)
    PB = build_presentation(K, p, ring, variant, B)
    PI = build_presentation(K, p, ring, variant, A & B)
    top = whole.top_degree + 1

    sum_basis: list[list[list]] = []
    g: list[list[list]] = []
    for k in range(top):
        gens = [_column(whole, k, c) for c in PA.basis[k]] if k <= PA.top_degree else []
        gens += [_column(whole, k, c) for c in PB.basis[k]] if k <= PB.top_degree else []
        n = whole.rank(k)
        if gens and n:
            _, piv = rref(_matrix_of(gens, n), ring)
        else:
            piv = []
        S = [gens[j] for j in piv]
        sum_basis.append(S)
        g.append([solve(_matrix_of(S, n), col, ring) if S else [] for col in gens])
    sum_dims = [len(S) for S in sum_basis]
    d = [[]]
    for k in range(1, top):
        Sk, Sprev = sum_basis[k], sum_basis[k - 1]
        cols = []
        for col in Sk:
            image = _dense_boundary(whole, k, col, ring)
            x = solve(_matrix_of(Sprev, whole.rank(k - 1)), image, ring) if Sprev else []
            if x is None:
                raise errors.InconsistentComplex("sum complex is not closed under the boundary")
            cols.append(x)
        d.append(_matrix_of(cols, sum_dims[k - 1]) if cols else zeros(sum_dims[k - 1], 0))
    C = DenseComplex(ring, sum_dims, d)

    def dense_of(P):
        return _pad_dense(DenseComplex.of(P), top)

    DA, DB, DI = dense_of(PA), dense_of(PB), dense_of(PI)
    Bsum = DenseComplex(
        ring,
        [DA.dims[k] + DB.dims[k] for k in range(top)],
        [[]] + [_block_diag(DA.d[k], DB.d[k], DA.dims[k - 1], DB.dims[k - 1], DA.dims[k], DB.dims[k]) for k in range(1, top)],
    )
    f = []
    gmat = []
    for k in range(top):
        ia = _inclusion_matrix(PI, PA, k) if k <= PI.top_degree and k <= PA.top_degree else zeros(DA.dims[k], DI.dims[k])
        ib = _inclusion_matrix(PI, PB, k) if k <= PI.top_degree and k <= PB.top_degree else zeros(DB.dims[k], DI.dims[k])
        f.append(ia + [[ring.norm(-x) for x in row] for row in ib])
        gmat.append(_matrix_of(g[k], sum_dims[k]) if g[k] else zeros(sum_dims[k], 0))
    les, _ = _les(DI, Bsum, C, f, gmat)

    HC, HK = FieldHomology(C), FieldHomology(_pad_dense(DenseComplex.of(whole), top))
    iso, detail = True, []
    for k in range(top):
        cols = [HK.coords(k, _expand(sum_basis[k], rep, whole.rank(k), ring)) for rep in HC.reps[k]]
        r = rank(_matrix_of(cols, HK.dim(k)), ring) if cols and HK.dim(k) else 0
        ok = HC.dim(k) == HK.dim(k) == r
        iso = iso and ok
        detail.append({"degree": k, "sum": HC.dim(k), "whole": HK.dim(k), "rank": r})
    return les, iso, detail


def _column(P: ChainComplexPresentation, k: int, chain: Mapping) -> list:
    coords = P.coordinates(k, chain)
    return [coords.get(i, 0) for i in range(P.rank(k))]


def _dense_boundary(P: ChainComplexPresentation, k: int, col: Sequence, ring: Ring) -> list:
    acc: dict = {}
    for i, c in enumerate(col):
        if c:
            add_scaled(acc, c, P.boundary[k][i], ring)
    return [acc.get(i, 0) for i in range(P.rank(k - 1))]


def _expand(basis: Sequence[Sequence], coeffs: Sequence, n: int, ring: Ring) -> list:
    out = [0] * n
    for vec, c in zip(basis, coeffs):
        if c:
            for i in range(n):
                out[i] = ring.norm(out[i] + c * vec[i])
    return out


def _block_diag(P, Q, pr, qr, pc, qc):
    top = [list(P[i]) + [0] * qc for i in range(pr)] if pc else [[0] * qc for _ in range(pr)]
    bottom = [[0] * pc + list(Q[i]) for i in range(qr)] if qc else [[0] * pc for _ in range(qr)]
    return top + bottom
