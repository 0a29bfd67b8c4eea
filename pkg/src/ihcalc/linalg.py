"""Exact linear algebra over Z, Q and F_p.

Sparse vectors are plain dicts ``{index: coefficient}`` without zero entries.
Matrices are either lists of such column dicts or dense lists of rows.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from . import errors
from .rings import ZZ, Ring

Vector = dict


def add_scaled(y: dict, a, x: Mapping, ring: Ring) -> None:
    """In place ``y += a * x``."""
    p = ring.modulus
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if p:
            nv %= p
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


def scaled(a, x: Mapping, ring: Ring) -> dict:
    out: dict = {}
    add_scaled(out, a, x, ring)
    return out


# -- Smith normal form ----------------------------------------------------


@dataclass
class SNFResult:
    diagonal: list[int]
    left_transform: list[list[int]]
    right_transform: list[list[int]]
    left_inverse: list[list[int]] = field(repr=False, default_factory=list)
    right_inverse: list[list[int]] = field(repr=False, default_factory=list)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SNFResult:
    """Return unimodular ``U, V`` with ``U·A·V`` diagonal, diagonal entries d_1 | d_2 | ⋯.

    Pivots are chosen with minimal absolute value to limit coefficient growth.

    >>> smith_normal_form([[2, 4], [-2, -4]]).diagonal
    [2, 0]
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[int(x) for x in row] for row in A]
    U, Ui, V, Vi = _identity(m), _identity(m), _identity(n), _identity(n)

    def row_add(i: int, t: int, q: int) -> None:  # row_i += q row_t
        if q:
            M[i] = [a + q * b for a, b in zip(M[i], M[t])]
            U[i] = [a + q * b for a, b in zip(U[i], U[t])]
            for r in Ui:
                r[t] -= q * r[i]

    def col_add(j: int, t: int, q: int) -> None:  # col_j += q col_t
        if q:
            for r in M:
                r[j] += q * r[t]
            for r in V:
                r[j] += q * r[t]
            Vi[t] = [a - q * b for a, b in zip(Vi[t], Vi[j])]

    def row_swap(i: int, t: int) -> None:
        if i != t:
            M[i], M[t] = M[t], M[i]
            U[i], U[t] = U[t], U[i]
            for r in Ui:
                r[i], r[t] = r[t], r[i]

    def col_swap(j: int, t: int) -> None:
        if j != t:
            for mat in (M, V):
                for r in mat:
                    r[j], r[t] = r[t], r[j]
            Vi[j], Vi[t] = Vi[t], Vi[j]

    diagonal: list[int] = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = M[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    row_add(i, t, -(M[i][t] // piv))
                    if M[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if M[t][j]:
                    col_add(j, t, -(M[t][j] // piv))
                    if M[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, m):
                    if M[i][t] and (best is None or abs(M[i][t]) < best[0]):
                        best = (abs(M[i][t]), i, "r")
                for j in range(t, n):
                    if M[t][j] and (best is None or abs(M[t][j]) < best[0]):
                        best = (abs(M[t][j]), j, "c")
                if best[2] == "r":
                    row_swap(t, best[1])
                else:
                    col_swap(t, best[1])
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % piv),
                None,
            )
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if M[t][t] < 0:
            M[t] = [-a for a in M[t]]
            U[t] = [-a for a in U[t]]
            for r in Ui:
                r[t] = -r[t]
        diagonal.append(M[t][t])
    diagonal += [0] * (min(m, n) - len(diagonal))
    return SNFResult(diagonal, U, V, Ui, Vi)


def integer_kernel_basis(A: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Basis of ``{x ∈ Z^n : A x = 0}``; the basis spans a saturated lattice.

    >>> integer_kernel_basis([[2]])
    []
    """
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    snf = smith_normal_form(A)
    r = snf.rank
    return [[snf.right_transform[i][j] for i in range(n)] for j in range(r, n)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


# -- sparse column elimination --------------------------------------------


@dataclass
class _Elimination:
    transforms: dict
    pivots: dict
    zero_columns: list
    residual: dict


def _eliminate_columns(columns: Mapping[Hashable, Mapping], order: Sequence[Hashable], ring: Ring) -> _Elimination:
    """Column reduction with unit pivots.

    Each non-pivot column ``c`` ends as ``M·T_c`` where ``T_c`` is ``e_c`` plus a
    combination of pivot columns.  Columns that become zero give kernel
    vectors; columns that stay nonzero without a unit entry are residual.
    """
    cols = {c: dict(columns.get(c, {})) for c in order}
    transforms = {c: {c: 1} for c in order}
    row_index: dict[Hashable, set] = {}
    for c, col in cols.items():
        for r in col:
            row_index.setdefault(r, set()).add(c)
    pivots: dict = {}
    stuck: set = set()
    queue = deque(order)
    while queue:
        c = queue.popleft()
        if c in pivots:
            continue
        col = cols[c]
        if not col:
            stuck.discard(c)
            continue
        best = None
        for r, v in col.items():
            if ring.is_unit(v):
                count = len(row_index[r])
                if best is None or count < best[0]:
                    best = (count, r, v)
        if best is None:
            stuck.add(c)
            continue
        _, r, u = best
        stuck.discard(c)
        pivots[c] = r
        for rr in col:
            row_index[rr].discard(c)
        inv = ring.inv(u)
        for c2 in sorted(row_index[r], key=_sort_key):
            col2 = cols[c2]
            f = ring.norm(-col2[r] * inv)
            before = set(col2)
            add_scaled(col2, f, col, ring)
            after = set(col2)
            for rr in before - after:
                row_index[rr].discard(c2)
            for rr in after - before:
                row_index.setdefault(rr, set()).add(c2)
            add_scaled(transforms[c2], f, transforms[c], ring)
            if c2 in stuck:
                queue.append(c2)
    zero = [c for c in order if c not in pivots and not cols[c]]
    residual = {c: cols[c] for c in order if c not in pivots and cols[c]}
    return _Elimination(transforms, pivots, zero, residual)


def _sort_key(x):
    return (str(type(x)), x)


class KernelBasis:
    """Basis of the kernel of a sparse matrix, with a coordinate map.

    ``ambient`` lists the column keys; ``columns`` holds the nonzero columns.
    Over Z the basis spans the full (hence saturated) kernel lattice.
    """

    def __init__(self, ambient: Sequence[Hashable], columns: Mapping[Hashable, Mapping], ring: Ring):
        self.ring = ring
        constrained = [c for c in ambient if columns.get(c)]
        elim = _eliminate_columns(columns, constrained, ring)
        free = set(elim.zero_columns)
        free.update(c for c in ambient if not columns.get(c))
        self._free_keys = [c for c in ambient if c in free]
        self.vectors: list[dict] = [
            dict(elim.transforms[c]) if c in elim.transforms else {c: 1} for c in self._free_keys
        ]
        self._index = {c: i for i, c in enumerate(self._free_keys)}
        self._residual_keys: list = []
        self._residual_inv: list[list[int]] = []
        self._residual_rank = 0
        if elim.residual:
            if ring.is_field:
                raise AssertionError("field elimination left a residual block")
            keys = list(elim.residual)
            rows = sorted({r for col in elim.residual.values() for r in col}, key=_sort_key)
            dense = [[elim.residual[c].get(r, 0) for c in keys] for r in rows]
            snf = smith_normal_form(dense)
            rank = snf.rank
            self._residual_keys = keys
            self._residual_inv = snf.right_inverse
            self._residual_rank = rank
            for j in range(rank, len(keys)):
                vec: dict = {}
                for i, c in enumerate(keys):
                    coef = snf.right_transform[i][j]
                    if coef:
                        add_scaled(vec, coef, elim.transforms[c], ring)
                self.vectors.append(vec)

    def __len__(self) -> int:
        return len(self.vectors)

    def coordinates(self, v: Mapping) -> dict[int, object]:
        """Coordinates of a kernel element in this basis."""
        out = {self._index[c]: x for c, x in v.items() if c in self._index and x}
        if self._residual_keys:
            w = [v.get(c, 0) for c in self._residual_keys]
            base = len(self._free_keys)
            for j in range(self._residual_rank, len(w)):
                y = sum(a * b for a, b in zip(self._residual_inv[j], w))
                if y:
                    out[base + j - self._residual_rank] = y
        return out


class QuotientMap:
    """Projection ``R^size → R^size / span(generators)`` for a saturated span.

    ``project`` gives quotient coordinates; ``lift(q)`` is a representative.
    """

    def __init__(self, size: int, generators: Sequence[Mapping[int, object]], ring: Ring):
        self.ring = ring
        transposed: dict[int, dict] = {}
        for g, vec in enumerate(generators):
            for i, x in vec.items():
                if x:
                    transposed.setdefault(i, {})[g] = x
        order = list(range(size))
        elim = _eliminate_columns(transposed, [i for i in order if i in transposed], ring)
        free = set(elim.zero_columns) | {i for i in order if i not in transposed}
        self._free = [i for i in order if i in free]
        self._lookup: dict[int, list[tuple[int, object]]] = {}
        for q, i in enumerate(self._free):
            for j, coef in elim.transforms.get(i, {i: 1}).items():
                self._lookup.setdefault(j, []).append((q, coef))
        self._lifts: list[dict] = [{i: 1} for i in self._free]
        self._res_rows: list[int] = []
        if elim.residual:
            if ring.is_field:
                raise AssertionError("field elimination left a residual block")
            rows = list(elim.residual)
            gens = sorted({g for col in elim.residual.values() for g in col})
            dense = [[elim.residual[i].get(g, 0) for g in gens] for i in rows]
            snf = smith_normal_form(dense)
            rank = snf.rank
            if any(d != 1 for d in snf.diagonal[:rank]):
                raise errors.InconsistentComplex("quotient by a non-saturated sublattice")
            self._res_rows = rows
            self._res_U = snf.left_transform[rank:]
            self._res_T = [elim.transforms[i] for i in rows]
            for t in range(rank, len(rows)):
                self._lifts.append({rows[i]: snf.left_inverse[i][t] for i in range(len(rows)) if snf.left_inverse[i][t]})
        self.dim = len(self._lifts)

    def project(self, v: Mapping[int, object]) -> dict[int, object]:
        ring = self.ring
        out: dict[int, object] = {}
        for j, x in v.items():
            for q, coef in self._lookup.get(j, ()):
                add_scaled(out, x, {q: coef}, ring)
        if self._res_rows:
            w = [sum(T.get(j, 0) * x for j, x in v.items()) for T in self._res_T]
            base = len(self._free)
            for t, row in enumerate(self._res_U):
                y = sum(a * b for a, b in zip(row, w))
                if y:
                    out[base + t] = y
        return out

    def lift(self, q: int) -> dict[int, object]:
        return dict(self._lifts[q])


# -- dense linear algebra over a field ------------------------------------


def rref(M: Sequence[Sequence], ring: Ring) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns (fields only)."""
    A = [[ring.norm(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = ring.inv(A[r][c])
        A[r] = [ring.norm(x * inv) for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [ring.norm(a - f * b) for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M: Sequence[Sequence], ring: Ring) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M, ring)[1])


def nullspace(M: Sequence[Sequence], ncols: int, ring: Ring) -> list[list]:
    """Basis (as column vectors) of the right kernel."""
    if not M:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(M, ring)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = ring.norm(-R[i][f])
        basis.append(v)
    return basis


def solve(M: Sequence[Sequence], b: Sequence, ring: Ring) -> list | None:
    """One solution of ``M x = b`` or None (fields only)."""
    rows = len(M)
    ncols = len(M[0]) if rows else 0
    if rows == 0:
        return [] if not any(b) else None
    aug = [list(M[i]) + [b[i]] for i in range(rows)]
    R, pivots = rref(aug, ring)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][ncols]
    return x


def columns_to_dense(columns: Sequence[Mapping[int, object]], nrows: int) -> list[list]:
    return [[col.get(i, 0) for col in columns] for i in range(nrows)]


def dense_to_columns(M: Sequence[Sequence], ncols: int) -> list[dict]:
    return [{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(ncols)]


def transpose(M: Sequence[Sequence], ncols: int) -> list[list]:
    return [[M[i][j] for i in range(len(M))] for j in range(ncols)]


def identity(n: int) -> list[list[int]]:
    return _identity(n)


def zeros(rows: int, cols: int) -> list[list[int]]:
    return [[0] * cols for _ in range(rows)]


def is_zero(M: Iterable[Iterable]) -> bool:
    return all(x == 0 for row in M for x in row)
