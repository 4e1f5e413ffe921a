"""
Smith Normal Form over the Integers

Exact sparse Smith normal form with arbitrary-precision Python integers.
Boundary matrices are never converted to floating point here: invariant
factors, ranks, kernel bases and image-membership answers are exact.

The matrix is held as a list of row dictionaries plus a column index.
Pivots are chosen Markowitz-style (unit pivots with the fewest fill-ins
first, else the smallest magnitude); non-unit pivots are reduced by
division with remainder until row and column are clear. A final pass
enforces d_i | d_{i+1} with 2x2 unimodular blocks built from the extended gcd.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..config import SNF_OPERATION_BUDGET
from .exceptions import ResourceLimitError

logger = logging.getLogger(__name__)

SparseVector = Dict[int, int]


def exgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0"""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _combine(u: SparseVector, cu: int, v: SparseVector, cv: int) -> SparseVector:
    """cu*u + cv*v without stored zeros"""
    out: SparseVector = {}
    if cu:
        for key, value in u.items():
            out[key] = cu * value
    if cv:
        for key, value in v.items():
            new = out.get(key, 0) + cv * value
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out


@dataclass
class SnfResult:
    """
    U·M·V = diag(d_1, ..., d_r, 0, ...) with d_i | d_{i+1}.

    ``row_transform`` holds the rows of U (sparse dicts, m rows) and
    ``col_transform`` the columns of V (sparse dicts, n columns); either is
    None when it was not requested.
    """

    shape: Tuple[int, int]
    diagonal: List[int]
    rank: int
    row_transform: Optional[List[SparseVector]] = None
    col_transform: Optional[List[SparseVector]] = None

    @property
    def invariant_factors(self) -> List[int]:
        return self.diagonal[: self.rank]

    @property
    def torsion(self) -> List[int]:
        return [d for d in self.invariant_factors if d > 1]

    @property
    def nullity(self) -> int:
        return self.shape[1] - self.rank

    def kernel_basis(self) -> List[SparseVector]:
        """Integer basis of ker M: the columns of V past the rank"""
        if self.col_transform is None:
            raise ValueError("列変換 V が計算されていません（transforms=True で再計算してください）")
        return [dict(col) for col in self.col_transform[self.rank:]]

    def transform(self, y: Mapping[int, int]) -> List[int]:
        """U·y as a dense list of Python ints"""
        if self.row_transform is None:
            raise ValueError("行変換 U が計算されていません（transforms=True で再計算してください）")
        return [sum(coeff * y.get(c, 0) for c, coeff in row.items()) for row in self.row_transform]

    def in_image(self, y: Mapping[int, int]) -> bool:
        """Exact test y ∈ M·Z^n"""
        return self.preimage(y) is not None

    def preimage(self, y: Mapping[int, int]) -> Optional[SparseVector]:
        """Integer x with M·x = y, or None when y is not in the image"""
        y_prime = self.transform(y)
        for t, value in enumerate(y_prime):
            if t < self.rank:
                if value % self.diagonal[t]:
                    return None
            elif value:
                return None
        if self.col_transform is None:
            raise ValueError("列変換 V が計算されていません（transforms=True で再計算してください）")
        x: SparseVector = {}
        for t in range(self.rank):
            z = y_prime[t] // self.diagonal[t]
            if z:
                x = _combine(x, 1, self.col_transform[t], z)
        return x


def _to_rows(matrix) -> Tuple[List[SparseVector], int, int]:
    if sp.issparse(matrix):
        coo = sp.coo_matrix(matrix)
        m, n = coo.shape
        rows: List[SparseVector] = [dict() for _ in range(m)]
        for r, c, v in zip(coo.row, coo.col, coo.data):
            value = int(v)
            if value != v:
                raise ValueError(f"整数でない成分があります: ({r}, {c}) = {v}")
            if value:
                rows[int(r)][int(c)] = rows[int(r)].get(int(c), 0) + value
        return rows, m, n
    dense = np.asarray(matrix, dtype=object)
    if dense.ndim != 2:
        raise ValueError("2次元の行列が必要です")
    m, n = dense.shape
    rows = []
    for r in range(m):
        row = {}
        for c in range(n):
            value = int(dense[r, c])
            if value != dense[r, c]:
                raise ValueError(f"整数でない成分があります: ({r}, {c}) = {dense[r, c]}")
            if value:
                row[c] = value
        rows.append(row)
    return rows, m, n


class _Reducer:
    """Sparse integer elimination state"""

    def __init__(self, rows: List[SparseVector], n: int, transforms: bool, budget: int):
        self.rows = rows
        self.m = len(rows)
        self.n = n
        self.cols: List[set] = [set() for _ in range(n)]
        for r, row in enumerate(rows):
            for c in row:
                self.cols[c].add(r)
        self.U = [{i: 1} for i in range(self.m)] if transforms else None
        self.V = [{j: 1} for j in range(n)] if transforms else None
        self.budget = budget
        self.operations = 0

    def _charge(self, amount: int):
        self.operations += amount
        if self.operations > self.budget:
            raise ResourceLimitError(
                f"Smith標準形の演算回数が上限 {self.budget:,} を超えました（行列 {self.m}x{self.n}）"
            )

    def add_row(self, target: int, source: int, factor: int):
        """row_target += factor * row_source"""
        row_t = self.rows[target]
        for c, value in self.rows[source].items():
            new = row_t.get(c, 0) + factor * value
            if new:
                if c not in row_t:
                    self.cols[c].add(target)
                row_t[c] = new
            else:
                del row_t[c]
                self.cols[c].discard(target)
        if self.U is not None:
            self.U[target] = _combine(self.U[target], 1, self.U[source], factor)
        self._charge(len(self.rows[source]) + 1)

    def add_col(self, target: int, source: int, factor: int):
        """col_target += factor * col_source"""
        for r in list(self.cols[source]):
            row = self.rows[r]
            new = row.get(target, 0) + factor * row[source]
            if new:
                if target not in row:
                    self.cols[target].add(r)
                row[target] = new
            else:
                row.pop(target, None)
                self.cols[target].discard(r)
        if self.V is not None:
            self.V[target] = _combine(self.V[target], 1, self.V[source], factor)
        self._charge(len(self.cols[source]) + 1)

    def choose_pivot(self, row_done: List[bool]) -> Optional[Tuple[int, int]]:
        best = None
        best_key = None
        for r in range(self.m):
            row = self.rows[r]
            if row_done[r] or not row:
                continue
            row_fill = len(row) - 1
            for c, value in row.items():
                magnitude = abs(value)
                key = (magnitude != 1, magnitude, row_fill * (len(self.cols[c]) - 1), r, c)
                if best_key is None or key < best_key:
                    best, best_key = (r, c), key
                    if key[:3] == (False, 1, 0):
                        return best
        return best

    def eliminate(self, p: int, q: int) -> Tuple[int, int, int]:
        """Clear row and column of the pivot; return the final (row, col, value)"""
        while True:
            a = self.rows[p][q]
            for r in sorted(self.cols[q] - {p}):
                factor = self.rows[r][q] // a
                if factor:
                    self.add_row(r, p, -factor)
            rest = self.cols[q] - {p}
            if rest:
                p = min(rest, key=lambda r: (abs(self.rows[r][q]), r))
                continue
            for c in sorted(set(self.rows[p]) - {q}):
                factor = self.rows[p][c] // a
                if factor:
                    self.add_col(c, q, -factor)
            rest = set(self.rows[p]) - {q}
            if rest:
                q = min(rest, key=lambda c: (abs(self.rows[p][c]), c))
                continue
            return p, q, self.rows[p][q]


def smith_normal_form(matrix, transforms: bool = True, budget: int = SNF_OPERATION_BUDGET) -> SnfResult:
    """
    Exact Smith normal form of an integer matrix.

    Args:
        matrix: scipy sparse matrix, numpy array or nested lists with integer entries.
        transforms: also accumulate the unimodular transforms U and V.
        budget: maximum number of elementary operations before ResourceLimitError.
    """
    rows, m, n = _to_rows(matrix)
    reducer = _Reducer(rows, n, transforms, budget)
    row_done = [False] * m
    col_done = [False] * n
    pivots: List[List[int]] = []

    while True:
        pivot = reducer.choose_pivot(row_done)
        if pivot is None:
            break
        p, q, value = reducer.eliminate(*pivot)
        row_done[p] = True
        col_done[q] = True
        pivots.append([p, q, value])

    U, V = reducer.U, reducer.V

    # Positive diagonal
    for pivot in pivots:
        if pivot[2] < 0:
            pivot[2] = -pivot[2]
            if U is not None:
                U[pivot[0]] = {c: -v for c, v in U[pivot[0]].items()}

    # Divisibility chain d_i | d_{i+1}
    pivots.sort(key=lambda item: item[2])
    for i in range(len(pivots)):
        for j in range(i + 1, len(pivots)):
            a, b = pivots[i][2], pivots[j][2]
            if b % a == 0:
                continue
            g, x, y = exgcd(a, b)
            pi, qi = pivots[i][0], pivots[i][1]
            pj, qj = pivots[j][0], pivots[j][1]
            if U is not None:
                U[pi], U[pj] = _combine(U[pi], x, U[pj], y), _combine(U[pi], -b // g, U[pj], a // g)
            if V is not None:
                V[qi], V[qj] = _combine(V[qi], 1, V[qj], 1), _combine(V[qi], -y * b // g, V[qj], x * a // g)
            pivots[i][2], pivots[j][2] = g, a * b // g

    rank = len(pivots)
    row_order = [p for p, _, _ in pivots] + [r for r in range(m) if not row_done[r]]
    col_order = [q for _, q, _ in pivots] + [c for c in range(n) if not col_done[c]]
    diagonal = [d for _, _, d in pivots] + [0] * (min(m, n) - rank)

    result = SnfResult(
        shape=(m, n),
        diagonal=diagonal,
        rank=rank,
        row_transform=[U[r] for r in row_order] if U is not None else None,
        col_transform=[V[c] for c in col_order] if V is not None else None,
    )
    logger.debug(f"SNF: shape={m}x{n}, rank={rank}, torsion={result.torsion}, ops={reducer.operations:,}")
    return result


def integer_rank(matrix) -> int:
    """Rank over Q of an integer matrix, computed exactly"""
    return smith_normal_form(matrix, transforms=False).rank
