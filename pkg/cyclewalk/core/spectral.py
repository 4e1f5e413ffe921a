"""
Boundary Matrices, Laplacians and Homology

Sparse boundary operators B_k, the up/down/full combinatorial Laplacians,
symmetric eigen-solvers (dense below DENSE_EIGEN_MAX_DIM, shift-invert
Lanczos above, residual-checked), exact Betti numbers through the Smith
normal form, Hodge decomposition and homology generators.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, lsqr

from ..config import (
    DENSE_EIGEN_MAX_DIM,
    EIGEN_RESIDUAL_TOL,
    HARMONIC_LSQ_MAX_DIM,
    zero_eigenvalue_threshold,
)
from .chains import Chain
from .complex import SimplicialComplex
from .exceptions import ComplexError, SolverError
from .smith import SnfResult, integer_rank, smith_normal_form

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------ operators

def boundary_matrix(complex_: SimplicialComplex, k: int, dtype=np.int64) -> sp.csc_matrix:
    """Matrix of d_k: column tau holds the signed incidences of the faces of tau"""
    n_rows, n_cols = complex_.n_simplices(k - 1), complex_.n_simplices(k)
    if k <= 0 or n_cols == 0 or n_rows == 0:
        return sp.csc_matrix((n_rows, n_cols), dtype=dtype)
    rows, cols, data = [], [], []
    for tau_id in range(n_cols):
        for face_id, sign in complex_.faces(k, tau_id):
            rows.append(face_id)
            cols.append(tau_id)
            data.append(sign)
    return sp.csc_matrix((np.array(data, dtype=dtype), (rows, cols)), shape=(n_rows, n_cols))


def up_laplacian(complex_: SimplicialComplex, k: int, dtype=np.int64) -> sp.csr_matrix:
    """L_k^up = B_{k+1} B_{k+1}^T"""
    b = boundary_matrix(complex_, k + 1, dtype)
    if b.shape[0] == 0:
        return sp.csr_matrix((complex_.n_simplices(k),) * 2, dtype=dtype)
    return (b @ b.T).tocsr()


def down_laplacian(complex_: SimplicialComplex, k: int, dtype=np.int64) -> sp.csr_matrix:
    """L_k^down = B_k^T B_k"""
    b = boundary_matrix(complex_, k, dtype)
    return (b.T @ b).tocsr()


def full_laplacian(complex_: SimplicialComplex, k: int, dtype=np.int64) -> sp.csr_matrix:
    return (up_laplacian(complex_, k, dtype) + down_laplacian(complex_, k, dtype)).tocsr()


def upper_degrees(complex_: SimplicialComplex, k: int) -> np.ndarray:
    """Number of (k+1)-cofaces of every k-simplex"""
    return np.array([len(complex_.cofaces(k, i)) for i in range(complex_.n_simplices(k))], dtype=np.int64)


def _common_face_sign(complex_: SimplicialComplex, k: int, i: int, j: int) -> int:
    """+1 when two lower-adjacent k-simplices induce the same orientation on their common face"""
    faces_i = dict(complex_.faces(k, i))
    for face_id, sign in complex_.faces(k, j):
        if face_id in faces_i:
            return faces_i[face_id] * sign
    raise ComplexError(f"{k}-単体 {i}, {j} は共通の面を持ちません")


def upper_adjacency(complex_: SimplicialComplex, k: int) -> sp.csr_matrix:
    """A_k^up: +-1 for upper-adjacent k-simplices, similarly / dissimilarly oriented"""
    n = complex_.n_simplices(k)
    entries: Dict[Tuple[int, int], int] = {}
    for tau_id in range(complex_.n_simplices(k + 1)):
        members = [face_id for face_id, _ in complex_.faces(k + 1, tau_id)]
        for a in members:
            for b in members:
                if a != b:
                    entries[(a, b)] = 1 if k == 0 else _common_face_sign(complex_, k, a, b)
    return _from_entries(entries, n)


def lower_adjacency(complex_: SimplicialComplex, k: int) -> sp.csr_matrix:
    """A_k^down: +-1 for k-simplices sharing a (k-1)-face"""
    n = complex_.n_simplices(k)
    entries: Dict[Tuple[int, int], int] = {}
    if k >= 1:
        for face_id in range(complex_.n_simplices(k - 1)):
            members = complex_.cofaces(k - 1, face_id)
            for a, sign_a in members:
                for b, sign_b in members:
                    if a != b:
                        entries[(a, b)] = sign_a * sign_b
    return _from_entries(entries, n)


def _from_entries(entries: Dict[Tuple[int, int], int], n: int) -> sp.csr_matrix:
    if not entries:
        return sp.csr_matrix((n, n), dtype=np.int64)
    keys = list(entries)
    rows = [a for a, _ in keys]
    cols = [b for _, b in keys]
    return sp.csr_matrix((np.array([entries[key] for key in keys], dtype=np.int64), (rows, cols)), shape=(n, n))


def adjacency_form(complex_: SimplicialComplex, k: int) -> sp.csr_matrix:
    """(D_k - A_k^up) + ((k+1) Id + A_k^down), assembled from adjacency alone"""
    n = complex_.n_simplices(k)
    degree = sp.diags(upper_degrees(complex_, k), dtype=np.int64, shape=(n, n))
    lower_diag = sp.identity(n, dtype=np.int64, format="csr") * (k + 1 if k >= 1 else 0)
    return (degree - upper_adjacency(complex_, k) + lower_diag + lower_adjacency(complex_, k)).tocsr()


def edge_walk_kernel(complex_: SimplicialComplex) -> sp.csr_matrix:
    """Upper-adjacency edge walk kernel (I - L_1^up) / 5 of the torus triangulation"""
    n = complex_.n_simplices(1)
    return ((sp.identity(n, format="csr") - up_laplacian(complex_, 1, dtype=float)) / 5.0).tocsr()


def to_coordinate_text(op: sp.spmatrix) -> str:
    """One 'row col value' line per stored non-zero"""
    coo = sp.coo_matrix(op)
    order = np.lexsort((coo.col, coo.row))
    lines = []
    for idx in order:
        value = coo.data[idx]
        text = str(int(value)) if float(value).is_integer() else repr(float(value))
        lines.append(f"{coo.row[idx]} {coo.col[idx]} {text}")
    return "\n".join(lines) + ("\n" if lines else "")


# ------------------------------------------------------------------ spectra

@dataclass
class Spectrum:
    """Ascending eigenvalues of a symmetric non-negative operator"""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    method: str = "dense"

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1]) if len(self.eigenvalues) else 0.0

    def zero_threshold(self) -> float:
        return zero_eigenvalue_threshold(self.lambda_max)

    def zero_count(self) -> int:
        return int(np.sum(self.eigenvalues < self.zero_threshold()))

    def positive(self) -> np.ndarray:
        return self.eigenvalues[self.eigenvalues >= self.zero_threshold()]

    def to_dict(self) -> Dict:
        return {"eigenvalues": [float(x) for x in self.eigenvalues], "method": self.method}


def _check_symmetric(op) -> None:
    if op.shape[0] != op.shape[1]:
        raise ValueError(f"正方行列ではありません: {op.shape}")
    difference = op - op.T
    asym = abs(difference).max() if sp.issparse(difference) else np.abs(difference).max(initial=0)
    if asym > 1e-12 * max(1.0, abs(op).max() if op.shape[0] else 1.0):
        raise ValueError(f"非対称な作用素のスペクトルは未対応です（非対称度 {asym:.3e}）")


def _check_residuals(op, values: np.ndarray, vectors: np.ndarray) -> None:
    for idx, value in enumerate(values):
        v = vectors[:, idx]
        residual = float(np.linalg.norm(op @ v - value * v))
        if residual > EIGEN_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(v))):
            raise SolverError(f"固有値 {value:.6g} が収束していません", residual=residual)


def spectrum(op, count: Optional[int] = None, vectors: bool = False) -> Spectrum:
    """
    Ascending eigenvalues (and optionally eigenvectors) of a symmetric operator.

    Dense ``eigh`` up to DENSE_EIGEN_MAX_DIM or when every eigenvalue is
    requested; otherwise the ``count`` smallest by shift-invert Lanczos with a
    residual check on each returned pair.
    """
    _check_symmetric(op)
    n = op.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0)) if vectors else None)

    if count is None or n <= DENSE_EIGEN_MAX_DIM or count >= n - 1:
        if count is None and n > DENSE_EIGEN_MAX_DIM:
            logger.warning(f"⚠️ 全固有値の要求のため {n} 次元で密行列解法を使用します")
        dense = op.toarray().astype(float) if sp.issparse(op) else np.asarray(op, dtype=float)
        values, vecs = np.linalg.eigh(dense)
        if count is not None:
            values, vecs = values[:count], vecs[:, :count]
        return Spectrum(values, vecs if vectors else None, method="dense")

    matrix = sp.csc_matrix(op, dtype=float)
    try:
        values, vecs = eigsh(matrix, k=count, sigma=-1e-3, which="LM", tol=1e-12)
    except Exception as e:
        logger.warning(f"⚠️ shift-invert が失敗したため SA に切り替えます: {e}")
        try:
            values, vecs = eigsh(matrix, k=count, which="SA", tol=1e-12, maxiter=n * 100)
        except Exception as e2:
            raise SolverError(f"固有値計算エラー: {e2}")
    order = np.argsort(values)
    values, vecs = values[order], vecs[:, order]
    _check_residuals(matrix, values, vecs)
    return Spectrum(values, vecs if vectors else None, method="lanczos")


def smallest_positive_eigenvalue(op, kernel_dim: Optional[int] = None) -> float:
    """
    Smallest non-zero eigenvalue of a non-negative symmetric operator.

    ``kernel_dim`` (known exactly, e.g. from the Smith normal form) deflates
    the kernel on the iterative path: the (kernel_dim + 1)-th eigenvalue is returned.
    """
    n = op.shape[0]
    if n <= DENSE_EIGEN_MAX_DIM or kernel_dim is None:
        values = spectrum(op).eigenvalues
        positive = values[values >= zero_eigenvalue_threshold(values[-1] if len(values) else 0.0)]
        if not len(positive):
            raise ComplexError("正の固有値がありません（作用素がゼロです）")
        return float(positive[0])
    values = spectrum(op, count=kernel_dim + 1).eigenvalues
    return float(values[kernel_dim])


def zobel_check(complex_: SimplicialComplex, k: int) -> Dict[str, float]:
    """
    Eigenvector transfer between L_{k-1}^up and L_k^down.

    For every eigenpair (lambda > 0, f) of L_{k-1}^up, g = B_k^T f is a
    lambda-eigenvector of L_k^down, and conversely with f = B_k g. Reports the
    worst relative residual of both directions and the gap between the two
    non-zero spectra.
    """
    b = boundary_matrix(complex_, k, dtype=float)
    up = (b @ b.T).tocsr()
    down = (b.T @ b).tocsr()
    spec_up = spectrum(up, vectors=True)
    spec_down = spectrum(down, vectors=True)

    def worst(eig: Spectrum, transfer, target) -> float:
        residual = 0.0
        threshold = eig.zero_threshold()
        for idx, value in enumerate(eig.eigenvalues):
            if value < threshold:
                continue
            image = transfer @ eig.eigenvectors[:, idx]
            norm = float(np.linalg.norm(image))
            residual = max(residual, float(np.linalg.norm(target @ image - value * image)) / norm)
        return residual

    pos_up, pos_down = spec_up.positive(), spec_down.positive()
    if len(pos_up) != len(pos_down):
        gap = float("inf")
    elif len(pos_up):
        gap = float(np.max(np.abs(pos_up - pos_down) / np.maximum(1.0, np.abs(pos_up))))
    else:
        gap = 0.0
    return {
        "forward_residual": worst(spec_up, b.T, down),
        "backward_residual": worst(spec_down, b, up),
        "spectral_gap": gap,
        "n_positive": int(len(pos_up)),
    }


# ------------------------------------------------------------------ homology

def boundary_snf(complex_: SimplicialComplex, k: int) -> SnfResult:
    """Smith normal form of B_k with transforms, computed once per complex"""
    key = ("boundary_snf", k)
    if key not in complex_.derived:
        complex_.derived[key] = smith_normal_form(boundary_matrix(complex_, k))
    return complex_.derived[key]


def betti(complex_: SimplicialComplex, k: int, method: str = "exact") -> int:
    """
    k-th Betti number.

    exact: dim ker d_k - rank d_{k+1} from exact integer ranks;
    spectral: multiplicity of the zero eigenvalue of L_k.
    """
    n_k = complex_.n_simplices(k)
    if n_k == 0:
        return 0
    if method == "exact":
        rank_k = integer_rank(boundary_matrix(complex_, k)) if k >= 1 else 0
        rank_k1 = integer_rank(boundary_matrix(complex_, k + 1)) if complex_.n_simplices(k + 1) else 0
        return n_k - rank_k - rank_k1
    if method == "spectral":
        return spectrum(full_laplacian(complex_, k)).zero_count()
    raise ValueError(f"method は exact / spectral のいずれかです: {method}")


def betti_numbers(complex_: SimplicialComplex, method: str = "exact") -> List[int]:
    return [betti(complex_, k, method) for k in range(complex_.max_dim + 1)]


def is_boundary(complex_: SimplicialComplex, sigma: Chain) -> bool:
    """Exact test sigma ∈ im d_{k+1} for an integer chain"""
    if sigma.is_zero():
        return True
    if not sigma.is_integer():
        raise ComplexError("境界判定には整数係数のチェインが必要です")
    if complex_.n_simplices(sigma.dim + 1) == 0:
        return False
    return boundary_snf(complex_, sigma.dim + 1).in_image(dict(sigma.items()))


def same_homology_class(complex_: SimplicialComplex, a: Chain, b: Chain) -> bool:
    return is_boundary(complex_, a - b)


class _RationalEchelon:
    """Incremental row echelon basis over Q keyed by each vector's largest index"""

    def __init__(self):
        self.basis: Dict[int, Dict[int, Fraction]] = {}

    def reduce(self, vector: Dict[int, Fraction]) -> Dict[int, Fraction]:
        vector = dict(vector)
        while vector:
            lead = max(vector)
            row = self.basis.get(lead)
            if row is None:
                break
            factor = vector[lead]
            for key, value in row.items():
                new = vector.get(key, 0) - factor * value
                if new:
                    vector[key] = new
                else:
                    vector.pop(key, None)
        return vector

    def add(self, vector: Dict[int, Fraction]) -> bool:
        """Insert if independent; return True when the span grew"""
        remainder = self.reduce(vector)
        if not remainder:
            return False
        lead = max(remainder)
        pivot = remainder[lead]
        self.basis[lead] = {key: value / pivot for key, value in remainder.items()}
        return True


def homology_generators(complex_: SimplicialComplex, k: int = 1) -> List[Chain]:
    """
    Integer k-cycles whose classes form a basis of H_k (rational coefficients).

    Cycles come from the Smith kernel basis of B_k; each is kept when it is
    independent of im d_{k+1} and of the cycles already kept (exact echelon
    reduction over Q).
    """
    n_k = complex_.n_simplices(k)
    if n_k == 0:
        return []
    if k >= 1:
        cycles = boundary_snf(complex_, k).kernel_basis()
    else:
        cycles = [{v: 1} for v in range(n_k)]

    echelon = _RationalEchelon()
    if complex_.n_simplices(k + 1):
        b_next = boundary_matrix(complex_, k + 1).tocsc()
        for col in range(b_next.shape[1]):
            start, end = b_next.indptr[col], b_next.indptr[col + 1]
            echelon.add({int(r): Fraction(int(v)) for r, v in zip(b_next.indices[start:end], b_next.data[start:end])})

    generators = []
    for cycle in cycles:
        if echelon.add({key: Fraction(value) for key, value in cycle.items()}):
            generators.append(Chain(k, cycle))
    logger.info(f"🕳️ H_{k} の生成元を {len(generators)} 個抽出しました")
    return generators


def project_onto_image(b: sp.spmatrix, y: np.ndarray) -> np.ndarray:
    """Orthogonal projection of y onto the column space of b"""
    if b.shape[1] == 0 or b.shape[0] == 0 or not np.any(y):
        return np.zeros_like(y)
    if b.shape[1] <= HARMONIC_LSQ_MAX_DIM:
        x, *_ = np.linalg.lstsq(b.toarray(), y, rcond=None)
    else:
        x = lsqr(b, y, atol=1e-14, btol=1e-14, iter_lim=20 * b.shape[1])[0]
    return b @ x


def hodge_decomposition(complex_: SimplicialComplex, sigma: Chain) -> Tuple[Chain, Chain, Chain]:
    """(exact part in im d_{k+1}, co-exact part in im d_k^*, harmonic part in ker L_k)"""
    k = sigma.dim
    n_k = complex_.n_simplices(k)
    y = sigma.to_dense(n_k)
    exact = project_onto_image(boundary_matrix(complex_, k + 1, dtype=float), y)
    coexact = project_onto_image(boundary_matrix(complex_, k, dtype=float).T.tocsc(), y)
    harmonic = y - exact - coexact
    tol = 1e-12 * (1.0 + float(np.linalg.norm(y)))
    return (
        Chain.from_dense(k, exact, tol),
        Chain.from_dense(k, coexact, tol),
        Chain.from_dense(k, harmonic, tol),
    )


def harmonic_projection(complex_: SimplicialComplex, sigma: Chain) -> Chain:
    """Orthogonal projection of sigma onto ker L_k"""
    return hodge_decomposition(complex_, sigma)[2]
