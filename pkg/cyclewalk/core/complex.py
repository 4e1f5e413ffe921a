"""
Simplicial Complex Construction

Abstract simplicial complexes with face/coface incidence, Rips and Čech
complexes of point clouds (Euclidean or flat-torus metric) and the regular
triangulation of the flat torus [0,2] x [0,sqrt(3)].

Orientation convention: a k-simplex is stored as the strictly increasing
tuple of its vertex ids; that tuple is the positively oriented representative.
The i-th face of (v_0, ..., v_k) drops v_i and carries incidence sign (-1)^i.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..config import DEFAULT_MAX_DIM, METRICS, SUPPORTED_POINT_DIMS, TORUS_PERIODS
from .exceptions import ComplexError

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]
Incidence = Tuple[int, int]  # (simplex id, sign)

# Relative band around R inside which the Čech test switches to exact arithmetic
_CECH_FLOAT_BAND = 1e-9


def canonical_orientation(vertices: Sequence[int]) -> Tuple[Simplex, int]:
    """Return (increasing vertex tuple, sign of the sorting permutation)"""
    verts = [int(v) for v in vertices]
    if len(set(verts)) != len(verts):
        raise ComplexError(f"単体に重複した頂点があります: {tuple(verts)}")
    inversions = sum(
        1 for i in range(len(verts)) for j in range(i + 1, len(verts)) if verts[i] > verts[j]
    )
    return tuple(sorted(verts)), (-1 if inversions % 2 else 1)


def periodic_displacement(delta: np.ndarray, periods: Sequence[float] = TORUS_PERIODS) -> np.ndarray:
    """Minimum-image representative of a displacement on the flat torus"""
    delta = np.asarray(delta, dtype=float)
    periods = np.asarray(periods, dtype=float)
    return delta - periods * np.round(delta / periods)


class SimplicialComplex:
    """
    Finite abstract simplicial complex.

    ``levels[k]`` lists the k-simplices; the position of a simplex in the
    lexicographically sorted list is its id. Vertex ids must be dense
    0..|V|-1. With ``strict=False`` missing faces are tolerated and recorded
    with face id -1 so that :func:`validate_closure` can report them.
    """

    def __init__(
        self,
        levels: Sequence[Iterable[Sequence[int]]],
        coordinates: Optional[np.ndarray] = None,
        metric: str = "euclidean",
        strict: bool = True,
    ):
        if metric not in METRICS:
            raise ComplexError(f"未対応の距離です: {metric}")

        simplices: List[Tuple[Simplex, ...]] = []
        for k, group in enumerate(levels):
            canon = set()
            for raw in group:
                simplex, _ = canonical_orientation(raw)
                if len(simplex) != k + 1:
                    raise ComplexError(f"{k}-単体の頂点数が不正です: {simplex}")
                canon.add(simplex)
            simplices.append(tuple(sorted(canon)))
        while len(simplices) > 1 and not simplices[-1]:
            simplices.pop()
        if not simplices:
            simplices = [()]

        n_vertices = len(simplices[0])
        if simplices[0] != tuple((v,) for v in range(n_vertices)):
            raise ComplexError("頂点IDは 0..|V|-1 の連番である必要があります")

        self._simplices = simplices
        self._index: List[Dict[Simplex, int]] = [
            {s: i for i, s in enumerate(level)} for level in simplices
        ]
        self._faces: List[List[Tuple[Incidence, ...]]] = [[() for _ in simplices[0]]]
        self._cofaces: List[List[List[Incidence]]] = [[[] for _ in level] for level in simplices]
        # lazily computed invariants (Smith forms), keyed by the caller
        self.derived: Dict[Tuple, object] = {}

        for k in range(1, len(simplices)):
            lower = self._index[k - 1]
            faces_k = []
            for tau_id, simplex in enumerate(simplices[k]):
                incidences = []
                for i in range(k + 1):
                    face = simplex[:i] + simplex[i + 1:]
                    sign = -1 if i % 2 else 1
                    face_id = lower.get(face, -1)
                    if face_id < 0:
                        if strict:
                            raise ComplexError(f"面 {face} が複体に含まれていません（{simplex} の面）")
                    else:
                        self._cofaces[k - 1][face_id].append((tau_id, sign))
                    incidences.append((face_id, sign))
                faces_k.append(tuple(incidences))
            self._faces.append(faces_k)

        if coordinates is not None:
            coordinates = np.asarray(coordinates, dtype=float)
            if coordinates.ndim != 2 or coordinates.shape[0] != n_vertices:
                raise ComplexError(
                    f"座標の形状が頂点数と一致しません: {coordinates.shape} vs {n_vertices}"
                )
        self._coordinates = coordinates
        self._metric = metric

    @classmethod
    def from_simplices(
        cls,
        simplices: Iterable[Sequence[int]],
        n_vertices: Optional[int] = None,
        coordinates: Optional[np.ndarray] = None,
        metric: str = "euclidean",
    ) -> "SimplicialComplex":
        """Build the smallest complex containing the given simplices (closure under faces)"""
        levels: Dict[int, set] = {}
        max_vertex = -1
        for raw in simplices:
            simplex, _ = canonical_orientation(raw)
            max_vertex = max(max_vertex, simplex[-1])
            for size in range(1, len(simplex) + 1):
                levels.setdefault(size - 1, set()).update(combinations(simplex, size))
        if n_vertices is None:
            n_vertices = max_vertex + 1 if coordinates is None else len(coordinates)
        if max_vertex >= n_vertices:
            raise ComplexError(f"頂点ID {max_vertex} が頂点数 {n_vertices} を超えています")
        levels[0] = {(v,) for v in range(n_vertices)}
        top = max(levels)
        return cls([levels.get(k, set()) for k in range(top + 1)], coordinates=coordinates, metric=metric)

    # ------------------------------------------------------------------ access

    @property
    def max_dim(self) -> int:
        return len(self._simplices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self._simplices[0])

    @property
    def coordinates(self) -> Optional[np.ndarray]:
        return self._coordinates

    @property
    def metric(self) -> str:
        return self._metric

    def n_simplices(self, k: int) -> int:
        if k < 0 or k > self.max_dim:
            return 0
        return len(self._simplices[k])

    def simplices(self, k: int) -> Tuple[Simplex, ...]:
        if k < 0 or k > self.max_dim:
            return ()
        return self._simplices[k]

    def simplex(self, k: int, simplex_id: int) -> Simplex:
        return self._simplices[k][simplex_id]

    def index(self, vertices: Sequence[int]) -> Tuple[int, int, int]:
        """Return (dim, id, orientation sign) of an oriented vertex sequence"""
        simplex, sign = canonical_orientation(vertices)
        k = len(simplex) - 1
        if k > self.max_dim or simplex not in self._index[k]:
            raise ComplexError(f"単体 {tuple(vertices)} は複体に含まれていません")
        return k, self._index[k][simplex], sign

    def contains(self, vertices: Sequence[int]) -> bool:
        simplex = tuple(sorted(int(v) for v in vertices))
        k = len(simplex) - 1
        return 0 <= k <= self.max_dim and simplex in self._index[k]

    def faces(self, k: int, simplex_id: int) -> Tuple[Incidence, ...]:
        """(face id, incidence sign) pairs of a k-simplex, in vertex-drop order"""
        if k <= 0:
            return ()
        return self._faces[k][simplex_id]

    def cofaces(self, k: int, simplex_id: int) -> Tuple[Incidence, ...]:
        """(coface id, incidence sign) pairs of a k-simplex"""
        if k < 0 or k >= self.max_dim:
            return ()
        return tuple(self._cofaces[k][simplex_id])

    def f_vector(self) -> List[int]:
        return [len(level) for level in self._simplices]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * count for k, count in enumerate(self.f_vector()))

    def summary(self) -> Dict:
        return {
            "n_vertices": self.n_vertices,
            "max_dim": self.max_dim,
            "f_vector": self.f_vector(),
            "euler_characteristic": self.euler_characteristic(),
            "metric": self._metric,
        }

    def without(self, k: int, simplex_ids: Iterable[int]) -> "SimplicialComplex":
        """Copy of the complex with the given top-level k-simplices removed"""
        drop = set(simplex_ids)
        for simplex_id in drop:
            if self.cofaces(k, simplex_id):
                raise ComplexError(f"{k}-単体 {self.simplex(k, simplex_id)} は余面を持つため削除できません")
        levels = [list(level) for level in self._simplices]
        levels[k] = [s for i, s in enumerate(levels[k]) if i not in drop]
        return SimplicialComplex(levels, coordinates=self._coordinates, metric=self._metric)

    def __repr__(self) -> str:
        return f"SimplicialComplex(f_vector={self.f_vector()}, metric={self._metric!r})"


def validate_closure(complex_: SimplicialComplex) -> List[str]:
    """List every missing face, incidence-sign mismatch or coface inconsistency"""
    violations = []
    for k in range(1, complex_.max_dim + 1):
        lower = complex_.simplices(k - 1)
        for tau_id, simplex in enumerate(complex_.simplices(k)):
            stored = complex_.faces(k, tau_id)
            for i in range(k + 1):
                expected_face = simplex[:i] + simplex[i + 1:]
                expected_sign = -1 if i % 2 else 1
                face_id, sign = stored[i]
                if face_id < 0 or lower[face_id] != expected_face:
                    violations.append(f"missing face {expected_face} of {k}-simplex {simplex}")
                    continue
                if sign != expected_sign:
                    violations.append(
                        f"sign mismatch on face {expected_face} of {k}-simplex {simplex}: "
                        f"stored {sign:+d}, expected {expected_sign:+d}"
                    )
                    continue
                if (tau_id, sign) not in complex_.cofaces(k - 1, face_id):
                    violations.append(f"coface list of {expected_face} does not contain {simplex}")
    return violations


# ---------------------------------------------------------------------- clouds

@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite point cloud in R^2 / R^3, or on the flat torus [0,2) x [0,sqrt(3))"""

    points: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or len(points) == 0:
            raise ComplexError("点群は空でない (N, d) 配列である必要があります")
        if points.shape[1] not in SUPPORTED_POINT_DIMS:
            raise ComplexError(f"対応する次元は {SUPPORTED_POINT_DIMS} です: d={points.shape[1]}")
        if not np.all(np.isfinite(points)):
            raise ComplexError("点群に有限でない座標が含まれています")
        if self.metric not in METRICS:
            raise ComplexError(f"未対応の距離です: {self.metric}")
        if self.metric == "torus":
            if points.shape[1] != 2:
                raise ComplexError("トーラス距離は2次元点群のみ対応しています")
            periods = np.asarray(TORUS_PERIODS)
            points = np.mod(points, periods)
            points = np.where(points >= periods, points - periods, points)
        object.__setattr__(self, "points", points)

        duplicates = sorted(self.tree.query_pairs(r=0.0))
        if duplicates:
            shown = ", ".join(f"({i}, {j})" for i, j in duplicates[:5])
            raise ComplexError(f"重複した点があります: {shown}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def tree(self) -> cKDTree:
        boxsize = TORUS_PERIODS if self.metric == "torus" else None
        return cKDTree(self.points, boxsize=boxsize)

    def displacement(self, i: int, j: int) -> np.ndarray:
        delta = self.points[j] - self.points[i]
        if self.metric == "torus":
            delta = periodic_displacement(delta)
        return delta

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.displacement(i, j)))

    def local_coordinates(self, vertices: Sequence[int]) -> np.ndarray:
        """Coordinates unwrapped to the nearest images of the first vertex"""
        base = self.points[vertices[0]]
        return np.array([base + self.displacement(vertices[0], v) for v in vertices])


def _as_cloud(points) -> PointCloud:
    return points if isinstance(points, PointCloud) else PointCloud(np.asarray(points, dtype=float))


def _checked_max_dim(cloud: PointCloud, radius: float, max_dim: int) -> int:
    if radius <= 0:
        raise ComplexError(f"半径 R は正の値である必要があります: {radius}")
    if max_dim < 0:
        raise ComplexError(f"最大次元 K は0以上である必要があります: {max_dim}")
    if max_dim > len(cloud) - 1:
        logger.warning(f"⚠️ K={max_dim} が |V|-1={len(cloud) - 1} を超えるため切り詰めます")
        max_dim = len(cloud) - 1
    return max_dim


def _neighbourhoods(cloud: PointCloud, threshold: float) -> Tuple[np.ndarray, List[set]]:
    edges = cloud.tree.query_pairs(r=threshold, output_type="ndarray")
    edges = np.array(sorted(map(tuple, edges)), dtype=int).reshape(-1, 2)
    neighbours: List[set] = [set() for _ in range(len(cloud))]
    for i, j in edges:
        neighbours[i].add(int(j))
        neighbours[j].add(int(i))
    return edges, neighbours


def _extend(simplices: Iterable[Simplex], neighbours: List[set]) -> List[Simplex]:
    """All one-vertex extensions by common neighbours with a larger id"""
    extended = []
    for simplex in simplices:
        common = set.intersection(*(neighbours[v] for v in simplex))
        extended.extend(simplex + (v,) for v in sorted(c for c in common if c > simplex[-1]))
    return extended


def build_rips(points, radius: float, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplex:
    """Rips complex: edges at distance <= 2R, higher simplices = cliques of the edge graph"""
    cloud = _as_cloud(points)
    max_dim = _checked_max_dim(cloud, radius, max_dim)

    edges, neighbours = _neighbourhoods(cloud, 2.0 * radius)
    levels: List[List[Simplex]] = [[(v,) for v in range(len(cloud))]]
    if max_dim >= 1:
        levels.append([(int(i), int(j)) for i, j in edges])
    for _ in range(2, max_dim + 1):
        nxt = _extend(levels[-1], neighbours)
        if not nxt:
            break
        levels.append(nxt)

    complex_ = SimplicialComplex(levels, coordinates=cloud.points, metric=cloud.metric)
    logger.info(f"📐 Rips複体を構築しました: R={radius}, f={complex_.f_vector()}")
    return complex_


def _float_miniball_radius(coords: np.ndarray) -> float:
    best = math.inf
    for size in range(1, min(len(coords), coords.shape[1] + 1) + 1):
        for subset in combinations(range(len(coords)), size):
            base = coords[subset[0]]
            u = coords[list(subset[1:])] - base
            if len(u):
                try:
                    a = np.linalg.solve(u @ u.T, 0.5 * np.einsum("ij,ij->i", u, u))
                except np.linalg.LinAlgError:
                    continue
                center = base + a @ u
            else:
                center = base
            r = float(np.linalg.norm(coords[subset[0]] - center))
            if np.all(np.linalg.norm(coords - center, axis=1) <= r * (1 + 1e-12) + 1e-15):
                best = min(best, r)
    return best


def _exact_circumcenter(points: List[Tuple[Fraction, ...]]) -> Optional[Tuple[Tuple[Fraction, ...], Fraction]]:
    """Circumcenter in the affine hull and squared radius, or None if degenerate"""
    base = points[0]
    u = [tuple(p[c] - base[c] for c in range(len(base))) for p in points[1:]]
    m = len(u)
    if m == 0:
        return base, Fraction(0)
    gram = [[sum(a * b for a, b in zip(u[i], u[j])) for j in range(m)] for i in range(m)]
    rhs = [sum(a * a for a in u[i]) / 2 for i in range(m)]

    # Gaussian elimination over the rationals
    rows = [gram[i] + [rhs[i]] for i in range(m)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    coeffs = [rows[i][m] / rows[i][i] for i in range(m)]

    offset = tuple(sum(coeffs[j] * u[j][c] for j in range(m)) for c in range(len(base)))
    center = tuple(base[c] + offset[c] for c in range(len(base)))
    return center, sum(x * x for x in offset)


def exact_miniball_radius_sq(coords: np.ndarray) -> Fraction:
    """Squared radius of the minimum enclosing ball, in exact rational arithmetic"""
    points = [tuple(Fraction(float(x)) for x in row) for row in coords]
    best: Optional[Fraction] = None
    for size in range(1, min(len(points), len(points[0]) + 1) + 1):
        for subset in combinations(range(len(points)), size):
            result = _exact_circumcenter([points[i] for i in subset])
            if result is None:
                continue
            center, r2 = result
            if best is not None and r2 >= best:
                continue
            if all(sum((p[c] - center[c]) ** 2 for c in range(len(p))) <= r2 for p in points):
                best = r2
    return best


def _in_cech(coords: np.ndarray, radius: float) -> bool:
    approx = _float_miniball_radius(coords)
    if approx < radius * (1 - _CECH_FLOAT_BAND):
        return True
    if approx > radius * (1 + _CECH_FLOAT_BAND):
        return False
    return exact_miniball_radius_sq(coords) <= Fraction(float(radius)) ** 2


def build_cech(points, radius: float, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplex:
    """Čech complex: a vertex set spans a simplex iff its minimum enclosing ball has radius <= R"""
    cloud = _as_cloud(points)
    max_dim = _checked_max_dim(cloud, radius, max_dim)

    edges, neighbours = _neighbourhoods(cloud, 2.0 * radius)
    levels: List[List[Simplex]] = [[(v,) for v in range(len(cloud))]]
    if max_dim >= 1:
        levels.append([(int(i), int(j)) for i, j in edges])
    for _ in range(2, max_dim + 1):
        nxt = [s for s in _extend(levels[-1], neighbours) if _in_cech(cloud.local_coordinates(s), radius)]
        if not nxt:
            break
        levels.append(nxt)

    complex_ = SimplicialComplex(levels, coordinates=cloud.points, metric=cloud.metric)
    logger.info(f"📐 Čech複体を構築しました: R={radius}, f={complex_.f_vector()}")
    return complex_


# ---------------------------------------------------------------------- torus

def torus_vertex_id(n: int, row: int, col: int) -> int:
    return (row % n) * n + (col % n)


def torus_vertex_position(n: int, vertex_id: int) -> Tuple[float, float]:
    eps = 1.0 / n
    row, col = divmod(vertex_id, n)
    return ((2 * col + row % 2) * eps, row * math.sqrt(3.0) * eps)


def _torus_up_neighbours(n: int, row: int, col: int) -> Tuple[int, int]:
    """(up-right, up-left) neighbours of a vertex in the next lattice row"""
    if row % 2 == 0:
        return torus_vertex_id(n, row + 1, col), torus_vertex_id(n, row + 1, col - 1)
    return torus_vertex_id(n, row + 1, col + 1), torus_vertex_id(n, row + 1, col)


def build_torus_triangulation(n: int) -> SimplicialComplex:
    """
    Regular triangulation of the flat torus with mesh 2/n.

    Row j (0 <= j < n) sits at height j*sqrt(3)/n and holds n vertices at
    x = (2k + j mod 2)/n. Each vertex spans one upward triangle
    (v, v + (2e, 0), v + (e, sqrt(3)e)) and one downward triangle
    (v, v + (e, sqrt(3)e), v + (-e, sqrt(3)e)) with e = 1/n.
    """
    if n % 2:
        raise ComplexError(f"n は偶数である必要があります（奇数では格子の行が周期的に閉じません）: n={n}")
    if n < 4:
        raise ComplexError(f"n は4以上である必要があります（n=2 では辺が重複します）: n={n}")

    triangles = []
    for row in range(n):
        for col in range(n):
            v = torus_vertex_id(n, row, col)
            right = torus_vertex_id(n, row, col + 1)
            up_right, up_left = _torus_up_neighbours(n, row, col)
            triangles.append((v, right, up_right))
            triangles.append((v, up_right, up_left))

    coordinates = np.array([torus_vertex_position(n, v) for v in range(n * n)])
    complex_ = SimplicialComplex.from_simplices(triangles, n_vertices=n * n, coordinates=coordinates, metric="torus")
    logger.info(f"🍩 トーラス三角形分割を構築しました: n={n}, f={complex_.f_vector()}")
    return complex_


def perforation_triangle(n: int) -> Simplex:
    """Vertices of the triangle [(0,0), (2e,0), (e, sqrt(3)e)]"""
    return tuple(sorted((torus_vertex_id(n, 0, 0), torus_vertex_id(n, 0, 1), torus_vertex_id(n, 1, 0))))


def build_perforated_torus(n: int) -> SimplicialComplex:
    """Torus triangulation with the triangle at the origin removed (its edges are kept)"""
    torus = build_torus_triangulation(n)
    _, tau0, _ = torus.index(perforation_triangle(n))
    return torus.without(2, [tau0])
