"""
Chain Algebra

Sparse k-chains over a SimplicialComplex: boundary and coboundary, the
canonical inner product, supports, and the transition weight of the
cycle-valued walk. Chains and cochains share one representation.

Two scalar flavors coexist: Python ints (walk states, Smith normal form,
never overflow) and floats (spectra, forms). Operations keep ints exact.
"""

import logging
import math
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import REAL_ZERO_TOL
from .complex import SimplicialComplex
from .exceptions import ComplexError

logger = logging.getLogger(__name__)

Number = Union[int, float]


def _scalar(value) -> Number:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


class Chain:
    """Sparse map simplex id -> non-zero coefficient, for one dimension k"""

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Optional[Mapping[int, Number]] = None):
        self.dim = int(dim)
        items = {}
        for simplex_id, value in (coeffs or {}).items():
            value = _scalar(value)
            if value != 0:
                items[int(simplex_id)] = value
        self._coeffs = dict(sorted(items.items()))

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[Tuple[int, Number]]) -> "Chain":
        """Sum coefficients of repeated ids"""
        acc: Dict[int, Number] = {}
        for simplex_id, value in pairs:
            acc[int(simplex_id)] = acc.get(int(simplex_id), 0) + _scalar(value)
        return cls(dim, acc)

    @classmethod
    def from_dense(cls, dim: int, vector: Sequence[float], tol: Optional[float] = None) -> "Chain":
        """Real chain from a dense vector; entries under the zero tolerance are dropped"""
        vector = np.asarray(vector)
        if np.issubdtype(vector.dtype, np.integer):
            return cls(dim, {i: int(x) for i, x in enumerate(vector) if x != 0})
        if tol is None:
            tol = REAL_ZERO_TOL * (1.0 + float(np.linalg.norm(vector)))
        return cls(dim, {i: float(x) for i, x in enumerate(vector) if abs(x) > tol})

    # ------------------------------------------------------------------ access

    @property
    def coeffs(self) -> Mapping[int, Number]:
        return MappingProxyType(self._coeffs)

    def __getitem__(self, simplex_id: int) -> Number:
        return self._coeffs.get(simplex_id, 0)

    def __iter__(self) -> Iterator[Tuple[int, Number]]:
        return iter(self._coeffs.items())

    def __len__(self) -> int:
        return len(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def support(self) -> frozenset:
        return frozenset(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_integer(self) -> bool:
        return all(isinstance(v, int) for v in self._coeffs.values())

    def key(self) -> Tuple[Tuple[int, Number], ...]:
        """Canonical sorted (id, coefficient) sequence"""
        return tuple(self._coeffs.items())

    def norm_sq(self) -> Number:
        return sum(v * v for v in self._coeffs.values())

    def l1(self) -> Number:
        return sum(abs(v) for v in self._coeffs.values())

    def max_abs(self) -> Number:
        return max((abs(v) for v in self._coeffs.values()), default=0)

    def to_dense(self, size: int, dtype=float) -> np.ndarray:
        vector = np.zeros(size, dtype=dtype)
        for simplex_id, value in self._coeffs.items():
            vector[simplex_id] = value
        return vector

    # -------------------------------------------------------------- arithmetic

    def _check_dim(self, other: "Chain"):
        if other.dim != self.dim:
            raise ComplexError(f"次元が一致しません: {self.dim} vs {other.dim}")

    def __add__(self, other: "Chain") -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        self._check_dim(other)
        acc = dict(self._coeffs)
        for simplex_id, value in other._coeffs.items():
            acc[simplex_id] = acc.get(simplex_id, 0) + value
        return Chain(self.dim, acc)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, {i: -v for i, v in self._coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        self._check_dim(other)
        return self + (-other)

    def __mul__(self, scalar: Number) -> "Chain":
        scalar = _scalar(scalar)
        return Chain(self.dim, {i: scalar * v for i, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.dim == other.dim and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.dim, self.key()))

    def __repr__(self) -> str:
        body = " ".join(f"{v:+g}[{i}]" for i, v in self._coeffs.items()) or "0"
        return f"Chain(dim={self.dim}: {body})"


def zero(dim: int) -> Chain:
    return Chain(dim)


def chain_from_simplices(complex_: SimplicialComplex, terms: Iterable[Tuple[Sequence[int], Number]]) -> Chain:
    """Chain from (oriented vertex sequence, coefficient) terms; orientation folds into the sign"""
    dim = None
    pairs = []
    for vertices, coefficient in terms:
        k, simplex_id, sign = complex_.index(vertices)
        if dim is None:
            dim = k
        elif k != dim:
            raise ComplexError(f"異なる次元の単体が混在しています: {dim} と {k}")
        pairs.append((simplex_id, sign * _scalar(coefficient)))
    if dim is None:
        raise ComplexError("空の項からは次元を決定できません")
    return Chain.from_pairs(dim, pairs)


def elementary(complex_: SimplicialComplex, vertices: Sequence[int], coefficient: Number = 1) -> Chain:
    return chain_from_simplices(complex_, [(vertices, coefficient)])


def _check_support(complex_: SimplicialComplex, sigma: Chain):
    count = complex_.n_simplices(sigma.dim)
    for simplex_id in sigma.support():
        if not 0 <= simplex_id < count:
            raise ComplexError(f"{sigma.dim}-単体ID {simplex_id} は複体に存在しません（{count}個）")


def boundary(complex_: SimplicialComplex, sigma: Chain) -> Chain:
    """Linear extension of the alternating face operator; the boundary of a 0-chain is 0"""
    if sigma.dim < 0 or sigma.dim > complex_.max_dim:
        raise ComplexError(f"次元 {sigma.dim} は複体の次元 {complex_.max_dim} と整合しません")
    _check_support(complex_, sigma)
    if sigma.dim == 0:
        return Chain(-1)
    acc: Dict[int, Number] = {}
    for simplex_id, value in sigma.items():
        for face_id, sign in complex_.faces(sigma.dim, simplex_id):
            acc[face_id] = acc.get(face_id, 0) + sign * value
    return Chain(sigma.dim - 1, acc)


def coboundary(complex_: SimplicialComplex, f: Chain) -> Chain:
    """Adjoint of the boundary: a (k-1)-cochain to a k-cochain"""
    if f.dim < -1 or f.dim > complex_.max_dim:
        raise ComplexError(f"次元 {f.dim} は複体の次元 {complex_.max_dim} と整合しません")
    if f.dim == -1:
        return Chain(0)
    _check_support(complex_, f)
    acc: Dict[int, Number] = {}
    for simplex_id, value in f.items():
        for coface_id, sign in complex_.cofaces(f.dim, simplex_id):
            acc[coface_id] = acc.get(coface_id, 0) + sign * value
    return Chain(f.dim + 1, acc)


def inner(sigma: Chain, eta: Chain) -> Number:
    if sigma.dim != eta.dim:
        raise ComplexError(f"次元が一致しません: {sigma.dim} vs {eta.dim}")
    if len(eta) < len(sigma):
        sigma, eta = eta, sigma
    return sum(value * eta[simplex_id] for simplex_id, value in sigma.items())


def norm_sq(sigma: Chain) -> Number:
    return sigma.norm_sq()


def support(sigma: Chain) -> frozenset:
    return sigma.support()


def pairing(complex_: SimplicialComplex, sigma: Chain, tau_id: int) -> Number:
    """<d tau, sigma> for a positively oriented (k+1)-simplex tau"""
    return sum(sign * sigma[face_id] for face_id, sign in complex_.faces(sigma.dim + 1, tau_id))


def weight(complex_: SimplicialComplex, sigma: Chain, tau_id: int, sign: int = 1) -> Number:
    """Transition weight w(sigma, d tau) = <d tau, sigma>^+ for the oriented simplex sign*tau"""
    return max(0, sign * pairing(complex_, sigma, tau_id))


def kernel(complex_: SimplicialComplex, sigma: Chain, sigma_prime: Chain) -> Number:
    """Jump kernel K(sigma, sigma'): w(sigma, d tau) when sigma' = sigma - d tau, 1 on the null self-loop"""
    if sigma.is_zero() and sigma_prime.is_zero():
        return 1
    difference = sigma - sigma_prime
    if difference.is_zero():
        return 0
    first = next(iter(difference.support()))
    for tau_id, _ in complex_.cofaces(sigma.dim, first):
        d_tau = boundary(complex_, Chain(sigma.dim + 1, {tau_id: 1}))
        for sign in (1, -1):
            if sign * d_tau == difference:
                return weight(complex_, sigma, tau_id, sign)
    return 0


def real_zero_tolerance(sigma: Chain) -> float:
    return REAL_ZERO_TOL * (1.0 + math.sqrt(float(sigma.norm_sq())))


def is_cycle(complex_: SimplicialComplex, sigma: Chain, tol: Optional[float] = None) -> bool:
    """Exact test for integer chains, tolerance test for real chains"""
    d_sigma = boundary(complex_, sigma)
    if sigma.is_integer() and tol is None:
        return d_sigma.is_zero()
    if tol is None:
        tol = real_zero_tolerance(sigma)
    return d_sigma.max_abs() <= tol


def lower_degree(complex_: SimplicialComplex, k: int, tau_id: int) -> int:
    """deg_down(tau) = sum over tau' != tau of |<d tau, d tau'>|"""
    overlap: Dict[int, int] = {}
    for face_id, sign in complex_.faces(k, tau_id):
        for other_id, other_sign in complex_.cofaces(k - 1, face_id):
            if other_id != tau_id:
                overlap[other_id] = overlap.get(other_id, 0) + sign * other_sign
    return sum(abs(v) for v in overlap.values())


def theta(sigma: Chain, simplex_id: int, sign: int = 1) -> Number:
    """Positive part of the coefficient of the oriented simplex sign*tau in sigma"""
    return max(0, sign * sigma[simplex_id])
