"""
Trigonometric 1-Forms on the Flat Torus

Forms phi = phi^1 dx1 + phi^2 dx2 whose components are finite Fourier sums

    f(x) = Re sum_{(n, m)} c_{n,m} exp(i (pi n x1 + 2 pi m x2 / sqrt(3)))

so every derivative, the Hodge operators and the exact line integral along
a straight segment follow from the coefficients alone.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..config import TORUS_PERIODS
from .chains import Chain
from .complex import SimplicialComplex, periodic_displacement

logger = logging.getLogger(__name__)

Mode = Tuple[int, int]

GAUSS_LEGENDRE_ORDER = 16


def wave_vector(mode: Mode) -> np.ndarray:
    n, m = mode
    return np.array([2.0 * math.pi * n / TORUS_PERIODS[0], 2.0 * math.pi * m / TORUS_PERIODS[1]])


@dataclass(frozen=True)
class TrigPolynomial:
    """Real part of a finite sum of torus Fourier modes"""

    coeffs: Mapping[Mode, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {(int(n), int(m)): complex(c) for (n, m), c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", cleaned)

    @property
    def degree(self) -> int:
        return max((max(abs(n), abs(m)) for n, m in self.coeffs), default=0)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        total = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for mode, c in self.coeffs.items():
            k1, k2 = wave_vector(mode)
            total = total + c * np.exp(1j * (k1 * x1 + k2 * x2))
        return total.real if total.ndim else float(total.real)

    def derivative(self, axis: int) -> "TrigPolynomial":
        """d/dx1 (axis=1) or d/dx2 (axis=2)"""
        if axis not in (1, 2):
            raise ValueError(f"axis は 1 か 2 です: {axis}")
        return TrigPolynomial({mode: c * 1j * wave_vector(mode)[axis - 1] for mode, c in self.coeffs.items()})

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        acc = dict(self.coeffs)
        for mode, c in other.coeffs.items():
            acc[mode] = acc.get(mode, 0) + c
        return TrigPolynomial(acc)

    def __neg__(self) -> "TrigPolynomial":
        return TrigPolynomial({mode: -c for mode, c in self.coeffs.items()})

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + (-other)

    def __mul__(self, scalar: float) -> "TrigPolynomial":
        return TrigPolynomial({mode: scalar * c for mode, c in self.coeffs.items()})

    __rmul__ = __mul__

    def segment_average(self, start: np.ndarray, direction: np.ndarray) -> float:
        """Exact value of int_0^1 f(start + s * direction) ds"""
        total = 0j
        for mode, c in self.coeffs.items():
            k = wave_vector(mode)
            phase = float(k @ start)
            kd = float(k @ direction)
            if abs(kd) < 1e-14:
                total += c * cmath.exp(1j * phase)
            else:
                total += c * cmath.exp(1j * phase) * (cmath.exp(1j * kd) - 1.0) / (1j * kd)
        return total.real


@dataclass(frozen=True)
class OneForm:
    """phi^1 dx1 + phi^2 dx2 with (2, sqrt 3)-periodic trigonometric components"""

    phi1: TrigPolynomial = field(default_factory=TrigPolynomial)
    phi2: TrigPolynomial = field(default_factory=TrigPolynomial)
    name: str = ""

    def evaluate(self, x1, x2) -> Tuple[np.ndarray, np.ndarray]:
        return self.phi1(x1, x2), self.phi2(x1, x2)

    def d(self, component: int, axis: int) -> TrigPolynomial:
        """phi^component_axis, the partial derivative of one component"""
        return (self.phi1 if component == 1 else self.phi2).derivative(axis)

    def segment_integral(self, start: Sequence[float], displacement: Sequence[float]) -> float:
        """Exact integral of the form along the straight segment start -> start + displacement"""
        start = np.asarray(start, dtype=float)
        displacement = np.asarray(displacement, dtype=float)
        return (
            displacement[0] * self.phi1.segment_average(start, displacement)
            + displacement[1] * self.phi2.segment_average(start, displacement)
        )

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.phi1 + other.phi1, self.phi2 + other.phi2, name=f"{self.name}+{other.name}")

    def __mul__(self, scalar: float) -> "OneForm":
        return OneForm(self.phi1 * scalar, self.phi2 * scalar, name=self.name)

    __rmul__ = __mul__


def hodge_up(phi: OneForm) -> OneForm:
    """(phi^1_22 - phi^2_12) dx1 + (phi^2_11 - phi^1_12) dx2"""
    first = phi.phi1.derivative(2).derivative(2) - phi.phi2.derivative(1).derivative(2)
    second = phi.phi2.derivative(1).derivative(1) - phi.phi1.derivative(1).derivative(2)
    return OneForm(first, second, name=f"Lup({phi.name})")


def hodge_down(phi: OneForm) -> OneForm:
    """(phi^1_11 + phi^2_12) dx1 + (phi^1_12 + phi^2_22) dx2, the gradient of the divergence"""
    first = phi.phi1.derivative(1).derivative(1) + phi.phi2.derivative(1).derivative(2)
    second = phi.phi1.derivative(1).derivative(2) + phi.phi2.derivative(2).derivative(2)
    return OneForm(first, second, name=f"Ldown({phi.name})")


def star_d(phi: OneForm) -> TrigPolynomial:
    """*d phi = phi^2_1 - phi^1_2"""
    return phi.phi2.derivative(1) - phi.phi1.derivative(2)


def mode_matrix(mode: Mode) -> np.ndarray:
    """Action of hodge_up on the coefficients (a, b) of (a e_mode) dx1 + (b e_mode) dx2"""
    k1, k2 = wave_vector(mode)
    return np.array([[-k2 * k2, k1 * k2], [k1 * k2, -k1 * k1]])


# ------------------------------------------------------------------ builtins

def _builtin_forms() -> Dict[str, OneForm]:
    zero = TrigPolynomial()
    return {
        "constant_dx1": OneForm(TrigPolynomial({(0, 0): 1.0}), zero, name="constant_dx1"),
        "constant_dx2": OneForm(zero, TrigPolynomial({(0, 0): 1.0}), name="constant_dx2"),
        "cos_mode": OneForm(TrigPolynomial({(0, 1): 1.0}), zero, name="cos_mode"),
        "sin_mode": OneForm(TrigPolynomial({(0, 1): -1j}), zero, name="sin_mode"),
        "mixed": OneForm(
            TrigPolynomial({(0, 1): 1.0, (1, 0): -0.5j}),
            TrigPolynomial({(1, 1): 0.3}),
            name="mixed",
        ),
    }


BUILTIN_FORMS: Dict[str, OneForm] = _builtin_forms()


def builtin_form(name: str) -> OneForm:
    """Look up ``name`` or ``builtin:name``"""
    key = name.split(":", 1)[1] if name.startswith("builtin:") else name
    if key not in BUILTIN_FORMS:
        raise ValueError(f"未知の組み込み形式です: {name}（候補: {', '.join(sorted(BUILTIN_FORMS))}）")
    return BUILTIN_FORMS[key]


# ------------------------------------------------------------------ chains vs forms

def edge_geometry(complex_: SimplicialComplex, edge_id: int) -> Tuple[np.ndarray, np.ndarray]:
    """(start point, displacement) of a positively oriented edge, unwrapped on the torus"""
    if complex_.coordinates is None:
        raise ValueError("座標を持たない複体では形式との対を計算できません")
    a, b = complex_.simplex(1, edge_id)
    start = complex_.coordinates[a]
    delta = complex_.coordinates[b] - start
    if complex_.metric == "torus":
        delta = periodic_displacement(delta)
    return start, delta


def edge_integrals(complex_: SimplicialComplex, phi: OneForm) -> np.ndarray:
    """Exact integral of phi along every positively oriented edge"""
    values = np.empty(complex_.n_simplices(1))
    for edge_id in range(len(values)):
        start, delta = edge_geometry(complex_, edge_id)
        values[edge_id] = phi.segment_integral(start, delta)
    return values


def pair(complex_: SimplicialComplex, sigma: Chain, phi: OneForm) -> float:
    """<sigma, phi>: sum over edges of lambda_e times the line integral of phi along e"""
    if sigma.dim != 1:
        raise ValueError(f"1-チェインが必要です: dim={sigma.dim}")
    total = 0.0
    for edge_id, value in sigma.items():
        start, delta = edge_geometry(complex_, edge_id)
        total += value * phi.segment_integral(start, delta)
    return total


def edge_arc_integral(complex_: SimplicialComplex, edge_id: int, func: Callable) -> float:
    """Arc-length integral of a scalar function along an edge, Gauss-Legendre"""
    start, delta = edge_geometry(complex_, edge_id)
    nodes, weights = leggauss(GAUSS_LEGENDRE_ORDER)
    s = 0.5 * (nodes + 1.0)
    values = np.asarray(func(start[0] + s * delta[0], start[1] + s * delta[1]), dtype=float)
    return 0.5 * float(weights @ values) * float(np.linalg.norm(delta))
