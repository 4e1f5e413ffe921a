"""
Heat Flow on Chains

Deterministic evolution d omega/dt = -L omega with L = L_k^up (default) or
the full Laplacian L_k, and its limit, the projection onto ker L.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from ..config import DENSE_EIGEN_MAX_DIM, ODE_LOCAL_TOL, validate_heat_params
from .chains import Chain
from .complex import SimplicialComplex
from .exceptions import SolverError
from .spectral import Spectrum, full_laplacian, harmonic_projection, spectrum, up_laplacian

logger = logging.getLogger(__name__)


@dataclass
class FlowState:
    omega: Chain
    t: float


class HeatFlow:
    """
    Propagator exp(-tL) on the k-chains of a complex.

    The eigendecomposition is computed once and reused for every time; the
    ``rk4`` path integrates the ODE with an adaptive Runge-Kutta scheme.
    """

    def __init__(self, complex_: SimplicialComplex, k: int, operator: str = "up", method: Optional[str] = None):
        params = validate_heat_params({"operator": operator, "method": method})
        self.complex = complex_
        self.k = k
        self.operator_name = params["operator"]
        build = up_laplacian if self.operator_name == "up" else full_laplacian
        self.operator = build(complex_, k, dtype=float).tocsr()
        self.size = self.operator.shape[0]
        self.method = params["method"] or ("eigen" if self.size <= DENSE_EIGEN_MAX_DIM else "rk4")
        self._spectrum: Optional[Spectrum] = None

    @property
    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            self._spectrum = spectrum(self.operator, vectors=True)
        return self._spectrum

    def _vector(self, omega: Chain) -> np.ndarray:
        if omega.dim != self.k:
            raise ValueError(f"チェインの次元 {omega.dim} が作用素の次元 {self.k} と一致しません")
        return omega.to_dense(self.size)

    def propagate(self, y0: np.ndarray, t: float, method: Optional[str] = None) -> np.ndarray:
        if t < 0:
            raise ValueError(f"時刻 t は0以上である必要があります: t={t}")
        method = method or self.method
        if t == 0 or self.size == 0:
            return y0.copy()
        if method == "eigen":
            eig = self.spectrum
            vectors = eig.eigenvectors
            return vectors @ (np.exp(-t * eig.eigenvalues) * (vectors.T @ y0))
        if method == "rk4":
            operator = self.operator
            solution = solve_ivp(
                lambda _, y: -(operator @ y),
                (0.0, t),
                y0,
                method="RK45",
                rtol=ODE_LOCAL_TOL,
                atol=ODE_LOCAL_TOL * max(1.0, float(np.max(np.abs(y0)))),
            )
            if not solution.success:
                raise SolverError(f"ODEソルバーエラー: {solution.message}")
            return solution.y[:, -1]
        raise ValueError(f"method は eigen / rk4 のいずれかです: {method}")

    def evolve(self, omega0: Chain, t: float, method: Optional[str] = None) -> FlowState:
        y = self.propagate(self._vector(omega0), t, method)
        return FlowState(Chain.from_dense(self.k, y), float(t))

    def energy(self, omega: Chain) -> float:
        y = self._vector(omega)
        return float(y @ (self.operator @ y))

    def trace(self, omega0: Chain, times: Sequence[float], method: Optional[str] = None) -> pd.DataFrame:
        """Norm and energy of omega(t) on a time grid"""
        y0 = self._vector(omega0)
        rows = []
        for t in times:
            y = self.propagate(y0, float(t), method)
            rows.append({
                "t": float(t),
                "norm": float(np.linalg.norm(y)),
                "energy": float(y @ (self.operator @ y)),
            })
        return pd.DataFrame(rows, columns=["t", "norm", "energy"])

    def lambda_min(self) -> float:
        positive = self.spectrum.positive()
        return float(positive[0]) if len(positive) else math.inf

    def decay_rate(self, omega0: Chain, times: Optional[Sequence[float]] = None) -> Dict[str, float]:
        """
        Exponential approach rate of omega(t) to its limit.

        Fits log ||omega(t) - omega_inf|| against t and reports the slope next
        to lambda_m, the smallest positive eigenvalue of the operator.
        """
        y0 = self._vector(omega0)
        limit = self.steady_state(omega0).to_dense(self.size)
        lam = self.lambda_min()
        if times is None:
            horizon = 8.0 / lam if math.isfinite(lam) else 1.0
            times = np.linspace(0.0, horizon, 9)[1:]
        ts, logs = [], []
        for t in times:
            gap = float(np.linalg.norm(self.propagate(y0, float(t)) - limit))
            if gap > 1e-13 * (1.0 + float(np.linalg.norm(y0))):
                ts.append(float(t))
                logs.append(math.log(gap))
        if len(ts) < 2:
            rate = math.inf
        else:
            rate = -float(np.polyfit(ts, logs, 1)[0])
        return {"measured_rate": rate, "lambda_min": lam}

    def _up_kernel_projection(self, y0: np.ndarray) -> np.ndarray:
        eig = self.spectrum
        mask = eig.eigenvalues < eig.zero_threshold()
        vectors = eig.eigenvectors[:, mask]
        return vectors @ (vectors.T @ y0)

    def steady_state(self, omega0: Chain) -> Chain:
        """Limit of omega(t) as t -> infinity"""
        if self.operator_name == "full":
            return harmonic_projection(self.complex, omega0)
        return Chain.from_dense(self.k, self._up_kernel_projection(self._vector(omega0)))


def evolve(
    complex_: SimplicialComplex,
    omega0: Chain,
    t: float,
    method: Optional[str] = None,
    operator: str = "up",
) -> FlowState:
    return HeatFlow(complex_, omega0.dim, operator=operator, method=method).evolve(omega0, t)


def steady_state(complex_: SimplicialComplex, omega0: Chain, operator: str = "up") -> Chain:
    """
    Limit of ``evolve`` with the same operator: the harmonic projection for
    ``full``, the projection onto ker L^up for ``up``. The two agree on cycles.
    """
    return HeatFlow(complex_, omega0.dim, operator=operator).steady_state(omega0)


def norm_trace(
    complex_: SimplicialComplex,
    omega0: Chain,
    horizon: float,
    n_steps: int = 20,
    method: Optional[str] = None,
    operator: str = "up",
) -> pd.DataFrame:
    if horizon < 0:
        raise ValueError(f"horizon は0以上である必要があります: {horizon}")
    flow = HeatFlow(complex_, omega0.dim, operator=operator, method=method)
    times: List[float] = list(np.linspace(0.0, horizon, n_steps + 1))
    return flow.trace(omega0, times)
