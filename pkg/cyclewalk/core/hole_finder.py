"""
Hole Localization by Simulated Annealing

Each homology generator of H_1 (exact, from the Smith normal form) seeds an
annealing run whose proposals are single transitions of the cycle-valued
walk and whose energy is the algebraic length U(sigma) = sum |lambda_e|.
Walk moves subtract triangle boundaries, so every visited state stays in the
seed's homology class. A final cut-off drops edges with small weights.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from ..config import resolve_seed, validate_anneal_params
from .chains import Chain
from .complex import SimplicialComplex
from .exceptions import CycleWalkError, NoHolesError
from .spectral import homology_generators, is_boundary
from .walk import draw_transition, open_uniform, enumerate_transitions, jump, make_rng

logger = logging.getLogger(__name__)


def energy(sigma: Chain):
    """Algebraic length: the L1 norm of the coefficients"""
    return sigma.l1()


@dataclass
class AnnealSchedule:
    """Geometric cooling T_m = t0 * alpha^m until t_min or max_steps"""

    t0: Optional[float] = None
    alpha: float = 0.999
    t_min: float = 1e-3
    max_steps: int = 200_000

    @classmethod
    def from_params(cls, params: Optional[dict] = None) -> "AnnealSchedule":
        validated = validate_anneal_params(params or {})
        return cls(
            t0=validated["t0"],
            alpha=validated["alpha"],
            t_min=validated["t_min"],
            max_steps=validated["max_steps"],
        )

    def temperature(self, t0: float, m: int) -> float:
        return t0 * self.alpha ** m


@dataclass
class AnnealResult:
    """
    ``last`` is the state where cooling stopped, ``best`` the lowest-energy
    state visited and ``final`` the reported chain: ``best`` after the
    zero-temperature quench.
    """

    seed: Chain
    final: Chain
    best: Chain
    last: Optional[Chain] = None
    quench_moves: int = 0
    energies: List[float] = field(default_factory=list)
    temperatures: List[float] = field(default_factory=list)
    accepted_flags: List[bool] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    stalls: int = 0

    @property
    def final_energy(self):
        return energy(self.final)

    @property
    def best_energy(self):
        return energy(self.best)

    def trace_frame(self) -> pd.DataFrame:
        """Energy trace: one row per annealing step"""
        return pd.DataFrame({
            "step": np.arange(1, len(self.energies) + 1),
            "temperature": self.temperatures,
            "energy": self.energies,
            "accepted": self.accepted_flags,
        })

    @property
    def last_energy(self):
        return energy(self.last if self.last is not None else self.final)

    def edge_weights(self, chain: Optional[Chain] = None) -> List[Tuple[int, float]]:
        chain = chain if chain is not None else self.final
        return [(edge_id, value) for edge_id, value in chain.items()]


def seed_cycle(complex_: SimplicialComplex, class_index: int = 0) -> Chain:
    """Integer cycle representing the ``class_index``-th homology generator of H_1"""
    generators = homology_generators(complex_, 1)
    if not generators:
        raise NoHolesError("no holes: β_1 = 0 のため穴を探索できません")
    if not 0 <= class_index < len(generators):
        raise ValueError(f"class_index は 0..{len(generators) - 1} の範囲です: {class_index}")
    return generators[class_index]


def quench(complex_: SimplicialComplex, sigma: Chain) -> Tuple[Chain, int]:
    """
    Zero-temperature descent: apply the steepest strictly downhill transition
    (lowest simplex id on ties) until none is left. Returns (chain, moves).
    """
    current, current_energy, moves = sigma, energy(sigma), 0
    while True:
        best_move, best_delta = None, 0
        for t in enumerate_transitions(complex_, current):
            proposal = jump(complex_, current, t.tau, t.sign)
            delta = energy(proposal) - current_energy
            if delta < best_delta:
                best_move, best_delta = proposal, delta
        if best_move is None:
            return current, moves
        current, current_energy = best_move, current_energy + best_delta
        moves += 1


def anneal(
    complex_: SimplicialComplex,
    seed: Chain,
    schedule: Optional[AnnealSchedule] = None,
    rng: Optional[np.random.Generator] = None,
    record_trace: bool = True,
) -> AnnealResult:
    """
    Simulated annealing over walk transitions starting from ``seed``.

    At step m a transition is proposed with probability proportional to its
    rate; it is accepted when the energy does not increase, otherwise with
    probability exp(-dU / T_{m+1}). An empty proposal set is a stalled step:
    nothing moves but the temperature still decreases. Once cooling stops,
    the lowest-energy state visited is quenched and returned as ``final``.
    """
    schedule = schedule or AnnealSchedule()
    rng = rng or make_rng(resolve_seed(None))
    if seed.dim != 1 or not seed.is_integer():
        raise ValueError("シードは整数係数の1-チェインである必要があります")

    current = seed
    current_energy = energy(seed)
    t0 = schedule.t0 if schedule.t0 is not None else float(current_energy)
    if t0 <= 0:
        raise ValueError("初期温度が0です（シードがゼロチェインです）")
    result = AnnealResult(seed=seed, final=seed, best=seed)
    best_energy = current_energy

    m = 0
    while m < schedule.max_steps:
        temperature = schedule.temperature(t0, m + 1)
        if temperature < schedule.t_min:
            break
        m += 1
        transitions = enumerate_transitions(complex_, current)
        accepted = False
        if not transitions:
            result.stalls += 1
        else:
            _, index = draw_transition(np.array([t.rate for t in transitions]), rng)
            chosen = transitions[index]
            proposal = jump(complex_, current, chosen.tau, chosen.sign)
            delta = energy(proposal) - current_energy
            if delta <= 0 or open_uniform(rng) < math.exp(-delta / temperature):
                current, current_energy = proposal, current_energy + delta
                accepted = True
                result.accepted += 1
                if current_energy < best_energy:
                    result.best, best_energy = current, current_energy
            else:
                result.rejected += 1
        if record_trace:
            result.energies.append(current_energy)
            result.temperatures.append(temperature)
            result.accepted_flags.append(accepted)

    result.last = current
    result.final, result.quench_moves = quench(complex_, result.best)
    logger.info(
        f"🔥 焼きなまし完了: steps={m}, U={energy(seed)}→{current_energy}（最良 {best_energy}, "
        f"急冷後 {result.final_energy}）, 採択={result.accepted}, 棄却={result.rejected}, 停滞={result.stalls}"
    )
    return result


def cutoff(sigma: Chain, threshold: float = 0.5) -> Chain:
    """Keep coefficients with |lambda_e| >= threshold * max |lambda|"""
    if not 0 <= threshold <= 1:
        raise ValueError("cutoff は0-1の範囲である必要があります")
    if sigma.is_zero():
        return sigma
    limit = threshold * sigma.max_abs()
    return Chain(sigma.dim, {i: v for i, v in sigma.items() if abs(v) >= limit})


@dataclass
class HoleReport:
    class_index: int
    anneal: AnnealResult
    retained: Chain

    def to_dict(self) -> Dict:
        return {
            "class_index": self.class_index,
            "seed_energy": energy(self.anneal.seed),
            "final_energy": self.anneal.final_energy,
            "best_energy": self.anneal.best_energy,
            "last_energy": self.anneal.last_energy,
            "accepted": self.anneal.accepted,
            "rejected": self.anneal.rejected,
            "stalls": self.anneal.stalls,
            "edges": [[edge_id, value] for edge_id, value in self.retained.items()],
        }


def localize(
    complex_: SimplicialComplex,
    params: Optional[dict] = None,
    seed: Optional[int] = None,
    threads: int = 1,
    progress_callback: Optional[Callable[[int, str], None]] = None,
) -> List[HoleReport]:
    """
    One annealing run per homology generator, then the cut-off.

    Run i uses the RNG stream seed XOR i. Returns an empty list when the
    complex has no 1-dimensional holes.
    """
    validated = validate_anneal_params(params or {})
    schedule = AnnealSchedule.from_params(validated)
    seed = resolve_seed(seed)
    generators = homology_generators(complex_, 1)
    if not generators:
        logger.warning("⚠️ β_1 = 0: 穴が見つかりません (no holes)")
        return []

    def run(index: int) -> HoleReport:
        result = anneal(complex_, generators[index], schedule, make_rng(seed, index))
        if not is_boundary(complex_, result.final - generators[index]):
            raise CycleWalkError("焼きなまし後のチェインがホモロジー類を保っていません")
        return HoleReport(index, result, cutoff(result.final, validated["cutoff"]))

    reports: List[Optional[HoleReport]] = [None] * len(generators)
    if threads <= 1:
        for index in range(len(generators)):
            reports[index] = run(index)
            if progress_callback:
                progress_callback(int(100 * (index + 1) / len(generators)), f"穴 {index + 1}/{len(generators)}")
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for done, report in enumerate(pool.map(run, range(len(generators))), start=1):
                reports[report.class_index] = report
                if progress_callback:
                    progress_callback(int(100 * done / len(generators)), f"穴 {done}/{len(generators)}")
    logger.info(f"🕳️ {len(reports)} 個の穴を局在化しました")
    return reports


def shortest_essential_cycle_length(
    complex_: SimplicialComplex, hole_center: Sequence[float]
) -> int:
    """
    Length of the shortest edge cycle winding an odd number of times around
    ``hole_center`` in a planar complex.

    Breadth-first distances on the double cover whose sheet flips whenever
    an edge crosses the horizontal ray from the center to +x.
    """
    if complex_.coordinates is None:
        raise ValueError("座標を持たない複体では巻き数を判定できません")
    cx, cy = float(hole_center[0]), float(hole_center[1])
    n = complex_.n_vertices
    rows, cols = [], []
    for a, b in complex_.simplices(1):
        pa, pb = complex_.coordinates[a], complex_.coordinates[b]
        crosses = False
        if (pa[1] >= cy) != (pb[1] >= cy):
            x_cross = pa[0] + (cy - pa[1]) * (pb[0] - pa[0]) / (pb[1] - pa[1])
            crosses = x_cross > cx
        flip = n if crosses else 0
        for u, v in ((a, b), (b, a)):
            for sheet in (0, n):
                rows.append(u + sheet)
                cols.append((v + sheet + flip) % (2 * n))
    graph = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 * n, 2 * n))
    distances = shortest_path(graph, method="D", unweighted=True, indices=list(range(n)))
    lengths = [distances[v, v + n] for v in range(n)]
    best = min(lengths)
    if not np.isfinite(best):
        raise NoHolesError("no holes: 中心を囲むサイクルがありません")
    return int(best)
