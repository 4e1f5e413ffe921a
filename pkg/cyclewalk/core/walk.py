"""
Cycle-Valued Random Walk

Continuous-time Markov chain on integer k-chains. From a state sigma the
walk may subtract the boundary of any oriented (k+1)-simplex tau, at rate
w(sigma, d tau) = <d tau, sigma>^+. Boundaries are subtracted exactly, so a
cycle stays a cycle in the same homology class.

Simulation is a direct Gillespie scheme: exponential waiting time with the
total rate, then a transition drawn proportionally to its rate. Per
trajectory a counter-based Philox stream is derived from seed XOR index.
"""

import hashlib
import json
import logging
import math
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp

from ..config import validate_walk_params
from .chains import Chain, boundary, coboundary, inner, lower_degree, pairing, theta
from .complex import SimplicialComplex
from .exceptions import AbsorbedError, ComplexError, CycleWalkError, ResourceLimitError
from .spectral import boundary_matrix, project_onto_image, spectrum, up_laplacian

logger = logging.getLogger(__name__)

_UINT64_MASK = (1 << 64) - 1
_OPEN_UNIFORM_SCALE = 2.0 ** -53


# ------------------------------------------------------------------ types

@dataclass
class WalkConfig:
    """Seed, horizon (model time and/or jumps) and recording mode of a run"""

    seed: int = 0
    horizon: Optional[float] = 1.0
    max_jumps: Optional[int] = None
    record_mode: str = "full"

    @classmethod
    def from_params(cls, params: Optional[dict] = None) -> "WalkConfig":
        validated = validate_walk_params(params or {})
        return cls(
            seed=validated["seed"],
            horizon=validated["horizon"],
            max_jumps=validated["max_jumps"],
            record_mode=validated["record_mode"],
        )


@dataclass
class WalkState:
    chain: Chain
    clock: float = 0.0


@dataclass(frozen=True)
class Transition:
    """Jump sigma -> sigma - sign * d tau"""

    tau: int
    sign: int
    rate: int


@dataclass
class WalkEvent:
    time: float
    tau: int
    sign: int
    state_hash: str
    chain: Optional[Chain] = None

    def to_json(self, trajectory: Optional[int] = None) -> str:
        record = {"t": self.time, "tau": self.tau, "sign": self.sign}
        if trajectory is not None:
            record["trajectory"] = trajectory
        return json.dumps(record)


@dataclass
class Trajectory:
    """
    Jump events plus occupation tallies of one simulated run.

    ``occupation[i]`` integrates |x_i(t)| over time; ``state_time`` and
    ``state_visits`` tabulate time spent in and jumps into every state
    (keyed by state hash, see ``states``).
    """

    dim: int
    start: Chain
    final: WalkState
    events: List[WalkEvent] = field(default_factory=list)
    n_jumps: int = 0
    absorbed: bool = False
    occupation: Dict[int, float] = field(default_factory=dict)
    state_time: Dict[str, float] = field(default_factory=dict)
    state_visits: Counter = field(default_factory=Counter)
    states: Dict[str, Chain] = field(default_factory=dict)
    seed: int = 0
    stream: int = 0

    @property
    def duration(self) -> float:
        return self.final.clock

    def to_dataframe(self) -> pd.DataFrame:
        """One row per jump event"""
        rows = []
        for event in self.events:
            row = {
                "time": event.time,
                "tau": event.tau,
                "sign": event.sign,
                "state_hash": event.state_hash,
            }
            if event.chain is not None:
                row["support_size"] = len(event.chain)
                row["norm_sq"] = event.chain.norm_sq()
            rows.append(row)
        return pd.DataFrame(rows, columns=["time", "tau", "sign", "state_hash", "support_size", "norm_sq"])

    def to_jsonl(self, trajectory: Optional[int] = None) -> str:
        """Line-delimited JSON replay log, each record tagged with ``trajectory`` when given"""
        return "".join(event.to_json(trajectory) + "\n" for event in self.events)

    def summary(self) -> Dict:
        return {
            "dim": self.dim,
            "seed": self.seed,
            "stream": self.stream,
            "n_jumps": self.n_jumps,
            "duration": self.duration,
            "absorbed": self.absorbed,
            "final_chain": [[i, v] for i, v in self.final.chain.items()],
            "occupation": {str(i): v for i, v in sorted(self.occupation.items())},
            "n_states": len(self.states),
        }


# ------------------------------------------------------------------ primitives

def state_hash(chain: Chain) -> str:
    """128-bit hash of the canonical (id, coefficient) sequence"""
    text = ";".join(f"{i}:{v}" for i, v in chain.items())
    return hashlib.blake2b(f"{chain.dim}|{text}".encode(), digest_size=16).hexdigest()


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by seed XOR stream index"""
    return np.random.Generator(np.random.Philox(key=(int(seed) ^ int(stream)) & _UINT64_MASK))


def open_uniform(rng: np.random.Generator) -> float:
    """Uniform draw on the open interval (0, 1)"""
    return (float(rng.integers(0, 1 << 53)) + 0.5) * _OPEN_UNIFORM_SCALE


def _check_chain(complex_: SimplicialComplex, sigma: Chain):
    if not sigma.is_integer():
        raise ComplexError("ランダムウォークの状態は整数係数のチェインである必要があります")
    if not 0 <= sigma.dim < complex_.max_dim + 1:
        raise ComplexError(f"次元 {sigma.dim} は複体の次元 {complex_.max_dim} と整合しません")
    count = complex_.n_simplices(sigma.dim)
    for simplex_id in sigma.support():
        if not 0 <= simplex_id < count:
            raise ComplexError(f"{sigma.dim}-単体ID {simplex_id} は複体に存在しません（{count}個）")


def _adjacent_cofaces(complex_: SimplicialComplex, dim: int, simplex_ids: Iterable[int]) -> set:
    touched = set()
    for simplex_id in simplex_ids:
        for tau_id, _ in complex_.cofaces(dim, simplex_id):
            touched.add(tau_id)
    return touched


def enumerate_transitions(complex_: SimplicialComplex, sigma: Chain) -> List[Transition]:
    """
    Every oriented (k+1)-simplex with positive weight, sorted by (id, sign).

    The null chain has no transitions (absorbing).
    """
    transitions = []
    for tau_id in sorted(_adjacent_cofaces(complex_, sigma.dim, sigma.support())):
        p = pairing(complex_, sigma, tau_id)
        if p > 0:
            transitions.append(Transition(tau_id, 1, p))
        elif p < 0:
            transitions.append(Transition(tau_id, -1, -p))
    return transitions


def rate_bound(sigma: Chain) -> float:
    """Cauchy-Schwarz bound sqrt(k+2) * ||sigma|| on every transition rate"""
    return math.sqrt(sigma.dim + 2) * math.sqrt(sigma.norm_sq())


def jump(complex_: SimplicialComplex, sigma: Chain, tau_id: int, sign: int) -> Chain:
    d_tau = boundary(complex_, Chain(sigma.dim + 1, {tau_id: sign}))
    return sigma - d_tau


def draw_transition(rates: np.ndarray, rng: np.random.Generator) -> Tuple[float, int]:
    """(waiting time, index) of a Gillespie step"""
    cumulative = np.cumsum(rates, dtype=float)
    total = cumulative[-1]
    wait = -math.log(open_uniform(rng)) / total
    index = int(np.searchsorted(cumulative, open_uniform(rng) * total, side="right"))
    return wait, min(index, len(rates) - 1)


def step(complex_: SimplicialComplex, state: WalkState, rng: np.random.Generator) -> Tuple[WalkState, WalkEvent]:
    """One Gillespie jump from ``state``; raises AbsorbedError from the null chain"""
    transitions = enumerate_transitions(complex_, state.chain)
    if not transitions:
        raise AbsorbedError("ヌルチェインに吸収されました（遷移がありません）")
    wait, index = draw_transition(np.array([t.rate for t in transitions]), rng)
    chosen = transitions[index]
    chain = jump(complex_, state.chain, chosen.tau, chosen.sign)
    clock = state.clock + wait
    return WalkState(chain, clock), WalkEvent(clock, chosen.tau, chosen.sign, state_hash(chain), chain)


# ------------------------------------------------------------------ simulation

class _Walker:
    """Mutable walk state with an incrementally maintained pairing cache"""

    def __init__(self, complex_: SimplicialComplex, start: Chain):
        self.complex = complex_
        self.dim = start.dim
        self.coeffs: Dict[int, int] = dict(start.items())
        self.pairings: Dict[int, int] = {}
        for tau_id in _adjacent_cofaces(complex_, self.dim, self.coeffs):
            self._refresh(tau_id)

    def _refresh(self, tau_id: int):
        value = sum(sign * self.coeffs.get(face_id, 0) for face_id, sign in self.complex.faces(self.dim + 1, tau_id))
        if value:
            self.pairings[tau_id] = value
        else:
            self.pairings.pop(tau_id, None)

    def transitions(self) -> Tuple[List[int], np.ndarray]:
        ids = sorted(self.pairings)
        return ids, np.array([abs(self.pairings[i]) for i in ids], dtype=np.int64)

    def apply(self, tau_id: int, sign: int):
        faces = self.complex.faces(self.dim + 1, tau_id)
        for face_id, incidence in faces:
            new = self.coeffs.get(face_id, 0) - sign * incidence
            if new:
                self.coeffs[face_id] = new
            else:
                self.coeffs.pop(face_id, None)
        for neighbour in _adjacent_cofaces(self.complex, self.dim, [face_id for face_id, _ in faces]):
            self._refresh(neighbour)

    def chain(self) -> Chain:
        return Chain(self.dim, self.coeffs)


class _StateTable:
    """State-hash bookkeeping with full comparison on reuse"""

    def __init__(self, trajectory: Trajectory):
        self.trajectory = trajectory

    def register(self, chain: Chain) -> str:
        key = state_hash(chain)
        known = self.trajectory.states.get(key)
        if known is None:
            self.trajectory.states[key] = chain
        elif known != chain:
            raise CycleWalkError(f"状態ハッシュの衝突を検出しました: {key}")
        return key


def simulate(
    complex_: SimplicialComplex,
    start: Chain,
    config: Optional[WalkConfig] = None,
    stream: int = 0,
    observer: Optional[Callable[[Chain, WalkEvent], None]] = None,
) -> Trajectory:
    """
    Run the walk from ``start`` until the horizon, the jump limit or absorption.

    Args:
        complex_: the simplicial complex (shared read-only).
        start: integer k-chain.
        config: seed, horizon and recording mode.
        stream: trajectory index; the RNG key is seed XOR stream.
        observer: called with (new state, event) after every jump.
    """
    config = config or WalkConfig()
    _check_chain(complex_, start)
    rng = make_rng(config.seed, stream)
    walker = _Walker(complex_, start)
    trajectory = Trajectory(
        dim=start.dim, start=start, final=WalkState(start, 0.0), seed=config.seed, stream=stream
    )
    table = _StateTable(trajectory)
    keep_chains = config.record_mode == "full"

    clock = 0.0
    current = start
    current_key = table.register(current)
    trajectory.state_visits[current_key] += 1

    def occupy(duration: float):
        if duration <= 0:
            return
        for simplex_id, value in walker.coeffs.items():
            trajectory.occupation[simplex_id] = trajectory.occupation.get(simplex_id, 0.0) + duration * abs(value)
        trajectory.state_time[current_key] = trajectory.state_time.get(current_key, 0.0) + duration

    while config.max_jumps is None or trajectory.n_jumps < config.max_jumps:
        ids, rates = walker.transitions()
        if not len(ids):
            trajectory.absorbed = True
            if config.horizon is not None:
                occupy(config.horizon - clock)
                clock = config.horizon
            break
        wait, index = draw_transition(rates, rng)
        if config.horizon is not None and clock + wait > config.horizon:
            occupy(config.horizon - clock)
            clock = config.horizon
            break
        occupy(wait)
        clock += wait
        tau_id = ids[index]
        sign = 1 if walker.pairings[tau_id] > 0 else -1
        walker.apply(tau_id, sign)
        current = walker.chain()
        current_key = table.register(current)
        trajectory.state_visits[current_key] += 1
        trajectory.n_jumps += 1
        event = WalkEvent(clock, tau_id, sign, current_key, current if keep_chains else None)
        if keep_chains:
            trajectory.events.append(event)
        if observer is not None:
            observer(current, event)

    trajectory.final = WalkState(current, clock)
    logger.debug(
        f"walk stream={stream}: jumps={trajectory.n_jumps}, t={clock:.4g}, absorbed={trajectory.absorbed}"
    )
    return trajectory


def simulate_many(
    complex_: SimplicialComplex,
    start: Chain,
    config: Optional[WalkConfig] = None,
    n_trajectories: int = 1,
    threads: int = 1,
    progress_callback: Optional[Callable[[int, str], None]] = None,
) -> List[Trajectory]:
    """Independent trajectories on streams 0..n-1, optionally in a thread pool"""
    config = config or WalkConfig()
    if n_trajectories < 1:
        raise ValueError("n_trajectories は1以上である必要があります")
    results: List[Optional[Trajectory]] = [None] * n_trajectories

    def run(stream: int) -> Trajectory:
        return simulate(complex_, start, config, stream=stream)

    if threads <= 1:
        for stream in range(n_trajectories):
            results[stream] = run(stream)
            if progress_callback:
                progress_callback(int(100 * (stream + 1) / n_trajectories), f"軌道 {stream + 1}/{n_trajectories}")
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for done, (stream, trajectory) in enumerate(
                zip(range(n_trajectories), pool.map(run, range(n_trajectories))), start=1
            ):
                results[stream] = trajectory
                if progress_callback:
                    progress_callback(int(100 * done / n_trajectories), f"軌道 {done}/{n_trajectories}")
    logger.info(f"🎲 {n_trajectories} 本の軌道をシミュレーションしました（threads={threads}）")
    return results


def replay(
    complex_: SimplicialComplex, start: Chain, log_text: str, trajectory: Optional[int] = None
) -> List[Chain]:
    """
    States reconstructed from a JSON-lines log; each jump must have positive weight.

    With ``trajectory`` only the records tagged with that index are replayed.
    """
    states = [start]
    current = start
    last_time = 0.0
    first = True
    for line_no, line in enumerate(log_text.splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        if trajectory is not None and record.get("trajectory") != trajectory:
            continue
        if record["t"] <= last_time and not first:
            raise CycleWalkError(f"{line_no}行目: 時刻が単調増加していません")
        if pairing(complex_, current, record["tau"]) * record["sign"] <= 0:
            raise CycleWalkError(f"{line_no}行目: 重みゼロの遷移です (tau={record['tau']})")
        last_time = record["t"]
        first = False
        current = jump(complex_, current, record["tau"], record["sign"])
        states.append(current)
    return states


# ------------------------------------------------------------------ generator

def apply_generator(complex_: SimplicialComplex, func: Callable[[Chain], float], sigma: Chain) -> float:
    """Sum over transitions of (F(sigma - d tau) - F(sigma)) * w(sigma, d tau)"""
    base = func(sigma)
    total = 0
    for transition in enumerate_transitions(complex_, sigma):
        total += (func(jump(complex_, sigma, transition.tau, transition.sign)) - base) * transition.rate
    return total


def up_laplacian_apply(complex_: SimplicialComplex, zeta: Chain) -> Chain:
    """L_k^up zeta = d d* zeta in exact arithmetic"""
    if zeta.dim >= complex_.max_dim:
        return Chain(zeta.dim)
    return boundary(complex_, coboundary(complex_, zeta))


def linear_generator_identity(complex_: SimplicialComplex, zeta: Chain, sigma: Chain) -> Tuple[float, float]:
    """(A<., zeta>(sigma), -<L^up zeta, sigma>); equal whenever d zeta = 0"""
    lhs = apply_generator(complex_, lambda chain: inner(chain, zeta), sigma)
    rhs = -inner(up_laplacian_apply(complex_, zeta), sigma)
    return lhs, rhs


def norm_sq_generator(complex_: SimplicialComplex, sigma: Chain) -> float:
    """Closed form of A||.||^2: -2<L^up sigma, sigma> + (k+2) sum_tau |<d tau, sigma>|"""
    k = sigma.dim
    energy = 0
    total = 0
    for tau_id in _adjacent_cofaces(complex_, k, sigma.support()):
        p = pairing(complex_, sigma, tau_id)
        energy += p * p
        total += abs(p)
    return -2 * energy + (k + 2) * total


def theta_generator_check(complex_: SimplicialComplex, sigma: Chain, simplex_id: int, sign: int = 1) -> Tuple[float, float]:
    """(A Theta_tau(sigma), -<L^up e_tau, sigma>) for the oriented k-simplex sign*tau"""
    lhs = apply_generator(complex_, lambda chain: theta(chain, simplex_id, sign), sigma)
    rhs = -inner(up_laplacian_apply(complex_, Chain(sigma.dim, {simplex_id: sign})), sigma)
    return lhs, rhs


@dataclass
class DriftConstants:
    """Spectral constants of the drift inequality for L_k^up"""

    lambda_min: float
    lambda_max: float
    n_cofaces: int
    kernel_norm_sq: float
    dim: int

    @property
    def offset(self) -> float:
        if self.n_cofaces == 0:
            return 0.0
        return (
            (self.dim + 2) ** 2 * self.n_cofaces * self.lambda_max / (4.0 * self.lambda_min)
            + 2.0 * self.lambda_min * self.kernel_norm_sq
        )


def drift_constants(complex_: SimplicialComplex, x0: Chain) -> DriftConstants:
    k = x0.dim
    n_cofaces = complex_.n_simplices(k + 1)
    if n_cofaces == 0:
        return DriftConstants(0.0, 0.0, 0, float(x0.norm_sq()), k)
    eig = spectrum(up_laplacian(complex_, k, dtype=float))
    positive = eig.positive()
    y = x0.to_dense(complex_.n_simplices(k))
    kernel_part = y - project_onto_image(boundary_matrix(complex_, k + 1, dtype=float), y)
    return DriftConstants(
        lambda_min=float(positive[0]),
        lambda_max=eig.lambda_max,
        n_cofaces=n_cofaces,
        kernel_norm_sq=float(kernel_part @ kernel_part),
        dim=k,
    )


def lyapunov_drift_check(
    complex_: SimplicialComplex,
    sigma: Chain,
    x0: Optional[Chain] = None,
    constants: Optional[DriftConstants] = None,
) -> Tuple[float, float]:
    """
    (A||.||^2(sigma), -lambda_m ||sigma||^2 + (k+2)^2 |S_{k+1}| lambda_M / (4 lambda_m) + 2 lambda_m ||P_ker X0||^2).

    ``x0`` defaults to sigma; the kernel component of L_k^up is constant
    along a trajectory so any state of the same run gives the same bound.
    """
    constants = constants or drift_constants(complex_, x0 if x0 is not None else sigma)
    lhs = norm_sq_generator(complex_, sigma)
    bound = -constants.lambda_min * float(sigma.norm_sq()) + constants.offset
    return float(lhs), bound


def moment_bound(t: float, initial_norm_sq: float, constants: DriftConstants) -> float:
    """Gronwall bound on E||X_t||^2 from the drift inequality"""
    if t < 0:
        raise ValueError("時刻 t は0以上である必要があります")
    if constants.n_cofaces == 0:
        return initial_norm_sq
    decay = math.exp(-constants.lambda_min * t)
    return initial_norm_sq * decay + constants.offset / constants.lambda_min * (1.0 - decay)


# ------------------------------------------------------------------ confinement

@dataclass
class ConfinementReport:
    holds: bool
    violations: List[Tuple[int, int, int]] = field(default_factory=list)  # (tau, deg_down, |pairing|)


def check_confinement(complex_: SimplicialComplex, sigma: Chain) -> ConfinementReport:
    """Test deg_down(tau) <= k+2 - |<d tau, sigma>| for every (k+1)-simplex tau"""
    k = sigma.dim
    violations = []
    for tau_id in range(complex_.n_simplices(k + 1)):
        degree = lower_degree(complex_, k + 1, tau_id)
        p = abs(pairing(complex_, sigma, tau_id))
        if degree > k + 2 - p:
            violations.append((tau_id, degree, p))
    return ConfinementReport(holds=not violations, violations=violations)


class ConfinementMonitor:
    """
    Observer tracking X_t = X_0 - sum_tau lambda_tau d tau along a trajectory.

    Records every jump after which some lambda_tau or chain coefficient
    leaves {-1, 0, 1}.
    """

    def __init__(self):
        self.multiplicities: Dict[int, int] = {}
        self.max_multiplicity = 0
        self.max_coefficient = 0
        self.violations = 0

    def __call__(self, chain: Chain, event: WalkEvent):
        value = self.multiplicities.get(event.tau, 0) + event.sign
        if value:
            self.multiplicities[event.tau] = value
        else:
            self.multiplicities.pop(event.tau, None)
        self.max_multiplicity = max(self.max_multiplicity, abs(value))
        self.max_coefficient = max(self.max_coefficient, chain.max_abs())
        if abs(value) > 1 or chain.max_abs() > 1:
            self.violations += 1

    @property
    def confined(self) -> bool:
        return self.violations == 0


# ------------------------------------------------------------------ invariant measure

@dataclass
class InvariantEstimate:
    """
    Empirical invariant measure pooled over trajectories.

    ``occupation``: time average of |x_i| per k-simplex.
    ``time_frequencies``: fraction of time spent in each state.
    ``visit_frequencies``: fraction of jumps landing in each state (jump chain).
    """

    occupation: Dict[int, float]
    time_frequencies: Dict[str, float]
    visit_frequencies: Dict[str, float]
    states: Dict[str, Chain]

    def occupation_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            sorted(self.occupation.items()), columns=["simplex_id", "occupation"]
        )
        return frame.sort_values("occupation", ascending=False, kind="mergesort").reset_index(drop=True)


def empirical_invariant(trajectories: List[Trajectory]) -> InvariantEstimate:
    if not trajectories:
        raise ValueError("軌道が1本もありません")
    total_time = sum(t.duration for t in trajectories)
    occupation: Dict[int, float] = {}
    time_acc: Dict[str, float] = {}
    visits: Counter = Counter()
    states: Dict[str, Chain] = {}
    for trajectory in trajectories:
        for simplex_id, value in trajectory.occupation.items():
            occupation[simplex_id] = occupation.get(simplex_id, 0.0) + value
        for key, value in trajectory.state_time.items():
            time_acc[key] = time_acc.get(key, 0.0) + value
        visits.update(trajectory.state_visits)
        for key, chain in trajectory.states.items():
            known = states.setdefault(key, chain)
            if known != chain:
                raise CycleWalkError(f"状態ハッシュの衝突を検出しました: {key}")
    n_visits = sum(visits.values())
    return InvariantEstimate(
        occupation={i: v / total_time for i, v in occupation.items()} if total_time > 0 else occupation,
        time_frequencies={k: v / total_time for k, v in time_acc.items()} if total_time > 0 else {},
        visit_frequencies={k: v / n_visits for k, v in visits.items()},
        states=states,
    )


def enumerate_state_space(complex_: SimplicialComplex, start: Chain, limit: int = 100_000) -> List[Chain]:
    """Breadth-first enumeration of every state reachable from ``start``"""
    _check_chain(complex_, start)
    seen = {start: 0}
    order = [start]
    queue = deque([start])
    while queue:
        sigma = queue.popleft()
        for transition in enumerate_transitions(complex_, sigma):
            target = jump(complex_, sigma, transition.tau, transition.sign)
            if target not in seen:
                if len(order) >= limit:
                    raise ResourceLimitError(f"状態数が上限 {limit:,} を超えました（有限状態ではない可能性があります）")
                seen[target] = len(order)
                order.append(target)
                queue.append(target)
    logger.info(f"📊 到達可能な状態を {len(order)} 個列挙しました")
    return order


@dataclass
class StationaryDistribution:
    states: List[Chain]
    time: np.ndarray      # pi with pi Q = 0
    jump: np.ndarray      # embedded jump chain: proportional to pi_i q_i

    def as_dict(self, which: str = "time") -> Dict[str, float]:
        values = self.time if which == "time" else self.jump
        return {state_hash(s): float(p) for s, p in zip(self.states, values)}


def generator_matrix(complex_: SimplicialComplex, states: List[Chain]) -> sp.csr_matrix:
    index = {s: i for i, s in enumerate(states)}
    rows, cols, data = [], [], []
    for i, sigma in enumerate(states):
        out = 0
        for transition in enumerate_transitions(complex_, sigma):
            target = jump(complex_, sigma, transition.tau, transition.sign)
            if target not in index:
                raise ComplexError("状態集合が遷移について閉じていません")
            rows.append(i)
            cols.append(index[target])
            data.append(float(transition.rate))
            out += transition.rate
        rows.append(i)
        cols.append(i)
        data.append(-float(out))
    n = len(states)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def exact_stationary(complex_: SimplicialComplex, states: List[Chain]) -> StationaryDistribution:
    """Solve pi Q = 0, sum pi = 1 on an enumerated closed state space"""
    q = generator_matrix(complex_, states).toarray()
    n = len(states)
    system = np.vstack([q.T, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    exit_rates = -np.diag(q)
    jump_weights = pi * exit_rates
    jump_dist = jump_weights / jump_weights.sum() if jump_weights.sum() > 0 else pi.copy()
    return StationaryDistribution(states=states, time=pi, jump=jump_dist)


def total_variation(p: Dict[str, float], q: Dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(key, 0.0) - q.get(key, 0.0)) for key in keys)
