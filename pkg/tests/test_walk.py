import json
import math

import numpy as np
import pytest

from cyclewalk.core.chains import Chain, boundary, chain_from_simplices, elementary, inner, is_cycle
from cyclewalk.core.complex import build_perforated_torus, perforation_triangle
from cyclewalk.core.exceptions import AbsorbedError, CycleWalkError, ResourceLimitError
from cyclewalk.core.spectral import is_boundary
from cyclewalk.core.walk import (
    ConfinementMonitor,
    Transition,
    WalkConfig,
    WalkState,
    apply_generator,
    check_confinement,
    drift_constants,
    empirical_invariant,
    enumerate_state_space,
    enumerate_transitions,
    exact_stationary,
    generator_matrix,
    jump,
    linear_generator_identity,
    lyapunov_drift_check,
    make_rng,
    moment_bound,
    norm_sq_generator,
    open_uniform,
    rate_bound,
    replay,
    simulate,
    simulate_many,
    state_hash,
    step,
    theta_generator_check,
    total_variation,
)

from .conftest import polygon_cycle, random_cycle, triangle_boundary


def test_single_triangle_boundary_has_one_transition(filled_triangle):
    d_tau = triangle_boundary(filled_triangle, 0)
    (transition,) = enumerate_transitions(filled_triangle, d_tau)
    assert transition == Transition(tau=0, sign=1, rate=3)
    assert jump(filled_triangle, d_tau, transition.tau, transition.sign).is_zero()


def test_null_chain_has_no_transitions(filled_triangle):
    assert enumerate_transitions(filled_triangle, Chain(1)) == []


def test_two_consecutive_edges_jump_to_the_chord(filled_triangle):
    sigma = chain_from_simplices(filled_triangle, [((0, 1), 1), ((1, 2), 1)])
    (transition,) = enumerate_transitions(filled_triangle, sigma)
    assert transition.rate == 2
    assert jump(filled_triangle, sigma, transition.tau, transition.sign) == elementary(filled_triangle, (0, 2))


def test_opposed_edges_are_never_moved(filled_triangle):
    sigma = chain_from_simplices(filled_triangle, [((0, 1), 1), ((1, 2), -1)])
    assert enumerate_transitions(filled_triangle, sigma) == []


def test_negative_pairing_uses_the_reversed_triangle(filled_triangle):
    sigma = -triangle_boundary(filled_triangle, 0)
    (transition,) = enumerate_transitions(filled_triangle, sigma)
    assert transition.sign == -1 and transition.rate == 3
    assert jump(filled_triangle, sigma, 0, -1).is_zero()


def test_rates_respect_the_cauchy_schwarz_bound(torus4):
    rng = np.random.default_rng(4)
    for _ in range(50):
        ids = rng.choice(48, size=8, replace=False)
        sigma = Chain(1, {int(i): int(rng.integers(-4, 5)) for i in ids})
        for transition in enumerate_transitions(torus4, sigma):
            assert transition.rate <= rate_bound(sigma) + 1e-12


def test_rate_bound_is_attained_by_a_triangle_boundary(filled_triangle):
    d_tau = triangle_boundary(filled_triangle, 0)
    (transition,) = enumerate_transitions(filled_triangle, d_tau)
    assert transition.rate == pytest.approx(rate_bound(d_tau))
    # one face fewer under the root would not bound it
    assert transition.rate > math.sqrt(2) * math.sqrt(d_tau.norm_sq())


def test_transitions_are_sorted_by_simplex(torus4, torus4_cycles):
    taus = [t.tau for t in enumerate_transitions(torus4, torus4_cycles[0])]
    assert taus == sorted(taus)
    assert len(taus) == 8


def test_step_from_a_triangle_boundary(filled_triangle):
    d_tau = triangle_boundary(filled_triangle, 0)
    state, event = step(filled_triangle, WalkState(d_tau), make_rng(1))
    assert state.chain.is_zero()
    assert state.clock > 0
    assert event.tau == 0 and event.sign == 1
    with pytest.raises(AbsorbedError):
        step(filled_triangle, state, make_rng(1))


def test_simulation_from_a_boundary_is_absorbed(filled_triangle):
    trajectory = simulate(filled_triangle, triangle_boundary(filled_triangle, 0), WalkConfig(seed=3, horizon=10.0))
    assert trajectory.absorbed
    assert trajectory.n_jumps == 1
    assert trajectory.final.chain.is_zero()
    assert trajectory.duration == 10.0


def test_same_seed_gives_identical_runs(torus4, torus4_cycles):
    config = WalkConfig(seed=42, horizon=3.0)
    first = simulate(torus4, torus4_cycles[0], config)
    second = simulate(torus4, torus4_cycles[0], config)
    assert first.n_jumps > 0
    assert first.to_jsonl() == second.to_jsonl()
    other = simulate(torus4, torus4_cycles[0], config, stream=1)
    assert other.to_jsonl() != first.to_jsonl()


def test_threads_do_not_change_results(torus4, torus4_cycles):
    config = WalkConfig(seed=9, horizon=1.0)
    serial = simulate_many(torus4, torus4_cycles[0], config, n_trajectories=4, threads=1)
    parallel = simulate_many(torus4, torus4_cycles[0], config, n_trajectories=4, threads=3)
    assert [t.to_jsonl() for t in serial] == [t.to_jsonl() for t in parallel]
    assert [t.stream for t in parallel] == [0, 1, 2, 3]


def test_progress_callback_reports_percentages(torus4, torus4_cycles):
    seen = []
    simulate_many(
        torus4, torus4_cycles[0], WalkConfig(horizon=0.1), n_trajectories=2,
        progress_callback=lambda percent, message: seen.append(percent),
    )
    assert seen == [50, 100]


@pytest.mark.slow
def test_hole_cycle_walk_is_never_absorbed(annulus, annulus_hole):
    monitor = ConfinementMonitor()
    cycles_ok = []

    def observer(chain, event):
        monitor(chain, event)
        cycles_ok.append(is_cycle(annulus, chain) and not chain.is_zero())

    trajectory = simulate(
        annulus, annulus_hole, WalkConfig(seed=5, horizon=None, max_jumps=100_000, record_mode="summary"),
        observer=observer,
    )
    assert trajectory.n_jumps == 100_000
    assert not trajectory.absorbed
    assert all(cycles_ok)
    assert monitor.confined
    assert monitor.max_coefficient <= 1


def test_torus_walk_stays_in_its_homology_class(torus4, torus4_cycles):
    sigma1 = torus4_cycles[0]
    trajectory = simulate(torus4, sigma1, WalkConfig(seed=8, horizon=5.0))
    events = trajectory.events
    assert events
    picks = np.linspace(0, len(events) - 1, num=min(100, len(events))).astype(int)
    for index in picks:
        chain = events[index].chain
        assert is_cycle(torus4, chain)
        assert is_boundary(torus4, chain - sigma1)


def test_summary_mode_keeps_no_events(torus4, torus4_cycles):
    trajectory = simulate(torus4, torus4_cycles[0], WalkConfig(seed=1, horizon=2.0, record_mode="summary"))
    assert trajectory.events == []
    assert trajectory.n_jumps > 0
    assert trajectory.summary()["n_jumps"] == trajectory.n_jumps


def test_replay_reconstructs_the_final_state(torus4, torus4_cycles):
    trajectory = simulate(torus4, torus4_cycles[1], WalkConfig(seed=12, horizon=2.0))
    states = replay(torus4, torus4_cycles[1], trajectory.to_jsonl())
    assert len(states) == trajectory.n_jumps + 1
    assert states[-1] == trajectory.final.chain
    assert [state_hash(s) for s in states[1:]] == [e.state_hash for e in trajectory.events]


def test_replay_rejects_a_zero_weight_jump(filled_triangle):
    sigma = chain_from_simplices(filled_triangle, [((0, 1), 1), ((1, 2), -1)])
    log = json.dumps({"t": 0.5, "tau": 0, "sign": 1}) + "\n"
    with pytest.raises(CycleWalkError):
        replay(filled_triangle, sigma, log)


def test_trajectory_frame(torus4, torus4_cycles):
    trajectory = simulate(torus4, torus4_cycles[0], WalkConfig(seed=2, horizon=1.0))
    frame = trajectory.to_dataframe()
    assert list(frame.columns) == ["time", "tau", "sign", "state_hash", "support_size", "norm_sq"]
    assert len(frame) == trajectory.n_jumps
    assert frame["time"].is_monotonic_increasing


def test_state_hash_is_canonical():
    a = Chain(1, {3: 1, 1: -2})
    b = Chain(1, {1: -2, 3: 1})
    assert state_hash(a) == state_hash(b)
    assert len(state_hash(a)) == 32
    assert state_hash(a) != state_hash(Chain(2, {3: 1, 1: -2}))


def test_open_uniform_stays_inside_the_interval():
    rng = make_rng(0)
    values = [open_uniform(rng) for _ in range(1000)]
    assert 0.0 < min(values) and max(values) < 1.0


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig.from_params({"horizon": None, "max_jumps": None})
    with pytest.raises(ValueError):
        WalkConfig.from_params({"record_mode": "everything"})
    config = WalkConfig.from_params({"seed": 5, "horizon": 2.0})
    assert config.seed == 5 and config.record_mode == "full"


def test_linear_generator_identity(torus4, torus4_cycles):
    rng = np.random.default_rng(21)
    for _ in range(20):
        zeta = random_cycle(torus4, rng, torus4_cycles)
        ids = rng.choice(48, size=10, replace=False)
        sigma = Chain(1, {int(i): int(rng.integers(-3, 4)) for i in ids})
        lhs, rhs = linear_generator_identity(torus4, zeta, sigma)
        assert lhs == rhs


def test_constant_function_has_zero_generator(torus4, torus4_cycles):
    assert apply_generator(torus4, lambda chain: 7.0, torus4_cycles[0]) == 0


def test_norm_generator_closed_form(torus4, torus4_cycles):
    rng = np.random.default_rng(13)
    for _ in range(20):
        sigma = random_cycle(torus4, rng, torus4_cycles)
        direct = apply_generator(torus4, lambda chain: chain.norm_sq(), sigma)
        assert norm_sq_generator(torus4, sigma) == direct


def test_theta_generator_on_a_single_triangle(filled_triangle):
    sigma = triangle_boundary(filled_triangle, 0)
    _, edge_id, sign = filled_triangle.index((0, 1))
    assert sigma[edge_id] == 1
    lhs, rhs = theta_generator_check(filled_triangle, sigma, edge_id, sign)
    assert lhs == rhs == -3


def test_drift_inequality_at_zero(annulus, annulus_hole):
    lhs, bound = lyapunov_drift_check(annulus, Chain(1), x0=annulus_hole)
    assert lhs == 0
    assert lhs <= bound


@pytest.mark.parametrize("fixture,cycles", [("annulus", "annulus_hole"), ("torus4", "torus4_cycles")])
def test_drift_inequality_on_random_cycles(fixture, cycles, request):
    complex_ = request.getfixturevalue(fixture)
    basis = request.getfixturevalue(cycles)
    basis = [basis] if isinstance(basis, Chain) else list(basis)
    rng = np.random.default_rng(17)
    for _ in range(200):
        sigma = random_cycle(complex_, rng, basis)
        lhs, bound = lyapunov_drift_check(complex_, sigma)
        assert lhs <= bound + 1e-9


def test_moment_bound_holds_in_mean(torus4, torus4_cycles):
    sigma1 = torus4_cycles[0]
    horizon = 2.0
    config = WalkConfig(seed=31, horizon=horizon, record_mode="summary")
    runs = simulate_many(torus4, sigma1, config, n_trajectories=20)
    mean = np.mean([run.final.chain.norm_sq() for run in runs])
    constants = drift_constants(torus4, sigma1)
    assert mean <= moment_bound(horizon, sigma1.norm_sq(), constants)
    assert moment_bound(0.0, 4.0, constants) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        moment_bound(-1.0, 4.0, constants)


def test_confinement_condition(annulus, annulus_hole, torus4, torus4_cycles, four_gon):
    assert check_confinement(annulus, annulus_hole).holds
    report = check_confinement(torus4, torus4_cycles[0])
    assert not report.holds
    assert all(degree == 3 and p == 1 for _, degree, p in report.violations)
    cycle = chain_from_simplices(four_gon, [((0, 1), 1), ((1, 2), 1), ((2, 3), 1), ((3, 0), 1)])
    assert check_confinement(four_gon, cycle).holds


def test_perforation_boundary_is_confined():
    complex_ = build_perforated_torus(4)
    a, b, c = perforation_triangle(4)
    sigma0 = chain_from_simplices(complex_, [((b, c), 1), ((a, c), -1), ((a, b), 1)])
    assert is_cycle(complex_, sigma0)
    assert check_confinement(complex_, sigma0).holds
    assert not is_boundary(complex_, sigma0)


def test_vertex_walk_visits_in_proportion_to_degree(small_graph):
    start = Chain(0, {0: 1})
    trajectory = simulate(
        small_graph, start, WalkConfig(seed=6, horizon=None, max_jumps=100_000, record_mode="summary")
    )
    estimate = empirical_invariant([trajectory])
    degrees = {0: 2, 1: 2, 2: 3, 3: 1}
    for key, chain in estimate.states.items():
        (vertex, coefficient), = chain.items()
        assert coefficient == 1
        assert estimate.visit_frequencies[key] == pytest.approx(degrees[vertex] / 8, abs=0.02)
        assert estimate.time_frequencies[key] == pytest.approx(0.25, abs=0.02)


def test_occupation_frame_is_sorted(annulus, annulus_hole):
    trajectory = simulate(annulus, annulus_hole, WalkConfig(seed=4, horizon=50.0, record_mode="summary"))
    frame = empirical_invariant([trajectory]).occupation_frame()
    assert list(frame.columns) == ["simplex_id", "occupation"]
    assert frame["occupation"].is_monotonic_decreasing
    # a hole cycle always uses at least one edge per sector
    assert frame["occupation"].sum() >= 8 - 1e-9


@pytest.mark.slow
def test_edges_bordering_the_hole_rank_highest(rips_annulus):
    inner_ring = polygon_cycle(rips_annulus, range(26))
    trajectory = simulate(rips_annulus, inner_ring, WalkConfig(seed=8, horizon=200.0, record_mode="summary"))
    estimate = empirical_invariant([trajectory])
    frame = estimate.occupation_frame()
    edges = list(rips_annulus.simplices(1))
    top = edges[int(frame["simplex_id"].iloc[0])]
    assert max(top) < 26

    def mean_occupation(lo, hi):
        ids = [i for i, (a, b) in enumerate(edges) if lo <= a and b < hi]
        return sum(estimate.occupation.get(i, 0.0) for i in ids) / len(ids)

    assert mean_occupation(0, 26) > mean_occupation(59, 100)


def test_empirical_frequencies_match_the_exact_stationary_law(small_annulus, small_annulus_hole):
    states = enumerate_state_space(small_annulus, small_annulus_hole)
    assert all(is_cycle(small_annulus, s) and s.max_abs() <= 1 for s in states)
    q = generator_matrix(small_annulus, states)
    assert np.allclose(np.asarray(q.sum(axis=1)).ravel(), 0.0)
    exact = exact_stationary(small_annulus, states)
    assert exact.time.sum() == pytest.approx(1.0)

    trajectory = simulate(
        small_annulus, small_annulus_hole, WalkConfig(seed=77, horizon=50_000.0, record_mode="summary")
    )
    estimate = empirical_invariant([trajectory])
    assert set(estimate.time_frequencies) <= set(exact.as_dict("time"))
    assert total_variation(estimate.time_frequencies, exact.as_dict("time")) <= 0.02


def test_state_space_enumeration_has_a_limit(torus4, torus4_cycles):
    with pytest.raises(ResourceLimitError):
        enumerate_state_space(torus4, torus4_cycles[0], limit=50)


def test_total_variation():
    assert total_variation({"a": 0.5, "b": 0.5}, {"a": 0.5, "b": 0.5}) == 0.0
    assert total_variation({"a": 1.0}, {"b": 1.0}) == 1.0
    assert math.isclose(total_variation({"a": 0.7, "b": 0.3}, {"a": 0.5, "b": 0.5}), 0.2)


def test_inner_product_is_exact_on_integer_chains():
    assert inner(Chain(1, {0: 3, 2: -1}), Chain(1, {0: 2, 5: 9})) == 6
