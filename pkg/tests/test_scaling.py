import math

import pytest

from cyclewalk.core.exceptions import InterruptedException
from cyclewalk.core.forms import builtin_form
from cyclewalk.core.scaling_experiment import ScalingExperiment, run_scaling_experiment

PARAMS = {"n_list": [8, 4], "horizon": 0.05, "n_trajectories": 2, "trace_points": 3, "seed": 11}


@pytest.fixture(scope="module")
def report():
    return run_scaling_experiment(PARAMS)


def test_rows_are_in_ascending_n(report):
    assert report.n_values == [4, 8]
    for row in report.rows:
        assert row["eps"] == 1.0 / row["n"]
        assert len(row["trace_times"]) == 4
        assert row["trace_times"][-1] == pytest.approx(0.05)


def test_every_entry_is_finite(report):
    for row in report.rows:
        assert math.isfinite(row["lambda_min"]) and row["lambda_min"] > 0
        for trace in row["flat_traces"] + row["qv_traces"]:
            assert len(trace) == 4
            assert all(math.isfinite(value) for value in trace)
        entry = row["generator"]["cos_mode"]["sigma1"]
        assert math.isfinite(entry["value"])
        assert entry["limit"] == pytest.approx(-8.0 * math.pi ** 2 / 3.0)


def test_flat_trace_starts_at_the_cycle(report):
    # sigma_1 cannot be filled: its flat norm is its length
    for row in report.rows:
        for trace in row["flat_traces"]:
            assert trace[0] == pytest.approx(2.0, rel=1e-6)


def test_lambda_min_shrinks(report):
    first, second = (row["lambda_min"] for row in report.rows)
    assert 0.15 <= second / first <= 0.40


def test_frame_and_dict(report):
    frame = report.to_frame()
    assert list(frame["n"]) == [4, 8]
    assert {"generator_error", "flat_sup_max", "qv_mean", "mean_jumps"} <= set(frame.columns)
    document = report.to_dict()
    assert document["params"]["n_list"] == [4, 8]
    assert document["params"]["forms"] == ["cos_mode"]


def test_custom_forms_and_cycles():
    result = run_scaling_experiment(
        {"n_list": [4], "horizon": 0.01, "n_trajectories": 1, "cycles": ["sigma2"]},
        forms={"mixed": builtin_form("mixed")},
    )
    assert list(result.rows[0]["generator"]) == ["mixed"]
    assert list(result.rows[0]["generator"]["mixed"]) == ["sigma2"]


def test_progress_is_reported():
    progress = []
    run_scaling_experiment(
        {"n_list": [4], "horizon": 0.01, "n_trajectories": 1},
        progress_callback=lambda percent, message: progress.append(percent),
    )
    assert progress[0] == 0
    assert progress[-1] == 100
    assert progress == sorted(progress)


def test_cancel_stops_the_run():
    engine = ScalingExperiment()
    engine.set_parameters({"n_list": [4, 8], "horizon": 0.01})
    engine.progress_callback = lambda percent, message: engine.cancel() if percent > 0 else None
    with pytest.raises(InterruptedException):
        engine.run()
