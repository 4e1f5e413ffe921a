import pandas as pd
import pytest

from cyclewalk.core.chains import Chain
from cyclewalk.core.plots import plot_energy_trace, plot_norm_trace, plot_retained_edges, plot_scaling


def is_png(path):
    return path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_energy_and_norm_traces(tmp_path):
    energy = pd.DataFrame({"step": [1, 2, 3], "temperature": [1.0, 0.5, 0.25], "energy": [12, 11, 8], "accepted": [True] * 3})
    plot_energy_trace(energy, tmp_path / "energy.png")
    norms = pd.DataFrame({"t": [0.0, 0.5, 1.0], "norm": [1.0, 0.4, 0.1], "energy": [3.0, 0.5, 0.0]})
    plot_norm_trace(norms, tmp_path / "norm.png")
    assert is_png(tmp_path / "energy.png")
    assert is_png(tmp_path / "norm.png")


def test_scaling_plot(tmp_path):
    frame = pd.DataFrame({
        "n": [4, 8],
        "lambda_min": [0.5, 0.14],
        "form": ["cos_mode", "cos_mode"],
        "cycle": ["sigma1", "sigma1"],
        "generator_error": [1.0, 0.25],
    })
    plot_scaling(frame, tmp_path / "scaling.png")
    assert is_png(tmp_path / "scaling.png")


def test_retained_edges_on_the_torus(tmp_path, torus4, torus4_cycles):
    sigma1, _ = torus4_cycles
    plot_retained_edges(torus4, sigma1, tmp_path / "edges.png")
    assert is_png(tmp_path / "edges.png")


def test_retained_edges_need_coordinates(tmp_path, tetrahedron_boundary):
    with pytest.raises(ValueError):
        plot_retained_edges(tetrahedron_boundary, Chain(1, {0: 1}), tmp_path / "none.png")
