"""
Torus Scaling Experiment Engine

Runs the diagnostics of the torus lab over a list of mesh parameters n:
smallest positive eigenvalue, rescaled generator errors per test form and
basis cycle, and accelerated walks (clock scaled by n^2) monitored through
flat-norm and quadratic-variation traces.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ..config import validate_scaling_params
from .chains import Chain
from .complex import build_torus_triangulation
from .exceptions import InterruptedException
from .flat_norm import flat_norm
from .forms import OneForm, builtin_form
from .torus_lab import (
    bracket_normalization_check,
    generator_limit,
    lambda_min_up,
    qv_estimator,
    rescaled_generator,
    torus_basis_cycles,
)
from .walk import WalkConfig, WalkEvent, simulate

logger = logging.getLogger(__name__)


class _Sampler:
    """Observer recording the state in force at fixed walk-clock times"""

    def __init__(self, start: Chain, times: List[float]):
        self.times = times
        self.samples: List[Chain] = []
        self.current = start

    def __call__(self, chain: Chain, event: WalkEvent):
        while len(self.samples) < len(self.times) and self.times[len(self.samples)] < event.time:
            self.samples.append(self.current)
        self.current = chain

    def finish(self) -> List[Chain]:
        while len(self.samples) < len(self.times):
            self.samples.append(self.current)
        return self.samples


@dataclass
class ScalingReport:
    """Per-n rows in ascending n; every entry is finite"""

    params: Dict
    rows: List[Dict] = field(default_factory=list)

    @property
    def n_values(self) -> List[int]:
        return [row["n"] for row in self.rows]

    def to_dict(self) -> Dict:
        return {"params": self.params, "rows": self.rows}

    def to_frame(self) -> pd.DataFrame:
        """Flat table: one row per (n, form, cycle)"""
        records = []
        for row in self.rows:
            for form_name, by_cycle in row["generator"].items():
                for cycle_name, entry in by_cycle.items():
                    records.append({
                        "n": row["n"],
                        "eps": row["eps"],
                        "lambda_min": row["lambda_min"],
                        "form": form_name,
                        "cycle": cycle_name,
                        "generator_value": entry["value"],
                        "generator_limit": entry["limit"],
                        "generator_error": entry["error"],
                        "flat_sup_mean": float(np.mean(row["flat_sup"])),
                        "flat_sup_max": float(np.max(row["flat_sup"])),
                        "qv_mean": float(np.mean([np.mean(trace) for trace in row["qv_traces"]])),
                        "mean_jumps": float(np.mean(row["n_jumps"])),
                    })
        return pd.DataFrame(records)


class ScalingExperiment:
    """
    Scaling experiment engine.

    Reports progress through ``progress_callback(percent, message)``;
    ``cancel()`` stops the run at the next trajectory boundary with
    InterruptedException.
    """

    def __init__(self, progress_callback: Optional[Callable[[int, str], None]] = None):
        self.params: Dict = {}
        self.forms: Dict[str, OneForm] = {}
        self.progress_callback = progress_callback
        self.is_cancelled = False

    def set_parameters(self, params: Optional[Dict] = None, forms: Optional[Dict[str, OneForm]] = None):
        """Validate parameters; ``forms`` overrides the builtin names in params['forms']"""
        self.params = validate_scaling_params(params or {})
        if forms:
            self.forms = dict(forms)
        else:
            self.forms = {name.replace("builtin:", ""): builtin_form(name) for name in self.params["forms"]}

    def cancel(self):
        self.is_cancelled = True

    def _progress(self, percent: int, message: str):
        if self.progress_callback:
            self.progress_callback(percent, message)

    def _check_cancelled(self):
        if self.is_cancelled:
            raise InterruptedException("スケーリング実験がキャンセルされました")

    def run(self) -> ScalingReport:
        if not self.params:
            self.set_parameters()
        self.is_cancelled = False
        params = self.params
        start_time = time.time()
        self._progress(0, "スケーリング実験を開始しています...")

        rows = []
        n_list = params["n_list"]
        for index, n in enumerate(n_list):
            self._check_cancelled()
            self._progress(int(100 * index / len(n_list)), f"n={n} を計算中...")
            rows.append(self._run_single(n))
            logger.info(f"📊 n={n} 完了: lambda_m={rows[-1]['lambda_min']:.6g}")

        report = ScalingReport(params=self._report_params(), rows=rows)
        self._progress(100, "スケーリング実験が完了しました！")
        logger.info(f"🎉 スケーリング実験完了 ({time.time() - start_time:.1f}s)")
        logger.debug(f"summary: {self._generate_summary(report)}")
        return report

    def _report_params(self) -> Dict:
        return {
            "n_list": self.params["n_list"],
            "horizon": self.params["horizon"],
            "forms": sorted(self.forms),
            "cycles": self.params["cycles"],
            "n_trajectories": self.params["n_trajectories"],
            "trace_points": self.params["trace_points"],
            "seed": self.params["seed"],
        }

    def _run_single(self, n: int) -> Dict:
        params = self.params
        complex_ = build_torus_triangulation(n)
        sigma1, sigma2 = torus_basis_cycles(complex_)
        cycles = {"sigma1": sigma1, "sigma2": sigma2}

        generator: Dict[str, Dict[str, Dict[str, float]]] = {}
        for form_name in sorted(self.forms):
            phi = self.forms[form_name]
            generator[form_name] = {}
            for cycle_name in params["cycles"]:
                sigma = cycles[cycle_name]
                value = rescaled_generator(complex_, sigma, phi, n)
                limit = generator_limit(complex_, sigma, phi)
                generator[form_name][cycle_name] = {"value": value, "limit": limit, "error": abs(value - limit)}

        start = cycles[params["cycles"][0]]
        first_form = self.forms[sorted(self.forms)[0]]
        walk_horizon = params["horizon"] * n * n
        times = [walk_horizon * j / params["trace_points"] for j in range(params["trace_points"] + 1)]
        config = WalkConfig(
            seed=params["seed"], horizon=walk_horizon, max_jumps=params["max_jumps"], record_mode="summary"
        )

        def trajectory(stream: int) -> Dict:
            self._check_cancelled()
            sampler = _Sampler(start, times)
            result = simulate(complex_, start, config, stream=stream, observer=sampler)
            samples = sampler.finish()
            flat = [flat_norm(complex_, chain, n)[0] for chain in samples]
            qv = [qv_estimator(complex_, chain, first_form, n) for chain in samples]
            return {"flat": flat, "qv": qv, "n_jumps": result.n_jumps}

        streams = range(params["n_trajectories"])
        if params["threads"] <= 1:
            runs = [trajectory(stream) for stream in streams]
        else:
            with ThreadPoolExecutor(max_workers=params["threads"]) as pool:
                runs = list(pool.map(trajectory, streams))

        bracket = bracket_normalization_check(complex_, start, first_form, n)
        return {
            "n": n,
            "eps": 1.0 / n,
            "lambda_min": lambda_min_up(n, complex_),
            "generator": generator,
            "trace_times": [t / (n * n) for t in times],
            "flat_traces": [run["flat"] for run in runs],
            "flat_sup": [max(run["flat"]) for run in runs],
            "qv_traces": [run["qv"] for run in runs],
            "n_jumps": [run["n_jumps"] for run in runs],
            "bracket": {key: value for key, value in bracket.items()},
        }

    def _generate_summary(self, report: ScalingReport) -> Dict:
        """Headline numbers of a finished report"""
        rows = report.rows
        summary = {
            "n_values": report.n_values,
            "lambda_min": [row["lambda_min"] for row in rows],
            "flat_sup_max": max(max(row["flat_sup"]) for row in rows),
        }
        if len(rows) > 1:
            summary["lambda_ratios"] = [
                b["lambda_min"] / a["lambda_min"] for a, b in zip(rows, rows[1:])
            ]
        summary["all_finite"] = all(
            math.isfinite(value)
            for row in rows
            for value in [row["lambda_min"], *row["flat_sup"]]
        )
        return summary


def run_scaling_experiment(
    params: Optional[Dict] = None,
    forms: Optional[Dict[str, OneForm]] = None,
    progress_callback: Optional[Callable[[int, str], None]] = None,
) -> ScalingReport:
    engine = ScalingExperiment(progress_callback)
    engine.set_parameters(params, forms)
    return engine.run()
