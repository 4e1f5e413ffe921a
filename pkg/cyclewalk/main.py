#!/usr/bin/env python3
"""
cyclewalk - Command Line Entry Point

Usage:
    python -m cyclewalk.main <subcommand> [options]

Subcommands: build-rips, build-cech, build-torus, betti, spectrum, walk,
heat, scaling, find-holes, validate. Results go to stdout or output files;
logs go to stderr (or --log FILE).

Exit codes: 0 success, 1 domain error, 2 usage error, 3 malformed input.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import APP_NAME, APP_VERSION
from .config import (
    resolve_seed,
    validate_anneal_params,
    validate_heat_params,
    validate_walk_params,
)
from .core import io
from .core.complex import (
    build_cech,
    build_perforated_torus,
    build_rips,
    build_torus_triangulation,
    validate_closure,
)
from .core.exceptions import CycleWalkError, InputFormatError
from .core.heat_flow import HeatFlow
from .core.hole_finder import localize
from .core.scaling_experiment import run_scaling_experiment
from .core.spectral import (
    adjacency_form,
    betti,
    betti_numbers,
    down_laplacian,
    full_laplacian,
    spectrum,
    to_coordinate_text,
    up_laplacian,
)
from .core.torus_lab import torus_basis_cycles
from .core.walk import WalkConfig, simulate_many

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2
EXIT_INPUT_FORMAT = 3


def setup_logging(log_path: Optional[str] = None, verbose: bool = False):
    """Configure the root logger; results never go through logging"""
    handler = logging.FileHandler(log_path, encoding="utf-8") if log_path else logging.StreamHandler(sys.stderr)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=[handler],
        force=True,
    )


def _write_text(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(document: dict, path: Optional[str]):
    _write_text(io.dump_json(document), path)


# ------------------------------------------------------------------ subcommands

def cmd_build_rips(args) -> int:
    cloud = io.read_point_cloud(args.points, metric=args.metric)
    complex_ = build_rips(cloud, args.radius, args.max_dim)
    _dump(io.complex_to_dict(complex_), args.output)
    return EXIT_OK


def cmd_build_cech(args) -> int:
    cloud = io.read_point_cloud(args.points, metric=args.metric)
    complex_ = build_cech(cloud, args.radius, args.max_dim)
    _dump(io.complex_to_dict(complex_), args.output)
    return EXIT_OK


def cmd_build_torus(args) -> int:
    complex_ = build_perforated_torus(args.n) if args.perforated else build_torus_triangulation(args.n)
    _dump(io.complex_to_dict(complex_), args.output)
    if args.cycles_dir:
        directory = Path(args.cycles_dir)
        directory.mkdir(parents=True, exist_ok=True)
        sigma1, sigma2 = torus_basis_cycles(complex_)
        io.write_chain(sigma1, directory / "sigma1.json")
        io.write_chain(sigma2, directory / "sigma2.json")
        logger.info(f"🍩 基本サイクルを書き出しました: {directory}")
    return EXIT_OK


def cmd_betti(args) -> int:
    complex_ = io.read_complex(args.complex)
    if args.dim is None:
        values = betti_numbers(complex_, method=args.method)
        sys.stdout.write(" ".join(str(v) for v in values) + "\n")
    else:
        sys.stdout.write(f"{betti(complex_, args.dim, method=args.method)}\n")
    return EXIT_OK


_OPERATORS = {
    "up": lambda cx, k: up_laplacian(cx, k, dtype=float),
    "down": lambda cx, k: down_laplacian(cx, k, dtype=float),
    "full": lambda cx, k: full_laplacian(cx, k, dtype=float),
    "adjacency": lambda cx, k: adjacency_form(cx, k).astype(float),
}


def cmd_spectrum(args) -> int:
    complex_ = io.read_complex(args.complex)
    op = _OPERATORS[args.operator](complex_, args.dim)
    result = spectrum(op, count=args.count)
    document = {
        "k": args.dim,
        "operator": args.operator,
        "betti": betti(complex_, args.dim),
        "eigenvalues": [float(x) for x in result.eigenvalues],
        "method": result.method,
    }
    _dump(document, args.output)
    if args.matrix_out:
        Path(args.matrix_out).write_text(to_coordinate_text(op), encoding="utf-8")
    return EXIT_OK


def cmd_walk(args) -> int:
    complex_ = io.read_complex(args.complex)
    start = io.read_chain(complex_, args.start)
    params = validate_walk_params({
        "seed": args.seed,
        "horizon": args.time,
        "max_jumps": args.max_jumps,
        "record_mode": args.record,
        "n_trajectories": args.trajectories,
        "threads": args.threads,
    })
    config = WalkConfig.from_params(params)
    trajectories = simulate_many(complex_, start, config, params["n_trajectories"], params["threads"])

    summary = {"trajectories": [t.summary() for t in trajectories]}
    if config.record_mode == "full":
        _write_text("".join(t.to_jsonl(index) for index, t in enumerate(trajectories)), args.output)
        if args.summary:
            _dump(summary, args.summary)
    else:
        # summary mode has no event log
        _dump(summary, args.summary or args.output)
    if args.csv:
        io.write_frame(trajectories[0].to_dataframe(), args.csv)
    return EXIT_OK


def cmd_heat(args) -> int:
    complex_ = io.read_complex(args.complex)
    omega0 = io.read_chain(complex_, args.initial)
    params = validate_heat_params({"method": args.method, "operator": args.operator, "n_steps": args.steps})
    flow = HeatFlow(complex_, omega0.dim, operator=params["operator"], method=params["method"])
    state = flow.evolve(omega0, args.time)
    _dump({**io.chain_to_dict(state.omega), "t": state.t}, args.output)
    if args.trace or args.plot:
        times = list(np.linspace(0.0, args.time, params["n_steps"] + 1))
        trace = flow.trace(omega0, times)
        if args.trace:
            io.write_frame(trace, args.trace)
        if args.plot:
            from .core.plots import plot_norm_trace

            plot_norm_trace(trace, args.plot)
    return EXIT_OK


def cmd_scaling(args) -> int:
    params = {
        "n_list": [int(x) for x in args.n_list.split(",") if x.strip()],
        "horizon": args.horizon,
        "forms": args.forms,
        "cycles": args.cycles,
        "n_trajectories": args.trajectories,
        "trace_points": args.trace_points,
        "seed": args.seed,
        "threads": args.threads,
    }
    report = run_scaling_experiment(params)
    _dump(report.to_dict(), args.output)
    frame = report.to_frame()
    if args.csv:
        io.write_frame(frame, args.csv)
    if args.plot:
        from .core.plots import plot_scaling

        plot_scaling(frame, args.plot)
    return EXIT_OK


def cmd_find_holes(args) -> int:
    complex_ = io.read_complex(args.complex)
    params = validate_anneal_params({
        "t0": args.t0,
        "alpha": args.alpha,
        "t_min": args.tmin,
        "max_steps": args.max_steps,
        "cutoff": args.cutoff,
    })
    reports = localize(complex_, params, seed=args.seed, threads=args.threads)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    holes = []
    for report in reports:
        trace_path = out_dir / f"hole_{report.class_index}_energy.csv"
        io.write_frame(report.anneal.trace_frame(), trace_path)
        entry = report.to_dict()
        entry["energy_trace_csv_path"] = str(trace_path)
        if args.plot:
            from .core.plots import plot_energy_trace, plot_retained_edges

            plot_energy_trace(report.anneal.trace_frame(), out_dir / f"hole_{report.class_index}_energy.png")
            if complex_.coordinates is not None:
                plot_retained_edges(complex_, report.retained, out_dir / f"hole_{report.class_index}_edges.png")
        holes.append(entry)
        logger.info(f"🕳️ 穴 {report.class_index}: U={report.anneal.final_energy}, 残存辺 {len(report.retained)}")
    _dump({"seed": resolve_seed(args.seed), "holes": holes}, args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.kind == "points":
        cloud = io.read_point_cloud(args.path)
        sys.stdout.write(f"ok: {len(cloud)} points, d={cloud.dim}\n")
        return EXIT_OK
    complex_ = io.read_complex(args.path, strict=False)
    if args.chain:
        io.read_chain(complex_, args.chain)
    violations = validate_closure(complex_)
    if violations:
        for violation in violations:
            sys.stdout.write(violation + "\n")
        logger.error(f"❌ {len(violations)} 件の不整合があります")
        return EXIT_DOMAIN_ERROR
    sys.stdout.write(f"ok: f={complex_.f_vector()}\n")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log", help="ログの出力先ファイル（既定: stderr）")
    common.add_argument("--verbose", "-v", action="store_true", help="DEBUGレベルのログを出力")
    common.add_argument("--threads", type=int, default=1, help="ワーカースレッド数の上限")
    common.add_argument("--seed", type=int, default=None, help="乱数シード（既定: CYCLEWALK_SEED または 0）")

    parser = argparse.ArgumentParser(prog=APP_NAME, description="Cycle-valued random walks on simplicial complexes")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
        ("build-rips", cmd_build_rips, "点群CSVからRips複体を構築"),
        ("build-cech", cmd_build_cech, "点群CSVからČech複体を構築"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("points")
        p.add_argument("--radius", "-r", type=float, required=True)
        p.add_argument("--max-dim", type=int, default=2)
        p.add_argument("--metric", choices=["euclidean", "torus"], default="euclidean")
        p.add_argument("--output", "-o")
        p.set_defaults(func=func)

    p = sub.add_parser("build-torus", parents=[common], help="平坦トーラスの三角形分割を構築")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--perforated", action="store_true", help="原点の三角形を取り除く")
    p.add_argument("--cycles-dir", help="基本サイクル sigma1.json / sigma2.json の出力先")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_build_torus)

    p = sub.add_parser("betti", parents=[common], help="ベッチ数を表示")
    p.add_argument("complex")
    p.add_argument("--dim", type=int)
    p.add_argument("--method", choices=["exact", "spectral"], default="exact")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("spectrum", parents=[common], help="ラプラシアンの固有値")
    p.add_argument("complex")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--operator", choices=sorted(_OPERATORS), default="up")
    p.add_argument("--count", type=int)
    p.add_argument("--matrix-out", help="作用素を座標形式テキストで書き出す")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("walk", parents=[common], help="サイクル値ランダムウォークをシミュレーション")
    p.add_argument("complex")
    p.add_argument("--start", required=True, help="初期チェインのJSON")
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--max-jumps", type=int)
    p.add_argument("--record", choices=["full", "summary"], default="full")
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--summary", help="要約JSONの出力先")
    p.add_argument("--csv", help="最初の軌道のイベントCSV")
    p.add_argument("--output", "-o", help="JSON-lines ログ（summary モードでは要約JSON）の出力先（既定: stdout）")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("heat", parents=[common], help="熱方程式 dω/dt = -Lω を解く")
    p.add_argument("complex")
    p.add_argument("--initial", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--operator", choices=["up", "full"])
    p.add_argument("--method", choices=["eigen", "rk4"])
    p.add_argument("--steps", type=int)
    p.add_argument("--trace", help="ノルム時系列CSVの出力先")
    p.add_argument("--plot", help="ノルム時系列PNGの出力先")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("scaling", parents=[common], help="トーラス上のスケーリング実験")
    p.add_argument("--n-list", default="4,8")
    p.add_argument("--horizon", type=float)
    p.add_argument("--forms", nargs="+", default=["builtin:cos_mode"])
    p.add_argument("--cycles", nargs="+", choices=["sigma1", "sigma2"])
    p.add_argument("--trajectories", type=int)
    p.add_argument("--trace-points", type=int)
    p.add_argument("--csv")
    p.add_argument("--plot")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("find-holes", parents=[common], help="焼きなましで穴を局在化")
    p.add_argument("complex")
    p.add_argument("--t0", type=float)
    p.add_argument("--alpha", type=float, default=0.999)
    p.add_argument("--tmin", type=float, default=1e-3)
    p.add_argument("--max-steps", type=int, default=200_000)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_find_holes)

    p = sub.add_parser("validate", parents=[common], help="入力ファイルを検証")
    p.add_argument("path")
    p.add_argument("--kind", choices=["complex", "points"], default="complex")
    p.add_argument("--chain", help="複体に対して検証するチェインJSON")
    p.set_defaults(func=cmd_validate)

    return parser


def dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    setup_logging(args.log, args.verbose)
    try:
        return args.func(args)
    except InputFormatError as e:
        sys.stderr.write(f"入力エラー: {e}\n")
        return EXIT_INPUT_FORMAT
    except (CycleWalkError, ValueError, RuntimeError) as e:
        logger.debug(f"処理エラー: {e}", exc_info=True)
        sys.stderr.write(f"エラー: {e}\n")
        return EXIT_DOMAIN_ERROR


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
