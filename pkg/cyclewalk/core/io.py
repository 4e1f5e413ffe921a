"""
File Formats

Complex and chain JSON documents (with "format_version"), point-cloud CSV
and the CSV exports of time series. Malformed input raises
InputFormatError with the offending line when it is known.
"""

import io as _stdio
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..config import FORMAT_VERSION, METRICS, SUPPORTED_POINT_DIMS
from .chains import Chain, chain_from_simplices
from .complex import PointCloud, SimplicialComplex
from .exceptions import ComplexError, InputFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _load_json(path: PathLike) -> Dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(f"ファイルを読み込めません: {e}", path=str(path))
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"JSONの構文エラー: {e.msg}", line=e.lineno, path=str(path))
    if not isinstance(document, dict):
        raise InputFormatError("JSONのトップレベルはオブジェクトである必要があります", line=1, path=str(path))
    version = document.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InputFormatError(f"未対応の format_version です: {version}", path=str(path))
    return document


def _line_of(text: str, needle: str) -> Optional[int]:
    """1-based line of the first occurrence of needle, if any"""
    position = text.find(needle)
    if position < 0:
        return None
    return text.count("\n", 0, position) + 1


def dump_json(document: Dict, path: Optional[PathLike] = None) -> str:
    """Serialize with a stable key order; write to ``path`` when given"""
    text = json.dumps({"format_version": FORMAT_VERSION, **document}, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ------------------------------------------------------------------ complexes

def complex_to_dict(complex_: SimplicialComplex) -> Dict:
    document: Dict = {"metric": complex_.metric, "n_vertices": complex_.n_vertices}
    if complex_.coordinates is not None:
        document["vertices"] = complex_.coordinates.tolist()
    document["simplices"] = {
        str(k): [list(s) for s in complex_.simplices(k)] for k in range(1, complex_.max_dim + 1)
    }
    return document


def write_complex(complex_: SimplicialComplex, path: PathLike) -> None:
    dump_json(complex_to_dict(complex_), path)
    logger.info(f"💾 複体を書き出しました: {path}")


def read_complex(path: PathLike, strict: bool = True) -> SimplicialComplex:
    """
    Parse a complex document. With ``strict=False`` missing faces are kept as
    dangling incidences so that validate_closure can list them.
    """
    document = _load_json(path)
    text = Path(path).read_text(encoding="utf-8")
    metric = document.get("metric", "euclidean")
    if metric not in METRICS:
        raise InputFormatError(f"未対応の距離です: {metric}", line=_line_of(text, '"metric"'), path=str(path))

    coordinates = None
    if "vertices" in document:
        try:
            coordinates = np.asarray(document["vertices"], dtype=float)
        except (TypeError, ValueError):
            raise InputFormatError("vertices は数値の配列である必要があります", line=_line_of(text, '"vertices"'), path=str(path))
        if coordinates.ndim != 2 or coordinates.shape[1] not in SUPPORTED_POINT_DIMS:
            raise InputFormatError(
                f"vertices の形状が不正です: {coordinates.shape}", line=_line_of(text, '"vertices"'), path=str(path)
            )
        n_vertices = coordinates.shape[0]
    elif "n_vertices" in document:
        n_vertices = document["n_vertices"]
        if not isinstance(n_vertices, int) or n_vertices < 0:
            raise InputFormatError("n_vertices は0以上の整数です", line=_line_of(text, '"n_vertices"'), path=str(path))
    else:
        raise InputFormatError("vertices または n_vertices が必要です", path=str(path))

    raw = document.get("simplices", {})
    if not isinstance(raw, dict):
        raise InputFormatError("simplices は次元をキーとするオブジェクトです", line=_line_of(text, '"simplices"'), path=str(path))
    levels: List[List[Sequence[int]]] = [[(v,) for v in range(n_vertices)]]
    for key in sorted(raw, key=lambda item: int(item) if str(item).isdigit() else -1):
        if not str(key).isdigit() or int(key) < 1:
            raise InputFormatError(f"次元キーが不正です: {key!r}", line=_line_of(text, f'"{key}"'), path=str(path))
        k = int(key)
        while len(levels) <= k:
            levels.append([])
        for simplex in raw[key]:
            if (
                not isinstance(simplex, list)
                or len(simplex) != k + 1
                or not all(isinstance(v, int) and 0 <= v < n_vertices for v in simplex)
            ):
                raise InputFormatError(
                    f"{k}-単体の形式が不正です: {simplex}", line=_line_of(text, json.dumps(simplex)[1:-1]), path=str(path)
                )
            if any(a >= b for a, b in zip(simplex, simplex[1:])):
                raise InputFormatError(
                    f"単体の頂点は狭義単調増加である必要があります: {simplex}",
                    line=_line_of(text, json.dumps(simplex)[1:-1]),
                    path=str(path),
                )
            levels[k].append(simplex)
    try:
        return SimplicialComplex(levels, coordinates=coordinates, metric=metric, strict=strict)
    except ComplexError as e:
        raise InputFormatError(str(e), path=str(path))


# ------------------------------------------------------------------ chains

def _encode_coefficient(value):
    """Integers stay integers; reals become round-trip decimal strings"""
    if isinstance(value, int):
        return value
    return repr(float(value))


def _decode_coefficient(value, line: Optional[int], path: str):
    if isinstance(value, bool):
        raise InputFormatError(f"係数が不正です: {value}", line=line, path=path)
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
        try:
            return float(value)
        except ValueError:
            pass
    raise InputFormatError(f"係数は整数または10進文字列です: {value!r}", line=line, path=path)


def chain_to_dict(sigma: Chain) -> Dict:
    return {
        "dim": sigma.dim,
        "coeffs": [[simplex_id, _encode_coefficient(value)] for simplex_id, value in sigma.items()],
    }


def write_chain(sigma: Chain, path: PathLike) -> None:
    dump_json(chain_to_dict(sigma), path)


def read_chain(complex_: SimplicialComplex, path: PathLike) -> Chain:
    """
    Parse a chain document against ``complex_``.

    ``coeffs`` lists [simplex_id, coefficient] pairs; ``terms`` lists
    [vertex list, coefficient] pairs with the orientation folded into the sign.
    """
    document = _load_json(path)
    text = Path(path).read_text(encoding="utf-8")
    path = str(path)
    dim = document.get("dim")
    if dim is not None and (not isinstance(dim, int) or not 0 <= dim <= complex_.max_dim):
        raise InputFormatError(f"dim が不正です: {dim}", line=_line_of(text, '"dim"'), path=path)

    if "coeffs" in document:
        if dim is None:
            raise InputFormatError("coeffs 形式には dim が必要です", path=path)
        pairs = []
        for entry in document["coeffs"]:
            line = _line_of(text, json.dumps(entry[0]) if isinstance(entry, list) and entry else str(entry))
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], int) or isinstance(entry[0], bool):
                raise InputFormatError(f"係数の項が不正です: {entry}", line=line, path=path)
            if not 0 <= entry[0] < complex_.n_simplices(dim):
                raise InputFormatError(f"{dim}-単体 id {entry[0]} は複体に存在しません", line=line, path=path)
            pairs.append((entry[0], _decode_coefficient(entry[1], line, path)))
        return Chain.from_pairs(dim, pairs)

    terms = document.get("terms")
    if not isinstance(terms, list):
        raise InputFormatError("coeffs または terms 配列が必要です", path=path)
    if not terms:
        if dim is None:
            raise InputFormatError("空のチェインには dim が必要です", path=path)
        return Chain(dim)
    parsed = []
    for term in terms:
        line = _line_of(text, json.dumps(term[0]) if isinstance(term, list) and term else str(term))
        if not isinstance(term, list) or len(term) != 2 or not isinstance(term[0], list):
            raise InputFormatError(f"項の形式が不正です: {term}", line=line, path=path)
        parsed.append((term[0], _decode_coefficient(term[1], line, path)))
    try:
        sigma = chain_from_simplices(complex_, parsed)
    except ComplexError as e:
        raise InputFormatError(str(e), path=path)
    if dim is not None and dim != sigma.dim:
        raise InputFormatError(f"dim={dim} と項の次元 {sigma.dim} が一致しません", path=path)
    return sigma


# ------------------------------------------------------------------ point clouds

def read_point_cloud(path: PathLike, metric: str = "euclidean") -> PointCloud:
    """One point per row, comma-separated floats, optional header row"""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise InputFormatError(f"ファイルを読み込めません: {e}", path=str(path))
    numbered = [(no, line) for no, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise InputFormatError("点が1つもありません", path=str(path))

    def is_numeric(line: str) -> bool:
        try:
            [float(cell) for cell in line.split(",")]
            return True
        except ValueError:
            return False

    if not is_numeric(numbered[0][1]):
        numbered = numbered[1:]
        if not numbered:
            raise InputFormatError("ヘッダー行のみで点がありません", path=str(path))
    width = numbered[0][1].count(",")
    for line_no, line in numbered:
        if line.count(",") != width:
            raise InputFormatError(
                f"列数が一致しません（{width + 1} 列を想定）: {line!r}", line=line_no, path=str(path)
            )
    body = "\n".join(line for _, line in numbered)
    try:
        frame = pd.read_csv(_stdio.StringIO(body), header=None, dtype=str, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        raise InputFormatError(f"CSVを解析できません: {e}", path=str(path))
    numeric = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
    if len(bad_rows):
        line_no, line = numbered[int(bad_rows[0])]
        raise InputFormatError(f"数値として解釈できない行です: {line!r}", line=line_no, path=str(path))
    if numeric.shape[1] not in SUPPORTED_POINT_DIMS:
        raise InputFormatError(f"点の次元は 2 または 3 です: {numeric.shape[1]}", line=numbered[0][0], path=str(path))
    try:
        return PointCloud(numeric.to_numpy(dtype=float), metric=metric)
    except ComplexError as e:
        raise InputFormatError(str(e), path=str(path))


def write_point_cloud(points: np.ndarray, path: PathLike) -> None:
    frame = pd.DataFrame(np.asarray(points, dtype=float), columns=["x", "y", "z"][: np.asarray(points).shape[1]])
    frame.to_csv(path, index=False)


def write_frame(frame: pd.DataFrame, path: PathLike) -> None:
    """CSV with '.' decimals regardless of locale"""
    frame.to_csv(path, index=False, decimal=".", float_format="%.17g")
