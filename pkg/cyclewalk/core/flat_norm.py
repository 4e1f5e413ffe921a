"""
Simplicial Flat Norm

Linear program

    min  sum_e 2 eps |sigma_e - (d Delta)_e|  +  sum_tau sqrt(3) eps^2 |Delta_tau|

over real triangle coefficients Delta, with edge-length and triangle-area
weights of the torus mesh. Absolute values are split into positive and
negative parts, as usual for L1 objectives.
"""

import logging
import math
import time
from typing import Dict, Optional, Tuple

import pulp

from .chains import Chain
from .complex import SimplicialComplex
from .exceptions import SolverError

logger = logging.getLogger(__name__)


def _solve(prob: pulp.LpProblem) -> None:
    """COIN first, then HiGHS, then PuLP's default solver"""
    try:
        prob.solve(pulp.COIN_CMD(msg=0))
    except Exception:
        try:
            prob.solve(pulp.HiGHS_CMD(msg=0))
        except Exception:
            prob.solve()


def flat_norm(
    complex_: SimplicialComplex,
    sigma: Chain,
    n: int,
    edge_weight: Optional[float] = None,
    triangle_weight: Optional[float] = None,
) -> Tuple[float, Chain]:
    """
    Flat norm of a 1-chain on the torus mesh C^n and an optimal Delta.

    Weights default to the edge length 2/n and the triangle area sqrt(3)/n^2.
    """
    if sigma.dim != 1:
        raise ValueError(f"平坦ノルムは1-チェインに対して定義されます: dim={sigma.dim}")
    eps = 1.0 / n
    edge_weight = 2.0 * eps if edge_weight is None else edge_weight
    triangle_weight = math.sqrt(3.0) * eps * eps if triangle_weight is None else triangle_weight
    if sigma.is_zero():
        return 0.0, Chain(2)

    n_edges = complex_.n_simplices(1)
    n_triangles = complex_.n_simplices(2)

    prob = pulp.LpProblem("Flat_Norm", pulp.LpMinimize)
    delta_pos = pulp.LpVariable.dicts("delta_pos", range(n_triangles), lowBound=0, cat=pulp.LpContinuous)
    delta_neg = pulp.LpVariable.dicts("delta_neg", range(n_triangles), lowBound=0, cat=pulp.LpContinuous)
    rest_pos = pulp.LpVariable.dicts("rest_pos", range(n_edges), lowBound=0, cat=pulp.LpContinuous)
    rest_neg = pulp.LpVariable.dicts("rest_neg", range(n_edges), lowBound=0, cat=pulp.LpContinuous)

    prob += (
        edge_weight * pulp.lpSum(rest_pos[e] + rest_neg[e] for e in range(n_edges))
        + triangle_weight * pulp.lpSum(delta_pos[t] + delta_neg[t] for t in range(n_triangles))
    )

    # sigma - d Delta = rest, edge by edge
    incident: Dict[int, list] = {e: [] for e in range(n_edges)}
    for tau_id in range(n_triangles):
        for edge_id, sign in complex_.faces(2, tau_id):
            incident[edge_id].append((tau_id, sign))
    for edge_id in range(n_edges):
        prob += (
            rest_pos[edge_id] - rest_neg[edge_id]
            + pulp.lpSum(sign * (delta_pos[t] - delta_neg[t]) for t, sign in incident[edge_id])
            == float(sigma[edge_id])
        ), f"edge_{edge_id}"

    start_time = time.time()
    try:
        _solve(prob)
    except Exception as e:
        raise SolverError(f"ソルバーエラー: {str(e)}")
    logger.debug(f"Flat norm LP status: {pulp.LpStatus[prob.status]} (solved in {time.time() - start_time:.2f}s)")
    if prob.status != pulp.LpStatusOptimal:
        raise SolverError(f"ソルバーエラー: 最適解が見つかりません。ステータス: {pulp.LpStatus[prob.status]}")

    delta = Chain.from_dense(
        2,
        [(pulp.value(delta_pos[t]) or 0.0) - (pulp.value(delta_neg[t]) or 0.0) for t in range(n_triangles)],
        tol=1e-9,
    )
    return float(pulp.value(prob.objective)), delta


def edge_mass(sigma: Chain, n: int) -> float:
    """Value of the flat-norm objective at Delta = 0: 2 eps sum |lambda_e|"""
    return 2.0 / n * float(sigma.l1())


def flat_to_length_bound(flat_value: float, n: int) -> float:
    """Upper bound 2 sqrt(3) flat / eps on ||sigma||"""
    return 2.0 * math.sqrt(3.0) * flat_value * n
