"""Synchronization solvers: spectral, projected power, IRLS baselines, and the
iteratively reweighted graph-connection-Laplacian loop.

Every solver is a pure, deterministic function of its inputs.  Estimates are
defined up to a global right-multiplication (the gauge).  The standalone
spectral baseline rounds each eigenvector block directly, as the classical
eigenvector method does; the iterative solvers instead round against a
reference node fixed once per solve, because their discrete stopping rule
(two identical consecutive iterates) needs the gauge to be stable across
iterations.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh

from .blocks import TAU_WEIGHT, AffinityMatrix, BlockMeasurement, WeightedGraph
from .errors import SolverError
from .models import ProblemInstance
from .perms import Permutation, project_to_permutation


def default_beta(t: int) -> float:
    return float(min(2.0 ** t, 40.0))


def default_alpha(t: int) -> float:
    return float(min(1.2 ** (t - 1), 40.0))


def default_lambda(t: int) -> float:
    return t / (t + 1.0)


@dataclass(frozen=True)
class Schedule:
    """Iteration schedule shared by the reweighted solvers.

    ``beta`` drives the corruption-level initialisation, ``alpha`` the
    first-order reweighting and ``lam`` the blend between first- and
    second-order affinities.  All three must be nondecreasing and ``lam``
    must stay in [0, 1].
    """

    t0: int = 5
    t_max: int = 100
    beta: Callable[[int], float] = default_beta
    alpha: Callable[[int], float] = default_alpha
    lam: Callable[[int], float] = default_lambda
    reweight: str = "identity"

    def __post_init__(self) -> None:
        if self.t0 < 0 or self.t_max < 1:
            raise ValueError("need t0 >= 0 and t_max >= 1")
        if self.reweight != "identity":
            raise ValueError(f"unknown reweighting function {self.reweight!r}")
        betas = [self.beta(t) for t in range(self.t0 + 1)]
        if any(b2 < b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("beta schedule must be nondecreasing")
        alphas = [self.alpha(t) for t in range(1, self.t_max + 1)]
        if any(a2 < a1 for a1, a2 in zip(alphas, alphas[1:])):
            raise ValueError("alpha schedule must be nondecreasing")
        lams = [self.lam(t) for t in range(1, self.t_max + 1)]
        if any(not 0.0 <= x <= 1.0 for x in lams):
            raise ValueError("lambda schedule must stay in [0, 1]")

    def apply_reweight(self, values: np.ndarray) -> np.ndarray:
        """The weight map F applied to an affinity vector (identity default)."""
        return np.array(values, dtype=np.float64)


@dataclass(frozen=True)
class IterationTrace:
    weight_hash: str
    changed: int


@dataclass(frozen=True)
class SolverReport:
    """Estimated absolute permutations plus per-iteration diagnostics.

    ``converged`` is true exactly when the last two permutation iterates were
    identical.  Wall time is excluded from equality comparisons.
    """

    estimate: tuple[Permutation, ...]
    iterations: int
    converged: bool
    trace: tuple[IterationTrace, ...]
    wall_time_s: float = field(compare=False, default=0.0)


def _digest(values: np.ndarray) -> str:
    buf = np.ascontiguousarray(values, dtype=np.float64).tobytes()
    return hashlib.sha256(buf).hexdigest()[:16]


def _require_connected(meas: BlockMeasurement) -> None:
    if not meas.is_connected():
        raise SolverError("measurement graph is disconnected")


def _aligned_weights(meas: BlockMeasurement, graph: WeightedGraph) -> np.ndarray:
    """Per-edge weight vector aligned with ``meas.edges`` (absent edges -> 0)."""
    if graph.n != meas.n:
        raise SolverError("weight graph and measurement disagree on node count")
    if np.array_equal(graph.edges, meas.edges):
        return np.asarray(graph.weights, dtype=np.float64)
    out = np.zeros(meas.num_edges)
    idx = meas.edge_index
    for (i, j), w in zip(map(tuple, graph.edges), graph.weights):
        e = idx.get((i, j))
        if e is None:
            raise SolverError(f"edge {(i, j)} carries weight but no measurement")
        out[e] = w
    return out


def _edge_degrees(meas: BlockMeasurement, w_edge: np.ndarray) -> np.ndarray:
    d = np.zeros(meas.n)
    np.add.at(d, meas.edges[:, 0], w_edge)
    np.add.at(d, meas.edges[:, 1], w_edge)
    return d


def _edge_weight_matrix(meas: BlockMeasurement, w_edge: np.ndarray) -> np.ndarray:
    wd = np.zeros((meas.n, meas.n))
    ei, ej = meas.edges[:, 0], meas.edges[:, 1]
    wd[ei, ej] = w_edge
    wd[ej, ei] = w_edge
    return wd


def _edge_agreement(meas: BlockMeasurement, cur_maps: np.ndarray) -> np.ndarray:
    """Per-edge row agreement between ``P_i P_j^T`` and the measured block."""
    inv_cur = np.argsort(cur_maps, axis=1)
    ei, ej = meas.edges[:, 0], meas.edges[:, 1]
    rel = np.take_along_axis(inv_cur[ej], cur_maps[ei], axis=1)
    return (rel == meas.maps).sum(axis=1)


def _project_rows(scores: np.ndarray, skip: np.ndarray | None = None,
                  keep: np.ndarray | None = None) -> np.ndarray:
    """Project each m-by-m score block onto permutations (``skip`` keeps rows)."""
    n = scores.shape[0]
    out = np.empty((n, scores.shape[1]), dtype=np.int64)
    for i in range(n):
        if skip is not None and skip[i]:
            out[i] = keep[i]
        else:
            out[i] = project_to_permutation(scores[i]).map
    return out


def _neighbor_scores(meas: BlockMeasurement, w_edge: np.ndarray,
                     cur_maps: np.ndarray) -> np.ndarray:
    """Blocks ``sum_j w_ij X_ij P_j`` for every node, via weighted scatter."""
    n, m = meas.n, meas.m
    src, dst, omaps = meas.oriented
    w2 = np.concatenate([w_edge, w_edge])
    composed = np.take_along_axis(cur_maps[dst], omaps, axis=1)
    idx = (src * (m * m))[:, None] + np.arange(m)[None, :] * m + composed
    flat = np.bincount(idx.ravel(), weights=np.repeat(w2, m), minlength=n * m * m)
    return flat.reshape(n, m, m)


def _power_step_maps(meas: BlockMeasurement, w_edge: np.ndarray,
                     cur_maps: np.ndarray) -> np.ndarray:
    degrees = _edge_degrees(meas, w_edge)
    scores = _neighbor_scores(meas, w_edge, cur_maps)
    return _project_rows(scores, skip=degrees == 0.0, keep=cur_maps)


def _pick_anchor(meas: BlockMeasurement, w_edge: np.ndarray) -> int:
    """Reference node for gauge-stable rounding: highest weighted degree."""
    return int(np.argmax(_edge_degrees(meas, w_edge)))


def _spectral_maps(meas: BlockMeasurement, w_edge: np.ndarray,
                   anchor: int | None = None) -> np.ndarray:
    """Degree-normalised spectral relaxation rounded onto permutations.

    Top-m eigenvectors U of D^{-1/2} S D^{-1/2} are computed densely with a
    deterministic sign convention, and V = D^{-1/2} U is split into node
    blocks.  Without an anchor each block V_i is projected directly (the
    classical eigenvector method, whose rounding gauge is the projection of
    the eigenbasis ambiguity).  With an anchor node r the products
    ``V_i V_r^T`` are projected instead, which pins the gauge across repeated
    calls and is required by the iterative solvers' discrete stopping rule.
    """
    n, m = meas.n, meas.m
    degrees = _edge_degrees(meas, w_edge)
    if np.any(degrees <= 0.0):
        bad = int(np.flatnonzero(degrees <= 0.0)[0])
        raise SolverError(f"node {bad} has zero weighted degree")
    wd = _edge_weight_matrix(meas, w_edge)
    wn = wd / np.sqrt(np.outer(degrees, degrees))
    xd = meas.dense_unit
    sym = (xd.reshape(n, m, n, m) * wn[:, None, :, None]).reshape(n * m, n * m)
    try:
        _, vecs = eigh(sym, subset_by_index=(n * m - m, n * m - 1),
                       overwrite_a=True, check_finite=False)
    except Exception as exc:  # LAPACK failure
        raise SolverError(f"eigendecomposition failed: {exc}") from exc
    vecs = vecs[:, ::-1]  # eigenvalues descending
    for k in range(m):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())
        if nz.size and col[nz[0]] < 0.0:
            vecs[:, k] = -col
    blocks = (vecs / np.sqrt(np.repeat(degrees, m))[:, None]).reshape(n, m, m)
    if anchor is None:
        scores = blocks
    else:
        scores = np.einsum("nab,cb->nac", blocks, blocks[anchor])
    return _project_rows(scores)


def _wrap(maps: np.ndarray) -> tuple[Permutation, ...]:
    return tuple(Permutation(row) for row in maps)


def wls_power_step(meas: BlockMeasurement, weights: WeightedGraph,
                   current: Sequence[Permutation]) -> tuple[Permutation, ...]:
    """One weighted projected-power update ``Proj(sum_j w_ij X_ij P_j)``.

    Nodes whose incident weights are all zero keep their current permutation.
    """
    cur = np.stack([p.map for p in current])
    return _wrap(_power_step_maps(meas, _aligned_weights(meas, weights), cur))


def wls_spectral_step(meas: BlockMeasurement, weights: WeightedGraph,
                      anchor: int | None = None) -> tuple[Permutation, ...]:
    """Weighted spectral relaxation; needs positive weighted degree everywhere.

    Rounds each eigenvector block directly unless an ``anchor`` node is given
    (see the module notes on gauge stability).
    """
    return _wrap(_spectral_maps(meas, _aligned_weights(meas, weights), anchor))


def spectral_solve(inst: ProblemInstance,
                   weights: WeightedGraph | None = None) -> SolverReport:
    """Eigenvector method: stack top-m eigenvectors and round blockwise."""
    start = time.perf_counter()
    meas = inst.meas
    _require_connected(meas)
    w_edge = (np.ones(meas.num_edges) if weights is None
              else _aligned_weights(meas, weights))
    maps = _spectral_maps(meas, w_edge)
    trace = (IterationTrace(_digest(w_edge), meas.n),)
    return SolverReport(_wrap(maps), 1, True, trace, time.perf_counter() - start)


def ppm_solve(inst: ProblemInstance, init: Sequence[Permutation] | None = None,
              schedule: Schedule | None = None) -> SolverReport:
    """Projected power method with unit weights and an identity self-term.

    Initialised from the spectral method unless an estimate is supplied;
    stops at the first fixed point or after ``t_max`` sweeps.
    """
    sched = schedule or Schedule()
    start = time.perf_counter()
    meas = inst.meas
    _require_connected(meas)
    if init is None:
        init = spectral_solve(inst).estimate
    cur = np.stack([p.map for p in init])
    ones = np.ones(meas.num_edges)
    whash = _digest(ones)
    n, m = meas.n, meas.m
    trace: list[IterationTrace] = []
    converged = False
    iterations = 0
    for _ in range(sched.t_max):
        scores = _neighbor_scores(meas, ones, cur)
        scores[np.arange(n)[:, None], np.arange(m)[None, :], cur] += 1.0
        new = _project_rows(scores)
        changed = int((new != cur).any(axis=1).sum())
        iterations += 1
        trace.append(IterationTrace(whash, changed))
        cur = new
        if changed == 0:
            converged = True
            break
    return SolverReport(_wrap(cur), iterations, converged, tuple(trace),
                        time.perf_counter() - start)


def irls_l1_solve(inst: ProblemInstance, delta: float = 1e-8,
                  schedule: Schedule | None = None) -> SolverReport:
    """Least-absolute-deviations IRLS: weights ``1 / max(residual, delta)``.

    The tiny default ``delta`` deliberately reproduces the overweighting of
    zero-residual edges that makes this baseline fragile on discrete groups.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")

    def weight_fn(resid: np.ndarray) -> np.ndarray:
        return 1.0 / np.maximum(resid, delta)

    return _irls_loop(inst, weight_fn, inner="S", schedule=schedule)


def irls_cauchy_solve(inst: ProblemInstance, variant: str = "S",
                      c: float | None = None,
                      schedule: Schedule | None = None) -> SolverReport:
    """IRLS with Cauchy weights ``1 / (1 + (r/c)^2)``.

    ``c`` defaults to the median of the nonzero residuals at each iteration
    (1.0 when every residual vanishes); pass a constant to override.
    """
    if variant not in ("S", "P"):
        raise ValueError("variant must be 'S' or 'P'")

    def weight_fn(resid: np.ndarray) -> np.ndarray:
        if c is not None:
            scale = c
        else:
            nz = resid[resid > 0.0]
            scale = float(np.median(nz)) if nz.size else 1.0
        return 1.0 / (1.0 + (resid / scale) ** 2)

    return _irls_loop(inst, weight_fn, inner=variant, schedule=schedule)


def _irls_loop(inst: ProblemInstance, weight_fn: Callable[[np.ndarray], np.ndarray],
               inner: str, schedule: Schedule | None) -> SolverReport:
    sched = schedule or Schedule()
    start = time.perf_counter()
    meas = inst.meas
    _require_connected(meas)
    m = meas.m
    ones = np.ones(meas.num_edges)
    # All spectral rounding inside the loop shares one anchor so the gauge of
    # successive iterates is comparable and the fixed-point stop can fire.
    anchor = _pick_anchor(meas, ones)
    cur = _spectral_maps(meas, ones, anchor)
    trace: list[IterationTrace] = [IterationTrace(_digest(ones), meas.n)]
    converged = False
    iterations = 0
    for _ in range(sched.t_max):
        agree = _edge_agreement(meas, cur)
        resid = np.sqrt(2.0 * (m - agree))
        w = weight_fn(resid)
        if inner == "S":
            new = _spectral_maps(meas, w, anchor)
        else:
            new = _power_step_maps(meas, w, cur)
        changed = int((new != cur).any(axis=1).sum())
        iterations += 1
        trace.append(IterationTrace(_digest(w), changed))
        cur = new
        if changed == 0:
            converged = True
            break
    return SolverReport(_wrap(cur), iterations, converged, tuple(trace),
                        time.perf_counter() - start)


def _second_order_affinity(meas: BlockMeasurement, w_edge: np.ndarray, l: int,
                           fallback_values: np.ndarray) -> np.ndarray:
    """Correlation of each measured block with its length-l path average.

    Computes ``<S^l[i,j] / W^l(i,j), X_ij> / m`` per edge via dense matrix
    powers; edges with no weighted length-l path take the fallback entry.
    """
    n, m = meas.n, meas.m
    wd = _edge_weight_matrix(meas, w_edge)
    xd = meas.dense_unit
    s = (xd.reshape(n, m, n, m) * wd[:, None, :, None]).reshape(n * m, n * m)
    sl, wl = s, wd
    for _ in range(l - 1):
        sl = sl @ s
        wl = wl @ wd
    table = (sl * xd).reshape(n, m, n, m).sum(axis=(1, 3))
    ei, ej = meas.edges[:, 0], meas.edges[:, 1]
    denom = wl[ei, ej]
    ok = denom > TAU_WEIGHT
    out = np.array(fallback_values, dtype=np.float64)
    out[ok] = table[ei, ej][ok] / (m * denom[ok])
    np.clip(out, 0.0, 1.0, out=out)
    return out


def cemp_affinity_iterates(meas: BlockMeasurement, sched: Schedule, l: int,
                            fallback: float):
    """Yield the per-edge affinity vector after each reweighting round t = 0..t0."""
    w_edge = np.ones(meas.num_edges)
    fallback_values = np.full(meas.num_edges, fallback)
    for t in range(sched.t0 + 1):
        a = _second_order_affinity(meas, w_edge, l, fallback_values)
        yield a
        # Shifting the exponent is a global weight rescaling, which cancels in
        # the path-mass ratio; it guards against overflow under large caps.
        w_edge = np.exp(sched.beta(t) * (a - a.max()))


def cemp_init(meas: BlockMeasurement, schedule: Schedule | None = None,
              l: int = 2, fallback: float = 0.5) -> AffinityMatrix:
    """Corruption-level estimation by reweighted cycle consistency.

    Starting from unit weights, alternately correlates each measurement with
    its weighted length-``l`` path average and sharpens the weights
    exponentially.  Edges on no length-``l`` path get the neutral ``fallback``
    affinity.  Returns the affinity after round ``t0``.
    """
    if l < 2:
        raise ValueError("path power l must be >= 2")
    sched = schedule or Schedule()
    values = None
    for values in cemp_affinity_iterates(meas, sched, l, fallback):
        pass
    return AffinityMatrix(meas.n, meas.edges, values)


def _irgcl_setup(inst: ProblemInstance, sched: Schedule):
    meas = inst.meas
    _require_connected(meas)
    a0 = None
    for a0 in cemp_affinity_iterates(meas, sched, 2, 0.5):
        pass
    w0 = sched.apply_reweight(a0)
    anchor = _pick_anchor(meas, w0)
    cur = _spectral_maps(meas, w0, anchor)
    return meas, a0, cur, anchor


def irgcl_init_solve(inst: ProblemInstance,
                     schedule: Schedule | None = None) -> SolverReport:
    """Only the initial estimate: cycle-consistency affinities plus one
    weighted spectral solve."""
    sched = schedule or Schedule()
    start = time.perf_counter()
    meas, a0, cur, _ = _irgcl_setup(inst, sched)
    trace = (IterationTrace(_digest(a0), meas.n),)
    return SolverReport(_wrap(cur), 1, True, trace, time.perf_counter() - start)


def irgcl_solve(inst: ProblemInstance, schedule: Schedule | None = None,
                variant: str = "S") -> SolverReport:
    """Iteratively reweighted synchronization on the graph connection Laplacian.

    Each outer round blends the first-order affinity (agreement with the
    current estimate) and the second-order affinity (agreement with the
    exponentially reweighted 2-path average), with the blend ``lam(t)``
    shifting from 1/2 toward the second-order term.  The permutations are
    re-solved from the blended weights by a weighted power step (variant
    ``"P"``) or the weighted spectral relaxation (variant ``"S"``), stopping
    at the first fixed point.
    """
    if variant not in ("S", "P"):
        raise ValueError("variant must be 'S' or 'P'")
    sched = schedule or Schedule()
    start = time.perf_counter()
    meas, a0, cur, anchor = _irgcl_setup(inst, sched)
    m = meas.m
    trace: list[IterationTrace] = [IterationTrace(_digest(a0), meas.n)]
    converged = False
    iterations = 0
    for t in range(1, sched.t_max + 1):
        a1 = _edge_agreement(meas, cur) / m
        w1 = np.exp(sched.alpha(t) * (a1 - a1.max()))
        a2 = _second_order_affinity(meas, w1, 2, fallback_values=a1)
        lam = sched.lam(t)
        a = (1.0 - lam) * a1 + lam * a2
        w = sched.apply_reweight(a)
        if variant == "P":
            new = _power_step_maps(meas, w, cur)
        else:
            new = _spectral_maps(meas, w, anchor)
        changed = int((new != cur).any(axis=1).sum())
        iterations += 1
        trace.append(IterationTrace(_digest(a), changed))
        cur = new
        if changed == 0:
            converged = True
            break
    return SolverReport(_wrap(cur), iterations, converged, tuple(trace),
                        time.perf_counter() - start)
