"""Exact linear assignment solver with deterministic tie-breaking.

Solves ``max_sigma sum_r score[r, sigma(r)]`` by the O(m^3) augmenting-path
variant of the Kuhn-Munkres algorithm.  When several assignments attain the
maximum, the lexicographically smallest ``sigma`` (read as the array
``[sigma(0), ..., sigma(m-1)]``) is returned, so the output never depends on
internal pivoting order.
"""

from __future__ import annotations

import math

import numpy as np

# Relative slack below which a reduced cost is treated as an exact tie.  Kept
# well above the accumulated roundoff of the potential updates (~m*eps) and
# well below any gap a caller could plausibly care about.
_TIE_RTOL = 1e-9


def lap_max(score: np.ndarray) -> tuple[np.ndarray, float]:
    """Return ``(sigma, value)`` maximising ``sum_r score[r, sigma(r)]``.

    ``sigma`` is the lexicographically smallest maximiser.  Raises
    ``ValueError`` for non-square or non-finite input.
    """
    score = np.asarray(score, dtype=np.float64)
    if score.ndim != 2 or score.shape[0] != score.shape[1] or score.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {score.shape}")
    if not np.all(np.isfinite(score)):
        raise ValueError("score matrix contains non-finite entries")
    m = score.shape[0]
    if m == 1:
        return np.zeros(1, dtype=np.int64), float(score[0, 0])

    cost = -score
    assign, u, v = _hungarian_min(cost.tolist(), m)
    value = float(score[np.arange(m), assign].sum())

    # Reduced costs vanish exactly on edges that belong to some optimal
    # assignment; everything else is strictly positive.  The tie slack must
    # scale with the data, never with an absolute floor: score magnitudes can
    # legitimately be far below 1.
    reduced = cost - np.asarray(u)[:, None] - np.asarray(v)[None, :]
    tol = _TIE_RTOL * float(np.abs(score).max())
    tight = reduced <= tol
    if int(tight.sum()) > m:
        assign = _lex_min_matching(tight)
    return np.asarray(assign, dtype=np.int64), value


def _hungarian_min(cost: list[list[float]], m: int) -> tuple[list[int], list[float], list[float]]:
    """Augmenting-path Hungarian algorithm (minimisation, 1-based internals).

    Returns the optimal assignment together with a feasible optimal dual pair
    ``(u, v)`` satisfying ``cost[i][j] >= u[i] + v[j]`` with equality on
    matched pairs.
    """
    inf = math.inf
    u = [0.0] * (m + 1)
    v = [0.0] * (m + 1)
    match_col = [0] * (m + 1)  # match_col[j] = row matched to column j
    way = [0] * (m + 1)
    for i in range(1, m + 1):
        match_col[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            row = cost[i0 - 1]
            delta = inf
            j1 = 0
            ui0 = u[i0]
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - ui0 - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1
    assign = [0] * m
    for j in range(1, m + 1):
        assign[match_col[j] - 1] = j - 1
    return assign, u[1:], v[1:]


def _lex_min_matching(tight: np.ndarray) -> list[int]:
    """Lexicographically smallest perfect matching of the tie graph.

    ``tight`` is a boolean matrix known to admit a perfect matching; rows are
    fixed greedily to their smallest column that still leaves the remaining
    rows matchable.
    """
    m = tight.shape[0]
    avail = [True] * m
    result = [-1] * m
    for r in range(m):
        for c in np.flatnonzero(tight[r]):
            c = int(c)
            if not avail[c]:
                continue
            avail[c] = False
            if _rows_matchable(tight, r + 1, avail):
                result[r] = c
                break
            avail[c] = True
        if result[r] < 0:  # unreachable: a perfect matching exists
            raise AssertionError("tie graph lost its perfect matching")
    return result


def _rows_matchable(tight: np.ndarray, start: int, avail: list[bool]) -> bool:
    """Check rows ``start..m-1`` can be matched into the available columns."""
    m = tight.shape[0]
    match_of_col: dict[int, int] = {}

    def augment(r: int, seen: set[int]) -> bool:
        for c in np.flatnonzero(tight[r]):
            c = int(c)
            if not avail[c] or c in seen:
                continue
            seen.add(c)
            if c not in match_of_col or augment(match_of_col[c], seen):
                match_of_col[c] = r
                return True
        return False

    for r in range(start, m):
        if not augment(r, set()):
            return False
    return True
