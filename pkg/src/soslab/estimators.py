"""Closed-form and combinatorial estimators of the signal strength.

The scan estimator maximizes the off-diagonal average over all principal
s x s submatrices. Both strategies return the exact maximum; ties in the
argmax are broken by the lexicographically smallest subset. The avg, max
and lp estimators are closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidParams, TooLarge
from .matrix import NoisyMatrix

EXHAUSTIVE = "exhaustive"
BRANCH_AND_BOUND = "branch-and-bound"

DEFAULT_MAX_SUBSETS = 10**8

# Relative slack used by branch-and-bound so float rounding in incremental
# sums can never prune the true argmax; candidate leaves are re-evaluated
# with the same canonical summation the exhaustive strategy uses.
_PRUNE_SLACK = 1e-9


@dataclass(frozen=True)
class ScanResult:
    """Scan value, the maximizing support, and the number of subsets evaluated."""

    value: float
    support: frozenset[int]
    subsets_examined: int


def _pair_sum(dense: np.ndarray, subset: tuple[int, ...]) -> float:
    """Canonical upper-triangle sum over a sorted 0-based subset.

    Both scan strategies finalize every candidate through this helper, in
    this exact accumulation order, so their values agree bit for bit.
    """
    total = 0.0
    for t in range(1, len(subset)):
        row = dense[subset[t]]
        for u in range(t):
            total += row[subset[u]]
    return total


def _scan_value(pair_sum: float, s_star: int) -> float:
    return 2.0 * pair_sum / (s_star * (s_star - 1))


def _exhaustive(dense: np.ndarray, d: int, s_star: int) -> tuple[float, tuple[int, ...], int]:
    best_val = -math.inf
    best_subset: tuple[int, ...] | None = None
    count = 0
    for subset in combinations(range(d), s_star):
        count += 1
        val = _pair_sum(dense, subset)
        if val > best_val:
            best_val = val
            best_subset = subset
    assert best_subset is not None
    return best_val, best_subset, count


def _greedy_seed(dense: np.ndarray, d: int, s_star: int) -> float:
    """Lower bound on the optimal pair sum: greedy growth plus 1-swap refinement."""
    masked = dense.copy()
    np.fill_diagonal(masked, -np.inf)
    i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
    chosen = [int(i), int(j)]
    rowsum = dense[chosen[0]] + dense[chosen[1]]
    while len(chosen) < s_star:
        scores = rowsum.copy()
        scores[chosen] = -np.inf
        v = int(np.argmax(scores))
        chosen.append(v)
        rowsum = rowsum + dense[v]
    improved = True
    while improved:
        improved = False
        inside = set(chosen)
        for idx, u in enumerate(list(chosen)):
            base = rowsum - dense[u]
            gains = base.copy()
            gains[list(inside)] = -np.inf
            v = int(np.argmax(gains))
            if gains[v] > base[u]:
                chosen[idx] = v
                rowsum = base + dense[v]
                inside.discard(u)
                inside.add(v)
                improved = True
    return _pair_sum(dense, tuple(sorted(chosen)))


def _suffix_top_sums(dense: np.ndarray, d: int, max_take: int) -> np.ndarray:
    """T[c, r] = sum of the r largest entries among pairs with larger endpoint >= c.

    Every pair still addable once the search front has passed vertex c-1 has
    its larger endpoint >= c, so T bounds any completion's new-pair total.
    """
    T = np.full((d + 1, max_take + 1), -np.inf)
    T[:, 0] = 0.0
    by_larger = [dense[:b, b] for b in range(d)]
    for c in range(d - 1, -1, -1):
        vals = np.concatenate(by_larger[c:]) if c < d else np.empty(0)
        vals = np.sort(vals)[::-1]
        take = min(max_take, vals.size)
        if take:
            T[c, 1 : take + 1] = np.cumsum(vals[:take])
    return T


def _branch_and_bound(dense: np.ndarray, d: int, s_star: int) -> tuple[float, tuple[int, ...], int]:
    """Depth-first lexicographic search with an admissible additive bound.

    Bound at a partial subset P about to extend past vertex c-1:
    incremental pair sum of P plus the sum of the (remaining pair count)
    largest entries among pairs with an endpoint >= c. A greedy incumbent
    seeds the value floor; the argmax subset is only recorded from search
    leaves, so the lexicographic tie rule matches the exhaustive strategy.
    """
    total_pairs = s_star * (s_star - 1) // 2
    T = _suffix_top_sums(dense, d, total_pairs)
    best_val = _greedy_seed(dense, d, s_star)
    best_subset: tuple[int, ...] | None = None
    leaves = 0
    rowsum = np.zeros(d)
    chosen: list[int] = []

    def visit_leaf(subset: tuple[int, ...]) -> None:
        nonlocal best_val, best_subset, leaves
        leaves += 1
        val = _pair_sum(dense, subset)
        if val > best_val:
            best_val = val
            best_subset = subset
        elif val == best_val and (best_subset is None or subset < best_subset):
            best_subset = subset

    def rec(start: int, cur: float) -> None:
        nonlocal rowsum
        k = len(chosen)
        slack = _PRUNE_SLACK * (1.0 + abs(best_val))
        if k + 1 == s_star:
            for v in range(start, d):
                ncur = cur + rowsum[v]
                if ncur >= best_val - slack:
                    visit_leaf(tuple(chosen + [v]))
            return
        need = s_star - k
        nrem = total_pairs - (k + 1) * k // 2
        for v in range(start, d - need + 1):
            ncur = cur + rowsum[v]
            if ncur + T[v + 1, nrem] < best_val - slack:
                continue
            chosen.append(v)
            rowsum += dense[v]
            rec(v + 1, ncur)
            rowsum -= dense[v]
            chosen.pop()

    rec(0, 0.0)
    # The greedy floor is attained by a feasible subset, which bounds cannot
    # prune, so a leaf always lands.
    assert best_subset is not None
    return best_val, best_subset, leaves


def scan_estimate(
    X: NoisyMatrix,
    s_star: int,
    strategy: str = EXHAUSTIVE,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> ScanResult:
    """Exact maximum of the submatrix average over all s_star-subsets."""
    if not 2 <= s_star <= X.d:
        raise InvalidParams(f"need 2 <= s_star <= d, got s_star={s_star}, d={X.d}")
    if strategy not in (EXHAUSTIVE, BRANCH_AND_BOUND):
        raise InvalidParams(f"unknown scan strategy {strategy!r}")
    dense = X.to_dense()
    if strategy == EXHAUSTIVE:
        if math.comb(X.d, s_star) > max_subsets:
            raise TooLarge(
                f"C({X.d},{s_star}) = {math.comb(X.d, s_star)} exceeds the "
                f"exhaustive guard {max_subsets}"
            )
        pair_sum, subset, examined = _exhaustive(dense, X.d, s_star)
    else:
        pair_sum, subset, examined = _branch_and_bound(dense, X.d, s_star)
    return ScanResult(
        value=_scan_value(pair_sum, s_star),
        support=frozenset(v + 1 for v in subset),
        subsets_examined=examined,
    )


def avg_estimate(X: NoisyMatrix, s_star: int) -> float:
    """Full-matrix sum (both triangles) divided by s_star(s_star - 1)."""
    if s_star < 2:
        raise InvalidParams("s_star must be >= 2")
    return 2.0 * float(X.entries.sum()) / (s_star * (s_star - 1))


def max_estimate(X: NoisyMatrix) -> float:
    """Largest off-diagonal entry."""
    return X.max_offdiag()


def lp_estimate(X: NoisyMatrix, s_star: int) -> float:
    """Closed-form optimum of the entrywise linear relaxation:
    s_star/(s_star - 1) times the max estimator."""
    if s_star < 2:
        raise InvalidParams("s_star must be >= 2")
    return s_star / (s_star - 1) * max_estimate(X)
