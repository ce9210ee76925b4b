"""Expansivity-based pseudo-moment certificates, verified in exact rationals.

Given a null observation, the positivity graph keeps the pairs whose entry
is strictly positive (sign mode) or exactly one (binary mode); diagonals are
positive by construction and never stored. The expansivity of a subset S is
the number of 2l-cliques of that graph containing S. The certificate maps
each subset S with |S| = k <= 2l to

    (eta(S) / eta(empty)) * perm(s_star, k) / perm(2l, k),

where perm is the falling factorial, and satisfies the level-l program's
equalities exactly whenever eta(empty) > 0. Feasibility is checked in exact
rational arithmetic (Python integers never overflow, so the checks cannot be
corrupted by rounding); positive semidefiniteness of the float moment matrix
is checked numerically with tolerance lambda_min >= -1e-8 * max(1, lambda_max).
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import (
    CertificateUndefined,
    EigFailure,
    InvalidParams,
    NotBinary,
    TooLarge,
)
from .matrix import NoisyMatrix, pair_iter
from .sos import PseudoExpectation, moment_matrix
from .subsets import subset_indexer

SIGN_POSITIVE = "sign-positive"
BINARY_ONE = "binary-one"

DEFAULT_MAX_CLIQUE_COMBOS = 10**7

PSD_REL_TOL = 1e-8


@dataclass(frozen=True)
class PositivityGraph:
    """Vertices 1..d; edge {i,j} iff the observed entry counts as positive."""

    d: int
    edges: frozenset[tuple[int, int]]

    def neighbor_masks(self) -> list[int]:
        """Adjacency as bitmasks over 0-based vertices (index 0 unused space)."""
        nbr = [0] * self.d
        for i, j in self.edges:
            nbr[i - 1] |= 1 << (j - 1)
            nbr[j - 1] |= 1 << (i - 1)
        return nbr


@dataclass(frozen=True)
class ExpansivityTable:
    """Counts eta(S) for all subsets with |S| <= 2*ell; absent keys are 0."""

    d: int
    ell: int
    counts: dict
    clique_count: int

    def get(self, subset) -> int:
        return self.counts.get(tuple(sorted(subset)), 0)


@dataclass(frozen=True)
class FeasibilityReport:
    normalization_ok: bool
    rowsum_max_violation: Fraction
    min_eigenvalue: float
    psd: bool
    objective: Fraction | None = None
    eta_empty: int | None = None


def positivity_graph(X: NoisyMatrix, mode: str) -> PositivityGraph:
    """Edges where X_ij > 0 (sign-positive) or X_ij = 1 (binary-one)."""
    if mode == BINARY_ONE:
        if not X.is_binary():
            raise NotBinary("binary-one mode requires a {0,1}-valued matrix")
        keep = X.entries == 1.0
    elif mode == SIGN_POSITIVE:
        keep = X.entries > 0.0
    else:
        raise InvalidParams(f"unknown positivity mode {mode!r}")
    edges = frozenset(pair for pair, k in zip(pair_iter(X.d), keep) if k)
    return PositivityGraph(d=X.d, edges=edges)


def _enumerate_cliques(nbr: list[int], d: int, size: int):
    """All size-cliques as increasing 0-based tuples, in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], cand: int) -> None:
        if len(prefix) == size:
            out.append(tuple(prefix))
            return
        if cand.bit_count() < size - len(prefix):
            return
        m = cand
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rec(prefix + [v], cand & nbr[v] & ~((1 << (v + 1)) - 1))

    rec([], (1 << d) - 1)
    return out


def expansivity_table(
    g: PositivityGraph, ell: int, max_combos: int = DEFAULT_MAX_CLIQUE_COMBOS
) -> ExpansivityTable:
    """One pass over the 2l-cliques, incrementing eta for every subset of each."""
    if ell < 1:
        raise InvalidParams("ell must be >= 1")
    size = 2 * ell
    if math.comb(g.d, size) > max_combos:
        raise TooLarge(
            f"C({g.d},{size}) = {math.comb(g.d, size)} exceeds the clique "
            f"enumeration budget {max_combos}"
        )
    counts: dict = {}
    cliques = _enumerate_cliques(g.neighbor_masks(), g.d, size)
    for clique0 in cliques:
        clique = tuple(v + 1 for v in clique0)
        for r in range(size + 1):
            for sub in combinations(clique, r):
                counts[sub] = counts.get(sub, 0) + 1
    return ExpansivityTable(d=g.d, ell=ell, counts=counts, clique_count=counts.get((), 0))


def build_certificate(table: ExpansivityTable, s_star: int, ell: int) -> PseudoExpectation:
    """Pseudo-expectation of the expansivity construction, as exact rationals."""
    if s_star < 2:
        raise InvalidParams("s_star must be >= 2")
    if ell != table.ell:
        raise InvalidParams(f"table was built for ell={table.ell}, not {ell}")
    eta0 = table.clique_count
    if eta0 == 0:
        raise CertificateUndefined(
            "no all-positive 2l-clique exists; the construction divides by eta(empty) = 0"
        )
    values: dict[tuple[int, ...], Fraction] = {}
    for subset, eta in table.counts.items():
        k = len(subset)
        weight = math.perm(s_star, k)  # falling factorial; 0 when k > s_star
        if eta and weight:
            values[subset] = Fraction(eta * weight, eta0 * math.perm(2 * ell, k))
    return PseudoExpectation(
        d=table.d, ell=ell, s_star=s_star, values=values, eta_empty=eta0
    )


def _insert_sorted(key: tuple[int, ...], i: int) -> tuple[int, ...]:
    lo = bisect_left(key, i)
    return key[:lo] + (i,) + key[lo:]


def verify_certificate(
    pe: PseudoExpectation, d: int, s_star: int, ell: int
) -> FeasibilityReport:
    """Exact equality checks plus a numerical PSD verdict.

    Checks, in rational arithmetic: the normalization y[empty] = 1 and, for
    every subset S with |S| <= 2*ell - 1, the folded row-sum identity
    sum_{i not in S} y[S + {i}] = (s_star - |S|) * y[S]. The maximum
    violation is reported exactly. The float moment matrix supplies
    lambda_min and the PSD verdict.
    """
    zero = Fraction(0)
    values = pe.values
    normalization_ok = pe.get(()) == 1
    max_violation = zero
    for k in range(2 * ell):
        for S in combinations(range(1, d + 1), k):
            inside = set(S)
            lhs = zero
            for i in range(1, d + 1):
                if i in inside:
                    continue
                v = values.get(_insert_sorted(S, i))
                if v:
                    lhs += v
            rhs = (s_star - k) * pe.get(S)
            violation = abs(lhs - rhs)
            if violation > max_violation:
                max_violation = violation
    idx = subset_indexer(d, ell)
    M = moment_matrix(pe, idx)
    try:
        evals = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(f"eigvalsh failed on the moment matrix: {exc}") from exc
    min_eig = float(evals[0])
    max_eig = float(evals[-1])
    return FeasibilityReport(
        normalization_ok=normalization_ok,
        rowsum_max_violation=max_violation,
        min_eigenvalue=min_eig,
        psd=min_eig >= -PSD_REL_TOL * max(1.0, max_eig),
        eta_empty=pe.eta_empty,
    )


def certificate_objective(X: NoisyMatrix, pe: PseudoExpectation, s_star: int) -> Fraction:
    """Exact objective of a pseudo-expectation on data X.

    Float entries are promoted exactly (every float is a binary rational);
    matrices meant for exact objectives should be binary or +/-nu valued.
    """
    total = Fraction(0)
    for pos, (i, j) in enumerate(pair_iter(X.d)):
        v = pe.get((i, j))
        if v:
            total += Fraction(float(X.entries[pos])) * v
    return total * Fraction(2, s_star * (s_star - 1))


def with_objective(report: FeasibilityReport, objective: Fraction) -> FeasibilityReport:
    return replace(report, objective=objective)


def frac_str(fr: Fraction) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def report_to_json_dict(report: FeasibilityReport) -> dict:
    return {
        "eta_empty": report.eta_empty,
        "normalization_ok": report.normalization_ok,
        "rowsum_max_violation": frac_str(report.rowsum_max_violation),
        "min_eigenvalue": report.min_eigenvalue,
        "psd": report.psd,
        "objective": frac_str(report.objective) if report.objective is not None else None,
        "objective_float": float(report.objective) if report.objective is not None else None,
    }
