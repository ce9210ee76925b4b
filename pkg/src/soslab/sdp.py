"""Operator-splitting solver for the small dense moment-matrix programs.

The program is: maximize c.y / scale subject to A y = b and M(y) PSD, where
M(y) is the moment matrix read through the program's entry map. The solver
is ADMM on the splitting Z = M(y), Z PSD, with scaled dual U:

  y-step   minimize -c.y + (rho/2) ||M(y) - Z + U||_F^2  s.t.  A y = b.
           M(y) is linear with disjoint cell supports per variable, so the
           quadratic is diagonal (weight m_v = cell count of variable v) and
           the step is one linear solve against G = A diag(1/m) A^T, which
           is factorized once.
  Z-step   Z = PSD projection of M(y) + U (eigendecompose, clamp, recompose).
  U-step   U += M(y) - Z.

Residuals (checked every iteration against options.tol):

  eq_res   = max |A y - b|               (machine-level: y is projected)
  psd_gap  = ||M(y) - Z||_F              (bounds -lambda_min of M(y))
  primal_residual = eq_res + psd_gap
  dual_residual   = rho * ||Z - Z_prev||_F

The iterate is Optimal when primal and dual residuals are both at most
tol * (1 + |value|) and psd_gap <= tol; the returned matrix is M(y), which
satisfies the equalities exactly and has lambda_min >= -psd_gap.

Step-size adaptation: every 100 iterations the penalty rho is doubled
(halved) when the primal residual exceeds 10x the dual (or vice versa),
clamped to [1e-4, 1e4], with the scaled dual U rescaled accordingly. All of
this is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import EigFailure
from .sos import SosProgram

OPTIMAL = "optimal"
MAX_ITER_REACHED = "max-iter-reached"

_RHO_MIN, _RHO_MAX = 1e-4, 1e4
_ADAPT_EVERY = 100
_ADAPT_RATIO = 10.0


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-7
    max_iter: int = 100_000
    step: float = 1.0

    def validate(self) -> None:
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.step <= 0:
            raise ValueError("step must be > 0")


@dataclass
class SdpSolution:
    status: str
    value: float
    matrix: np.ndarray
    primal_residual: float
    dual_residual: float
    iterations: int


def project_psd(S: np.ndarray) -> np.ndarray:
    """Spectral projection onto the PSD cone (symmetrizes defensively)."""
    S = np.asarray(S, dtype=np.float64)
    S = (S + S.T) / 2.0
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(f"symmetric eigendecomposition failed: {exc}") from exc
    w = np.maximum(w, 0.0)
    P = (V * w) @ V.T
    return (P + P.T) / 2.0


class _EqualitySolver:
    """Solves G lam = r for G = A diag(1/m) A^T, factorized once."""

    def __init__(self, A: scipy.sparse.csr_matrix, inv_m: np.ndarray):
        G = (A @ scipy.sparse.diags(inv_m) @ A.T).toarray()
        self._cho = None
        self._pinv = None
        try:
            self._cho = scipy.linalg.cho_factor(G)
        except scipy.linalg.LinAlgError:
            # Redundant equality rows; fall back to an eigen pseudo-inverse.
            w, Q = np.linalg.eigh(G)
            cut = max(w.max(), 1.0) * 1e-12
            inv_w = np.where(w > cut, 1.0 / np.maximum(w, cut), 0.0)
            self._pinv = (Q, inv_w)

    def solve(self, r: np.ndarray) -> np.ndarray:
        if self._cho is not None:
            return scipy.linalg.cho_solve(self._cho, r)
        Q, inv_w = self._pinv
        return Q @ (inv_w * (Q.T @ r))


def solve(program: SosProgram, options: SolverOptions | None = None) -> SdpSolution:
    """Run the splitting iteration on an assembled program."""
    options = options or SolverOptions()
    options.validate()
    entry = program.entry_map
    entry_flat = entry.ravel()
    V = program.var_count
    m = np.bincount(entry_flat, minlength=V).astype(np.float64)
    # Every variable appears in the matrix, so m >= 1 (program invariant).
    inv_m = 1.0 / m
    c = program.objective_vector()
    A_dense, b = program.constraint_arrays()
    A = scipy.sparse.csr_matrix(A_dense)
    AT = A.T.tocsr()
    eq = _EqualitySolver(A, inv_m)

    rho = options.step
    Z = np.zeros_like(entry, dtype=np.float64)
    U = np.zeros_like(Z)

    def y_step(rho: float) -> np.ndarray:
        w = np.bincount(entry_flat, weights=(Z - U).ravel(), minlength=V)
        q = rho * w + c
        lam = eq.solve(A @ (q * inv_m) - rho * b)
        return (q - AT @ lam) * inv_m / rho

    y = np.zeros(V)
    primal = dual = np.inf
    value = 0.0
    it = 0
    for it in range(1, options.max_iter + 1):
        y = y_step(rho)
        My = y[entry]
        Z_prev = Z
        Z = project_psd(My + U)
        U = U + (My - Z)
        psd_gap = float(np.linalg.norm(My - Z))
        eq_res = float(np.max(np.abs(A @ y - b))) if b.size else 0.0
        primal = eq_res + psd_gap
        dual = rho * float(np.linalg.norm(Z - Z_prev))
        value = program.value_of(y)
        bar = options.tol * (1.0 + abs(value))
        if primal <= bar and dual <= bar and psd_gap <= options.tol:
            return SdpSolution(
                status=OPTIMAL,
                value=value,
                matrix=y[entry],
                primal_residual=primal,
                dual_residual=dual,
                iterations=it,
            )
        if it % _ADAPT_EVERY == 0:
            new_rho = rho
            if primal > _ADAPT_RATIO * dual:
                new_rho = min(rho * 2.0, _RHO_MAX)
            elif dual > _ADAPT_RATIO * primal:
                new_rho = max(rho / 2.0, _RHO_MIN)
            if new_rho != rho:
                U = U * (rho / new_rho)
                rho = new_rho
    return SdpSolution(
        status=MAX_ITER_REACHED,
        value=value,
        matrix=y[entry],
        primal_residual=primal,
        dual_residual=dual,
        iterations=it,
    )
