"""Dense linear-algebra kernels used by the solvers.

Symmetric positive-definite solves with a configurable ridge fallback,
SVD null-space bases, minimum-norm least squares, and reciprocal-condition
estimates.  Everything is deterministic and dense; instances in this package
are at most a few hundred rows, so LAPACK routines are used directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.linalg import lapack as _lapack

from .errors import NotSymmetricError, SingularMatrixError

_SYM_RTOL = 1e-10
DEFAULT_RCOND_THRESHOLD = 1e-12
DEFAULT_NULL_TOL = 1e-10


@dataclass(frozen=True)
class RidgePolicy:
    """When to add eps*I before factorizing a symmetric system.

    mode is one of "never", "auto", "always".  For "auto", value is the
    reciprocal-condition threshold below which the ridge engages; for
    "always", value is the eps itself.
    """

    mode: str
    value: float = 0.0

    def __post_init__(self):
        if self.mode not in ("never", "auto", "always"):
            raise ValueError(f"unknown ridge mode {self.mode!r}")
        if self.mode == "always" and not self.value > 0.0:
            raise ValueError("always-mode ridge eps must be positive")

    @staticmethod
    def never() -> "RidgePolicy":
        return RidgePolicy("never")

    @staticmethod
    def auto(threshold: float = DEFAULT_RCOND_THRESHOLD) -> "RidgePolicy":
        return RidgePolicy("auto", threshold)

    @staticmethod
    def always(eps: float) -> "RidgePolicy":
        return RidgePolicy("always", eps)


@dataclass(frozen=True)
class SolveOutcome:
    solution: np.ndarray
    ridge_used: float
    estimated_rcond: float


def _factor_rcond(M: np.ndarray):
    """Cholesky factor of M plus a 1-norm reciprocal-condition estimate."""
    anorm = np.linalg.norm(M, 1)
    factor = cho_factor(M, lower=True, check_finite=False)
    if anorm == 0.0:
        return factor, 0.0
    rcond, info = _lapack.dpocon(factor[0], anorm, uplo="L")
    if info != 0:  # pragma: no cover - dpocon only fails on bad arguments
        raise SingularMatrixError("condition estimate failed")
    return factor, float(rcond)


def spd_solve(G, b, policy: RidgePolicy = RidgePolicy.auto()) -> SolveOutcome:
    """Solve (G + ridge*I) y = b for symmetric positive (semi)definite G.

    b may be a vector or a matrix of stacked right-hand sides.  Under the
    "auto" policy a ridge of 1e-8 * trace(G)/m engages only when the plain
    factorization fails or its reciprocal condition falls below the policy
    threshold; "never" raises instead; "always" applies the given eps
    unconditionally.  One step of iterative refinement keeps the relative
    residual far below the 1e-8 contract.
    """
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("G must be square")
    if b.shape[0] != G.shape[0]:
        raise ValueError("b has incompatible leading dimension")
    m = G.shape[0]
    gmax = float(np.max(np.abs(G))) if G.size else 0.0
    asym = float(np.max(np.abs(G - G.T))) if G.size else 0.0
    if asym > _SYM_RTOL * gmax:
        raise NotSymmetricError(
            f"max asymmetry {asym:.3e} exceeds {_SYM_RTOL:g} * max|G| = {_SYM_RTOL * gmax:.3e}"
        )
    Gs = 0.5 * (G + G.T)

    factor = None
    ridge = 0.0
    rcond = 0.0
    if policy.mode == "always":
        ridge = policy.value
        try:
            factor, rcond = _factor_rcond(Gs + ridge * np.eye(m))
        except LinAlgError as exc:
            raise SingularMatrixError(
                f"factorization failed even with ridge {ridge:g}"
            ) from exc
    else:
        try:
            factor, rcond = _factor_rcond(Gs)
        except LinAlgError as exc:
            if policy.mode == "never":
                raise SingularMatrixError(
                    "factorization failed and ridge_policy forbids regularization"
                ) from exc
            factor = None
        if policy.mode == "auto" and (factor is None or rcond < policy.value):
            base = 1e-8 * float(np.trace(Gs)) / m
            if not base > 0.0:
                base = 1e-8
            factor = None
            for ridge in (base, base * 1e4, base * 1e8):
                try:
                    factor, rcond = _factor_rcond(Gs + ridge * np.eye(m))
                    break
                except LinAlgError:
                    continue
            if factor is None:
                raise SingularMatrixError(
                    "factorization failed for every ridge attempt"
                )

    M = Gs if ridge == 0.0 else Gs + ridge * np.eye(m)
    y = cho_solve(factor, b, check_finite=False)
    # One refinement sweep: costs O(m^2), buys several digits on hard systems.
    y = y + cho_solve(factor, b - M @ y, check_finite=False)
    return SolveOutcome(solution=y, ridge_used=float(ridge), estimated_rcond=rcond)


def null_space_basis(M, tol: float = DEFAULT_NULL_TOL) -> np.ndarray:
    """Orthonormal basis for the null space of M, as columns.

    Singular values <= tol * sigma_max count as zero.  Returns a (cols, d)
    array; d may be 0.  For the zero matrix every direction is returned.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("M must be 2-D")
    _, sv, vh = np.linalg.svd(M, full_matrices=True)
    smax = float(sv[0]) if sv.size else 0.0
    rank = int(np.count_nonzero(sv > tol * smax)) if smax > 0.0 else 0
    return vh[rank:].T.copy()


def pseudoinverse_apply(M, b) -> np.ndarray:
    """Minimum-norm least-squares solution of M y ~= b (Moore-Penrose apply)."""
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float)
    y, _, _, _ = np.linalg.lstsq(M, b, rcond=None)
    return y


def rcond_estimate(G) -> float:
    """Reciprocal condition of a symmetric matrix: min|eig| / max|eig|.

    Returns 1.0 for the identity and 0.0 for an exactly singular or zero
    matrix.  The input is symmetrized before the eigendecomposition.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("G must be square")
    if G.size == 0:
        return 0.0
    eigs = np.abs(np.linalg.eigvalsh(0.5 * (G + G.T)))
    top = float(np.max(eigs))
    if top == 0.0:
        return 0.0
    return float(np.min(eigs) / top)
