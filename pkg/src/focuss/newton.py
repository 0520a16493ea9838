"""Newton-type reformulations of the constrained sparsity problem.

The stationarity conditions of L(alpha, s) = alpha^T (A s - x) + sum |s_i|^p
lead to block systems

    H = [[0, A], [A^T, c * Pi(s)]],   Pi = diag(|s_i|^(p-2)),

with c = p for the quasi variant and c = p (p - 1) for the exact Hessian.
Both inverses have closed forms in terms of Gamma = A Pi^{-1} A^T; the quasi
system solved against (x, 0) reproduces the fixed-point update exactly, which
is what quasi_newton_step computes (without ever forming H).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import model
from .errors import (
    PEqualsOneError,
    SingularGramError,
    SingularMatrixError,
    ZeroComponentError,
)
from .linalg import RidgePolicy, spd_solve
from .model import ProblemInstance, lp_norm

VARIANT_QUASI = "quasi"
VARIANT_EXACT = "exact"


@dataclass(frozen=True)
class BlockSystem:
    """Symmetric saddle matrix [[0, A], [A^T, c*Pi]]; top-left block exactly 0."""

    H: np.ndarray
    c: float


def _coefficient(p: float, variant: str) -> float:
    if variant == VARIANT_QUASI:
        return p
    if variant == VARIANT_EXACT:
        if p == 1.0:
            raise PEqualsOneError("exact Hessian coefficient p(p-1) vanishes at p = 1")
        return p * (p - 1.0)
    raise ValueError(f"unknown variant {variant!r}")


def _pi_diagonal(s: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(np.asarray(s, dtype=float))
    if np.any(a == 0.0):
        idx = np.flatnonzero(a == 0.0)[:8]
        raise ZeroComponentError(
            f"Pi(s) undefined: zero entries at indices {idx.tolist()}"
        )
    return a ** (p - 2.0)


def assemble_block(
    instance: ProblemInstance, s, p: float, variant: str = VARIANT_QUASI
) -> BlockSystem:
    """Build the (m+n) x (m+n) saddle system for an entrywise-nonzero s."""
    c = _coefficient(p, variant)
    pi = _pi_diagonal(s, p)
    m, n = instance.m, instance.n
    H = np.zeros((m + n, m + n))
    H[:m, m:] = instance.A
    H[m:, :m] = instance.A.T
    H[m + np.arange(n), m + np.arange(n)] = c * pi
    return BlockSystem(H=H, c=c)


def _gamma_solve(instance: ProblemInstance, w_inv: np.ndarray, rhs):
    gamma = (instance.A * w_inv) @ instance.A.T
    try:
        return spd_solve(gamma, rhs, RidgePolicy.never()).solution
    except SingularMatrixError as exc:
        raise SingularGramError("A Pi^{-1} A^T is singular") from exc


def block_inverse(
    instance: ProblemInstance, s, p: float, variant: str = VARIANT_QUASI
) -> np.ndarray:
    """Closed-form inverse of the saddle system, assembled blockwise:

        [[ -c G^{-1},            G^{-1} A Pi^{-1}                  ],
         [ Pi^{-1} A^T G^{-1},   (1/c)(Pi^{-1} - Pi^{-1} A^T G^{-1} A Pi^{-1}) ]]

    with G = A Pi^{-1} A^T.  Cross-check against a generic dense solve of H
    lives in the tests; the two routes share no code.
    """
    c = _coefficient(p, variant)
    _pi_diagonal(s, p)  # entrywise-nonzero gate
    s = np.asarray(s, dtype=float)
    w_inv = model.inverse_weights(lp_norm(p), s)
    m, n = instance.m, instance.n
    AW = instance.A * w_inv  # A Pi^{-1}
    gamma_inv = _gamma_solve(instance, w_inv, np.eye(m))
    top_right = gamma_inv @ AW
    bottom_right = (np.diag(w_inv) - AW.T @ gamma_inv @ AW) / c
    out = np.zeros((m + n, m + n))
    out[:m, :m] = -c * gamma_inv
    out[:m, m:] = top_right
    out[m:, :m] = top_right.T
    out[m:, m:] = bottom_right
    return out


def quasi_newton_step(
    instance: ProblemInstance, s, p: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Solve H (alpha+, s+) = (x, 0) for the quasi variant via the closed form:

        alpha+ = -p (A Pi^{-1} A^T)^{-1} x,   s+ = Pi^{-1} A^T (A Pi^{-1} A^T)^{-1} x.

    The s-block coincides with the fixed-point update.
    """
    s = np.asarray(s, dtype=float)
    w_inv = model.inverse_weights(lp_norm(p), s)
    y = _gamma_solve(instance, w_inv, instance.x)
    return -p * y, w_inv * (instance.A.T @ y)


def exact_newton_step(instance: ProblemInstance, s, p: float) -> np.ndarray:
    """Full Newton update on the stationarity system:

        s+ = (1/(p-1)) Pi^{-1} A^T (A Pi^{-1} A^T)^{-1} x + (1 - 1/(p-1)) s.

    At p = 2 this equals the fixed-point step; p = 1 is excluded.
    """
    if p == 1.0:
        raise PEqualsOneError("exact Newton update divides by p - 1")
    s = np.asarray(s, dtype=float)
    w_inv = model.inverse_weights(lp_norm(p), s)
    y = _gamma_solve(instance, w_inv, instance.x)
    fp_step = w_inv * (instance.A.T @ y)
    beta = 1.0 / (p - 1.0)
    return beta * fp_step + (1.0 - beta) * s


def newton_divergence_probe(
    instance: ProblemInstance, s0, p: float, iters: int
) -> List[float]:
    """Cost sequence along exact Newton updates; stops early on non-finite
    iterates.  Records behavior only — no convergence claim is made.
    """
    measure = lp_norm(p)
    s = np.asarray(s0, dtype=float)
    costs = [model.cost(measure, s)]
    for _ in range(iters):
        s = exact_newton_step(instance, s, p)
        if not np.all(np.isfinite(s)):
            break
        costs.append(model.cost(measure, s))
    return costs
