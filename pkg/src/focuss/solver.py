"""Reweighted fixed-point solvers for min sum F(|s_i|) subject to A s = x.

The core update is s+ = W^2 A^T (A W^2 A^T)^{-1} x with W^2 the diagonal of
inverse weights 1/w(s_i); entries that are exactly zero have inverse weight
exactly zero and therefore stay zero forever.  Entries merely *below* the
zero threshold still participate — nothing is pruned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from . import model
from .errors import SingularGramError, SingularMatrixError, ZeroAnchorError
from .linalg import RidgePolicy, pseudoinverse_apply, spd_solve
from .model import ProblemInstance, SparsityMeasure, as_measure

DEFAULT_P = 0.8

STOP_STEP_TOL = "step_tol"
STOP_MAX_ITER = "max_iter"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for one solve.  `measure` also accepts a bare exponent p."""

    measure: Union[SparsityMeasure, float] = DEFAULT_P
    max_iter: int = 500
    step_tol: float = 1e-10
    ridge_policy: RidgePolicy = field(default_factory=RidgePolicy.auto)
    zero_threshold: float = model.DEFAULT_ZERO_THRESHOLD
    record_trace: bool = True

    def __post_init__(self):
        object.__setattr__(self, "measure", as_measure(self.measure))
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.step_tol > 0.0:
            raise ValueError("step_tol must be positive")


@dataclass
class SolveTrace:
    """Per-iteration record; index t = 0 is the initial point.

    step_norms[t-1] and ridges[t-1] belong to the step producing iterate t.
    `iterates` is populated only when the config asks for a full trace.
    """

    iterates: List[np.ndarray]
    costs: List[float]
    residuals: List[float]
    step_norms: List[float]
    support_sizes: List[int]
    ridges: List[float]
    stop_reason: str


def _step_with_weights(
    instance: ProblemInstance, w_inv: np.ndarray, policy: RidgePolicy
) -> Tuple[np.ndarray, float]:
    """One update from explicit inverse weights: w_inv * A^T (A W^2 A^T)^+ x."""
    A, x = instance.A, instance.x
    if not np.any(x):
        return np.zeros(instance.n), 0.0
    G = (A * w_inv) @ A.T
    try:
        out = spd_solve(G, x, policy)
    except SingularMatrixError as exc:
        raise SingularGramError(
            "weighted Gram matrix is singular (too few active entries?)"
        ) from exc
    return w_inv * (A.T @ out.solution), out.ridge_used


def _step(
    instance: ProblemInstance, s: np.ndarray, config: SolverConfig
) -> Tuple[np.ndarray, float]:
    w_inv = model.inverse_weights(config.measure, s)
    return _step_with_weights(instance, w_inv, config.ridge_policy)


def focuss_step(instance: ProblemInstance, s, config: SolverConfig) -> np.ndarray:
    """One fixed-point update of the reweighted iteration."""
    s = np.asarray(s, dtype=float)
    if s.shape != (instance.n,):
        raise ValueError("s has wrong length")
    return _step(instance, s, config)[0]


def focuss_step_threeform(
    instance: ProblemInstance, s, config: SolverConfig
) -> np.ndarray:
    """Same update via the factored route: W = diag(sqrt(1/w)), q = (A W)^+ x,
    s+ = W q.  Kept on an SVD least-squares path, deliberately independent of
    the Cholesky route in focuss_step, so the two can cross-check each other.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (instance.n,):
        raise ValueError("s has wrong length")
    A, x = instance.A, instance.x
    if not np.any(x):
        return np.zeros(instance.n)
    w_sqrt = np.sqrt(model.inverse_weights(config.measure, s))
    M = A * w_sqrt
    q, _, rank, sv = np.linalg.lstsq(M, x, rcond=None)
    policy = config.ridge_policy
    smax = float(sv[0]) if sv.size else 0.0
    gram_rcond = (float(sv[-1]) / smax) ** 2 if smax > 0.0 else 0.0
    ridge = 0.0
    if policy.mode == "never":
        if rank < instance.m:
            raise SingularGramError(
                "weighted system is rank deficient and ridge_policy forbids regularization"
            )
    elif policy.mode == "auto":
        if rank < instance.m or gram_rcond < policy.value:
            ridge = 1e-8 * float(np.sum(sv**2)) / instance.m
            if not ridge > 0.0:
                ridge = 1e-8
    else:
        ridge = policy.value
    if ridge > 0.0:
        # Tikhonov dual form: q = M^T (M M^T + ridge I)^{-1} x, which matches
        # the regularized Gram route exactly.
        out = spd_solve(M @ M.T, x, RidgePolicy.always(ridge))
        q = M.T @ out.solution
    return w_sqrt * q


def solve(
    instance: ProblemInstance,
    s0,
    config: SolverConfig,
    require_nonzero_init: bool = True,
) -> Tuple[np.ndarray, SolveTrace]:
    """Iterate until the relative step falls below step_tol or max_iter hits.

    Stops when ||s^(t+1) - s^(t)|| <= step_tol * (1 + ||s^(t)||).  The start
    must be entrywise nonzero (pass require_nonzero_init=False to allow
    zeros; exact zeros are preserved by every subsequent step).
    """
    s = np.array(s0, dtype=float)
    if s.shape != (instance.n,):
        raise ValueError("s0 has wrong length")
    if not np.any(s):
        raise ValueError("s0 is identically zero")
    if require_nonzero_init and np.any(s == 0.0):
        idx = np.flatnonzero(s == 0.0)[:8]
        raise ValueError(
            f"s0 has zero entries (e.g. indices {idx.tolist()}); an entrywise-"
            "nonzero start is required, or pass require_nonzero_init=False"
        )

    measure = config.measure
    trace = SolveTrace(
        iterates=[s.copy()] if config.record_trace else [],
        costs=[model.cost(measure, s, config.zero_threshold)],
        residuals=[float(np.linalg.norm(instance.A @ s - instance.x))],
        step_norms=[],
        support_sizes=[model.support_size(s, config.zero_threshold)],
        ridges=[],
        stop_reason=STOP_MAX_ITER,
    )
    for _ in range(config.max_iter):
        prev_norm = float(np.linalg.norm(s))
        s_next, ridge = _step(instance, s, config)
        step = float(np.linalg.norm(s_next - s))
        s = s_next
        if config.record_trace:
            trace.iterates.append(s.copy())
        trace.costs.append(model.cost(measure, s, config.zero_threshold))
        trace.residuals.append(float(np.linalg.norm(instance.A @ s - instance.x)))
        trace.step_norms.append(step)
        trace.support_sizes.append(model.support_size(s, config.zero_threshold))
        trace.ridges.append(ridge)
        if step <= config.step_tol * (1.0 + prev_norm):
            trace.stop_reason = STOP_STEP_TOL
            break
    return s, trace


def auxiliary_value(measure: SparsityMeasure, s: float, s_anchor: float) -> float:
    """Quadratic-in-s majorizer of the cost atom, anchored at s_anchor:

        f(s | a) = F'(|a|)/(2|a|) s^2 + F(|a|) - F'(|a|) |a| / 2.

    Touches F at s = +-a and lies above it elsewhere.
    """
    a = abs(float(s_anchor))
    if a == 0.0:
        raise ZeroAnchorError("auxiliary function is undefined at a zero anchor")
    measure = as_measure(measure)
    fp = model.cost_atom_prime(measure, a)
    return fp / (2.0 * a) * float(s) ** 2 + model.cost_atom(measure, a) - fp * a / 2.0


def default_init(instance: ProblemInstance, seed: int = 0) -> np.ndarray:
    """Minimum-norm start A^+ x with zeros nudged off the axes.

    Exact zeros are replaced by ||A^+ x||_inf * 1e-3 with a seeded random
    sign, so the start satisfies the entrywise-nonzero assumption.
    """
    rng = np.random.default_rng(seed)
    s = pseudoinverse_apply(instance.A, instance.x)
    scale = float(np.max(np.abs(s)))
    if scale == 0.0:
        scale = 1.0
    zeros = s == 0.0
    if np.any(zeros):
        signs = rng.choice([-1.0, 1.0], size=int(np.count_nonzero(zeros)))
        s = s.copy()
        s[zeros] = scale * 1e-3 * signs
    return s
