"""Dataset generators and a brute-force sparse oracle.

All randomness flows through numpy's PCG64 generator seeded explicitly; a
given (generator, arguments, seed) triple is bitwise reproducible.  The two
planted constructions build instances whose stationary point is known in
closed form, with a numerical certificate of the defining orthogonality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import (
    AssumptionFailureError,
    DegenerateNullVectorError,
    InfeasibleDimensionsError,
    NoExactSolutionError,
    TooLargeError,
)
from .linalg import RidgePolicy, null_space_basis, spd_solve
from .model import (
    GEN_APPENDIX_A,
    GEN_APPENDIX_B,
    GEN_RANDOM,
    GeneratedDataset,
    ProblemInstance,
    lp_norm,
    validate_assumptions,
)
from .solver import STOP_STEP_TOL, SolverConfig, solve

_GEN_SUPPORT_THRESHOLD = 1e-6  # planted entries must clear this comfortably


@dataclass(frozen=True)
class OracleResult:
    best_solution: np.ndarray
    best_cost: float
    supports_examined: int


def gen_random(
    m: int,
    n: int,
    seed: int,
    p: float = 0.8,
    validation_budget: int = 200,
) -> GeneratedDataset:
    """Gaussian A (m x n) and x (m), resampled until the well-posedness
    assumptions validate (up to 10 attempts).  Draw order: A, then x."""
    if not m < n:
        raise InfeasibleDimensionsError(f"need m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(10):
        A = rng.standard_normal((m, n))
        x = rng.standard_normal(m)
        instance = ProblemInstance(A, x)
        report = validate_assumptions(instance, budget=validation_budget, seed=seed)
        if report.all_ok:
            return GeneratedDataset(
                instance=instance,
                p=float(p),
                planted_solution=None,
                generator=GEN_RANDOM,
                seed=seed,
            )
    raise AssumptionFailureError(
        f"no assumption-satisfying draw in 10 attempts (m={m}, n={n}, seed={seed})"
    )


def _balanced_null_vector(
    basis: np.ndarray, rng: np.random.Generator, starts: int = 100, sweeps: int = 40
) -> np.ndarray:
    """A null-space combination with magnitudes as flat as possible.

    Random starts refined by alternating sign-projection v <- B B^T sign(v),
    which stays exactly in span(basis); the candidate maximizing
    min|v_i| / max|v_i| wins.  The planted amplitudes are |v_i|^(1/(p-1)), so
    balance here directly controls the dynamic range of the planted support.
    """
    best, best_ratio = None, -1.0

    def consider(v):
        nonlocal best, best_ratio
        top = float(np.max(np.abs(v)))
        if top == 0.0:
            return
        v = v / top
        ratio = float(np.min(np.abs(v)))
        if ratio > best_ratio:
            best, best_ratio = v.copy(), ratio

    for _ in range(starts):
        v = basis @ rng.standard_normal(basis.shape[1])
        consider(v)
        for _ in range(sweeps):
            t = np.where(v >= 0.0, 1.0, -1.0)
            w = basis @ (basis.T @ t)
            top = float(np.max(np.abs(w)))
            if top < 1e-12:
                break
            v = w / top
            consider(v)
    if best is None or best_ratio <= 1e-6:
        raise DegenerateNullVectorError(
            f"no null-space combination with min|v|/max|v| > 1e-6 "
            f"(best {best_ratio:.3e} over {starts} starts)"
        )
    return best


def gen_appendix_a(m: int, n: int, p: float, seed: int) -> GeneratedDataset:
    """Plant a support-m stationary point for 1 < p < 2.

    A = [A_N | A_O] Gaussian with A_N square invertible; pick v in the null
    space of A_O^T A_N^{-T} (nontrivial iff 2m > n), set the planted support
    amplitudes to |v_i|^(1/(p-1)) sign(v_i) and x accordingly.  The
    certificate is ||A_O^T A_N^{-T} v||_inf, which the construction drives to
    rounding level.
    """
    if not m < n:
        raise InfeasibleDimensionsError(f"need m < n, got m={m}, n={n}")
    if not 2 * m > n:
        raise InfeasibleDimensionsError(
            f"planted support-m construction needs 2m > n; m={m}, n={n} "
            f"leaves an empty null space (dimension 2m-n = {2 * m - n})"
        )
    if not 1.0 < p < 2.0:
        raise ValueError("appendix-a construction requires 1 < p < 2")
    rng = np.random.default_rng(seed)
    A = None
    for _ in range(10):
        cand = rng.standard_normal((m, n))
        if np.linalg.cond(cand[:, :m]) < 1e8:
            A = cand
            break
    if A is None:  # pragma: no cover - Gaussian squares are well conditioned
        raise AssumptionFailureError("could not draw a well-conditioned basis block")
    A_N, A_O = A[:, :m], A[:, m:]
    # M = A_O^T A_N^{-T}, rows indexed by the n-m off-support columns.
    M = np.linalg.solve(A_N, A_O).T
    basis = null_space_basis(M)
    if basis.shape[1] == 0:  # pragma: no cover - dimension bound guarantees > 0
        raise DegenerateNullVectorError("null space collapsed numerically")
    v = _balanced_null_vector(basis, rng)
    s_n = np.sign(v) * np.abs(v) ** (1.0 / (p - 1.0))
    x = A_N @ s_n
    planted = np.concatenate([s_n, np.zeros(n - m)])
    certificate = float(np.max(np.abs(M @ v)))
    return GeneratedDataset(
        instance=ProblemInstance(A, x),
        p=float(p),
        planted_solution=planted,
        generator=GEN_APPENDIX_A,
        seed=seed,
        certificate=certificate,
    )


def gen_appendix_b(m: int, k: int, n: int, p: float, seed: int) -> GeneratedDataset:
    """Plant a support-k stationary point (m < k < n) for 1 < p < 2.

    Solve a Gaussian m x k sub-problem to convergence, take its multiplier
    direction alpha* = (A_N Pi^{-1}(s*) A_N^T)^{-1} x, and append n-k extra
    columns drawn from the orthogonal complement of alpha*, which requires
    n - k <= m - 1.  Certificate: ||A_O^T alpha*||_inf / ||alpha*||.
    """
    if not (m < k < n):
        raise InfeasibleDimensionsError(f"need m < k < n, got m={m}, k={k}, n={n}")
    if n - k > m - 1:
        raise InfeasibleDimensionsError(
            f"orthogonal complement of alpha* has dimension m-1 = {m - 1}; "
            f"cannot host n-k = {n - k} independent columns"
        )
    if not 1.0 < p < 2.0:
        raise ValueError("appendix-b construction requires 1 < p < 2")
    rng = np.random.default_rng(seed)
    config = SolverConfig(
        measure=lp_norm(p), max_iter=2000, step_tol=1e-12, record_trace=False
    )
    # For p close to 1 the sub-problem limit is often not entrywise
    # healthy (its smallest entries settle many orders below the support
    # threshold), so full-support draws can be rare; keep trying.
    for _ in range(200):
        A_N = rng.standard_normal((m, k))
        x = rng.standard_normal(m)
        sub = ProblemInstance(A_N, x)
        s0 = rng.standard_normal(k)
        if np.any(s0 == 0.0):  # pragma: no cover - measure-zero event
            continue
        s_star, trace = solve(sub, s0, config)
        if trace.stop_reason != STOP_STEP_TOL:
            continue
        if model.support_size(s_star, _GEN_SUPPORT_THRESHOLD) != k:
            continue
        w_inv = model.inverse_weights(lp_norm(p), s_star)
        gamma = (A_N * w_inv) @ A_N.T
        alpha = spd_solve(gamma, x, RidgePolicy.never()).solution
        basis = null_space_basis(alpha[None, :])  # m x (m-1)
        coeffs = rng.standard_normal((m - 1, n - k))
        A_O = basis @ coeffs
        if np.linalg.matrix_rank(A_O) < n - k:  # pragma: no cover
            continue
        A = np.hstack([A_N, A_O])
        planted = np.concatenate([s_star, np.zeros(n - k)])
        certificate = float(
            np.max(np.abs(A_O.T @ alpha)) / np.linalg.norm(alpha)
        )
        return GeneratedDataset(
            instance=ProblemInstance(A, x),
            p=float(p),
            planted_solution=planted,
            generator=GEN_APPENDIX_B,
            seed=seed,
            certificate=certificate,
        )
    raise AssumptionFailureError(
        f"no full-support sub-problem limit in 200 attempts (m={m}, k={k}, seed={seed})"
    )


def brute_force_oracle(
    instance: ProblemInstance, p: float, max_n: int = 20
) -> OracleResult:
    """Global minimum of sum |s_i|^p over exact solutions with support <= m.

    Exhaustive over supports of size 1..m (ascending, lexicographic within a
    size); a support counts only if its columns are independent and the
    least-squares fit is exact to relative residual 1e-9.  Cost ties within
    1e-12 go to the lexicographically smallest support.
    """
    if instance.n > max_n:
        raise TooLargeError(f"n = {instance.n} exceeds max_n = {max_n}")
    if not 0.0 < p <= 1.0:
        raise ValueError("oracle requires 0 < p <= 1")
    A, x = instance.A, instance.x
    m, n = instance.m, instance.n
    xnorm = float(np.linalg.norm(x))
    if xnorm == 0.0:
        return OracleResult(np.zeros(n), 0.0, 0)
    examined = 0
    best_cost = None
    best_sup = None
    best_coef = None
    for size in range(1, m + 1):
        for sup in itertools.combinations(range(n), size):
            examined += 1
            sub = A[:, sup]
            c, _, rank, _ = np.linalg.lstsq(sub, x, rcond=None)
            if rank < size:
                continue
            if np.linalg.norm(sub @ c - x) > 1e-9 * xnorm:
                continue
            cost = float(np.sum(np.abs(c) ** p))
            if (
                best_cost is None
                or cost < best_cost - 1e-12
                or (abs(cost - best_cost) <= 1e-12 and sup < best_sup)
            ):
                best_cost, best_sup, best_coef = cost, sup, c
    if best_cost is None:
        raise NoExactSolutionError(
            f"no support of size <= {m} solves the system exactly"
        )
    best = np.zeros(n)
    best[list(best_sup)] = best_coef
    return OracleResult(best, best_cost, examined)
