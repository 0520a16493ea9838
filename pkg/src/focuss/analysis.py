"""Convergence-rate measurement and fixed-point diagnostics.

Rate protocol: run the solver tightly (step_tol 1e-12, max_iter 2000), take
the final iterate as the reference s*, form R^(t) = ||s^(t+1)-s*||/||s^(t)-s*||
along the same trace, and keep only entries whose denominator clears a
rounding floor.  The limiting rate is the median of the last five valid
entries.

Because the reference is itself a finite-precision iterate, ratios measured
within a couple of decades of the reference's own error are dragged toward
zero.  `measure_rate` therefore refines the floor once: it estimates the
reference error from the final step norm and the first-pass limiting rate,
then re-masks the series so the reported tail sits safely above that level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import DegenerateReferenceError, SingularGramError, SingularMatrixError
from .linalg import RidgePolicy, spd_solve
from .model import ProblemInstance, lp_norm
from .solver import SolveTrace, SolverConfig, solve

SUPERLINEAR = "superlinear"
LINEAR = "linear"
SUBLINEAR = "sublinear"
INCONCLUSIVE = "inconclusive"

DEFAULT_RATE_FLOOR = 1000.0 * np.finfo(float).eps

# Classification knobs (kept module-level so reports can cite them).
SUPERLINEAR_LIMIT = 0.1
LINEAR_SPREAD = 0.05
SUBLINEAR_LIMIT = 0.95
# A tail counts as decreasing when its recent window has dropped to at most
# this fraction of the window before it (flat plateaus sit near 1.0).
DECREASE_FACTOR = 0.8
# Entries within this factor of the estimated reference error are re-masked
# on the refinement pass of measure_rate.
REFERENCE_ERROR_MARGIN = 100.0


@dataclass(frozen=True)
class RateReport:
    r_series: np.ndarray
    valid: np.ndarray
    limiting_rate: float
    classification: str
    reference: np.ndarray


@dataclass(frozen=True)
class IterationJacobian:
    matrix: np.ndarray
    h: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class TheoryCheck:
    consistent: bool
    detail: str = ""


def support_count(s, threshold: float = model.DEFAULT_ZERO_THRESHOLD) -> int:
    """#{i : |s_i| > threshold * max(1, ||s||_inf)}; 0 for the zero vector."""
    return model.support_size(s, threshold)


def _eventually_decreasing(vals: np.ndarray) -> bool:
    # Compare medians of the two halves of the last (up to) six entries.
    # A collapsing tail keeps shrinking window over window, while a fast
    # linear plateau stays flat, so its window ratio sits near 1.  Medians
    # absorb the entry-to-entry oscillation seen once ratios get tiny.
    if vals.size < 3:
        return False
    tail = vals[-6:]
    k = tail.size // 2
    recent = float(np.median(tail[k:]))
    earlier = float(np.median(tail[:k]))
    return recent <= DECREASE_FACTOR * earlier


def rate_series(
    trace: SolveTrace, reference, floor: float = DEFAULT_RATE_FLOOR
) -> RateReport:
    """Per-iteration contraction ratios toward `reference`, with validity mask.

    R^(t) is valid only when the denominator ||s^(t)-s*|| exceeds
    floor * (1 + ||s*||); entries below that are pure rounding noise.
    """
    iterates = trace.iterates
    if len(iterates) < 3:
        raise ValueError("trace must record at least 3 iterates for rate analysis")
    ref = np.asarray(reference, dtype=float)
    dists = np.array([float(np.linalg.norm(s - ref)) for s in iterates])
    if np.any(dists[:-1] == 0.0):
        raise DegenerateReferenceError(
            "reference coincides exactly with an iterate before the last"
        )
    cutoff = floor * (1.0 + float(np.linalg.norm(ref)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = dists[1:] / dists[:-1]
    valid = dists[:-1] > cutoff
    vals = ratios[valid]

    if vals.size == 0:
        limiting = float("nan")
    else:
        limiting = float(np.median(vals[-5:]))
    if vals.size < 3:
        classification = INCONCLUSIVE
    else:
        last5 = vals[-5:]
        spread = float(last5.max() - last5.min())
        if limiting < SUPERLINEAR_LIMIT and _eventually_decreasing(vals):
            classification = SUPERLINEAR
        elif spread < LINEAR_SPREAD:
            classification = LINEAR
        elif limiting > SUBLINEAR_LIMIT:
            classification = SUBLINEAR
        else:
            classification = INCONCLUSIVE
    return RateReport(
        r_series=ratios,
        valid=valid,
        limiting_rate=limiting,
        classification=classification,
        reference=ref,
    )


def measure_rate(
    instance: ProblemInstance,
    p_or_measure,
    s0,
    step_tol: float = 1e-12,
    max_iter: int = 2000,
    zero_threshold: float = model.DEFAULT_ZERO_THRESHOLD,
    floor: float = DEFAULT_RATE_FLOOR,
):
    """Tight solve + rate_series against its own final iterate.

    Runs a first pass with `floor`, then estimates the reference's own error
    as step_T * L / (1 - L) (geometric tail with the first-pass limiting rate
    L) and re-masks the series REFERENCE_ERROR_MARGIN above that estimate, so
    the reported tail is not dragged down by the reference's inaccuracy.  The
    refinement is kept only when it leaves at least 3 valid entries.

    Returns (solution, trace, RateReport).
    """
    config = SolverConfig(
        measure=p_or_measure,
        max_iter=max_iter,
        step_tol=step_tol,
        zero_threshold=zero_threshold,
        record_trace=True,
    )
    sol, trace = solve(instance, s0, config)
    first = rate_series(trace, sol, floor)
    limiting = first.limiting_rate
    if not np.isfinite(limiting) or not trace.step_norms:
        return sol, trace, first
    contraction = min(max(float(limiting), 0.0), 0.99)
    ref_error = float(trace.step_norms[-1]) * contraction / (1.0 - contraction)
    scale = 1.0 + float(np.linalg.norm(sol))
    refined_floor = max(floor, REFERENCE_ERROR_MARGIN * ref_error / scale)
    if refined_floor > floor:
        second = rate_series(trace, sol, refined_floor)
        if int(np.count_nonzero(second.valid)) >= 3:
            return sol, trace, second
    return sol, trace, first


def _gram_solve(instance: ProblemInstance, w_inv: np.ndarray, rhs):
    G = (instance.A * w_inv) @ instance.A.T
    try:
        return spd_solve(G, rhs, RidgePolicy.never()).solution
    except SingularMatrixError as exc:
        raise SingularGramError(
            "weighted Gram matrix is singular; need at least m active entries"
        ) from exc


def h_vector(instance: ProblemInstance, s, p: float) -> np.ndarray:
    """h_j = |s_j|^(1-p) sign(s_j) a_j^T (A P A^T)^{-1} x with P = diag(|s|^(2-p)).

    Exactly zero at s_j = 0 for every p (the relevant limit).  At a converged
    point the nonzero coordinates sit at h_j = 1.
    """
    s = np.asarray(s, dtype=float)
    w_inv = model.inverse_weights(lp_norm(p), s)
    y = _gram_solve(instance, w_inv, instance.x)
    corr = instance.A.T @ y
    h = np.zeros(instance.n)
    nz = s != 0.0
    h[nz] = np.abs(s[nz]) ** (1.0 - p) * np.sign(s[nz]) * corr[nz]
    return h


def g_matrix(instance: ProblemInstance, s, p: float) -> np.ndarray:
    """G(s) = P A^T (A P A^T)^{-1} A with P = diag(|s|^(2-p)); G(s) s = step(s)."""
    s = np.asarray(s, dtype=float)
    w_inv = model.inverse_weights(lp_norm(p), s)
    Z = _gram_solve(instance, w_inv, instance.A)
    return w_inv[:, None] * (instance.A.T @ Z)


def iteration_jacobian(instance: ProblemInstance, s, p: float) -> IterationJacobian:
    """Analytic Jacobian of the fixed-point map: (2-p) (diag(h) - G diag(h))."""
    h = h_vector(instance, s, p)
    G = g_matrix(instance, s, p)
    Q = G * h[None, :]
    matrix = (2.0 - p) * (np.diag(h) - Q)
    return IterationJacobian(matrix=matrix, h=h, Q=Q)


def classify_against_theory(
    p: float, support: int, m: int, n: int, report: RateReport
) -> TheoryCheck:
    """Compare a measured rate report with the predicted regime for (p, support).

    p < 1: superlinear.  p = 1: first-order at most (limiting <= 1).
    1 < p < 2: superlinear when support == m, linear with rate 2-p when
    support > m; support < m is impossible at a genuine stationary point.
    """
    if report.classification == INCONCLUSIVE:
        raise ValueError("rate report is inconclusive; nothing to classify")
    if p >= 2.0:
        raise ValueError("rate theory covers p < 2 only")
    if p < 1.0:
        if report.classification == SUPERLINEAR:
            return TheoryCheck(True)
        return TheoryCheck(
            False,
            f"expected superlinear for p={p} < 1, measured {report.classification}"
            f" (limiting {report.limiting_rate:.4f})",
        )
    if p == 1.0:
        if report.limiting_rate <= 1.0 + 1e-6:
            return TheoryCheck(True)
        return TheoryCheck(
            False, f"p=1 demands limiting rate <= 1, measured {report.limiting_rate:.6f}"
        )
    # 1 < p < 2
    if support == m:
        if report.classification == SUPERLINEAR:
            return TheoryCheck(True)
        return TheoryCheck(
            False,
            f"support == m = {m} predicts superlinear, measured "
            f"{report.classification} (limiting {report.limiting_rate:.4f})",
        )
    if support > m:
        if report.classification != LINEAR:
            return TheoryCheck(
                False,
                f"support {support} > m = {m} predicts linear, measured "
                f"{report.classification}",
            )
        gap = abs(report.limiting_rate - (2.0 - p))
        if gap <= 0.05:
            return TheoryCheck(True)
        return TheoryCheck(
            False,
            f"linear rate should be 2-p = {2.0 - p:.4f}, measured "
            f"{report.limiting_rate:.4f} (gap {gap:.4f})",
        )
    return TheoryCheck(
        False, f"support {support} < m = {m} cannot be a stationary point for p > 1"
    )


def support_bounds_check(p: float, support: int, m: int, n: int) -> bool:
    """Structural support bounds: support <= m for p <= 1, and
    support >= n - m + 1 for 1 < p < 2."""
    if p >= 2.0:
        raise ValueError("support bounds cover p < 2 only")
    if p <= 1.0:
        return support <= m
    return support >= n - m + 1
