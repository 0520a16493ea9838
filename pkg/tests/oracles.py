"""Independent oracles and frozen expected values used by the test suite.

Everything in this file is deliberately written against the *defining
properties* of the operations under test (finite differences, direct
residuals, exhaustive enumeration, hand-evaluated closed forms) rather than
against the library code, so a bug in the package cannot hide behind a
mirrored bug here.
"""

import itertools
import math

import numpy as np

# ---------------------------------------------------------------------------
# Frozen hand-derived scalars.
#
# Each value below was evaluated by hand from the defining formulas before the
# corresponding library code existed; tests compare against these literals.
# ---------------------------------------------------------------------------

# Diagonal weight entries w(s) and their reciprocals 1/w(s).
#   lp(p):      w = |s|^(p-2)           (measure-wide constant p/2 dropped)
#   log-abs:    w = 1 / (2 s^2)
#   neg-power:  w = (|p|/2) |s|^(p-2)
MEASURE_WEIGHT_CASES = [
    # (kind, p, s, expected weight)
    ("lp_norm", 1.0, 4.0, 0.25),       # 4^(1-2) = 1/4
    ("lp_norm", 0.5, 1.0, 1.0),        # 1^(0.5-2) = 1
    ("log_abs", None, 2.0, 0.125),     # 1/(2*4)
    ("neg_power", -1.0, 2.0, 0.0625),  # (1/2)*2^(-3)
]

INVERSE_WEIGHT_CASES = [
    # (kind, p, s, expected inverse weight)
    ("lp_norm", 1.0, 3.0, 3.0),        # 3^(2-1)
    ("log_abs", None, 2.0, 8.0),       # 2*2^2
    ("neg_power", -1.0, 2.0, 16.0),    # (2/1)*2^3
    ("lp_norm", 0.5, 0.0, 0.0),        # exact zero maps to exact zero
]

COST_CASES = [
    # (kind, p, s vector, expected cost)
    ("lp_norm", 1.0, (1.0, -2.0, 0.0), 3.0),
    ("lp_norm", 0.5, (4.0, 0.0, 0.0), 2.0),
    ("log_abs", None, (math.e, 1.0, 0.0), 1.0),   # ln e + ln 1, zero excluded
    ("neg_power", -1.0, (2.0, 4.0, 0.0), -0.75),  # -(1/2) - (1/4), zero excluded
]

AUXILIARY_CASES = [
    # (kind, p, anchor, s, expected value)
    # lp:  (p/2)|a|^(p-2) s^2 + (1 - p/2)|a|^p
    ("lp_norm", 1.0, 1.0, 2.0, 2.5),     # 0.5*4 + 0.5*1
    ("lp_norm", 0.5, 4.0, 0.0, 1.5),     # 0 + 0.75*2
    # log: s^2/(2 a^2) + ln|a| - 1/2
    ("log_abs", None, 2.0, 2.0, math.log(2.0)),  # 0.5 + ln2 - 0.5
    # neg-power p=-1: (1/2)|a|^(-3) s^2 - (3/2)|a|^(-1)
    ("neg_power", -1.0, 1.0, 1.0, -1.0),  # 0.5 - 1.5
]

# Single fixed-point step on the square diagonal fixture A = diag(2, 4),
# x = (2, 4), s = (1, 1), any p: the weighted Gram is invertible, the step
# solves the system exactly, so s+ = A^{-1} x = (1, 1).
SQUARE_DIAG_A = np.diag([2.0, 4.0])
SQUARE_DIAG_X = np.array([2.0, 4.0])
SQUARE_DIAG_STEP = np.array([1.0, 1.0])

# Oracle example: A = [[1,0,1],[0,1,1]], x = (1,1), p = 0.5.
# Exact solutions with support <= 2: {3}: s=(0,0,1) cost 1; {1,2}: s=(1,1,0)
# cost 2; {1,3},{2,3} collapse to (0,0,1) cost 1. Global best cost 1.
ORACLE_EXAMPLE_A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
ORACLE_EXAMPLE_X = np.array([1.0, 1.0])
ORACLE_EXAMPLE_BEST = np.array([0.0, 0.0, 1.0])
ORACLE_EXAMPLE_COST = 1.0

# Block system for m=1, n=2, A=[1 1], s=(1,1), p=1 (quasi): c = p = 1 and
# Pi = diag(|s|^(p-2)) = I, so H = [[0, 1, 1], [1, 1, 0], [1, 0, 1]].
BLOCK_EXAMPLE_H = np.array(
    [
        [0.0, 1.0, 1.0],
        [1.0, 1.0, 0.0],
        [1.0, 0.0, 1.0],
    ]
)

# Hand-run of the first lp(1) fixed-point step on the oracle example starting
# from s = (1, 1, 1):  w = |s|^(2-p) = (1,1,1), Gram = A A^T = [[2,1],[1,2]],
# y = Gram^{-1} x = (1/3, 1/3), s+ = w * A^T y = (1/3, 1/3, 2/3).
HAND_STEP_P1_S0 = np.array([1.0, 1.0, 1.0])
HAND_STEP_P1_RESULT = np.array([1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0])

# ---------------------------------------------------------------------------
# Independent numerical oracles.
# ---------------------------------------------------------------------------


def svd_rcond(G):
    """Reciprocal 2-norm condition number via SVD (route independent of eigh)."""
    s = np.linalg.svd(np.asarray(G, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def fd_jacobian(step_fn, s, coords=None, scale=1e-6):
    """Central-difference Jacobian of a vector map restricted to `coords`.

    Step for coordinate i is scale*(1+|s_i|).  Returns an (n, n) matrix with
    untouched columns left at zero, plus the list of perturbed coordinates.
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    if coords is None:
        coords = list(range(n))
    J = np.zeros((n, n))
    for i in coords:
        h = scale * (1.0 + abs(s[i]))
        sp = s.copy()
        sm = s.copy()
        sp[i] += h
        sm[i] -= h
        J[:, i] = (step_fn(sp) - step_fn(sm)) / (2.0 * h)
    return J, list(coords)


def exhaustive_min_lp_cost(A, x, p, residual_rtol=1e-9):
    """Global minimum of sum |s_i|^p over exact solutions with support <= m.

    Straight enumeration with numpy lstsq; kept free of any package imports.
    Returns (best_vector, best_cost) or (None, None) if no support admits an
    exact solution.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    m, n = A.shape
    xnorm = np.linalg.norm(x)
    if xnorm == 0.0:
        return np.zeros(n), 0.0
    best_vec, best_cost = None, None
    for size in range(1, m + 1):
        for sup in itertools.combinations(range(n), size):
            sub = A[:, sup]
            c, _, rank, _ = np.linalg.lstsq(sub, x, rcond=None)
            if rank < size:
                continue
            if np.linalg.norm(sub @ c - x) > residual_rtol * xnorm:
                continue
            cost = float(np.sum(np.abs(c) ** p))
            if best_cost is None or cost < best_cost - 1e-12:
                vec = np.zeros(n)
                vec[list(sup)] = c
                best_vec, best_cost = vec, cost
    return best_vec, best_cost


def geometric_trace_iterates(s_star, v, ratio, count):
    """Toy iterate list s^(t) = s* + ratio^t v for rate-measurement tests."""
    s_star = np.asarray(s_star, dtype=float)
    v = np.asarray(v, dtype=float)
    return [s_star + (ratio**t) * v for t in range(count)]


def lagrangian_gradient(A, x, alpha, s, p):
    """(d/d alpha, d/d s) of alpha^T (A s - x) + sum |s_i|^p, by hand.

    grad_alpha = A s - x;  grad_s = A^T alpha + p |s|^(p-1) sign(s).
    """
    A = np.asarray(A, dtype=float)
    g_alpha = A @ np.asarray(s, dtype=float) - np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    g_s = A.T @ np.asarray(alpha, dtype=float) + p * np.abs(s) ** (p - 1) * np.sign(s)
    return g_alpha, g_s


def random_spd(rng, m, spread=4.0):
    """Random SPD matrix with eigenvalues log-spaced over `spread` decades."""
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    eigs = 10.0 ** rng.uniform(-spread / 2.0, spread / 2.0, size=m)
    return (q * eigs) @ q.T


def explicit_block_matrix(A, s, p, c):
    """[[0, A], [A^T, c*diag(|s|^(p-2))]] assembled index by index."""
    A = np.asarray(A, dtype=float)
    s = np.asarray(s, dtype=float)
    m, n = A.shape
    H = np.zeros((m + n, m + n))
    for i in range(m):
        for j in range(n):
            H[i, m + j] = A[i, j]
            H[m + j, i] = A[i, j]
    for j in range(n):
        H[m + j, m + j] = c * abs(s[j]) ** (p - 2.0)
    return H
