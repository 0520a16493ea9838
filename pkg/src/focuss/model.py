"""Problem instances, sparsity measures, assumption checks, dataset schema.

The diversity measures are described by two per-entry functions: the cost
atom F(|s|) being summed, and the diagonal weight w(s) = F'(|s|)/(2|s|) that
drives the reweighted iteration.  For the plain power measure the measure-wide
constant p/2 is dropped from the weight (it cancels in the iterate); the
other measures keep theirs.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

DEFAULT_ZERO_THRESHOLD = 1e-8

LP_NORM = "lp_norm"
LOG_ABS = "log_abs"
NEG_POWER = "neg_power"

GEN_RANDOM = "random"
GEN_APPENDIX_A = "appendix-a"
GEN_APPENDIX_B = "appendix-b"
_GENERATORS = (GEN_RANDOM, GEN_APPENDIX_A, GEN_APPENDIX_B)


@dataclass(frozen=True)
class SparsityMeasure:
    """A separable sparsity-promoting cost sum_i F(|s_i|)."""

    kind: str
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind == LP_NORM:
            if self.p is None or not 0.0 < self.p < 2.0:
                raise ValueError("lp_norm requires 0 < p < 2")
        elif self.kind == LOG_ABS:
            if self.p is not None:
                raise ValueError("log_abs takes no exponent")
        elif self.kind == NEG_POWER:
            if self.p is None or not self.p < 0.0:
                raise ValueError("neg_power requires p < 0")
        else:
            raise ValueError(f"unknown measure kind {self.kind!r}")


def lp_norm(p: float) -> SparsityMeasure:
    return SparsityMeasure(LP_NORM, float(p))


def log_abs() -> SparsityMeasure:
    return SparsityMeasure(LOG_ABS)


def neg_power(p: float) -> SparsityMeasure:
    return SparsityMeasure(NEG_POWER, float(p))


def as_measure(p_or_measure: Union[float, SparsityMeasure]) -> SparsityMeasure:
    """Coerce a bare exponent to a measure: (0,2) -> lp_norm, p<0 -> neg_power."""
    if isinstance(p_or_measure, SparsityMeasure):
        return p_or_measure
    p = float(p_or_measure)
    if 0.0 < p < 2.0:
        return lp_norm(p)
    if p < 0.0:
        return neg_power(p)
    raise ValueError(
        f"no default measure for exponent {p}; p = 0 requires log_abs() explicitly"
    )


def measure_weight(measure: SparsityMeasure, s_i: float) -> float:
    """Diagonal weight w(s_i); the exact IEEE limit +inf at s_i = 0.

    Zero-safe callers should use inverse_weight instead.
    """
    a = abs(float(s_i))
    if a == 0.0:
        return math.inf
    if measure.kind == LP_NORM:
        return a ** (measure.p - 2.0)
    if measure.kind == LOG_ABS:
        return 1.0 / (2.0 * a * a)
    return (-measure.p / 2.0) * a ** (measure.p - 2.0)


def inverse_weight(measure: SparsityMeasure, s_i: float) -> float:
    """1 / w(s_i), defined as exactly 0 at s_i = 0."""
    a = abs(float(s_i))
    if a == 0.0:
        return 0.0
    if measure.kind == LP_NORM:
        return a ** (2.0 - measure.p)
    if measure.kind == LOG_ABS:
        return 2.0 * a * a
    return (2.0 / -measure.p) * a ** (2.0 - measure.p)


def inverse_weights(measure: SparsityMeasure, s) -> np.ndarray:
    """Vectorized inverse_weight; zero entries stay exactly zero."""
    a = np.abs(np.asarray(s, dtype=float))
    out = np.zeros_like(a)
    nz = a > 0.0
    if measure.kind == LP_NORM:
        out[nz] = a[nz] ** (2.0 - measure.p)
    elif measure.kind == LOG_ABS:
        out[nz] = 2.0 * a[nz] * a[nz]
    else:
        out[nz] = (2.0 / -measure.p) * a[nz] ** (2.0 - measure.p)
    return out


def cost_atom(measure: SparsityMeasure, a: float) -> float:
    """F(a) for a > 0."""
    if measure.kind == LP_NORM:
        return a**measure.p
    if measure.kind == LOG_ABS:
        return math.log(a)
    return -(a**measure.p)


def cost_atom_prime(measure: SparsityMeasure, a: float) -> float:
    """F'(a) for a > 0."""
    if measure.kind == LP_NORM:
        return measure.p * a ** (measure.p - 1.0)
    if measure.kind == LOG_ABS:
        return 1.0 / a
    return -measure.p * a ** (measure.p - 1.0)


def cost(measure: SparsityMeasure, s, zero_threshold: float = DEFAULT_ZERO_THRESHOLD) -> float:
    """Total cost sum_i F(|s_i|).

    For log_abs and neg_power the sum runs only over entries above the
    relative zero threshold (their atoms diverge at 0); the power measure
    sums every entry (0^p = 0).
    """
    a = np.abs(np.asarray(s, dtype=float))
    if measure.kind == LP_NORM:
        return float(np.sum(a**measure.p))
    scale = max(1.0, float(a.max(initial=0.0)))
    kept = a[a > zero_threshold * scale]
    if measure.kind == LOG_ABS:
        return float(np.sum(np.log(kept)))
    return float(-np.sum(kept**measure.p))


def support_size(s, threshold: float = DEFAULT_ZERO_THRESHOLD) -> int:
    """#{i : |s_i| > threshold * max(1, ||s||_inf)}."""
    a = np.abs(np.asarray(s, dtype=float))
    if a.size == 0:
        return 0
    scale = max(1.0, float(a.max()))
    return int(np.count_nonzero(a > threshold * scale))


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProblemInstance:
    """An underdetermined (or square) linear system A s = x."""

    A: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        A = _frozen_array(self.A)
        x = _frozen_array(self.x)
        if A.ndim != 2:
            raise ValueError("A must be 2-D")
        if x.ndim != 1 or x.shape[0] != A.shape[0]:
            raise ValueError("x must be a vector with len(x) == rows(A)")
        if A.shape[0] > A.shape[1]:
            raise ValueError("overdetermined systems are out of scope (need m <= n)")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(x))):
            raise ValueError("A and x must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "x", x)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class AssumptionReport:
    x_nonzero: bool
    columns_checked: int
    columns_ok: bool
    expressibility_ok: bool
    exhaustive: bool

    @property
    def all_ok(self) -> bool:
        return self.x_nonzero and self.columns_ok and self.expressibility_ok


def _subset_iter(n: int, size: int, budget: int, rng: np.random.Generator):
    """All size-subsets of range(n) when there are <= budget of them, else
    `budget` uniformly sampled ones.  Returns (iterable, exhaustive_flag)."""
    total = math.comb(n, size)
    if total <= budget:
        return itertools.combinations(range(n), size), True
    def sample():
        for _ in range(budget):
            yield tuple(sorted(rng.choice(n, size=size, replace=False)))
    return sample(), False


def validate_assumptions(
    instance: ProblemInstance, budget: int = 1000, seed: int = 0
) -> AssumptionReport:
    """Check the well-posedness assumptions, exactly or by sampling.

    x != 0 is checked exactly.  "Every m columns independent" and "x not
    expressible by m-1 columns" are exhaustive when the number of subsets is
    within `budget`, else `budget` uniformly sampled subsets are tested.
    Deterministic for fixed (instance, budget, seed).
    """
    rng = np.random.default_rng(seed)
    A, x = instance.A, instance.x
    m, n = instance.m, instance.n
    x_nonzero = bool(np.any(x != 0.0))
    checked = 0

    subsets, exhaustive_m = _subset_iter(n, m, budget, rng)
    columns_ok = True
    for sup in subsets:
        checked += 1
        if np.linalg.matrix_rank(A[:, sup]) < m:
            columns_ok = False

    expr_tol = 1e-9 * (1.0 + np.linalg.norm(x))
    subsets, exhaustive_m1 = _subset_iter(n, m - 1, budget, rng)
    expressibility_ok = True
    for sup in subsets:
        checked += 1
        if len(sup) == 0:
            resid = np.linalg.norm(x)
        else:
            sub = A[:, sup]
            c, _, _, _ = np.linalg.lstsq(sub, x, rcond=None)
            resid = np.linalg.norm(sub @ c - x)
        if resid <= expr_tol:
            expressibility_ok = False

    return AssumptionReport(
        x_nonzero=x_nonzero,
        columns_checked=checked,
        columns_ok=columns_ok,
        expressibility_ok=expressibility_ok,
        exhaustive=exhaustive_m and exhaustive_m1,
    )


@dataclass(frozen=True)
class GeneratedDataset:
    """A problem instance plus generator metadata and optional planted truth."""

    instance: ProblemInstance
    p: float
    planted_solution: Optional[np.ndarray]
    generator: str
    seed: int
    certificate: Optional[float] = None

    def __post_init__(self):
        if self.generator not in _GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.planted_solution is not None:
            planted = _frozen_array(self.planted_solution)
            if planted.shape != (self.instance.n,):
                raise ValueError("planted solution has wrong length")
            resid = np.linalg.norm(self.instance.A @ planted - self.instance.x)
            bound = 1e-10 * (1.0 + np.linalg.norm(self.instance.x))
            if resid > bound:
                raise ValueError(
                    f"planted solution infeasible: residual {resid:.3e} > {bound:.3e}"
                )
            object.__setattr__(self, "planted_solution", planted)


def dataset_to_dict(ds: GeneratedDataset) -> dict:
    """JSON-ready dict; row-major nested lists, binary64-exact floats."""
    out = {
        "m": ds.instance.m,
        "n": ds.instance.n,
        "p": float(ds.p),
        "A": ds.instance.A.tolist(),
        "x": ds.instance.x.tolist(),
        "generator": ds.generator,
        "seed": int(ds.seed),
    }
    if ds.planted_solution is not None:
        out["planted_solution"] = ds.planted_solution.tolist()
    if ds.certificate is not None:
        out["certificate"] = float(ds.certificate)
    return out


def dataset_from_dict(d: dict) -> GeneratedDataset:
    """Inverse of dataset_to_dict; raises ValueError on a malformed document."""
    try:
        m, n = int(d["m"]), int(d["n"])
        A = np.array(d["A"], dtype=float)
        x = np.array(d["x"], dtype=float)
        p = float(d["p"])
        generator = d["generator"]
        seed = int(d["seed"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed dataset document: {exc}") from exc
    if A.shape != (m, n):
        raise ValueError(f"A has shape {A.shape}, header says {(m, n)}")
    if x.shape != (m,):
        raise ValueError(f"x has shape {x.shape}, header says ({m},)")
    planted = d.get("planted_solution")
    cert = d.get("certificate")
    return GeneratedDataset(
        instance=ProblemInstance(A, x),
        p=p,
        planted_solution=None if planted is None else np.array(planted, dtype=float),
        generator=generator,
        seed=seed,
        certificate=None if cert is None else float(cert),
    )


def dumps_dataset(ds: GeneratedDataset) -> str:
    """Canonical serialization: sorted keys, fixed layout, trailing newline."""
    return json.dumps(dataset_to_dict(ds), sort_keys=True, indent=2) + "\n"


def loads_dataset(text: str) -> GeneratedDataset:
    return dataset_from_dict(json.loads(text))
