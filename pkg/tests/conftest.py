"""Shared fixtures: small deterministic instances used across test modules."""

import numpy as np
import pytest

from focuss.model import ProblemInstance


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)


@pytest.fixture
def tiny_instance():
    """2x3 system with hand-checkable exact solutions on every support."""
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    x = np.array([1.0, 1.0])
    return ProblemInstance(A, x)


def make_gaussian_instance(m, n, seed):
    r = np.random.default_rng(seed)
    return ProblemInstance(r.standard_normal((m, n)), r.standard_normal(m))


@pytest.fixture
def gaussian_instance():
    return make_gaussian_instance(5, 9, seed=42)
