"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skewelliptic.distribution import BoundaryShapeWarning, SkewElliptical
from skewelliptic.generators import GeneratorFamily

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# one representative member of each family; shape parameters keep the first
# four radial moments finite at k <= 3
FAMILY_SPECS = ["normal", "t:12", "logistic", "laplace", "pearson2:1.5", "pearson7:7"]

OMEGA_T11 = np.array([[2.0, 1.0], [1.0, 3.0]])
DELTA_T11 = np.array([0.2, 1.0])


@pytest.fixture(autouse=True)
def _quiet_boundary_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryShapeWarning)
        yield


def family(spec: str, k: int) -> GeneratorFamily:
    return GeneratorFamily.parse(spec, k)


def random_params(rng: np.random.Generator, k: int, max_shape: float = 0.9):
    """Random ``(mu, Omega, delta)`` with ``delta^T Omega^-1 delta <= max_shape^2``."""
    A = rng.standard_normal((k, k))
    Om = A @ A.T + 0.5 * np.eye(k)
    L = np.linalg.cholesky(Om)
    u = rng.standard_normal(k)
    u *= rng.uniform(0.05, max_shape) / np.linalg.norm(u)
    return rng.standard_normal(k), Om, L @ u


def random_distribution(rng: np.random.Generator, spec: str, k: int, max_shape: float = 0.9) -> SkewElliptical:
    mu, Om, de = random_params(rng, k, max_shape)
    return SkewElliptical(mu, Om, de, family(spec, k))


def canonical_distribution(spec: str, k: int, delta_star: float) -> SkewElliptical:
    de = np.zeros(k)
    de[0] = delta_star
    return SkewElliptical(np.zeros(k), np.eye(k), de, family(spec, k))


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criteria verdicts, one line each."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(lines):
        terminalreporter.write_line(lines[num])
