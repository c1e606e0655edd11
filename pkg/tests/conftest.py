"""Shared fixtures: canonical curves, quadrature rules and operator matrices built once per session."""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cauchy_szego.boundary_operator import KSTSolver, discretize_cauchy, kerzman_stein  # noqa: E402
from cauchy_szego.geometry import Circle, Ellipse, quadrature  # noqa: E402
from cauchy_szego.kernels import DomainSide  # noqa: E402


@pytest.fixture(autouse=True)
def _clean_settings_env(monkeypatch):
    """Tests run with library defaults regardless of the developer's .env."""
    for name in ("CSZ_NODES", "CSZ_MAX_NODES", "CSZ_GRID_SIZE", "CSZ_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="session")
def unit_circle():
    return Circle()


@pytest.fixture(scope="session")
def ellipse2():
    return Ellipse(r=2.0)


@pytest.fixture(scope="session")
def ellipse2_rule(ellipse2):
    return quadrature(ellipse2, 512)


@pytest.fixture(scope="session")
def circle_ops():
    Cmat = discretize_cauchy(Circle(), DomainSide.INTERIOR, 128)
    return Cmat, kerzman_stein(Cmat)


@pytest.fixture(scope="session")
def ellipse2_ops_256():
    Cmat = discretize_cauchy(Ellipse(r=2.0), DomainSide.INTERIOR, 256)
    return Cmat, kerzman_stein(Cmat)


@pytest.fixture(scope="session")
def ellipse2_ops_512():
    Cmat = discretize_cauchy(Ellipse(r=2.0), DomainSide.INTERIOR, 512)
    return Cmat, kerzman_stein(Cmat)


@pytest.fixture(scope="session")
def ellipse2_solver_512(ellipse2_ops_512):
    return KSTSolver(*ellipse2_ops_512)
