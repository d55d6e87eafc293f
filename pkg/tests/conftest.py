"""Shared fixtures: standard domain, kernels, budgets, and one run of
each check suite for the acceptance tests to pick apart."""

import numpy as np
import pytest

from bregforms import BallDomain, QuadratureConfig, StableKernel
from bregforms.cli import SuiteConfig, run_suite


@pytest.fixture(scope="session")
def unit_domain():
    return BallDomain(center=np.zeros(1), radius=1.0)


@pytest.fixture(scope="session")
def cauchy_kernel():
    return StableKernel(1, 1.0)


@pytest.fixture(scope="session")
def budget():
    return QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9,
                            max_subdivisions=600, tail_cut=60.0)


@pytest.fixture(scope="session")
def coarse_budget():
    return QuadratureConfig(rel_tol=1e-4, abs_tol=1e-7,
                            max_subdivisions=200, tail_cut=40.0)


def _suite_reports(name, **overrides):
    cfg = SuiteConfig(suite=name, jobs=4, **overrides)
    _, reports = run_suite(cfg)
    return {r.check: r for r in reports}


@pytest.fixture(scope="session")
def douglas_reports():
    return _suite_reports("douglas")


@pytest.fixture(scope="session")
def hardy_stein_reports():
    return _suite_reports("hardy-stein")


@pytest.fixture(scope="session")
def inequality_reports():
    return _suite_reports("inequalities")


@pytest.fixture(scope="session")
def minimize_reports():
    return _suite_reports("minimize")


@pytest.fixture(scope="session")
def nonminimizer_reports():
    return _suite_reports("nonminimizer")


@pytest.fixture(scope="session")
def divergence_reports():
    return _suite_reports("divergence")
