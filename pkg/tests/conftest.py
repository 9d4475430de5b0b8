import math

import numpy as np
import pytest

from lamperti_ou.models import JumpLaw, LevyModel
from lamperti_ou.rng import stream


def within_3se(sample, target):
    sample = np.asarray(sample, dtype=float)
    se = np.std(sample, ddof=1) / math.sqrt(sample.size)
    return abs(sample.mean() - target) <= 3.0 * se + 1e-12 * abs(target)


def within_max(sample, target, rel=0.01):
    sample = np.asarray(sample, dtype=float)
    se = np.std(sample, ddof=1) / math.sqrt(sample.size)
    return abs(sample.mean() - target) <= max(rel * abs(target), 3.0 * se)


@pytest.fixture
def rng():
    return stream(12345)


@pytest.fixture
def drift1():
    return LevyModel.deterministic_drift(1.0)


@pytest.fixture
def poisson1():
    return LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0))


@pytest.fixture
def stable05():
    return LevyModel.stable_subordinator(0.5)


@pytest.fixture
def brownian():
    return LevyModel.brownian(1.0, 1.0)


ALL_MODELS = [
    LevyModel.deterministic_drift(2.0),
    LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0)),
    LevyModel.compound_poisson(2.0, JumpLaw.exponential(1.5), drift=0.5),
    LevyModel.compound_poisson(1.0, JumpLaw.constant(-1.0), drift=2.0),
    LevyModel.compound_poisson(1.0, JumpLaw.pareto(0.8)),
    LevyModel.brownian(1.0, 0.7),
    LevyModel.stable_subordinator(0.5),
    LevyModel.stable_subordinator_drift(0.7, 0.5),
]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
