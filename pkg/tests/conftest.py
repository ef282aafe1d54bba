import numpy as np
import pytest
from hypothesis import settings

from choquetknn.measure import ExplicitMeasure, popcount, subset_indices
from choquetknn.worked_example import PATIENT_LABELS, PATIENT_VALUES, example_measure

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_monotone_table(rng, m, zero_prob=0.2):
    """Monotone table by walking subsets in size order and adding a random step."""
    t = np.zeros(1 << m)
    for k in sorted(range(1, 1 << m), key=lambda k: (popcount(k), k)):
        base = max(t[k & ~(1 << a)] for a in subset_indices(k))
        t[k] = base + (rng.exponential() if rng.random() > zero_prob else 0.0)
    return t


def random_measure(rng, m):
    return ExplicitMeasure(random_monotone_table(rng, m))


@pytest.fixture
def X1():
    return PATIENT_VALUES.copy()


@pytest.fixture
def y1():
    return np.array(PATIENT_LABELS)


@pytest.fixture
def mu1():
    return example_measure()


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
