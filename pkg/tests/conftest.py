import numpy as np
import pytest

from orfkit import PoleSequence, builtin_measure, gram_schmidt_orf, synthesize


def random_poles(seed, count, cap=0.7):
    rng = np.random.default_rng(seed)
    return PoleSequence(
        cap * np.sqrt(rng.uniform(size=count)) * np.exp(2j * np.pi * rng.uniform(size=count))
    )


def random_lambdas(seed, count, cap=0.6):
    rng = np.random.default_rng(seed)
    return cap * np.sqrt(rng.uniform(size=count)) * np.exp(2j * np.pi * rng.uniform(size=count))


@pytest.fixture(scope="session")
def lebesgue():
    return builtin_measure("lebesgue")


@pytest.fixture(scope="session")
def worked_system(lebesgue):
    # the golden configuration: beta = [0, 0.5, 0], Lebesgue, two levels
    return gram_schmidt_orf(lebesgue, PoleSequence([0.0, 0.5, 0.0]), 2)


@pytest.fixture(scope="session")
def poisson_system():
    # measure-sourced ladder with distinct complex poles
    mu = builtin_measure("poisson", alpha=0.3 - 0.2j)
    poles = PoleSequence([0.1 + 0.1j, -0.35, 0.2 + 0.4j, 0.45j, -0.1 - 0.3j])
    return gram_schmidt_orf(mu, poles, 4)


@pytest.fixture(scope="session")
def synth_system():
    # parameter-sourced ladder, nontrivial lambdas and poles
    return synthesize(random_lambdas(11, 4), random_poles(7, 5))
