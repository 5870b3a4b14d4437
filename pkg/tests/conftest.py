"""Shared helpers: seeded RNGs and random stationary AR specs.

Stationary coefficient vectors are drawn through reflection coefficients
in (-1, 1) and converted by the Levinson step-up recursion, which maps
any such point to a stationary AR polynomial. That gives an unbiased
sampler over the stationary region without rejection.
"""

import numpy as np
import pytest

from eobkit.processes import ARSpec, calibrate_innovation


def step_up(reflection: np.ndarray) -> np.ndarray:
    """Levinson step-up: reflection coefficients -> AR coefficients."""
    a = np.empty(0)
    for k in reflection:
        a = np.concatenate([a - k * a[::-1], [k]])
    return a


def random_stationary_spec(rng: np.random.Generator, p: int, sigma_eps2: float = 0.25,
                           max_reflection: float = 0.9) -> ARSpec:
    refl = rng.uniform(-max_reflection, max_reflection, size=p)
    return ARSpec(c=0.0, phi=tuple(step_up(refl)),
                  innovation=calibrate_innovation("gaussian", sigma_eps2),
                  sigma_eps2=sigma_eps2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
