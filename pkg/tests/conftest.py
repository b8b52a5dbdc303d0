import numpy as np
import pytest

import wavelimit as wl

# the sample pattern used throughout: mild rarefactions around a weak contact
LEFT = wl.ThermoState(1.0, -0.5, 1.0)
RIGHT = wl.ThermoState(1.2, 0.5, 1.1)


@pytest.fixture(scope="session")
def params():
    return wl.GasParams()


@pytest.fixture(scope="session")
def kparams():
    return wl.kinetic_params()


@pytest.fixture(scope="session")
def pattern(params):
    return wl.solve_pattern(LEFT, RIGHT, params)


@pytest.fixture(scope="session")
def kpattern(kparams):
    return wl.solve_pattern(LEFT, RIGHT, kparams)


@pytest.fixture(scope="session")
def cfg_e2(pattern, params):
    return wl.build_profile_config(1e-2, pattern, params)


@pytest.fixture(scope="session")
def cfg_e3(pattern, params):
    return wl.build_profile_config(1e-3, pattern, params)


@pytest.fixture(scope="session")
def kcfg_e2(kpattern, kparams):
    return wl.build_profile_config(1e-2, kpattern, kparams, model="kinetic")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
