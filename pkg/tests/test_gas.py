import math

import numpy as np
import pytest

import wavelimit as wl
from wavelimit import gas
from wavelimit.errors import InvalidStateError


def test_pressure_values():
    assert gas.pressure(1.0, 1.0, wl.GasParams(R=1.0)) == 1.0
    # the kinetic normalization R = 2/3 gives p = 2/3 at unit state
    assert gas.pressure(1.0, 1.0, wl.GasParams(R=2.0 / 3.0)) == pytest.approx(2.0 / 3.0, abs=0)
    assert gas.pressure(2.0, 3.0, wl.GasParams(R=2.0 / 3.0)) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("v,theta", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_pressure_domain_errors(v, theta):
    with pytest.raises(InvalidStateError):
        gas.pressure(v, theta, wl.GasParams())


def test_entropy_values():
    p = wl.GasParams(R=1.0, gamma=5.0 / 3.0, A=1.0)
    assert gas.entropy(1.0, 1.0, p) == 0.0  # theta = A/R
    # gamma=2 closed form: s = (R/(gamma-1)) ln(R theta v^(gamma-1) / A) = ln 2
    p2 = wl.GasParams(R=1.0, gamma=2.0, A=1.0)
    assert gas.entropy(2.0, 1.0, p2) == pytest.approx(math.log(2.0), rel=1e-15)


def test_entropy_pressure_round_trip():
    p = wl.GasParams()
    s = gas.entropy(1.7, 0.9, p)
    via_s = gas.pressure_isentropic(1.7, s, p)
    direct = gas.pressure(1.7, 0.9, p)
    assert via_s == pytest.approx(direct, rel=1e-12)


def test_round_trip_holds_across_state_grid(rng):
    p = wl.GasParams(R=0.7, gamma=1.4, A=2.3)
    for _ in range(200):
        v = rng.uniform(0.05, 20.0)
        th = rng.uniform(0.05, 20.0)
        s = gas.entropy(v, th, p)
        assert gas.pressure_isentropic(v, s, p) == pytest.approx(
            gas.pressure(v, th, p), rel=1e-12
        )


def test_char_speed_values():
    p = wl.GasParams()
    s = gas.entropy(1.0, 1.0, p)  # p(v=1, s) = 1
    assert gas.char_speed(1.0, s, 3, p) == pytest.approx(math.sqrt(5.0 / 3.0), rel=1e-14)
    assert gas.char_speed(1.0, s, 1, p) == pytest.approx(-math.sqrt(5.0 / 3.0), rel=1e-14)
    p14 = wl.GasParams(gamma=1.4)
    s14 = gas.entropy(2.0, 1.0, p14)  # p(v=2, s14) = 0.5
    assert gas.char_speed(2.0, s14, 3, p14) == pytest.approx(math.sqrt(0.35), rel=1e-14)


def test_char_speed_family_usage_error():
    with pytest.raises(ValueError):
        gas.char_speed(1.0, 0.0, 2, wl.GasParams())


def test_char_speeds_are_opposite(rng):
    p = wl.GasParams(gamma=1.4)
    for _ in range(50):
        v, th = rng.uniform(0.1, 10.0, size=2)
        s = gas.entropy(v, th, p)
        assert gas.char_speed(v, s, 1, p) == -gas.char_speed(v, s, 3, p)


def test_lambda3_decreases_along_isentrope():
    p = wl.GasParams()
    s = gas.entropy(1.0, 1.0, p)
    v = np.linspace(0.2, 5.0, 200)
    lam = gas.char_speed(v, s, 3, p)
    assert np.all(np.diff(lam) < 0.0)


def test_internal_energy_linear_in_theta():
    p = wl.GasParams(gamma=1.4, R=0.9)
    assert gas.internal_energy(2.0, p) == pytest.approx(2.0 * gas.internal_energy(1.0, p))


def test_v_from_char_speed_inverts():
    p = wl.GasParams()
    s = gas.entropy(1.3, 0.8, p)
    for v in (0.3, 1.0, 4.2):
        w = gas.char_speed(v, s, 1, p)
        assert gas.v_from_char_speed(w, s, 1, p) == pytest.approx(v, rel=1e-14)
    with pytest.raises(ValueError):
        gas.v_from_char_speed(0.5, s, 1, p)  # wrong sign for family 1


def test_thermo_state_positivity():
    with pytest.raises(InvalidStateError):
        wl.ThermoState(-1.0, 0.0, 1.0)
    with pytest.raises(InvalidStateError):
        wl.ThermoState(1.0, 0.0, 0.0)


def test_gas_params_validation():
    with pytest.raises(InvalidStateError):
        wl.GasParams(gamma=1.0)
    with pytest.raises(InvalidStateError):
        wl.GasParams(R=0.0)
