import math

import numpy as np
import pytest

from correlations import rbn
from errors import ParameterRangeError
from matcore import eigvals_hermitian, is_unitary, tensor
from models import ChannelName, ThermalParams
from states import PHI_PLUS_KET, bell_phi_plus
from thermal import (
    correlating_unitary,
    gibbs_qubit,
    rho_x,
    rho_x_from_gibbs,
    thermal_noise_sweep,
    thermal_params,
    thermal_sweep,
)


# ---------------------------------------------------------------------
# Gibbs states and the correlating unitary
# ---------------------------------------------------------------------

def test_gibbs_qubit_limits():
    assert gibbs_qubit(ThermalParams(E=3, kT=1)).matrix[0, 0].real == pytest.approx(1 / (1 + math.exp(-3)))
    assert gibbs_qubit(ThermalParams(E=1, kT=1e6)).allclose(np.eye(2) / 2, atol=1e-6)
    assert gibbs_qubit(ThermalParams(E=1, kT=1e-3)).allclose(np.diag([1.0, 0.0]), atol=1e-9)


def test_thermal_params_rejects_non_positive_temperature():
    with pytest.raises(ParameterRangeError):
        thermal_params(1.0, 0.0)
    with pytest.raises(ParameterRangeError):
        thermal_params(-1.0, 1.0)


def test_correlating_unitary():
    u = correlating_unitary()

    assert is_unitary(u, tol=1e-12)
    np.testing.assert_allclose(u @ np.array([1, 0, 0, 0]), PHI_PLUS_KET, atol=1e-12)


# ---------------------------------------------------------------------
# rho_X
# ---------------------------------------------------------------------

def test_rho_x_endpoints():
    assert np.max(np.abs(rho_x(1.0).matrix - bell_phi_plus().matrix)) <= 1e-12
    assert rho_x(0.5).allclose(np.eye(4) / 4, atol=1e-12)


def test_rho_x_rejects_out_of_range():
    with pytest.raises(ParameterRangeError):
        rho_x(0.4)
    with pytest.raises(ParameterRangeError):
        rho_x(1.01)


@pytest.mark.parametrize("kT", [0.1, 0.5, 1.0, 3.0, 20.0])
def test_rho_x_matches_unitary_construction(kT):
    params = ThermalParams(E=2.0, kT=kT)
    printed = rho_x(params.q)
    built = rho_x_from_gibbs(params)
    tau = gibbs_qubit(params)

    assert np.max(np.abs(printed.matrix - built.matrix)) <= 1e-12
    np.testing.assert_allclose(
        eigvals_hermitian(printed), eigvals_hermitian(tensor(tau, tau)), atol=1e-10
    )


def test_zero_temperature_rbn_is_ln2(fast_cfg):
    assert rbn(rho_x(1.0), fast_cfg).value == pytest.approx(math.log(2), abs=1e-5)


# ---------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------

def test_thermal_sweep_hierarchy_and_decay(fast_cfg):
    kt_grid = [0.1, 0.5, 1.0, 2.0, 5.0]
    rows = thermal_sweep([1.0, 3.0], kt_grid, fast_cfg, workers=1)

    assert [(row["E"], row["kT"]) for row in rows] == [(E, kT) for E in (1.0, 3.0) for kT in kt_grid]
    for row in rows:
        assert row["gd"] <= row["rbn"] + 1e-6
        assert abs(row["eta_zz"] - row["gd"]) <= 1e-6
        assert row["rbn"] == pytest.approx(row["eta_xx"], abs=1e-6)
    for energy in (1.0, 3.0):
        series = [row for row in rows if row["E"] == energy]
        assert all(a["rbn"] >= b["rbn"] - 1e-9 for a, b in zip(series, series[1:]))
        assert all(a["gd"] >= b["gd"] - 1e-9 for a, b in zip(series, series[1:]))


def test_thermal_sweep_orders_by_energy(fast_cfg):
    rows = thermal_sweep([1.0, 2.0, 3.0], [1.0], fast_cfg, workers=1)
    values = [row["rbn"] for row in rows]

    assert values[2] >= values[1] >= values[0]


def test_thermal_sweep_limits(fast_cfg):
    cold, = thermal_sweep([3.0], [0.01], fast_cfg, workers=1)
    hot, = thermal_sweep([1.0], [100.0], fast_cfg, workers=1)

    assert cold["rbn"] == pytest.approx(math.log(2), abs=1e-5)
    assert hot["rbn"] < 1e-3 and hot["gd"] < 1e-3


def test_thermal_noise_sweep_depolarizing(fast_cfg):
    rows = thermal_noise_sweep(2.0, [0.5, 2.0], ChannelName.DP, [(0.0, None), (0.5, None), (1.0, None)], fast_cfg, workers=1)

    assert len(rows) == 6
    for kT in (0.5, 2.0):
        series = [row for row in rows if row["kT"] == kT]
        assert series[0]["rbn_noisy"] == pytest.approx(series[0]["rbn"], abs=1e-6)
        assert series[0]["rbn_noisy"] >= series[1]["rbn_noisy"] - 1e-9
        assert series[1]["rbn_noisy"] >= series[2]["rbn_noisy"] - 1e-9
        assert series[2]["rbn_noisy"] <= 1e-9
        assert all(row["gamma"] is None and row["channel"] == "DP" for row in series)


def test_thermal_noise_sweep_full_amplitude_damping(fast_cfg):
    rows = thermal_noise_sweep(1.0, [0.3, 1.0], "AD", [(1.0, 1.0)], fast_cfg, workers=1)

    assert all(row["rbn_noisy"] <= 1e-9 for row in rows)
    assert all(row["gamma"] == 1.0 for row in rows)
