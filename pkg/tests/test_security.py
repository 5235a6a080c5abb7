import math

import numpy as np
import pytest

from correlations import direction_grid, eta, rbn, werner_rbn_closed_form
from errors import DimensionMismatchError, NotMutuallyUnbiasedError, ParameterRangeError
from matcore import DensityMatrix, partial_trace, tensor
from measurement import ProjectiveBasis, pauli_basis, pauli_direction, qubit_basis
from models import MeasurementDirection, PauliAxis, ProtocolConfig, Sampling, Scenario, Side
from security import (
    analytic_envelopes,
    bloch_alignment,
    double_dephase_mub,
    eta_after_eve_analytic,
    eta_after_eve_general,
    eve_direction_grid_max,
    eve_intercept,
    mub_overlap_check,
    rbn_after_eve_analytic,
    simulate_protocol,
    werner_distinct_pauli_eta,
)
from states import singlet, werner

LN2 = math.log(2)


# ---------------------------------------------------------------------
# Interception and MUB algebra
# ---------------------------------------------------------------------

def test_intercept_leaves_diagonal_state_unchanged():
    rho = DensityMatrix(np.diag([0.1, 0.2, 0.3, 0.4]), dims=(2, 2))

    assert eve_intercept(rho, pauli_basis("z")).allclose(rho)


def test_intercept_keeps_werner_marginal():
    out = eve_intercept(werner(0.6), qubit_basis(MeasurementDirection(theta=0.7, phi=2.2)))

    assert partial_trace(out, Side.B).allclose(np.eye(2) / 2)


def test_intercept_singlet_in_x():
    out = eve_intercept(singlet(), pauli_basis("x"))
    plus = np.array([1, 1]) / math.sqrt(2)
    minus = np.array([1, -1]) / math.sqrt(2)
    pm, mp = np.kron(plus, minus), np.kron(minus, plus)
    expected = 0.5 * (np.outer(pm, pm) + np.outer(mp, mp))

    assert out.allclose(expected)


def test_mub_overlap_check():
    z, x = pauli_basis("z"), pauli_basis("x")
    equator = qubit_basis(MeasurementDirection(theta=0.0, phi=1.3))

    assert mub_overlap_check(z, x)
    assert not mub_overlap_check(z, z)
    assert mub_overlap_check(z, equator)


def test_mub_overlap_check_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        mub_overlap_check(pauli_basis("z"), ProjectiveBasis.from_kets(np.eye(3)))


def test_double_dephase_mub_gives_reduced_state_times_identity(random_state):
    for _ in range(20):
        rho = random_state()
        out = double_dephase_mub(rho, pauli_basis("z"), pauli_basis("x"))
        expected = tensor(partial_trace(rho, Side.A).matrix, np.eye(2) / 2)

        assert np.max(np.abs(out.matrix - expected)) <= 1e-10


def test_double_dephase_mub_examples():
    assert double_dephase_mub(werner(0.9), pauli_basis("z"), pauli_basis("x")).allclose(np.eye(4) / 4)

    zero_plus = DensityMatrix(tensor(np.diag([1.0, 0.0]), np.full((2, 2), 0.5)), dims=(2, 2))
    out = double_dephase_mub(zero_plus, pauli_basis("z"), pauli_basis("x"))
    assert out.allclose(tensor(np.diag([1.0, 0.0]), np.eye(2) / 2))


def test_double_dephase_output_has_no_contextual_nonlocality(rng, random_state):
    out = double_dephase_mub(random_state(), pauli_basis("y"), pauli_basis("z"))
    for _ in range(5):
        a = qubit_basis(MeasurementDirection(theta=rng.uniform(0, math.pi), phi=rng.uniform(0, 2 * math.pi)))
        b = qubit_basis(MeasurementDirection(theta=rng.uniform(0, math.pi), phi=rng.uniform(0, 2 * math.pi)))
        assert eta(a, b, out) == pytest.approx(0.0, abs=1e-10)


def test_double_dephase_requires_mub():
    with pytest.raises(NotMutuallyUnbiasedError):
        double_dephase_mub(werner(0.5), pauli_basis("z"), pauli_basis("z"))


# ---------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------

def test_eta_after_eve_analytic_examples():
    assert eta_after_eve_analytic(0.7, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert eta_after_eve_analytic(0.7, -1.0) == pytest.approx(0.0, abs=1e-12)
    assert eta_after_eve_analytic(1.0, 0.0) == pytest.approx(LN2)
    assert eta_after_eve_analytic(0.5, 0.0) == pytest.approx(0.1308, abs=1e-4)


def test_rbn_after_eve_analytic_examples():
    assert rbn_after_eve_analytic(0.0) == pytest.approx(0.0, abs=1e-12)
    assert rbn_after_eve_analytic(1.0) == pytest.approx(LN2)
    assert rbn_after_eve_analytic(0.5) == pytest.approx(eta_after_eve_analytic(0.5, 0.0))
    assert rbn_after_eve_analytic(0.5) <= werner_rbn_closed_form(0.5)


@pytest.mark.parametrize("mu", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_interception_never_beats_noiseless_curve(mu):
    assert rbn_after_eve_analytic(mu) <= werner_rbn_closed_form(mu) + 1e-12


def test_closed_form_ranges():
    with pytest.raises(ParameterRangeError):
        eta_after_eve_analytic(0.5, 1.5)
    with pytest.raises(ParameterRangeError):
        rbn_after_eve_analytic(-0.2)


def test_general_form_reduces_to_display_when_bob_is_unbiased():
    for r in (-0.8, -0.1, 0.0, 0.4, 0.9):
        assert eta_after_eve_general(0.6, r, 0.0) == pytest.approx(eta_after_eve_analytic(0.6, r), abs=1e-12)


def test_general_form_matches_numeric_eta(rng):
    mu = 0.65
    rho = werner(mu)
    for _ in range(10):
        a, b, e = (
            MeasurementDirection(theta=rng.uniform(0, math.pi), phi=rng.uniform(0, 2 * math.pi))
            for _ in range(3)
        )
        numeric = eta(qubit_basis(a), qubit_basis(b), eve_intercept(rho, qubit_basis(e)))
        closed = eta_after_eve_general(mu, bloch_alignment(a, e), bloch_alignment(b, e))
        assert numeric == pytest.approx(closed, abs=1e-6)


def test_display_matches_numeric_eta_over_direction_grid():
    # Bob on sigma_x, Eve in the y-z plane (unbiased to Bob), Alice anywhere
    mu = 0.8
    rho = werner(mu)
    bob = pauli_direction(PauliAxis.X)
    thetas, phis = direction_grid(6)
    for phi_e in (0.3, 1.9, 4.4):
        eve = MeasurementDirection(theta=math.pi / 2, phi=phi_e)
        intercepted = eve_intercept(rho, qubit_basis(eve))
        for theta, phi in zip(thetas, phis):
            alice = MeasurementDirection.normalized(theta, phi)
            numeric = eta(qubit_basis(alice), qubit_basis(bob), intercepted)
            assert numeric == pytest.approx(eta_after_eve_analytic(mu, bloch_alignment(alice, eve)), abs=1e-6)


def test_bloch_alignment():
    x, y, z = (pauli_direction(axis) for axis in PauliAxis)

    assert bloch_alignment(z, z) == pytest.approx(1.0)
    assert bloch_alignment(x, y) == pytest.approx(0.0, abs=1e-12)
    assert bloch_alignment(z, MeasurementDirection(theta=math.pi / 2, phi=math.pi)) == pytest.approx(-1.0)


# ---------------------------------------------------------------------
# Witness bound and envelopes
# ---------------------------------------------------------------------

def test_interception_bound_on_sampled_states(rng, fast_cfg):
    for _ in range(4):
        mu = rng.uniform(0, 1)
        eve = MeasurementDirection(theta=rng.uniform(0, math.pi), phi=rng.uniform(0, 2 * math.pi))
        after = rbn(eve_intercept(werner(mu), qubit_basis(eve)), fast_cfg).value

        assert -1e-9 <= after <= rbn(werner(mu), fast_cfg).value + 1e-6
        assert after == pytest.approx(rbn_after_eve_analytic(mu), abs=1e-6)


@pytest.mark.parametrize("mu", [0.25, 0.5, 0.75, 1.0])
def test_eve_grid_maximum_matches_closed_form(mu):
    assert eve_direction_grid_max(mu, 24) == pytest.approx(rbn_after_eve_analytic(mu), abs=1e-4)


def test_distinct_pauli_curve_lies_between_zero_and_noiseless():
    assert werner_distinct_pauli_eta(0.5) == pytest.approx(0.0511, abs=1e-3)
    assert werner_distinct_pauli_eta(1.0) == pytest.approx(0.0, abs=1e-12)
    for mu in (0.2, 0.5, 0.9):
        assert 0.0 <= werner_distinct_pauli_eta(mu) <= werner_rbn_closed_form(mu)


def test_analytic_envelopes_columns(caplog):
    rows = analytic_envelopes([0.0, 0.5, 1.0], points_per_angle=8)

    assert [row["mu"] for row in rows] == [0.0, 0.5, 1.0]
    assert all(not row["flagged"] for row in rows)
    assert rows[1]["rbn_after_eve"] <= rows[1]["rbn_noiseless"]
    assert "mismatch" not in caplog.text


# ---------------------------------------------------------------------
# Protocol simulation
# ---------------------------------------------------------------------

def test_ideal_same_axis_records_lie_on_noiseless_curve():
    records = simulate_protocol(
        ProtocolConfig(samples=60, scenario=Scenario.IDEAL, sampling=Sampling.PAULI, seed=9),
        workers=1,
    )
    same_axis = [r for r in records if r.alice_axis == r.bob_axis]

    assert same_axis
    for record in same_axis:
        assert record.eta_value == pytest.approx(werner_rbn_closed_form(record.mu), abs=1e-9)
    for record in records:
        assert record.eta_value <= werner_rbn_closed_form(record.mu) + 1e-9


def test_eve_aligned_records_vanish():
    records = simulate_protocol(
        ProtocolConfig(samples=40, scenario=Scenario.EVE_ALIGNED, sampling=Sampling.MIXED, seed=4),
        workers=1,
    )

    assert all(record.eta_value <= 1e-10 for record in records)
    assert all(record.eve == record.bob for record in records)


def test_eve_random_records_respect_envelope():
    records = simulate_protocol(
        ProtocolConfig(samples=60, scenario=Scenario.EVE_RANDOM, sampling=Sampling.CONTINUOUS, seed=2),
        workers=1,
    )

    for record in records:
        assert record.eve is not None
        assert record.eta_value <= rbn_after_eve_analytic(record.mu) + 1e-6


def test_mixed_sampling_tags_each_record():
    records = simulate_protocol(ProtocolConfig(samples=40, seed=1), workers=1)
    kinds = {record.sampling for record in records}

    assert kinds == {Sampling.PAULI, Sampling.CONTINUOUS}
    for record in records:
        assert (record.alice_axis is not None) == (record.sampling == Sampling.PAULI)


def test_protocol_is_deterministic_and_rows_are_flat():
    cfg = ProtocolConfig(samples=10, scenario=Scenario.EVE_RANDOM, seed=123, mu_range=(0.2, 0.4))
    first = simulate_protocol(cfg, workers=1)
    second = simulate_protocol(cfg, workers=1)

    assert [r.as_row() for r in first] == [r.as_row() for r in second]
    row = first[0].as_row()
    assert list(row)[:8] == ["mu", "theta_a", "phi_a", "theta_b", "phi_b", "theta_e", "phi_e", "eta"]
    assert all(0.2 <= r.mu <= 0.4 for r in first)
