import numpy as np
import pytest

from channels import (
    KrausChannel,
    amplitude_damping,
    apply_local,
    bit_flip,
    bit_phase_flip,
    completeness_deviation,
    depolarizing,
    is_unital,
    make_channel,
    sample_monotonicity,
    werner_curve,
)
from correlations import rbn, werner_rbn_closed_form
from errors import DimensionMismatchError, ParameterRangeError
from matcore import DensityMatrix, partial_trace, tensor
from models import ChannelName, Side
from states import singlet, werner


# ---------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------

@pytest.mark.parametrize("name", list(ChannelName))
@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_every_channel_is_trace_preserving(name, p):
    channel = make_channel(name, p, 0.6)

    assert completeness_deviation(channel) <= 1e-12
    assert channel.dim == 2


@pytest.mark.parametrize("name", [ChannelName.IB, ChannelName.IF, ChannelName.IBF, ChannelName.DP])
def test_pauli_channels_are_unital(name):
    assert is_unital(make_channel(name, 0.37))


def test_amplitude_damping_is_not_unital():
    assert not is_unital(amplitude_damping(1.0, 0.5))
    assert not amplitude_damping(0.2, 0.9).unital


def test_generalized_amplitude_damping_balanced_mixing_is_unital():
    # p = 1/2 mixes decay towards |0> and |1> equally
    assert is_unital(amplitude_damping(0.5, 0.8))


def test_make_channel_defaults_gamma_to_one():
    channel = make_channel("AD", 1.0)

    assert channel.gamma == 1.0
    assert channel.name == ChannelName.AD


@pytest.mark.parametrize("p, gamma", [(-0.1, 0.5), (1.1, 0.5), (0.5, 2.0)])
def test_out_of_range_parameters(p, gamma):
    with pytest.raises(ParameterRangeError):
        amplitude_damping(p, gamma)


def test_unknown_channel_name():
    with pytest.raises(ParameterRangeError):
        make_channel("XX", 0.5)


def test_incomplete_kraus_set_is_rejected():
    with pytest.raises(ValueError):
        KrausChannel(name=ChannelName.IB, kraus_ops=(np.eye(2) * 0.5,), p=0.5)


# ---------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------

def test_identity_endpoints_leave_state_unchanged():
    rho = werner(0.7)

    assert apply_local(bit_flip(1.0), rho).allclose(rho)
    assert apply_local(depolarizing(0.0), rho).allclose(rho)


def test_full_depolarization_gives_product_with_identity():
    rho = werner(0.8)
    out = apply_local(depolarizing(1.0), rho)

    assert out.allclose(np.eye(4) / 4)


def test_full_damping_collapses_b_to_ground_state():
    out = apply_local(amplitude_damping(1.0, 1.0), singlet())

    assert partial_trace(out, Side.B).allclose(np.diag([1.0, 0.0]))
    assert out.allclose(tensor(np.eye(2) / 2, np.diag([1.0, 0.0])))


def test_inversion_at_p_zero_is_a_local_unitary():
    rho = werner(0.5)
    out = apply_local(bit_phase_flip(0.0), rho)

    # a single unitary Kraus operator
    assert np.allclose(np.linalg.eigvalsh(out.matrix), np.linalg.eigvalsh(rho.matrix), atol=1e-12)


def test_apply_local_on_side_a_mirrors_side_b():
    rho = DensityMatrix(tensor(np.diag([0.9, 0.1]), np.diag([0.3, 0.7])), dims=(2, 2))
    channel = amplitude_damping(1.0, 1.0)

    assert partial_trace(apply_local(channel, rho, Side.A), Side.A).allclose(np.diag([1.0, 0.0]))
    assert partial_trace(apply_local(channel, rho, Side.A), Side.B).allclose(np.diag([0.3, 0.7]))


def test_apply_local_dimension_checks():
    with pytest.raises(DimensionMismatchError):
        apply_local(bit_flip(0.5), singlet(), Side.AB)
    with pytest.raises(DimensionMismatchError):
        apply_local(bit_flip(0.5), DensityMatrix(np.eye(6) / 6, dims=(2, 3)), Side.B)


# ---------------------------------------------------------------------
# Noisy Werner studies
# ---------------------------------------------------------------------

def test_werner_curve_noiseless_and_endpoints(fast_cfg):
    mu_grid = [0.0, 0.3, 0.6, 1.0]
    rows = werner_curve(mu_grid, fast_cfg, channel=bit_flip(1.0), workers=1)

    assert [row["mu"] for row in rows] == mu_grid
    for row in rows:
        assert row["rbn_numeric"] == pytest.approx(row["rbn_analytic"], abs=1e-6)
        assert row["rbn_noisy"] == pytest.approx(row["rbn_analytic"], abs=1e-6)
    assert rows[1]["separable"] and not rows[2]["separable"]


def test_werner_curve_fully_depolarized_is_zero(fast_cfg):
    rows = werner_curve([0.5, 1.0], fast_cfg, channel=depolarizing(1.0), workers=1)

    assert all(row["rbn_noisy"] <= 1e-9 for row in rows)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_inversion_channels_give_identical_werner_curves(fast_cfg, p):
    for mu in (0.2, 0.5, 0.8):
        rho = werner(mu)
        values = [rbn(apply_local(make_channel(name, p), rho), fast_cfg).value for name in ("IB", "IF", "IBF")]

        assert max(values) - min(values) <= 1e-6


def test_sample_monotonicity_has_no_violations(fast_cfg, caplog):
    caplog.set_level("INFO")
    rows = sample_monotonicity(12, seed=3, cfg=fast_cfg, workers=1)

    assert len(rows) == 12
    assert not any(row["violation"] for row in rows)
    for row in rows:
        assert row["rbn_clean"] == pytest.approx(werner_rbn_closed_form(row["mu"]))
        assert row["rbn_noisy"] <= row["rbn_clean"] + 1e-6
        assert (row["gamma"] is None) == (row["channel"] != "AD")
    assert "Monotonicity holds on all 12 samples" in caplog.text


def test_sample_monotonicity_is_reproducible(fast_cfg):
    first = sample_monotonicity(4, seed=11, cfg=fast_cfg, channels=["DP", "AD"], workers=1)
    second = sample_monotonicity(4, seed=11, cfg=fast_cfg, channels=["DP", "AD"], workers=1)

    assert first == second
    assert {row["channel"] for row in first} <= {"DP", "AD"}
