import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from plasmon_epr.device import RAD_PER_NS_PER_MICRO_EV, PhysicalParams, band_width_for_top
from plasmon_epr.dynamics import (
    IntegratorConfig,
    SystemState,
    full_model,
    initial_state,
    integrate,
    two_mode_reduction,
)
from plasmon_epr.errors import InvalidParameterError, TruncationError
from plasmon_epr.observables import (
    depletion_exponent,
    depletion_report,
    epr_quadrature_variance,
    epr_ratio,
    fock_number_difference_variance,
    fock_oracle_variance,
    fock_pair_state,
    homodyne_phase,
    moving_average,
    number_difference_variance,
    pair_covariance,
    photon_balance,
    photon_number,
    resonant_mode,
    squeezing_spectrum,
)

from conftest import desk_params

PERIOD = 2 * math.pi / 200.0


def state_of(rs, thetas):
    rs = np.asarray(rs, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    xy = np.column_stack([np.sinh(2 * rs) * np.cos(2 * thetas), np.sinh(2 * rs) * np.sin(2 * thetas)])
    return SystemState(0.0, 0.1j, xy)


def test_photon_number_examples():
    assert photon_number(state_of([0.0, 0.0], [0.0, 0.0])) == (0.0, 0.0)
    fwd, bwd = photon_number(state_of([1.0], [0.4]))
    assert fwd == pytest.approx(math.sinh(1.0) ** 2, rel=1e-13)
    assert fwd == pytest.approx(1.3811, abs=1e-4)
    assert fwd == bwd


@given(st.lists(st.tuples(st.floats(-30, 30), st.floats(-30, 30)), min_size=1, max_size=8))
def test_photon_number_directions_equal(pairs):
    fwd, bwd = photon_number(SystemState(0.0, 0.0, pairs))
    assert fwd == bwd
    assert fwd >= 0


def test_photon_number_small_r_has_no_cancellation():
    n, _ = photon_number(state_of([1e-9], [0.0]))
    assert n == pytest.approx(1e-18, rel=1e-9)


@given(st.lists(st.tuples(st.floats(0, 2), st.floats(-3, 3)), min_size=1, max_size=6))
def test_number_difference_variance_vanishes(pairs):
    rs, ths = zip(*pairs)
    assert abs(number_difference_variance(state_of(rs, ths))) <= 1e-10 * (1 + max(rs)) ** 4


def test_number_difference_variance_fock_oracle():
    assert number_difference_variance(state_of([0.0], [0.0])) == pytest.approx(0.0, abs=1e-15)
    assert abs(fock_number_difference_variance(0.8, 0.3)) <= 1e-10


def test_pair_covariance_is_physical():
    v = pair_covariance(0.7, 0.2)
    omega = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    # V + i Omega / 2 >= 0 (uncertainty principle) and det V = 1/16 for a pure state
    assert np.min(np.linalg.eigvalsh(v + 0.5j * omega)) >= -1e-12
    assert np.linalg.det(v) == pytest.approx(1 / 16, rel=1e-12)


def test_epr_examples():
    assert epr_quadrature_variance(0.0, 0.3, 1.1).ratio_minus == 1.0
    rep = epr_quadrature_variance(1.0, 0.4, 0.4, k=7)
    assert rep.ratio_minus == pytest.approx(math.exp(-2), rel=1e-14)
    assert rep.ratio_plus == rep.ratio_minus
    assert rep.k == 7
    anti = epr_quadrature_variance(1.0, math.pi / 2, 0.0).ratio_minus
    assert anti == pytest.approx(math.exp(2), rel=1e-14)
    assert anti == pytest.approx(fock_oracle_variance(1.0, math.pi / 2, 0.0), rel=1e-10)


def test_epr_rejects_negative_r():
    with pytest.raises(InvalidParameterError):
        epr_quadrature_variance(-0.1, 0.0, 0.0)


@given(st.floats(0, 3), st.floats(-4, 4), st.floats(-4, 4))
def test_uncertainty_product(r, theta, psi):
    rep = epr_quadrature_variance(r, theta, psi)
    product = rep.ratio_minus * rep.conjugate_ratio
    c = math.cos(2 * (theta - psi))
    assert product == pytest.approx(math.cosh(2 * r) ** 2 - c * c * math.sinh(2 * r) ** 2, rel=1e-9)
    assert product >= 1 - 1e-9
    assert rep.ratio_minus > 0


def test_uncertainty_product_equality_iff_aligned():
    assert epr_quadrature_variance(1.0, 0.0, 0.0).conjugate_ratio * math.exp(-2) == pytest.approx(1.0, rel=1e-12)
    rep = epr_quadrature_variance(1.0, 0.3, 0.0)
    assert rep.ratio_minus * rep.conjugate_ratio > 1.01


def test_resonant_ratio_decreasing_in_r():
    r = np.linspace(0, 3, 301)
    assert np.all(np.diff(epr_ratio(r, 0.5, 0.5)) < 0)


def test_fock_oracle_examples():
    assert fock_oracle_variance(0.0, 0.2, 0.9) == pytest.approx(1.0, abs=1e-15)
    assert fock_oracle_variance(0.8, 0.3, 0.3) == pytest.approx(math.exp(-1.6), abs=1e-8)


def test_fock_oracle_general_phase():
    for r, d in [(0.5, 0.4), (0.9, 1.3), (0.2, 2.8)]:
        assert fock_oracle_variance(r, d + 0.1, 0.1) == pytest.approx(epr_ratio(r, d + 0.1, 0.1), abs=1e-10)


def test_fock_truncation():
    _, tail = fock_pair_state(1.0, 0.0, 60)
    assert tail <= 1e-12
    coeffs, tail = fock_pair_state(0.5, 0.3, 60)
    assert np.sum(np.abs(coeffs) ** 2) + tail == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(TruncationError):
        fock_oracle_variance(2.0, 0.0, 0.0, n_max=40)


def test_homodyne_phase():
    assert homodyne_phase(2.0, 1.0) == 2.0 - math.pi / 4


@pytest.fixture(scope="module")
def short_run():
    p = desk_params(n_qubits=32)
    model = full_model(p)
    return p, integrate(initial_state(model), model, IntegratorConfig(t_end=12 * PERIOD, sample_dt=PERIOD / 32))


def test_depletion_report(short_run):
    p, trace = short_run
    table = depletion_report(trace, p)
    assert tuple(table[0]) == (0.0, 1.0, 0.0)
    assert table.shape == (len(trace), 3)


def test_depletion_report_needs_drive():
    p = desk_params(n_qubits=8, drive_ev=0.0)
    model = full_model(p)
    trace = integrate(initial_state(model), model, IntegratorConfig(t_end=PERIOD, sample_dt=PERIOD / 4))
    with pytest.raises(InvalidParameterError):
        depletion_report(trace, p)


def test_short_time_depletion_is_quadratic():
    # one exactly resonant pair so the growth is not masked by off-resonant beating
    e_j, e_c = 2 * math.pi * 1000, 2 * math.pi * 10
    eps = math.sqrt(4 * e_j * e_c)
    omega_0 = math.sqrt(e_j * e_c)
    p = PhysicalParams(100, e_j, e_c, e_c, omega_0, band_width_for_top(omega_0, eps), 10 * RAD_PER_NS_PER_MICRO_EV)
    model = two_mode_reduction(p, 50)
    period = 2 * math.pi / eps
    trace = integrate(initial_state(model), model, IntegratorConfig(t_end=12 * period, sample_dt=period / 64))
    slope = depletion_exponent(trace, period, 10 * period, window=65)
    assert slope == pytest.approx(2.0, abs=0.1)


def test_period_averaged_plasmon_never_grows(short_run):
    _, trace = short_run
    avg = moving_average(trace.phi2, 33)
    assert np.all(avg <= trace.phi2[0])


def test_photon_balance_small_on_short_run(short_run):
    p, trace = short_run
    scale = p.n_qubits * trace.phi2[0] / 2
    assert np.max(np.abs(moving_average(photon_balance(trace), 33))) <= 0.05 * scale


def test_squeezing_spectrum(short_run):
    _, trace = short_run
    times, delta, r = squeezing_spectrum(trace)
    assert r.shape == (len(trace), 16)
    np.testing.assert_array_equal(delta, trace.model.delta)
    assert np.all(r[0] == 0)
    assert resonant_mode(trace) == int(np.argmin(np.abs(delta)))


def test_squeezing_spectrum_vacuum():
    p = desk_params(n_qubits=8, drive_ev=0.0)
    model = full_model(p)
    trace = integrate(initial_state(model), model, IntegratorConfig(t_end=PERIOD, sample_dt=PERIOD / 4))
    assert np.all(squeezing_spectrum(trace)[2] == 0)


def test_moving_average():
    np.testing.assert_allclose(moving_average([1, 2, 3, 4], 2), [1.5, 2.5, 3.5])
    with pytest.raises(InvalidParameterError):
        moving_average([1, 2], 3)
