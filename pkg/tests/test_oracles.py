import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import sici

from plasmon_epr.device import build_mode_spectrum, initial_amplitude
from plasmon_epr.errors import FaintDriveError, InvalidParameterError
from plasmon_epr.oracles import (
    DimensionlessFrame,
    continuum_amplitude,
    continuum_phi2,
    continuum_squeezing,
    estimate_report,
    fig3_surface,
    fig3_surface_dimensionless,
    in_growth_window,
    max_squeezing,
    omega_for_two_mode_detuning,
    photon_number_continuum,
    rabi_frequency,
    rabi_photon_number,
    squeezing_integral,
    two_mode_closed_form,
    two_mode_detuning,
    two_mode_validity_limit,
)

from conftest import GAMMA_DESK


def sici_integral(d, big_t):
    """Integral of cos(2 d s)/(1 + s) over [0, T] through the sine and cosine integrals."""
    a = 2 * d
    s1, c1 = sici(a * (1 + big_t))
    s0, c0 = sici(a)
    return math.cos(a) * (c1 - c0) + math.sin(a) * (s1 - s0)


# --- frame ---------------------------------------------------------------------------

@given(st.floats(0.1, 100), st.floats(1, 1000), st.floats(1, 1000))
def test_frame_factors_are_reciprocal(e_dc, eps0, omega):
    f = DimensionlessFrame.for_mode(e_dc, eps0, omega)
    assert f.t_tilde_per_t * f.delta_tilde_per_delta == pytest.approx(1.0, rel=1e-15)


def test_frame_values():
    f = DimensionlessFrame.for_mode(10.0, 200.0, 200.0)
    assert f.t_tilde_per_t == 10.0 * 200.0 / (32 * 200.0)
    assert float(f.t_physical(f.t_tilde(3.0))) == pytest.approx(3.0, rel=1e-15)


def test_frame_needs_coupling():
    with pytest.raises(InvalidParameterError):
        DimensionlessFrame.for_mode(0.0, 200.0, 200.0)


@given(st.floats(-3, 3))
def test_omega_for_two_mode_detuning_inverts(dt):
    w = omega_for_two_mode_detuning(dt, 10.0, 200.0)
    frame = DimensionlessFrame.for_mode(10.0, 200.0, w)
    assert two_mode_detuning(frame, w - 200.0) == pytest.approx(dt, abs=1e-9)


# --- continuum -------------------------------------------------------------------------

def test_continuum_amplitude_examples():
    phi0 = 0.3j
    assert abs(continuum_amplitude(0.0, phi0, 200.0, 0.1)) == pytest.approx(0.3, rel=1e-15)
    assert abs(continuum_amplitude(10.0, phi0, 200.0, 0.1)) ** 2 == pytest.approx(0.09 / 2, rel=1e-14)
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(continuum_amplitude(t, phi0, 200.0, 0.0), 1j * phi0 * np.exp(-200j * t))


def test_continuum_amplitude_rejects_negative_time():
    with pytest.raises(InvalidParameterError):
        continuum_amplitude(-1.0, 0.3j, 200.0, 0.1)


@pytest.mark.parametrize("d,big_t", [(0.5, 3.0), (1.0, 3.0), (10.0, 3.0), (3.7, 10.0), (0.1, 50.0), (200.0, 3.0)])
def test_squeezing_integral_matches_sine_cosine_integrals(d, big_t):
    assert squeezing_integral(d, big_t) == pytest.approx(sici_integral(d, big_t), abs=1e-10)


def test_squeezing_integral_frozen_values():
    # values from the Ci/Si closed form
    assert squeezing_integral(0.5, 3.0) == pytest.approx(0.42490261988597927, abs=1e-12)
    assert squeezing_integral(1.0, 3.0) == pytest.approx(0.0966777984346406, abs=1e-12)
    assert squeezing_integral(10.0, 3.0) == pytest.approx(-0.0011960624859155937, abs=1e-12)


def test_squeezing_integral_zero_detuning_by_quadrature():
    gt = np.linspace(0.0, 10.0, 101)
    np.testing.assert_allclose(squeezing_integral(0.0, gt, force_quadrature=True), np.log1p(gt),
                               rtol=0, atol=1e-9)


def test_squeezing_integral_unsorted_points():
    pts = np.array([3.0, 0.5, 2.0, 0.0])
    got = squeezing_integral(0.7, pts)
    np.testing.assert_allclose(got, [sici_integral(0.7, p) if p else 0.0 for p in pts], atol=1e-10)


def test_continuum_squeezing_resonant_log(two_site):
    spectrum = build_mode_spectrum(two_site)
    gamma = 0.01
    t = np.linspace(0.0, 10.0 / gamma, 41)
    got = continuum_squeezing(1, t, two_site, spectrum, gamma)
    p2 = abs(initial_amplitude(two_site)) ** 2
    want = two_site.e_dc * p2 / (16 * gamma) * np.log1p(gamma * t)
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-9)
    assert continuum_squeezing(1, 0.0, two_site, spectrum, gamma) == 0.0


def test_continuum_squeezing_large_detuning_suppressed(desk):
    spectrum = build_mode_spectrum(desk)
    gamma = GAMMA_DESK
    # delta = 10 Gamma against delta = 0 in the dimensionless integral at Gamma t = 3
    assert abs(squeezing_integral(10.0, 3.0)) * 5 <= squeezing_integral(0.0, 3.0)
    k = 100
    r = continuum_squeezing(k, np.linspace(0, 3 / gamma, 50), desk, spectrum, gamma)
    delta = abs(spectrum.delta[k])
    bound = desk.e_dc * 0.2 * 200.0 / (16 * spectrum.omega[k]) / delta
    assert np.max(np.abs(r)) <= bound


def test_continuum_squeezing_index(desk):
    with pytest.raises(InvalidParameterError):
        continuum_squeezing(0, 1.0, desk, build_mode_spectrum(desk), 0.1)


def test_fig3_examples(desk):
    gamma = GAMMA_DESK
    surface = fig3_surface([(math.e - 1) / gamma], [0.0], desk, gamma)
    assert surface[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(fig3_surface([0.0], np.linspace(-5, 5, 11) * gamma, desk, gamma) == 0)


def test_fig3_maximum_at_resonance_and_even():
    gt = np.linspace(0, 5, 26)
    d = np.linspace(-5, 5, 41)
    s = fig3_surface_dimensionless(gt, d)
    zero = 20
    assert np.all(s[1:, zero] >= s[1:].max(axis=1) - 1e-12)
    assert np.max(np.abs(s - s[:, ::-1])) <= 1e-12
    assert np.argmax(fig3_surface_dimensionless([3.0], d)[0]) == zero


def test_fig3_gamma_from_params(desk):
    s = fig3_surface([1 / GAMMA_DESK], [0.0], desk)
    assert s[0, 0] == pytest.approx(math.log(2), abs=1e-12)


def test_photon_number_continuum():
    assert photon_number_continuum(10.0, 100, math.sqrt(0.2) * 1j, 0.1) == pytest.approx(5.0, rel=1e-14)
    assert photon_number_continuum(0.0, 100, 0.5j, 0.1) == 0.0
    assert photon_number_continuum(1e12, 100, math.sqrt(0.2), 1.0) == pytest.approx(10.0, rel=1e-9)
    t = np.linspace(0, 100, 200)
    assert np.all(np.diff(photon_number_continuum(t, 100, 0.5j, 0.1)) > 0)


@given(st.floats(0, 1e4), st.floats(1e-4, 10), st.floats(0.01, 1))
def test_photon_balance_identity(t, gamma, amp):
    phi0 = 1j * amp
    n = 64
    lhs = photon_number_continuum(t, n, phi0, gamma)
    rhs = n * (amp**2 - abs(continuum_amplitude(t, phi0, 200.0, gamma)) ** 2) / 2
    # the difference form cancels when Gamma t is small, so compare on the scale of N |phi_0|^2
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14 * n * amp**2)


def test_continuum_phi2():
    assert continuum_phi2(4.0, 0.5j, 0.25) == pytest.approx(0.125, rel=1e-15)


# --- two modes -------------------------------------------------------------------------

def test_max_squeezing_examples():
    r_m = max_squeezing(100, math.sqrt(0.2))
    assert r_m == pytest.approx(math.log(40) / 2, rel=1e-15)
    assert r_m == pytest.approx(1.8444, abs=1e-4)
    assert max_squeezing(1, math.sqrt(0.5)) == pytest.approx(0.0, abs=1e-15)


def test_max_squeezing_against_total_conversion():
    # sinh^2 r_m = (2 N |phi_0|^2 - 2 + 1 / (2 N |phi_0|^2)) / 4 exactly
    r_m = max_squeezing(100, math.sqrt(0.2))
    assert math.sinh(r_m) ** 2 == pytest.approx((40 - 2 + 1 / 40) / 4, rel=1e-13)
    # and tends to N |phi_0|^2 / 2 for large drives
    r_big = max_squeezing(10**6, math.sqrt(0.2))
    assert math.sinh(r_big) ** 2 / (10**6 * 0.2 / 2) == pytest.approx(1.0, rel=1e-5)


def test_max_squeezing_faint_drive():
    with pytest.raises(FaintDriveError):
        max_squeezing(100, 0.05)


def test_closed_form_examples():
    r_m = math.log(40) / 2
    assert two_mode_closed_form(0.0, r_m, 100) == 0.0
    assert two_mode_closed_form(1e6, r_m, 100) == pytest.approx(r_m, rel=1e-14)
    t1 = 100 / (4 * math.sinh(2 * r_m))
    want = 0.5 * math.log((40 + math.exp(-1)) / (1 + 40 * math.exp(-1)))
    assert two_mode_closed_form(t1, r_m, 100) == pytest.approx(want, rel=1e-14)
    assert two_mode_closed_form(t1, r_m, 100) == pytest.approx(0.4717037154637201, abs=1e-12)


@given(st.floats(0.05, 5), st.integers(2, 10**4))
def test_closed_form_monotone_and_bounded(r_m, n):
    t = np.linspace(0, 20 * n / math.sinh(2 * r_m), 1000)
    r = two_mode_closed_form(t, r_m, n)
    assert np.all(np.diff(r) >= -1e-15)
    assert np.all(r <= r_m * (1 + 1e-14))
    assert r[0] == pytest.approx(0.0, abs=1e-15)


def test_closed_form_domain():
    with pytest.raises(InvalidParameterError):
        two_mode_closed_form(-1.0, 1.0, 10)
    with pytest.raises(InvalidParameterError):
        two_mode_closed_form(1.0, 0.0, 10)


def test_validity_limit():
    r_m = math.log(40) / 2
    assert two_mode_validity_limit(r_m, 100) == pytest.approx(r_m - math.sqrt(50) / math.sqrt(40), rel=1e-14)


def test_rabi_examples():
    phi0 = math.sqrt(0.2) * 1j
    assert rabi_frequency(0.8, phi0) == pytest.approx(0.4, rel=1e-14)
    assert rabi_frequency(2.0, phi0) == pytest.approx(math.sqrt(1.28), rel=1e-14)
    assert rabi_frequency(2.0, phi0) == pytest.approx(1.1314, abs=1e-4)
    assert not in_growth_window(2.0, phi0)
    assert rabi_photon_number(0.0, 2.0, phi0) == 0.0


def test_growth_window_edges():
    phi0 = math.sqrt(0.2)
    assert in_growth_window(0.8, phi0)
    assert in_growth_window(0.41, phi0) and in_growth_window(1.19, phi0)
    assert not in_growth_window(0.39, phi0) and not in_growth_window(1.21, phi0)
    assert not in_growth_window(-0.4, phi0)


@pytest.mark.parametrize("edge", [0.4, 1.2])
@pytest.mark.parametrize("side", [-1, 1])
def test_rabi_branches_meet_at_window_edges(edge, side):
    phi0 = math.sqrt(0.2)
    t = 0.7
    limit = 8 * 0.2 * t * t
    got = rabi_photon_number(t, edge + side * 1e-12, phi0)
    assert got == pytest.approx(limit, rel=1e-6)


def test_rabi_photon_number_branches():
    phi0 = math.sqrt(0.2)
    t = np.linspace(0, 5, 7)
    om = rabi_frequency(2.0, phi0)
    np.testing.assert_allclose(rabi_photon_number(t, 2.0, phi0), 1.6 * np.sin(om * t) ** 2 / om**2, rtol=1e-13)
    om = rabi_frequency(0.8, phi0)
    np.testing.assert_allclose(rabi_photon_number(t, 0.8, phi0), 1.6 * np.sinh(om * t) ** 2 / om**2, rtol=1e-13)


# --- estimates ----------------------------------------------------------------------------

def test_estimate_report(desk):
    rep = estimate_report(desk)
    assert rep["eps0"] == 200.0
    assert rep["phi0_sq"] == pytest.approx(0.2, rel=1e-14)
    assert rep["gamma"] == pytest.approx(GAMMA_DESK, rel=1e-14)
    assert rep["squeezing_rate_estimate"] == pytest.approx(1000 * 0.04, rel=1e-14)
    assert rep["resonant_squeezing_rate"] == pytest.approx(10 * 0.2 / 16, rel=1e-14)
    assert rep["charge_leakage_coeff"] == pytest.approx(math.sqrt(100) * 4, rel=1e-14)


def test_estimate_report_out_of_band(two_site):
    assert math.isnan(estimate_report(two_site)["gamma"])
