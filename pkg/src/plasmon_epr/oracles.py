"""Closed-form and quadrature results used as independent checks on the dynamics.

Everything here relies on the rotating-wave picture; nothing calls the ODE
integrator.

Two-mode formulas (``max_squeezing`` onwards) take the detuning in the
modulation-compensating orientation: ``delta_tilde`` is measured as
(eps0 - omega_k) * 32 omega_k / (E_dC eps0). In that orientation phase matching
sits at +4|phi_0|^2 and parametric growth occurs for 2|phi_0|^2 < delta_tilde <
6|phi_0|^2. With the frequency ordering omega_k - eps0 used by ``ModeSpectrum``
the same physics appears at negative values; :meth:`DimensionlessFrame.delta_tilde`
converts an ordinary detuning and :func:`two_mode_detuning` flips it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .device import (
    PhysicalParams,
    ModeSpectrum,
    build_mode_spectrum,
    decay_rate,
    fourier_capacitance_energies,
    initial_amplitude,
)
from .errors import FaintDriveError, InvalidParameterError, QuadratureError

QUAD_ABS_TOL = 1e-10
# beyond this many half-periods the cosine-weighted QUADPACK rule takes over
_MAX_PIECES = 400


@dataclass(frozen=True)
class DimensionlessFrame:
    """Scale factors of the two-mode problem for one photon pair."""

    t_tilde_per_t: float
    delta_tilde_per_delta: float

    @classmethod
    def for_mode(cls, e_dc: float, eps0: float, omega_k: float) -> "DimensionlessFrame":
        if e_dc <= 0:
            raise InvalidParameterError("the dimensionless frame needs e_dc > 0")
        factor = e_dc * eps0 / (32.0 * omega_k)
        return cls(factor, 1.0 / factor)

    @classmethod
    def from_params(cls, params: PhysicalParams, spectrum: ModeSpectrum, k: int) -> "DimensionlessFrame":
        return cls.for_mode(params.e_dc, spectrum.eps0, float(spectrum.omega[k]))

    def t_tilde(self, t):
        return np.asarray(t) * self.t_tilde_per_t

    def t_physical(self, t_tilde):
        return np.asarray(t_tilde) / self.t_tilde_per_t

    def delta_tilde(self, delta):
        return np.asarray(delta) * self.delta_tilde_per_delta


def two_mode_detuning(frame: DimensionlessFrame, delta_k: float) -> float:
    """Two-mode ``delta_tilde`` (eps0 - omega_k orientation) of a pair with detuning ``delta_k``."""
    return -float(frame.delta_tilde(delta_k))


def omega_for_two_mode_detuning(delta_tilde: float, e_dc: float, eps0: float) -> float:
    """Photon frequency omega_k (near eps0) whose two-mode detuning equals ``delta_tilde``.

    Solves (eps0 - w) * 32 w / (E_dC eps0) = delta_tilde for the root closest to eps0.
    """
    disc = eps0 * eps0 - delta_tilde * e_dc * eps0 / 8.0
    if disc < 0:
        raise InvalidParameterError(f"no photon frequency realises delta_tilde={delta_tilde}")
    return 0.5 * (eps0 + math.sqrt(disc))


# --- decay into a continuum -------------------------------------------------

def continuum_amplitude(t, phi0: complex, eps0: float, gamma: float):
    """phi(t) = i exp(-i eps0 t) phi_0 / sqrt(1 + Gamma t)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or gamma < 0:
        raise InvalidParameterError("continuum_amplitude needs t >= 0 and gamma >= 0")
    out = 1j * np.exp(-1j * eps0 * t) * phi0 / np.sqrt(1.0 + gamma * t)
    return complex(out) if out.ndim == 0 else out


def continuum_phi2(t, phi0: complex, gamma: float):
    """|phi(t)|^2 of the continuum law."""
    t = np.asarray(t, dtype=float)
    return abs(phi0) ** 2 / (1.0 + gamma * t)


def _cos_over_one_plus(a: float, s0: float, s1: float, force_quadrature: bool = False):
    """Integral of cos(a s) / (1 + s) over [s0, s1] with its error estimate."""
    if s1 <= s0:
        return 0.0, 0.0
    if a == 0.0 and not force_quadrature:
        return math.log1p(s1) - math.log1p(s0), 0.0
    n_pieces = 1 if a == 0.0 else int(math.ceil((s1 - s0) * abs(a) / math.pi))
    if n_pieces > _MAX_PIECES:
        value, err = quad(lambda s: 1.0 / (1.0 + s), s0, s1, weight="cos", wvar=a,
                                    epsabs=QUAD_ABS_TOL / 10, epsrel=1e-12, limit=500)
        return value, err
    edges = np.linspace(s0, s1, n_pieces + 1)
    total = 0.0
    total_err = 0.0
    tol = max(QUAD_ABS_TOL / (10 * n_pieces), 1e-15)
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err = quad(lambda s: math.cos(a * s) / (1.0 + s), lo, hi,
                                    epsabs=tol, epsrel=1e-13, limit=100)
        total += value
        total_err += err
    return total, total_err


def squeezing_integral(delta_over_gamma: float, gamma_t, force_quadrature: bool = False):
    """J(d, T) = integral_0^T cos(2 d s) / (1 + s) ds, evaluated at every T in ``gamma_t``.

    J(0, T) = ln(1 + T), used directly unless ``force_quadrature``. The running
    integral is accumulated between sorted sample points, each interval split
    at the oscillation scale.
    """
    gamma_t = np.asarray(gamma_t, dtype=float)
    if np.any(gamma_t < 0):
        raise InvalidParameterError("squeezing integral needs t >= 0")
    flat = gamma_t.ravel()
    order = np.argsort(flat, kind="stable")
    out = np.empty_like(flat)
    a = 2.0 * float(delta_over_gamma)
    acc = 0.0
    acc_err = 0.0
    prev = 0.0
    for idx in order:
        value, err = _cos_over_one_plus(a, prev, flat[idx], force_quadrature)
        acc += value
        acc_err += err
        if acc_err > QUAD_ABS_TOL:
            raise QuadratureError(
                f"squeezing integral error estimate {acc_err:.3g} exceeds {QUAD_ABS_TOL}"
            )
        out[idx] = acc
        prev = flat[idx]
    out = out.reshape(gamma_t.shape)
    return float(out) if out.ndim == 0 else out


def continuum_squeezing(k: int, t, params: PhysicalParams, spectrum: ModeSpectrum, gamma: float):
    """Squeezing r_k(t) driven by the continuum-decaying plasmon (first order in the coupling).

    r_k(t) = (E_dC / 16) int_0^t |phi(t')|^2 (eps0 / omega_k) cos(2 delta_k t') dt'
    with |phi(t')|^2 = |phi_0|^2 / (1 + Gamma t').
    """
    if not 1 <= k <= params.n_pairs:
        raise InvalidParameterError(f"k must lie in 1..{params.n_pairs}, got {k}")
    t = np.asarray(t, dtype=float)
    phi0_sq = abs(initial_amplitude(params)) ** 2
    omega_k = float(spectrum.omega[k])
    delta_k = float(spectrum.delta[k])
    scale = params.e_dc * phi0_sq * spectrum.eps0 / (16.0 * omega_k)
    if scale == 0.0:
        out = np.zeros_like(t)
    elif gamma == 0.0:
        out = scale * (t if delta_k == 0 else np.sin(2 * delta_k * t) / (2 * delta_k))
    else:
        out = scale / gamma * squeezing_integral(delta_k / gamma, gamma * t)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def fig3_surface(t_grid, delta_grid, params: PhysicalParams, gamma: float | None = None):
    """Dimensionless squeezing r* = (16 Gamma / E_dC) r_k / |phi_0|^2 on a (t, delta) grid.

    Uses omega_k ~ eps0 (valid for eps0 >> Gamma), so r*(delta = 0, t) = ln(1 + Gamma t)
    and the surface is even in delta. Returns an array of shape (len(t_grid), len(delta_grid)).
    """
    if gamma is None:
        gamma = decay_rate(params, build_mode_spectrum(params))
    t_grid = np.asarray(t_grid, dtype=float)
    delta_grid = np.asarray(delta_grid, dtype=float)
    if not (np.all(np.isfinite(t_grid)) and np.all(np.isfinite(delta_grid))):
        raise InvalidParameterError("grids must be finite")
    return fig3_surface_dimensionless(gamma * t_grid, delta_grid / gamma)


def fig3_surface_dimensionless(gamma_t, delta_over_gamma):
    """r* on a grid of Gamma t and delta / Gamma."""
    gamma_t = np.asarray(gamma_t, dtype=float)
    delta_over_gamma = np.asarray(delta_over_gamma, dtype=float)
    surface = np.empty((gamma_t.size, delta_over_gamma.size))
    cache = {}
    for j, d in enumerate(delta_over_gamma):
        key = abs(float(d))  # J is even in delta
        if key not in cache:
            cache[key] = squeezing_integral(key, gamma_t)
        surface[:, j] = cache[key]
    return surface


def photon_number_continuum(t, n_qubits: int, phi0: complex, gamma: float):
    """Photons per direction, N (|phi_0|^2 - |phi(t)|^2) / 2, under the continuum law."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    gt = gamma * t
    out = 0.5 * n_qubits * abs(phi0) ** 2 * gt / (1.0 + gt)
    return float(out) if out.ndim == 0 else out


# --- two modes ----------------------------------------------------------------

def max_squeezing(n_qubits: int, phi0: complex) -> float:
    """r_m = ln(2 N |phi_0|^2) / 2, reached at total depletion."""
    x = 2.0 * n_qubits * abs(phi0) ** 2
    if x < 1.0:
        raise FaintDriveError(
            f"N |phi_0|^2 = {x / 2:.6g} <= 1/2: drive too faint for the maximum-squeezing formula"
        )
    return 0.5 * math.log(x)


def two_mode_validity_limit(r_m: float, n_qubits: int) -> float:
    """Largest r_k for which the constant-modulation closed form is trusted."""
    return r_m - math.sqrt(n_qubits / 2.0) * math.exp(-r_m)


def two_mode_closed_form(t_tilde, r_m: float, n_qubits: int):
    """Phase-matched squeezing r_k(t~) approaching r_m."""
    t_tilde = np.asarray(t_tilde, dtype=float)
    if np.any(t_tilde < 0):
        raise InvalidParameterError("t_tilde must be >= 0")
    if r_m <= 0:
        raise InvalidParameterError("r_m must be > 0")
    # work with logs: e^{2 r_m} and the decaying exponential can both be extreme
    log_big = 2.0 * r_m
    log_decay = -4.0 * math.sinh(2.0 * r_m) * t_tilde / n_qubits
    num = np.logaddexp(log_big, log_decay)
    den = np.logaddexp(0.0, log_big + log_decay)
    out = 0.5 * (num - den)
    return float(out) if out.ndim == 0 else out


def rabi_frequency(delta_tilde, phi0: complex):
    """Omega = sqrt(|(delta~ - 4|phi_0|^2)^2 - 4|phi_0|^4|)."""
    p2 = abs(phi0) ** 2
    d = np.asarray(delta_tilde, dtype=float) - 4.0 * p2
    out = np.sqrt(np.abs(d * d - 4.0 * p2 * p2))
    return float(out) if out.ndim == 0 else out


def in_growth_window(delta_tilde, phi0: complex):
    """True where the photon number grows exponentially: 2|phi_0|^2 < delta~ < 6|phi_0|^2."""
    p2 = abs(phi0) ** 2
    d = np.asarray(delta_tilde, dtype=float) - 4.0 * p2
    return d * d < 4.0 * p2 * p2


def rabi_photon_number(t_tilde, delta_tilde, phi0: complex):
    """Weak-depletion photon number of the selected pair.

    8|phi_0|^2 sinh^2(Omega t~) / Omega^2 inside the growth window and
    8|phi_0|^2 sin^2(Omega t~) / Omega^2 outside it; both tend to 8|phi_0|^2 t~^2
    when Omega t~ -> 0.
    """
    t_tilde = np.asarray(t_tilde, dtype=float)
    p2 = abs(phi0) ** 2
    omega = rabi_frequency(delta_tilde, phi0)
    x = omega * t_tilde
    growth = bool(in_growth_window(delta_tilde, phi0))
    x2 = x * x
    with np.errstate(invalid="ignore", divide="ignore"):
        if growth:
            ratio = np.sinh(x) / x
            series = 1.0 + x2 / 6.0
        else:
            ratio = np.sin(x) / x
            series = 1.0 - x2 / 6.0
    ratio = np.where(np.abs(x) < 1e-4, series, ratio)
    out = 8.0 * p2 * t_tilde * t_tilde * ratio * ratio
    return float(out) if out.ndim == 0 else out


# --- short-time estimates -------------------------------------------------------

def estimate_report(params: PhysicalParams, spectrum: ModeSpectrum | None = None) -> dict:
    """Order-of-magnitude figures quoted for the first nanoseconds after the drop.

    All rates in rad/ns. ``charge_leakage_coeff`` multiplies t^2 (t in ns).
    ``gamma_scale`` is C_0 V^2 / hbar written as 2 (eV)^2 / E_C0.
    """
    if spectrum is None:
        spectrum = build_mode_spectrum(params)
    ev = params.drive_ev
    e_c0 = float(fourier_capacitance_energies(params)[0])
    phi0_sq = abs(initial_amplitude(params)) ** 2
    report = {
        "eps0": spectrum.eps0,
        "phi0_sq": phi0_sq,
        "squeezing_rate_estimate": params.e_j * (ev / params.e_dc) ** 2 if params.e_dc > 0 else math.inf,
        "resonant_squeezing_rate": params.e_dc * phi0_sq / 16.0,
        "charge_leakage_coeff": math.sqrt(params.e_j / e_c0) * ev * ev,
        "gamma_scale": 2.0 * ev * ev / e_c0,
    }
    try:
        report["gamma"] = decay_rate(params, spectrum)
    except InvalidParameterError:
        report["gamma"] = math.nan
    return report
