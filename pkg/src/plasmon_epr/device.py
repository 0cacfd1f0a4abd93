"""Device constants and the static spectra derived from them.

Units: hbar = 1 throughout. Every energy and every frequency is an angular
frequency in rad/ns (one unit is 1/(2*pi) GHz ~ 0.159 GHz of ordinary frequency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvalidParameterError, OutOfBandError

#: rad/ns per GHz of ordinary frequency
RAD_PER_NS_PER_GHZ = 2.0 * math.pi
#: rad/ns corresponding to one micro-electronvolt (E / hbar)
RAD_PER_NS_PER_MICRO_EV = 1.519267447


@dataclass(frozen=True)
class PhysicalParams:
    """Device constants in the hbar = 1, rad/ns convention.

    ``capacitance_profile`` holds the ratios C_k / C_0 for k = 0..N-1; ``None``
    means a flat profile (every charging energy equals ``e_c0``).
    ``band_width`` fixes the top of the photon band through
    omega_{N/2} = sqrt(omega_0**2 + band_width**2).
    """

    n_qubits: int
    e_j: float
    e_c0: float
    e_dc: float
    omega_0: float
    band_width: float
    drive_ev: float
    capacitance_profile: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        n = self.n_qubits
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise InvalidParameterError(f"n_qubits must be an integer, got {n!r}")
        if n < 2 or n % 2:
            raise InvalidParameterError(f"n_qubits must be an even integer >= 2, got {n}")
        for name in ("e_j", "e_c0", "omega_0", "band_width"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.e_dc) and self.e_dc >= 0):
            # e_dc = 0 is the decoupled limit used by the free-rotation checks
            raise InvalidParameterError(f"e_dc must be finite and >= 0, got {self.e_dc!r}")
        if not (math.isfinite(self.drive_ev) and self.drive_ev >= 0):
            raise InvalidParameterError(f"drive_ev must be finite and >= 0, got {self.drive_ev!r}")
        if self.capacitance_profile is not None:
            profile = tuple(float(c) for c in self.capacitance_profile)
            if len(profile) != n:
                raise InvalidParameterError(
                    f"capacitance_profile needs {n} entries (k = 0..N-1), got {len(profile)}"
                )
            object.__setattr__(self, "capacitance_profile", profile)

    @property
    def n_pairs(self) -> int:
        """Number of photon mode pairs +-k, k = 1..N/2."""
        return self.n_qubits // 2

    @property
    def omega_top(self) -> float:
        return math.hypot(self.omega_0, self.band_width)

    def scaled(self, factor: float) -> "PhysicalParams":
        """Return a copy with every energy multiplied by ``factor``."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for name in ("e_j", "e_c0", "e_dc", "omega_0", "band_width", "drive_ev"):
            values[name] = values[name] * factor
        return PhysicalParams(**values)


def band_width_for_top(omega_0: float, omega_top: float) -> float:
    """Band-width knob that puts the top of the photon band at ``omega_top``."""
    if omega_top <= omega_0:
        raise InvalidParameterError("band top must lie above the band bottom")
    return math.sqrt(omega_top**2 - omega_0**2)


@dataclass(frozen=True)
class ModeSpectrum:
    """Plasmon and photon frequencies on the half zone k = 0..N/2."""

    eps: np.ndarray
    omega: np.ndarray
    delta: np.ndarray

    @property
    def eps0(self) -> float:
        return float(self.eps[0])

    @property
    def omega_top(self) -> float:
        return float(self.omega[-1])


def fourier_capacitance_energies(params: PhysicalParams) -> np.ndarray:
    """Charging energies E_{C,k} = E_{C,0} / (C_k / C_0) for k = 0..N-1."""
    n = params.n_qubits
    if params.capacitance_profile is None:
        return np.full(n, float(params.e_c0))
    profile = np.asarray(params.capacitance_profile, dtype=float)
    if not np.all(np.isfinite(profile)) or np.any(profile <= 0):
        raise InvalidParameterError("capacitance_profile entries must be finite and > 0")
    if profile[0] != 1.0:
        raise InvalidParameterError(f"capacitance_profile[0] must be 1, got {profile[0]!r}")
    energies = params.e_c0 / profile
    mirrored = np.roll(energies[::-1], 1)  # mirrored[k] = energies[N - k]
    if np.any(np.abs(energies - mirrored) > 1e-12 * np.abs(energies)):
        raise InvalidParameterError(
            "capacitance_profile must satisfy C_k = C_{N-k} (real capacitance matrix)"
        )
    return energies


def build_mode_spectrum(params: PhysicalParams) -> ModeSpectrum:
    n = params.n_qubits
    k = np.arange(n // 2 + 1)
    e_ck = fourier_capacitance_energies(params)[: n // 2 + 1]
    eps = np.sqrt(4.0 * params.e_j * e_ck)
    cos_k = np.cos(2.0 * np.pi * k / n)
    cos_k[0] = 1.0
    cos_k[-1] = -1.0
    omega = np.sqrt(params.omega_0**2 + params.band_width**2 * (1.0 - cos_k) / 2.0)
    omega[0] = params.omega_0
    # enforce monotonicity against last-ulp rounding of cos
    omega = np.maximum.accumulate(omega)
    delta = omega - eps[0]
    for arr in (eps, omega, delta):
        arr.setflags(write=False)
    return ModeSpectrum(eps=eps, omega=omega, delta=delta)


def initial_amplitude(params: PhysicalParams) -> complex:
    """Coherent plasmon amplitude right after the gate voltage is dropped.

    phi_0 = i sqrt(E_J / eps_0) (eV / E_{C,0}); with hbar = 1 the ratio under the
    root is dimensionless.
    """
    eps0 = math.sqrt(4.0 * params.e_j * fourier_capacitance_energies(params)[0])
    return complex(0.0, math.sqrt(params.e_j / eps0) * params.drive_ev / params.e_c0)


def decay_rate(params: PhysicalParams, spectrum: ModeSpectrum) -> float:
    """Inverse-power decay rate Gamma of the plasmon into the photon continuum.

    |phi(t)|**2 = |phi_0|**2 / (1 + Gamma t) once the resonance
    omega_k = eps_0 sits strictly inside the photon band.
    """
    eps0 = spectrum.eps0
    w_bottom = float(spectrum.omega[0])
    w_top = spectrum.omega_top
    if not (w_bottom < eps0 < w_top):
        raise OutOfBandError(eps0, w_bottom, w_top)
    prefactor = (params.e_dc * params.drive_ev / (16.0 * params.e_c0)) ** 2
    return prefactor * params.e_j / math.sqrt((w_top**2 - eps0**2) * (eps0**2 - w_bottom**2))


def density_of_states(params: PhysicalParams, frequency: float) -> float:
    """Number of mode pairs per unit angular frequency near ``frequency``.

    Used to judge whether the discrete ring behaves as a continuum: the level
    spacing 1/density must be small compared with the decay rate.
    """
    w0 = params.omega_0
    wt = params.omega_top
    if not (w0 < frequency < wt):
        raise OutOfBandError(frequency, w0, wt)
    root = math.sqrt((wt**2 - frequency**2) * (frequency**2 - w0**2))
    return params.n_qubits * frequency / (math.pi * root)
