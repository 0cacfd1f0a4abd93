"""Physical read-outs of squeezed states and evolution traces.

Homodyne detection is modelled only through the local-oscillator phase
psi = omega t - pi/4, which rotates every photon mode by exp(i psi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import PhysicalParams, fourier_capacitance_energies, initial_amplitude
from .dynamics import EvolutionTrace, SystemState, squeezing_of, _half_z_minus_one
from .errors import InvalidParameterError, TruncationError

TRUNCATION_TOL = 1e-12


def photon_number(state: SystemState) -> tuple[float, float]:
    """Photons travelling in each direction, sum_k sinh^2 r_k.

    Pair squeezing populates +k and -k identically, so both entries are the
    same number.
    """
    n = float(np.sum(_half_z_minus_one(state.xy)))
    return n, n


def pair_covariance(r: float, theta: float) -> np.ndarray:
    """Symmetrised covariance of (x_+, p_+, x_-, p_-) for one squeezed pair.

    Quadratures x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2); vacuum is I/2.
    """
    c = math.cosh(2 * r) / 2
    s = math.sinh(2 * r) / 2
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    # <a b> = exp(-2 i theta) sinh(2r)/2
    cross = np.array([[s * c2, -s * s2], [-s * s2, -s * c2]])
    cov = np.zeros((4, 4))
    cov[:2, :2] = c * np.eye(2)
    cov[2:, 2:] = c * np.eye(2)
    cov[:2, 2:] = cross
    cov[2:, :2] = cross.T
    return cov


_OMEGA = np.array([[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0],
                   [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]])
_H_DIFF = np.diag([1.0, 1.0, -1.0, -1.0])


def number_difference_variance(state: SystemState) -> float:
    """<(dN_> - dN_<)^2> summed over all pairs, from the Gaussian moments.

    For N_+ - N_- = (1/2) xi^T H xi with H = diag(1, 1, -1, -1) the variance of a
    zero-mean Gaussian state is Tr(H V H V)/2 + Tr(H W H W)/8, W the symplectic
    form. Vanishes for every pair-squeezed state (up to rounding).
    """
    r, theta = squeezing_of(state.xy[:, 0], state.xy[:, 1])
    offset = np.trace(_H_DIFF @ _OMEGA @ _H_DIFF @ _OMEGA) / 8.0
    total = 0.0
    for rk, tk in zip(np.atleast_1d(r), np.atleast_1d(theta)):
        v = pair_covariance(float(rk), float(tk))
        hv = _H_DIFF @ v
        total += 0.5 * np.trace(hv @ hv) + offset
    return float(total)


@dataclass(frozen=True)
class EprReport:
    """Normalised EPR variances of one pair after homodyne phase rotation."""

    k: int | None
    r: float
    theta: float
    psi: float
    ratio_minus: float
    ratio_plus: float

    @property
    def conjugate_ratio(self) -> float:
        """Same combination measured with the local oscillator shifted by pi/2."""
        return epr_ratio(self.r, self.theta, self.psi + math.pi / 2)


def epr_ratio(r, theta, psi):
    """cosh(2r) - sinh(2r) cos(2(theta - psi)); e^{-2r} when theta = psi."""
    r = np.asarray(r, dtype=float)
    out = np.cosh(2 * r) - np.sinh(2 * r) * np.cos(2 * (np.asarray(theta) - np.asarray(psi)))
    return float(out) if out.ndim == 0 else out


def epr_quadrature_variance(r: float, theta: float, psi: float, k: int | None = None) -> EprReport:
    """Variance of (alpha_k - alpha_-k) and of (dalpha_k + dalpha_-k) relative to shot noise.

    Both combinations give the same ratio for a pair-squeezed state.
    """
    if r < 0:
        raise InvalidParameterError(f"r must be >= 0, got {r}")
    ratio = epr_ratio(r, theta, psi)
    return EprReport(k, float(r), float(theta), float(psi), ratio, ratio)


def homodyne_phase(omega_lo: float, t: float) -> float:
    """Local-oscillator phase psi = omega t - pi/4."""
    return omega_lo * t - math.pi / 4


def fock_pair_state(r: float, theta: float, n_max: int) -> tuple[np.ndarray, float]:
    """Schmidt coefficients c_n of the squeezed pair on |n, n>, n = 0..n_max.

    c_n = (exp(-2 i theta) tanh r)^n / cosh r. Returns the coefficients and the
    discarded norm tanh(r)^(2(n_max + 1)).
    """
    t = math.tanh(r)
    n = np.arange(n_max + 1)
    coeffs = (np.exp(-2j * theta) * t) ** n / math.cosh(r)
    tail = t ** (2 * (n_max + 1))
    return coeffs, tail


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def fock_oracle_variance(r: float, theta: float, psi: float, n_max: int = 60) -> float:
    """Brute-force normalised variance of x_+ - x_- in a truncated two-mode number basis.

    Independent of the Gaussian formula: the state is expanded on |n, n>, both
    modes are rotated by exp(i psi n) and the variance is taken by direct
    matrix products.
    """
    if r < 0:
        raise InvalidParameterError(f"r must be >= 0, got {r}")
    if n_max < 1:
        raise InvalidParameterError("n_max must be >= 1")
    coeffs, tail = fock_pair_state(r, theta, n_max)
    if tail > TRUNCATION_TOL:
        raise TruncationError(
            f"n_max={n_max} drops norm {tail:.3g} > {TRUNCATION_TOL} at r={r}; raise n_max"
        )
    dim = n_max + 2  # one spare level so x acting on n_max is not clipped
    n = np.arange(dim)
    psi_mat = np.zeros((dim, dim), dtype=complex)
    psi_mat[n[:-1], n[:-1]] = coeffs * np.exp(2j * psi * n[:-1])
    a = _ladder(dim)
    x = (a + a.T) / math.sqrt(2)
    # (x (x) 1 - 1 (x) x) acting on the coefficient matrix psi[n_+, n_-]
    d_psi = x @ psi_mat - psi_mat @ x.T
    mean = np.vdot(psi_mat, d_psi)
    second = np.vdot(d_psi, d_psi)
    return float((second - mean * mean).real)


def fock_number_difference_variance(r: float, theta: float, n_max: int = 60) -> float:
    """Brute-force <(N_+ - N_-)^2> - <N_+ - N_->^2 on the truncated pair state."""
    coeffs, tail = fock_pair_state(r, theta, n_max)
    if tail > TRUNCATION_TOL:
        raise TruncationError(f"n_max={n_max} drops norm {tail:.3g} at r={r}")
    dim = n_max + 1
    psi_mat = np.diag(coeffs)
    n = np.arange(dim)
    d_psi = n[:, None] * psi_mat - psi_mat * n[None, :]
    mean = np.vdot(psi_mat, d_psi)
    return float((np.vdot(d_psi, d_psi) - mean * mean).real)


def depletion_report(trace: EvolutionTrace, params: PhysicalParams) -> np.ndarray:
    """Rows of (t, |phi|^2 / |phi_0|^2, sqrt(E_J/E_C0) (eV t)^2).

    The last column is the order-of-magnitude leakage scaling, not a prediction.
    """
    phi0_sq = abs(trace.phi[0]) ** 2
    if phi0_sq == 0:
        raise InvalidParameterError("depletion ratio undefined for phi_0 = 0")
    e_c0 = float(fourier_capacitance_energies(params)[0])
    leak = math.sqrt(params.e_j / e_c0) * (params.drive_ev * trace.times) ** 2
    return np.column_stack((trace.times, trace.phi2 / phi0_sq, leak))


def depletion_exponent(trace: EvolutionTrace, t_min: float, t_max: float, window: int = 1) -> float:
    """Log-log slope of 1 - |phi|^2/|phi_0|^2 between ``t_min`` and ``t_max``.

    ``window`` > 1 first applies a centred moving average of that many samples.
    """
    depletion = 1.0 - trace.phi2 / trace.phi2[0]
    times = trace.times
    if window > 1:
        depletion = moving_average(depletion, window)
        times = moving_average(times, window)
    sel = (times >= t_min) & (times <= t_max) & (depletion > 0)
    if sel.sum() < 3:
        raise InvalidParameterError("fewer than three usable samples in the fit window")
    slope, _ = np.polyfit(np.log(times[sel]), np.log(depletion[sel]), 1)
    return float(slope)


def moving_average(values, window: int) -> np.ndarray:
    """Centred boxcar average; the output is ``window - 1`` samples shorter."""
    values = np.asarray(values, dtype=float)
    if window < 1 or window > values.size:
        raise InvalidParameterError(f"window must lie in 1..{values.size}, got {window}")
    csum = np.cumsum(np.insert(values, 0, 0.0))
    return (csum[window:] - csum[:-window]) / window


def squeezing_spectrum(trace: EvolutionTrace):
    """r_k(t_i) for every active pair with its detuning axis.

    Returns ``(times, delta, r)`` where ``r`` has shape (samples, pairs).
    """
    return trace.times, np.array(trace.model.delta), trace.r


def resonant_mode(trace_or_delta) -> int:
    """Pair index (into the active modes) closest to resonance."""
    delta = trace_or_delta.model.delta if isinstance(trace_or_delta, EvolutionTrace) else trace_or_delta
    return int(np.argmin(np.abs(delta)))


def photon_balance(trace: EvolutionTrace) -> np.ndarray:
    """sum_k sinh^2 r_k - N (|phi_0|^2 - |phi|^2)/2 at every sample."""
    n = trace.model.params.n_qubits
    phi0_sq = abs(trace.phi[0]) ** 2
    return trace.photon_number - 0.5 * n * (phi0_sq - trace.phi2)
