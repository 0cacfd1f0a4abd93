"""Variational equations of motion for the plasmon amplitude and the photon pairs.

The photon pair +-k is a two-mode squeezed vacuum with amplitude r_k and phase
theta_k. Instead of (r, theta) the integrator evolves

    x = sinh(2r) cos(2 theta),   y = sinh(2r) sin(2 theta),   z = cosh(2r) = sqrt(1 + x^2 + y^2)

in which the equations of motion are regular at r = 0:

    dphi/dt = -i eps0 phi - i (E_dC eps0 / 8N) (phi + phi*) sum_k (z_k - 1 + x_k) / omega_k
    dx_k/dt = -2 (omega_k + A_k) y_k
    dy_k/dt =  2 (omega_k + A_k) x_k + 2 A_k z_k

with the coupling A_k = (E_dC eps0 / 16) (phi + phi*)^2 / omega_k.
No rotating-wave approximation is made here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .device import ModeSpectrum, PhysicalParams, build_mode_spectrum, initial_amplitude
from . import _kernel
from ._averaging import burst_average
from .errors import IntegrationError, InvalidParameterError, NumericDomainError

_CHUNK = 256


@dataclass(frozen=True)
class Model:
    """Parameters, spectrum and the set of photon pairs that take part in the dynamics.

    ``modes`` lists pair indices k in 1..N/2. The plasmon back-action keeps the
    1/(8N) normalisation of the full ring whatever subset is active.
    """

    params: PhysicalParams
    spectrum: ModeSpectrum
    modes: np.ndarray

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=int)
        if modes.ndim != 1 or modes.size == 0:
            raise InvalidParameterError("a model needs at least one photon pair")
        if modes.min() < 1 or modes.max() > self.params.n_pairs:
            raise InvalidParameterError(
                f"mode indices must lie in 1..{self.params.n_pairs}, got {modes.tolist()}"
            )
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)

    @property
    def omega(self) -> np.ndarray:
        return self.spectrum.omega[self.modes]

    @property
    def delta(self) -> np.ndarray:
        return self.spectrum.delta[self.modes]


def full_model(params: PhysicalParams, spectrum: ModeSpectrum | None = None) -> Model:
    """All N/2 photon pairs coupled to the k = 0 plasmon."""
    if spectrum is None:
        spectrum = build_mode_spectrum(params)
    return Model(params, spectrum, np.arange(1, params.n_pairs + 1))


def two_mode_reduction(params: PhysicalParams, k_sel: int,
                       spectrum: ModeSpectrum | None = None) -> Model:
    """Keep only the pair +-k_sel; every other photon mode stays in vacuum."""
    if isinstance(k_sel, bool) or not isinstance(k_sel, (int, np.integer)):
        raise InvalidParameterError(f"k_sel must be an integer, got {k_sel!r}")
    if not 1 <= k_sel <= params.n_pairs:
        raise InvalidParameterError(f"k_sel must lie in 1..{params.n_pairs}, got {k_sel}")
    if spectrum is None:
        spectrum = build_mode_spectrum(params)
    return Model(params, spectrum, np.array([k_sel]))


@dataclass(frozen=True)
class SystemState:
    """Plasmon amplitude and per-pair squeezing at time ``t``.

    ``xy[i] = (x, y)`` belongs to the i-th active pair of the model.
    """

    t: float
    phi: complex
    xy: np.ndarray

    def __post_init__(self):
        xy = np.array(self.xy, dtype=float).reshape(-1, 2)
        xy.setflags(write=False)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "phi", complex(self.phi))
        object.__setattr__(self, "t", float(self.t))

    @property
    def z(self) -> np.ndarray:
        return np.sqrt(1.0 + self.xy[:, 0] ** 2 + self.xy[:, 1] ** 2)

    @property
    def r(self) -> np.ndarray:
        return 0.5 * np.arcsinh(np.hypot(self.xy[:, 0], self.xy[:, 1]))

    @property
    def theta(self) -> np.ndarray:
        return squeezing_of(self.xy[:, 0], self.xy[:, 1])[1]

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.phi.real, self.phi.imag], self.xy[:, 0], self.xy[:, 1]))

    @classmethod
    def from_vector(cls, t: float, vec: np.ndarray) -> "SystemState":
        m = (vec.size - 2) // 2
        return cls(t, complex(vec[0], vec[1]), np.column_stack((vec[2:2 + m], vec[2 + m:])))


def initial_state(model: Model) -> SystemState:
    """phi(0) = phi_0 and every active pair in vacuum."""
    return SystemState(0.0, initial_amplitude(model.params), np.zeros((model.modes.size, 2)))


def squeezing_of(x, y):
    """Return (r, theta) for Cartesian squeezing coordinates.

    theta is reported in (-pi/2, pi/2]; the vacuum (x = y = 0) maps to theta = 0.
    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = 0.5 * np.arcsinh(np.hypot(x, y))
    theta = 0.5 * np.arctan2(y, x)
    theta = np.where(theta <= -np.pi / 2, theta + np.pi, theta)
    theta = np.where((x == 0) & (y == 0), 0.0, theta)
    if r.ndim == 0:
        return float(r), float(theta)
    return r, theta


def coupling_strength(phi: complex, params: PhysicalParams, k: int, spectrum: ModeSpectrum) -> float:
    """A_k, the common prefactor of the squeezing amplitude and phase equations."""
    if not 1 <= k <= params.n_pairs:
        raise InvalidParameterError(f"k must lie in 1..{params.n_pairs}, got {k}")
    two_re = 2.0 * complex(phi).real
    return params.e_dc * spectrum.eps0 / 16.0 * two_re * two_re / float(spectrum.omega[k])


def _constants(model: Model):
    p = model.params
    eps0 = model.spectrum.eps0
    omega = np.ascontiguousarray(model.omega, dtype=float)
    return (eps0, omega, 1.0 / omega, p.e_dc * eps0 / 16.0, p.e_dc * eps0 / (8.0 * p.n_qubits))


def derivatives(state: SystemState, model: Model):
    """Time derivative of a state: returns ``(dphi_dt, dxy_dt)``."""
    vec = state.to_vector()
    if not np.all(np.isfinite(vec)):
        raise NumericDomainError(f"non-finite state at t={state.t}")
    if state.xy.shape[0] != model.modes.size:
        raise InvalidParameterError(
            f"state carries {state.xy.shape[0]} pairs but the model has {model.modes.size}"
        )
    d = np.empty_like(vec)
    _kernel.rhs(vec, *_constants(model), d)
    m = model.modes.size
    return complex(d[0], d[1]), np.column_stack((d[2:2 + m], d[2 + m:]))


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings of the adaptive Dormand-Prince 5(4) integration.

    ``max_step=None`` resolves the fastest phase rotation: pi / (20 max(omega_top, eps0)).
    ``max_wall_time`` (seconds) aborts long runs with an :class:`IntegrationError`.

    With ``burst > 1`` every anchor time i * sample_dt is followed by ``burst - 1``
    further samples spread evenly over ``burst_span`` (default: one plasmon
    period); :meth:`EvolutionTrace.coarse` averages each burst.
    """

    t_end: float
    sample_dt: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float | None = None
    max_wall_time: float | None = None
    burst: int = 1
    burst_span: float | None = None

    def __post_init__(self):
        for name in ("t_end", "sample_dt", "rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("max_step", "max_wall_time", "burst_span"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")
        if self.sample_dt > self.t_end:
            raise InvalidParameterError("sample_dt must not exceed t_end")
        if isinstance(self.burst, bool) or not isinstance(self.burst, (int, np.integer)) \
                or self.burst < 1:
            raise InvalidParameterError(f"burst must be a positive integer, got {self.burst!r}")

    def resolved_max_step(self, model: Model) -> float:
        if self.max_step is not None:
            return self.max_step
        fastest = max(model.spectrum.omega_top, model.spectrum.eps0)
        return math.pi / (20.0 * fastest)

    def resolved_burst_span(self, model: Model) -> float:
        if self.burst_span is not None:
            return self.burst_span
        return 2.0 * math.pi / model.spectrum.eps0

    def sample_times(self, model: Model | None = None) -> np.ndarray:
        """Sample offsets from the initial time."""
        if self.burst == 1:
            n = int(math.floor(self.t_end / self.sample_dt * (1 + 1e-12)))
            times = np.arange(n + 1) * self.sample_dt
            if self.t_end - times[-1] > 1e-9 * self.sample_dt:
                times = np.append(times, self.t_end)
            return times
        if model is None and self.burst_span is None:
            raise InvalidParameterError("burst sampling needs a model or an explicit burst_span")
        span = self.resolved_burst_span(model)
        if span >= self.sample_dt:
            raise InvalidParameterError("burst_span must be shorter than sample_dt")
        last_anchor = self.t_end - span
        if last_anchor < 0:
            raise InvalidParameterError("t_end is shorter than one burst")
        n = int(math.floor(last_anchor / self.sample_dt * (1 + 1e-12)))
        anchors = np.arange(n + 1) * self.sample_dt
        offsets = np.linspace(0.0, span, self.burst)
        return (anchors[:, None] + offsets[None, :]).ravel()


@dataclass(frozen=True)
class EvolutionTrace:
    """Sampled solution of the equations of motion."""

    model: Model
    times: np.ndarray
    phi: np.ndarray
    xy: np.ndarray
    n_steps: int = field(default=0, compare=False)
    burst: int = 1

    def __post_init__(self):
        for arr in (self.times, self.phi, self.xy):
            arr.setflags(write=False)

    def __len__(self):
        return self.times.size

    def state(self, i: int) -> SystemState:
        return SystemState(self.times[i], self.phi[i], self.xy[i])

    @property
    def phi2(self) -> np.ndarray:
        return np.abs(self.phi) ** 2

    @property
    def z(self) -> np.ndarray:
        return np.sqrt(1.0 + self.xy[..., 0] ** 2 + self.xy[..., 1] ** 2)

    @property
    def r(self) -> np.ndarray:
        """Squeezing amplitudes, shape (samples, active pairs)."""
        return 0.5 * np.arcsinh(np.hypot(self.xy[..., 0], self.xy[..., 1]))

    def coarse(self, values):
        """Average ``values`` (first axis = samples) over each burst.

        Returns ``(centre_times, averages)``; with ``burst == 1`` the samples
        come back unchanged.
        """
        return burst_average(self.times, values, self.burst)

    @property
    def photon_number(self) -> np.ndarray:
        """Photons per propagation direction, sum_k sinh^2 r_k = sum_k (z_k - 1) / 2."""
        return np.sum(_half_z_minus_one(self.xy), axis=1)


def _half_z_minus_one(xy):
    rho2 = xy[..., 0] ** 2 + xy[..., 1] ** 2
    # (sqrt(1 + rho2) - 1) / 2 without cancellation
    return 0.5 * rho2 / (np.sqrt(1.0 + rho2) + 1.0)


def integrate(initial: SystemState, model: Model, config: IntegratorConfig) -> EvolutionTrace:
    """Integrate from ``initial`` to ``config.t_end`` and sample every ``sample_dt``.

    Steps are clipped so that each sample time is hit exactly; no dense-output
    interpolation is used. Deterministic for identical inputs.
    """
    vec = initial.to_vector()
    if not np.all(np.isfinite(vec)):
        raise NumericDomainError("non-finite initial state")
    if initial.xy.shape[0] != model.modes.size:
        raise InvalidParameterError(
            f"state carries {initial.xy.shape[0]} pairs but the model has {model.modes.size}"
        )
    consts = _constants(model)
    offsets = config.sample_times(model)
    times = initial.t + offsets
    max_step = config.resolved_max_step(model)
    out = np.empty((times.size, vec.size))
    out[0] = vec
    h = _kernel.initial_step(vec, consts, max_step, config.rel_tol, config.abs_tol)
    n_steps = 0
    started = time.monotonic()
    i = 1
    while i < times.size:
        stop = times.size if config.max_wall_time is None else min(times.size, i + _CHUNK * config.burst)
        status, h, steps, done = _kernel.dopri_samples(
            out, times, i, stop, h, max_step, config.rel_tol, config.abs_tol, *consts)
        n_steps += steps
        if status == _kernel.UNDERFLOW:
            raise IntegrationError("step-size underflow", float(times[done - 1]))
        if status == _kernel.NONFINITE:
            raise NumericDomainError(f"non-finite state after t={times[done - 1]}")
        i = stop
        if config.max_wall_time is not None and time.monotonic() - started > config.max_wall_time \
                and i < times.size:
            keep = i - i % config.burst
            partial = _make_trace(model, initial, times[:keep], out[:keep], n_steps, config.burst)
            raise IntegrationError(
                f"wall-time budget of {config.max_wall_time} s exhausted before "
                f"t_end={times[-1]}", float(times[i - 1]), partial=partial)
    return _make_trace(model, initial, times, out, n_steps, config.burst)


def _make_trace(model, initial, times, out, n_steps, burst):
    m = model.modes.size
    phi = out[:, 0] + 1j * out[:, 1]
    xy = np.stack((out[:, 2:2 + m], out[:, 2 + m:]), axis=-1)
    # first sample is the initial state, bit for bit
    phi[0] = initial.phi
    xy[0] = initial.xy
    return EvolutionTrace(model, times, phi, xy, n_steps=n_steps, burst=burst)
