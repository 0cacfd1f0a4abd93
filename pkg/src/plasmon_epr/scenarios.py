"""Scenario runner: turns a :class:`ScenarioConfig` into tables and a summary.

Each scenario returns tables plus a list of built-in checks. ``run_scenario``
writes the tables as CSV or JSON next to ``summary.json``. Floats are written
with ``repr``, the shortest string that round-trips, so repeated runs
produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks

from ._averaging import burst_average, sliding_period_average
from .config import ScenarioConfig
from .device import (
    PhysicalParams,
    build_mode_spectrum,
    decay_rate,
    density_of_states,
    initial_amplitude,
)
from .dynamics import IntegratorConfig, full_model, initial_state, integrate, two_mode_reduction
from .errors import (
    FaintDriveError,
    GridMismatchError,
    InvalidParameterError,
    OutOfBandError,
    PlasmonEprError,
    ScenarioError,
)
from .observables import epr_quadrature_variance, fock_oracle_variance
from .oracles import (
    DimensionlessFrame,
    continuum_phi2,
    continuum_squeezing,
    fig3_surface,
    max_squeezing,
    omega_for_two_mode_detuning,
    in_growth_window,
    rabi_frequency,
    squeezing_integral,
    two_mode_closed_form,
    two_mode_detuning,
    two_mode_validity_limit,
)

UNITS = {
    "t": "ns",
    "t_tilde": "1",
    "k": "1",
    "delta": "rad/ns",
    "delta_tilde": "1",
    "eps": "rad/ns",
    "omega": "rad/ns",
    "rabi_omega": "1",
    "period_oracle": "1",
    "period_numeric": "1",
    "n_peaks": "1",
}


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple
    rows: list
    description: str = ""

    def units(self):
        return tuple(UNITS.get(c, "1") for c in self.columns)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    describes: str


@dataclass
class ScenarioResult:
    scenario: str
    summary: dict
    tables: list
    checks: list
    elapsed: float = 0.0
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class TraceDeviation:
    """Relative deviations |numeric - oracle| / |oracle|, raw and period-averaged."""

    times: np.ndarray
    rel: np.ndarray
    coarse_times: np.ndarray
    coarse_numeric: np.ndarray
    coarse_oracle: np.ndarray
    coarse_rel: np.ndarray

    @property
    def max_rel(self) -> float:
        return float(np.max(self.rel)) if self.rel.size else 0.0

    @property
    def max_coarse_rel(self) -> float:
        return float(np.max(self.coarse_rel)) if self.coarse_rel.size else 0.0


def _relative(numeric, oracle):
    numeric = np.asarray(numeric, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    diff = np.abs(numeric - oracle)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = diff / np.abs(oracle)
    return np.where(diff == 0.0, 0.0, rel)


def compare_traces(times, numeric, oracle_times, oracle, *, burst: int = 1,
                   period_samples: int | None = None) -> TraceDeviation:
    """Compare a sampled numeric series with oracle samples on the same grid.

    ``burst > 1`` averages consecutive groups of samples (burst sampling);
    ``period_samples`` applies a sliding one-period average on a uniform grid.
    Both series are averaged with the same weights before the coarse
    deviation is taken.
    """
    times = np.asarray(times, dtype=float)
    oracle_times = np.asarray(oracle_times, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    if times.shape != oracle_times.shape or numeric.shape[0] != times.size \
            or oracle.shape != numeric.shape:
        raise GridMismatchError(
            f"grid shapes differ: {times.shape}, {numeric.shape} vs {oracle_times.shape}, {oracle.shape}")
    scale = max(1.0, float(np.max(np.abs(times)))) if times.size else 1.0
    if times.size and np.max(np.abs(times - oracle_times)) > 1e-12 * scale:
        raise GridMismatchError("sample times differ between numeric and oracle series")
    rel = _relative(numeric, oracle)
    if burst > 1:
        ct, cn = burst_average(times, numeric, burst)
        _, co = burst_average(times, oracle, burst)
    elif period_samples:
        ct, cn = sliding_period_average(times, numeric, period_samples)
        _, co = sliding_period_average(times, oracle, period_samples)
    else:
        ct, cn, co = times, numeric, oracle
    return TraceDeviation(times, rel, ct, cn, co, _relative(cn, co))


# --- helpers --------------------------------------------------------------------

def input_hash(config: ScenarioConfig) -> str:
    data = config.as_dict()
    data.pop("output")
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _derived(params: PhysicalParams) -> dict:
    spectrum = build_mode_spectrum(params)
    phi0 = initial_amplitude(params)
    out = {
        "eps0": spectrum.eps0,
        "omega_bottom": float(spectrum.omega[0]),
        "omega_top": spectrum.omega_top,
        "phi0_re": phi0.real,
        "phi0_im": phi0.imag,
        "phi0_sq": abs(phi0) ** 2,
    }
    try:
        out["gamma"] = decay_rate(params, spectrum)
    except OutOfBandError:
        out["gamma"] = None
    try:
        out["r_m"] = max_squeezing(params.n_qubits, phi0)
    except FaintDriveError:
        out["r_m"] = None
    return out


def _check(name, value, tolerance, describes, upper=True):
    value = float(value)
    ok = math.isfinite(value) and (value <= tolerance if upper else value >= tolerance)
    return Check(name, value, float(tolerance), bool(ok), describes)


def _integrator(config: ScenarioConfig, t_end: float, sample_dt: float, **extra) -> IntegratorConfig:
    kw = dict(config.integrator)
    kw.setdefault("t_end", t_end)
    kw.setdefault("sample_dt", sample_dt)
    kw.update(extra)
    return IntegratorConfig(**kw)


def params_for_two_mode_detuning(base: PhysicalParams, k_sel: int, delta_tilde: float) -> PhysicalParams:
    """Copy of ``base`` whose band places omega_{k_sel} at the requested two-mode detuning."""
    if not 1 <= k_sel <= base.n_pairs:
        raise InvalidParameterError(f"k_sel must lie in 1..{base.n_pairs}, got {k_sel}")
    eps0 = build_mode_spectrum(base).eps0
    target = omega_for_two_mode_detuning(delta_tilde, base.e_dc, eps0)
    if target <= base.omega_0:
        raise InvalidParameterError(
            f"delta_tilde={delta_tilde} needs omega_k={target} below the band bottom {base.omega_0}")
    shape = (1.0 - math.cos(2.0 * math.pi * k_sel / base.n_qubits)) / 2.0
    band = math.sqrt((target * target - base.omega_0 ** 2) / shape)
    return PhysicalParams(base.n_qubits, base.e_j, base.e_c0, base.e_dc, base.omega_0, band,
                          base.drive_ev, base.capacitance_profile)


def closed_form_time(r: float, r_m: float, n_qubits: int) -> float:
    """t~ at which the phase-matched closed form reaches ``r`` (< r_m)."""
    if not 0 <= r < r_m:
        raise InvalidParameterError("r must lie in [0, r_m)")
    big = math.exp(2.0 * r_m)
    e2r = math.exp(2.0 * r)
    decay = (big - e2r) / (big * e2r - 1.0)
    return -n_qubits * math.log(decay) / (4.0 * math.sinh(2.0 * r_m))


# --- scenarios ------------------------------------------------------------------

def _spectrum(config):
    params = config.physical_params()
    spectrum = build_mode_spectrum(params)
    rows = [(k, float(spectrum.eps[k]), float(spectrum.omega[k]), float(spectrum.delta[k]))
            for k in range(params.n_pairs + 1)]
    table = Table("spectrum", ("k", "eps", "omega", "delta"), rows,
                  "plasmon energies eps_k, photon band omega_k and detuning omega_k - eps_0")
    edge = abs(spectrum.omega_top / params.omega_top - 1.0)
    monotone = float(np.min(np.diff(spectrum.omega)))
    checks = [
        _check("band_top_matches", edge, 1e-12, "omega_{N/2} equals the configured band top"),
        _check("band_monotone", monotone, 0.0, "omega_k non-decreasing in k", upper=False),
    ]
    extra = {"eps0_in_band": bool(spectrum.omega[0] < spectrum.eps0 < spectrum.omega_top)}
    if extra["eps0_in_band"]:
        extra["density_of_states_at_eps0"] = density_of_states(params, spectrum.eps0)
    return [table], checks, extra


def _continuum_decay(config):
    a = config.scenario_args
    params = config.physical_params()
    model = full_model(params)
    spectrum = model.spectrum
    gamma = decay_rate(params, spectrum)
    phi0 = initial_amplitude(params)
    p2 = abs(phi0) ** 2
    n = params.n_qubits
    t_end = a["gamma_t_max"] / gamma
    cfg = _integrator(config, t_end, t_end / a["n_samples"], burst=a["burst"])
    trace = integrate(initial_state(model), model, cfg)
    burst = trace.burst

    dev = compare_traces(trace.times, trace.phi2, trace.times,
                         continuum_phi2(trace.times, phi0, gamma), burst=burst)
    gt = gamma * dev.coarse_times
    phi2_rows = list(zip(dev.coarse_times.tolist(), dev.coarse_numeric.tolist(),
                         dev.coarse_oracle.tolist(), dev.coarse_rel.tolist()))
    window = (gt >= a["gamma_t_min"]) & (gt <= a["gamma_t_max"])
    phi2_err = float(np.max(dev.coarse_rel[window])) if window.any() else math.nan

    nph = trace.photon_number
    depleted = 0.5 * n * (p2 - trace.phi2)
    ct, nph_c = trace.coarse(nph)
    _, dep_c = trace.coarse(depleted)
    residual = nph_c - dep_c
    nph_rows = list(zip(ct.tolist(), nph_c.tolist(), dep_c.tolist(), residual.tolist()))
    balance = float(np.max(np.abs(residual))) / (0.5 * n * p2)

    # squeezing of the mode closest to resonance against the first-order integral
    j = int(np.argmin(np.abs(model.delta)))
    k_res = int(model.modes[j])
    r_all = trace.r
    _, r_res = trace.coarse(r_all[:, j])
    _, r_orc = trace.coarse(continuum_squeezing(k_res, trace.times - trace.times[0],
                                                params, spectrum, gamma))
    # the first-order integral is signed; a negative value is squeezing of the other quadrature
    r_orc = np.abs(r_orc)
    rel_res = _relative(r_res, r_orc)
    sel = (gt > 0) & (gt <= a["gamma_t_max"])
    rk_err = float(np.max(rel_res[sel])) if sel.any() else math.nan
    res_rows = list(zip(ct.tolist(), r_res.tolist(), r_orc.tolist(), rel_res.tolist()))

    _, r_coarse = trace.coarse(r_all)
    picks = np.unique(np.linspace(0, ct.size - 1, min(a["spectrum_slices"], ct.size)).round().astype(int))
    slice_t = ct[picks] - trace.times[0]
    oracle_slices = np.empty((picks.size, model.modes.size))
    for col, k in enumerate(model.modes):
        oracle_slices[:, col] = continuum_squeezing(int(k), slice_t, params, spectrum, gamma)
    rk_rows = []
    for row, i in enumerate(picks):
        for col, k in enumerate(model.modes):
            rk_rows.append((float(ct[i]), int(k), float(model.delta[col]),
                            float(r_coarse[i, col]), float(oracle_slices[row, col])))

    tables = [
        Table("phi2", ("t", "phi2_numeric", "phi2_oracle", "rel_err"), phi2_rows,
              "period-averaged |phi|^2 against the continuum decay law |phi_0|^2/(1+Gamma t)"),
        Table("nph", ("t", "nph_numeric", "nph_eq14", "residual"), nph_rows,
              "period-averaged photons per direction against N(|phi_0|^2-|phi|^2)/2"),
        Table("resonant", ("t", "r_numeric", "r_oracle", "rel_err"), res_rows,
              f"squeezing of the mode closest to resonance (k={k_res}) against the first-order integral"),
        Table("rk_spectrum", ("t", "k", "delta", "r_numeric", "r_oracle"), rk_rows,
              "period-averaged squeezing spectrum; r_oracle is the first-order integral at the window centre"),
    ]
    checks = [
        _check("phi2_decay_law", phi2_err, a["tol_phi2"],
               "max relative deviation of period-averaged |phi|^2 from the decay law"),
        _check("photon_balance", balance, a["tol_balance"],
               "max period-averaged photon-number residual over N|phi_0|^2/2"),
        _check("resonant_squeezing", rk_err, a["tol_rk"],
               "max relative deviation of the resonant r_k from the first-order integral"),
    ]
    extra = {
        "t_end": cfg.t_end,
        "n_steps": trace.n_steps,
        "n_samples": len(trace),
        "resonant_k": k_res,
        "resonant_delta": float(model.delta[j]),
        "mode_spacing_at_resonance": float(np.max(np.abs(np.diff(model.omega)[max(j - 1, 0):j + 1]))),
    }
    return tables, checks, extra


def _two_mode(config):
    a = config.scenario_args
    base = config.physical_params()
    phi0 = initial_amplitude(base)
    p2 = abs(phi0) ** 2
    n = base.n_qubits
    k_sel = a["k_sel"] if a["k_sel"] is not None else n // 2
    delta_tilde = a["delta_tilde"] if a["delta_tilde"] is not None else 4.0 * p2
    params = params_for_two_mode_detuning(base, k_sel, delta_tilde)
    model = two_mode_reduction(params, k_sel)
    frame = DimensionlessFrame.from_params(params, model.spectrum, k_sel)
    realized = two_mode_detuning(frame, float(model.spectrum.delta[k_sel]))
    r_m = max_squeezing(n, phi0)
    limit = two_mode_validity_limit(r_m, n)
    t_tilde_end = a["t_tilde_end"]
    if t_tilde_end is None:
        t_tilde_end = 1.5 * closed_form_time(max(limit, 0.0), r_m, n)
    period = 2.0 * math.pi / model.spectrum.eps0
    cfg = _integrator(config, float(frame.t_physical(t_tilde_end)), period / a["samples_per_period"])
    trace = integrate(initial_state(model), model, cfg)
    t = trace.times - trace.times[0]
    per_period = max(1, int(round(period / cfg.sample_dt)))
    closed = two_mode_closed_form(frame.t_tilde(t), r_m, n)
    dev = compare_traces(t, trace.r[:, 0], t, closed, period_samples=per_period)
    inside = (dev.coarse_times >= period) & (dev.coarse_oracle <= limit)
    err = float(np.max(dev.coarse_rel[inside])) if inside.any() else math.nan
    rows = list(zip((dev.coarse_times + trace.times[0]).tolist(),
                    frame.t_tilde(dev.coarse_times).tolist(),
                    dev.coarse_numeric.tolist(), dev.coarse_oracle.tolist(),
                    dev.coarse_rel.tolist(), [int(v) for v in inside]))
    table = Table("r_vs_t", ("t", "t_tilde", "r_numeric", "r_closed_form", "rel_err", "in_validity"), rows,
                  "period-averaged squeezing of the selected pair against the phase-matched closed form")
    checks = [_check("two_mode_closed_form", err, a["tol"],
                     "max relative deviation while the closed form stays below its validity limit")]
    extra = {
        "k_sel": k_sel,
        "delta_tilde": realized,
        "band_width": params.band_width,
        "validity_limit": limit,
        "t_tilde_end": float(t_tilde_end),
        "n_steps": trace.n_steps,
    }
    return [table], checks, extra


def rabi_point(base: PhysicalParams, k_sel: int, delta_tilde: float, n_periods: float,
               samples_per_period: int, integrator: dict) -> tuple:
    """One grid point of the Rabi sweep; returns a table row."""
    phi0 = initial_amplitude(base)
    omega = float(rabi_frequency(delta_tilde, phi0))
    growth = bool(in_growth_window(delta_tilde, phi0))
    amp = 8.0 * abs(phi0) ** 2 / omega ** 2 if omega > 0 else math.inf
    if growth or omega == 0.0:
        return (delta_tilde, omega, math.pi / omega if omega else math.inf, math.nan, math.nan,
                "growth", amp, math.nan, 0)
    params = params_for_two_mode_detuning(base, k_sel, delta_tilde)
    model = two_mode_reduction(params, k_sel)
    frame = DimensionlessFrame.from_params(params, model.spectrum, k_sel)
    period = 2.0 * math.pi / model.spectrum.eps0
    kw = dict(integrator)
    kw.setdefault("t_end", float(frame.t_physical(n_periods * math.pi / omega)))
    kw.setdefault("sample_dt", period / samples_per_period)
    trace = integrate(initial_state(model), model, IntegratorConfig(**kw))
    per_period = max(1, int(round(period / kw["sample_dt"])))
    t, nph = sliding_period_average(trace.times - trace.times[0], trace.photon_number, per_period)
    peaks, _ = find_peaks(nph, prominence=0.1 * float(np.max(nph)))
    t_tilde = frame.t_tilde(t)
    measured = float(np.mean(np.diff(t_tilde[peaks]))) if peaks.size >= 2 else math.nan
    expected = math.pi / omega
    return (delta_tilde, omega, expected, measured, abs(measured / expected - 1.0),
            "oscillation", amp, float(np.max(nph)), int(peaks.size))


def _rabi_sweep(config):
    a = config.scenario_args
    base = config.physical_params()
    p2 = abs(initial_amplitude(base)) ** 2
    k_sel = a["k_sel"] if a["k_sel"] is not None else base.n_qubits // 2
    grid = a["delta_tilde"]
    if grid is None:
        grid = [m * p2 for m in (-4.0, -2.0, 0.0, 10.0, 12.0)]
    jobs = [(base, k_sel, float(d), a["n_periods"], a["samples_per_period"], dict(config.integrator))
            for d in grid]
    if a["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=a["workers"]) as pool:
            # map yields in submission order, whatever order the workers finish in
            rows = list(pool.map(rabi_point, *zip(*jobs)))
    else:
        rows = [rabi_point(*job) for job in jobs]
    table = Table("rabi", ("delta_tilde", "rabi_omega", "period_oracle", "period_numeric", "rel_err",
                           "branch", "nph_amplitude_oracle", "nph_max_numeric", "n_peaks"), rows,
                  "photon-number oscillation period against pi/Omega across detunings")
    osc = [row[4] for row in rows if row[5] == "oscillation"]
    worst = max(osc) if osc else math.nan
    checks = [_check("rabi_period", worst if not any(math.isnan(v) for v in osc) else math.nan,
                     a["tol"], "max relative deviation of the oscillation period from pi/Omega")]
    return [table], checks, {"k_sel": k_sel, "grid_size": len(rows)}


def _fig3_surface(config):
    a = config.scenario_args
    params = config.physical_params()
    gamma = decay_rate(params, build_mode_spectrum(params))
    gt = np.linspace(0.0, a["gamma_t_max"], a["n_t"])
    d = np.linspace(-a["delta_over_gamma_max"], a["delta_over_gamma_max"], a["n_delta"])
    t_grid = gt / gamma
    delta_grid = d * gamma
    surface = fig3_surface(t_grid, delta_grid, params, gamma)
    rows = [(float(t_grid[i]), float(delta_grid[j]), float(surface[i, j]))
            for i in range(gt.size) for j in range(d.size)]
    table = Table("surface", ("t", "delta", "r_star"), rows,
                  "dimensionless squeezing r* = 16 Gamma r_k / (E_dC |phi_0|^2) on a (t, delta) grid")
    zero = np.flatnonzero(d == 0.0)
    checks = []
    if zero.size:
        col = surface[:, zero[0]]
        quadrature = squeezing_integral(0.0, gt, force_quadrature=True)
        checks.append(_check("log_identity", float(np.max(np.abs(quadrature - np.log1p(gt)))), a["tol"],
                             "r*(delta=0) by quadrature against ln(1 + Gamma t)"))
        gap = float(np.max(surface.max(axis=1) - col))
        checks.append(_check("maximum_at_resonance", gap, 1e-12,
                             "largest excess of any delta over delta=0 in a t-slice"))
    odd = float(np.max(np.abs(surface - surface[:, ::-1])))
    checks.append(_check("even_in_delta", odd, 1e-12, "asymmetry of the surface under delta -> -delta"))
    return [table], checks, {"gamma": gamma}


def _epr_report(config):
    a = config.scenario_args
    r_grid = np.linspace(0.0, a["r_max"], a["n_r"])
    phases = np.linspace(0.0, math.pi, a["n_phase"], endpoint=False)
    rows = []
    worst_dev = 0.0
    worst_product = math.inf
    worst_resonant = 0.0
    for r in r_grid:
        resonant = epr_quadrature_variance(float(r), 0.0, 0.0).ratio_minus
        worst_resonant = max(worst_resonant, abs(resonant - math.exp(-2.0 * r)))
        for ph in phases:
            rep = epr_quadrature_variance(float(r), float(ph), 0.0)
            fock = fock_oracle_variance(float(r), float(ph), 0.0, a["n_max"])
            dev = abs(rep.ratio_minus - fock)
            product = rep.ratio_minus * rep.conjugate_ratio
            worst_dev = max(worst_dev, dev)
            worst_product = min(worst_product, product)
            rows.append((float(r), float(ph), rep.ratio_minus, rep.ratio_plus, fock, dev, product))
    table = Table("epr", ("r", "theta_minus_psi", "ratio_minus", "ratio_plus", "ratio_fock", "abs_dev",
                          "uncertainty_product"), rows,
                  "joint-quadrature variances relative to shot noise, Gaussian formula against Fock sums")
    checks = [
        _check("fock_agreement", worst_dev, a["tol"], "max |Gaussian - Fock| variance ratio"),
        _check("resonant_value", worst_resonant, 1e-12, "max |ratio(theta = psi) - exp(-2r)|"),
        _check("uncertainty_product", worst_product, 1.0 - 1e-12,
               "min of ratio(psi) * ratio(psi + pi/2)", upper=False),
    ]
    return [table], checks, {"n_max": a["n_max"]}


_RUNNERS = {
    "spectrum": _spectrum,
    "continuum_decay": _continuum_decay,
    "two_mode": _two_mode,
    "rabi_sweep": _rabi_sweep,
    "fig3_surface": _fig3_surface,
    "epr_report": _epr_report,
}


# --- output ---------------------------------------------------------------------

def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def table_text(table: Table, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines.extend(",".join(_cell(v) for v in row) for row in table.rows)
        return "\n".join(lines) + "\n"
    doc = {"columns": list(table.columns), "units": list(table.units()),
           "rows": [_json_value(list(row)) for row in table.rows]}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def run_scenario(config: ScenarioConfig, out_dir: str | Path | None = None,
                 fmt: str | None = None, write: bool = True) -> ScenarioResult:
    """Run ``config`` and (optionally) write its tables plus ``summary.json``.

    Module errors are re-raised as :class:`ScenarioError` with the scenario
    name attached; the original is kept in ``cause``.
    """
    fmt = fmt or config.output["format"]
    started = time.perf_counter()
    try:
        derived = _derived(config.physical_params())
        tables, checks, extra = _RUNNERS[config.scenario](config)
    except PlasmonEprError as exc:
        raise ScenarioError(config.scenario, exc) from exc
    elapsed = time.perf_counter() - started
    summary = {
        "scenario": config.scenario,
        "input_hash": input_hash(config),
        "derived": derived,
        "details": extra,
        "checks": [
            {"name": c.name, "value": c.value, "tolerance": c.tolerance, "passed": c.passed,
             "describes": c.describes}
            for c in checks
        ],
        "passed": all(c.passed for c in checks),
        "files": {
            f"{t.name}.{fmt}": {"columns": list(t.columns), "units": list(t.units()),
                                "describes": t.description}
            for t in tables
        },
    }
    result = ScenarioResult(config.scenario, summary, tables, checks, elapsed)
    if write:
        out = Path(out_dir if out_dir is not None else config.output["dir"])
        out.mkdir(parents=True, exist_ok=True)
        for t in tables:
            path = out / f"{t.name}.{fmt}"
            path.write_text(table_text(t, fmt))
            result.files.append(path)
        path = out / "summary.json"
        path.write_text(json.dumps(_json_value(summary), indent=2, sort_keys=True) + "\n")
        result.files.append(path)
    return result
