"""Plasmon decay into photon pairs in a transmon array coupled to a waveguide.

Integrates the variational equations for the plasmon amplitude and the
two-mode squeezing of counter-propagating photons, and checks them against
closed-form limits.
"""

from .device import (
    ModeSpectrum,
    PhysicalParams,
    band_width_for_top,
    build_mode_spectrum,
    decay_rate,
    fourier_capacitance_energies,
    initial_amplitude,
)
from .dynamics import (
    EvolutionTrace,
    IntegratorConfig,
    Model,
    SystemState,
    coupling_strength,
    derivatives,
    full_model,
    initial_state,
    integrate,
    squeezing_of,
    two_mode_reduction,
)
from .config import ScenarioConfig, default_config, dump_config, parse_config

__version__ = "0.1.0"
