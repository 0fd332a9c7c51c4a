"""Radiative decay of one and two phonon-dressed quantum emitters.

Four layers:

* :mod:`polaron_dicke.bath` — spectral density, correlation function and
  polaron constants by numerical quadrature;
* :mod:`polaron_dicke.analytic` — every closed-form result (single-emitter
  decay, two-emitter decoherence, biexponential and cascade decays,
  excitation numbers, lifetimes, intensities);
* :mod:`polaron_dicke.engine` — the polaron-frame Lindblad propagator with
  optional Gaussian pulse driving;
* :mod:`polaron_dicke.cli` + :mod:`polaron_dicke.scenarios` — the
  ``polaron-dicke`` command with one subcommand per figure and generic
  sweeps, writing reproducible CSV/JSON.
"""

__version__ = "0.1.0"

from .bath import (  # noqa: F401
    BathProfile,
    QuadratureConfig,
    QuadratureError,
    SpectralDensityParams,
    DEFAULT_MATERIAL,
    build_profile,
    collective_rates,
    eval_spectral_density,
    kappa,
    phi,
    reorg_energy,
    scale_coupling,
)
from .analytic import (  # noqa: F401
    DecayKernels,
    DickePopulations,
    InitialMix,
    SingleEmitterState,
    decay_kernels,
    decoherence_mixing,
    doubly_excited_decay,
    doubly_excited_number,
    excitation_number,
    free_decoherence,
    lifetime,
    long_pulse_number,
    single_excitation_decay,
    single_tls_evolution,
)
from .engine import (  # noqa: F401
    IntegratorConfig,
    PulseEnvelope,
    Trajectory,
    drive_then_decay,
    fit_exponential,
    gaussian_envelope,
    lindblad_rhs,
    propagate,
)
from .config import ConfigError, RunConfig, load_config  # noqa: F401
