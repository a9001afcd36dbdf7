"""rydstore: deterministic 1-D Maxwell-Bloch simulator for counterdiabatically
accelerated Rydberg-EIT photon storage."""

from .config import ConfigError, ScenarioConfig, apply_overrides, dump_config, load_config, validate
from .constants import (
    CONSTANTS,
    PhysicalConstants,
    copropagating_wavevector,
    effective_wavevectors,
    mhz_to_rad_ns,
    rad_ns_to_mhz,
    thermal_velocity,
)
from .collective import (
    BASIS3,
    InvariantBreachError,
    Trajectory,
    build_h_cd,
    build_h_eff,
    build_h_raman,
    dark_bright_states,
    dark_state_fidelity,
    evolve_master,
    evolve_master3,
    run_population_dynamics,
)
from .multiexc import BASIS6, build_h_t, channels6, run_population6, run_storage6
from .noise import CDPerturbation, EnsembleResult, NoiseSpec, perturb_cd, run_ensemble
from .presets import PRESETS, Preset, get_preset
from .propagation import (
    DSPRecord,
    PropagationParams,
    StorageResult,
    dsp_decompose,
    mse_step,
    obe_rhs,
    retrieval_efficiency,
    run_storage_retrieval,
)
from .pulses import (
    PulseSet,
    PulseShape,
    RamanFields,
    build_pulse_set,
    cd_rabi,
    eval_derivative,
    eval_envelope,
    mixing_angle,
    pulse_table,
    raman_map,
    stark_terms,
)
from .runner import run, sweep

__version__ = "0.1.0"
