"""Scenario configuration: schema, INI file I/O, validation, derived quantities.

A ``ScenarioConfig`` holds every physical and numerical parameter of one run in
internal units (ns, rad/ns, um, K). Config files are flat ``key = value`` text
with ``[section]`` headers; all frequencies are entered as nu = omega/2pi in
MHz and converted on load. ``validate`` checks the invariants and returns a
copy with the derived quantities (wave numbers, thermal velocity, field
coupling) filled in.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .constants import (
    CONSTANTS,
    effective_wavevectors,
    copropagating_wavevector,
    mhz_to_rad_ns,
    m_s_to_um_ns,
    rad_m_to_rad_um,
    rad_ns_to_mhz,
    thermal_velocity,
)

CONFIG_DIR_ENV = "RYDSTORE_CONFIG_DIR"

SCENARIO_KINDS = (
    "population",        # single collective emitter, 3 levels
    "population6",       # single collective emitter, double-excitation manifold
    "storage",           # 1-D medium, write/hold/readout, 3 levels
    "storage6",          # 1-D medium with the double-excitation manifold
    "ensemble",          # seeded noise ensemble over a population scenario
    "raman_compare",     # ideal CD vs physical Raman realisation
    "pulses",            # pulse-table export only
)


class ConfigError(ValueError):
    """Raised for an invalid configuration; message names the offending field."""


@dataclass(frozen=True)
class ScenarioConfig:
    # scenario
    kind: str = "population"
    label: str = ""

    # fields (rad/ns)
    peak_probe_rabi: float = mhz_to_rad_ns(0.28)
    peak_control_rabi: float = mhz_to_rad_ns(7.0)

    # pulse shapes (ns); kinds: gaussian | smoothed_rect | zero
    probe_kind: str = "gaussian"
    probe_center: float = 162.5
    probe_sigma: float = 62.5
    control_kind: str = "gaussian"
    control_center: float = 100.0
    control_sigma: float = 62.5
    control_on: float = -25.0
    control_off: float = 145.0
    control_rise: float = 45.0
    cd_enabled: bool = False
    cd_gate_time: float = 0.0     # <= 0 disables the gate
    cd_gate_rise: float = 5.0
    readout_enabled: bool = False
    readout_rise: float = 20.0

    # atoms
    atom_number: int = 500
    gamma_e: float = mhz_to_rad_ns(6.0)
    gamma_r: float = mhz_to_rad_ns(0.01)

    # medium
    optical_depth: float = 5.0
    medium_length: float = 100.0  # um
    n_z: int = 100

    # protocol (ns)
    write_time: float = 250.0
    storage_time: float = 500.0
    readout_window: float = 600.0
    t_end: float = 300.0          # population-run window

    # wavelengths (nm)
    lambda_p: float = 780.2415
    lambda_c: float = 479.8389
    lambda_p_cd: float = 780.1139
    lambda_c_cd: float = 479.8871

    # motional dephasing
    dephasing_enabled: bool = True
    temperature: float = 10e-6    # K
    dephasing_k_convention: str = "sum"   # sum | difference

    # blockade (6-level runs)
    epsilon: float = 0.0
    u_rr: float = mhz_to_rad_ns(5.0)

    # Raman realisation of the CD drive
    raman_enabled: bool = False
    raman_detuning: float = mhz_to_rad_ns(10_000.0)
    stark_compensation: bool = True

    # noise
    noise_amplitude_bound: float = 0.20
    noise_phase_sigma: float = 0.1 * math.pi
    noise_correlation_step: float = 1.0
    noise_realizations: int = 30
    noise_mode: str = "amplitude"  # amplitude | phase | both

    # numerics
    dt: float = 0.1
    dt_fast: float = 7.8125e-4    # used while Raman fields are active
    seed: int = 8

    # derived (filled by validate; zero until then)
    validated: bool = False
    thermal_velocity_um_ns: float = 0.0
    k_eff: float = 0.0            # rad/um
    k_eff_cd: float = 0.0
    delta_k: float = 0.0
    k_dephasing: float = 0.0      # rad/um, per dephasing_k_convention
    kv_rate: float = 0.0          # (k_dephasing * v) in rad/ns
    field_coupling: float = 0.0   # alpha*Gamma/(2 sqrt(N) L), rad/(ns um)

    def replace(self, **kw) -> "ScenarioConfig":
        """Copy with updated fields; clears the validated/derived state."""
        base = dataclasses.replace(self, **kw)
        if any(k not in _DERIVED for k in kw):
            base = dataclasses.replace(base, validated=False)
        return base


_DERIVED = (
    "validated", "thermal_velocity_um_ns", "k_eff", "k_eff_cd", "delta_k",
    "k_dephasing", "kv_rate", "field_coupling",
)

# (section, key, field, loader, dumper) -- loaders take the file string.
_ID = (str, str)
_F = (float, repr)
_I = (int, repr)
_B = (lambda s: s.strip().lower() in ("1", "true", "yes", "on"), lambda b: "true" if b else "false")
_MHZ = (lambda s: mhz_to_rad_ns(float(s)), lambda v: repr(rad_ns_to_mhz(v)))

_SCHEMA = [
    ("scenario", "kind", "kind", *_ID),
    ("scenario", "label", "label", *_ID),
    ("fields", "peak_probe_rabi_mhz", "peak_probe_rabi", *_MHZ),
    ("fields", "peak_control_rabi_mhz", "peak_control_rabi", *_MHZ),
    ("pulses", "probe_kind", "probe_kind", *_ID),
    ("pulses", "probe_center_ns", "probe_center", *_F),
    ("pulses", "probe_sigma_ns", "probe_sigma", *_F),
    ("pulses", "control_kind", "control_kind", *_ID),
    ("pulses", "control_center_ns", "control_center", *_F),
    ("pulses", "control_sigma_ns", "control_sigma", *_F),
    ("pulses", "control_on_ns", "control_on", *_F),
    ("pulses", "control_off_ns", "control_off", *_F),
    ("pulses", "control_rise_ns", "control_rise", *_F),
    ("pulses", "cd_enabled", "cd_enabled", *_B),
    ("pulses", "cd_gate_time_ns", "cd_gate_time", *_F),
    ("pulses", "cd_gate_rise_ns", "cd_gate_rise", *_F),
    ("pulses", "readout_enabled", "readout_enabled", *_B),
    ("pulses", "readout_rise_ns", "readout_rise", *_F),
    ("atoms", "atom_number", "atom_number", *_I),
    ("atoms", "gamma_e_mhz", "gamma_e", *_MHZ),
    ("atoms", "gamma_r_mhz", "gamma_r", *_MHZ),
    ("medium", "optical_depth", "optical_depth", *_F),
    ("medium", "length_um", "medium_length", *_F),
    ("medium", "n_z", "n_z", *_I),
    ("protocol", "write_time_ns", "write_time", *_F),
    ("protocol", "storage_time_ns", "storage_time", *_F),
    ("protocol", "readout_window_ns", "readout_window", *_F),
    ("protocol", "t_end_ns", "t_end", *_F),
    ("wavelengths", "lambda_p_nm", "lambda_p", *_F),
    ("wavelengths", "lambda_c_nm", "lambda_c", *_F),
    ("wavelengths", "lambda_p_cd_nm", "lambda_p_cd", *_F),
    ("wavelengths", "lambda_c_cd_nm", "lambda_c_cd", *_F),
    ("dephasing", "enabled", "dephasing_enabled", *_B),
    ("dephasing", "temperature_k", "temperature", *_F),
    ("dephasing", "k_convention", "dephasing_k_convention", *_ID),
    ("blockade", "epsilon", "epsilon", *_F),
    ("blockade", "u_rr_mhz", "u_rr", *_MHZ),
    ("raman", "enabled", "raman_enabled", *_B),
    ("raman", "detuning_mhz", "raman_detuning", *_MHZ),
    ("raman", "stark_compensation", "stark_compensation", *_B),
    ("noise", "amplitude_bound", "noise_amplitude_bound", *_F),
    ("noise", "phase_sigma_rad", "noise_phase_sigma", *_F),
    ("noise", "correlation_step_ns", "noise_correlation_step", *_F),
    ("noise", "n_realizations", "noise_realizations", *_I),
    ("noise", "mode", "noise_mode", *_ID),
    ("numerics", "dt_ns", "dt", *_F),
    ("numerics", "dt_fast_ns", "dt_fast", *_F),
    ("numerics", "seed", "seed", *_I),
]

_BY_SECTION_KEY = {(s, k): (f, load, dump) for s, k, f, load, dump in _SCHEMA}
_BY_FIELD = {f: (s, k, load, dump) for s, k, f, load, dump in _SCHEMA}


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    """Parse a config file. Relative paths are also looked up in the directory
    named by the RYDSTORE_CONFIG_DIR environment variable."""
    p = Path(path)
    if not p.exists():
        env_dir = os.environ.get(CONFIG_DIR_ENV)
        if env_dir and not p.is_absolute():
            candidate = Path(env_dir) / p
            if candidate.exists():
                p = candidate
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(p)
    kw = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            spec = _BY_SECTION_KEY.get((section, key))
            if spec is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            fieldname, load, _ = spec
            try:
                kw[fieldname] = load(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return ScenarioConfig(**kw)


def dump_config(config: ScenarioConfig, path: str | os.PathLike) -> None:
    """Write the non-derived fields back out in config-file units."""
    parser = configparser.ConfigParser()
    for section, key, fieldname, _, dump in _SCHEMA:
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, dump(getattr(config, fieldname)))
    with open(path, "w") as fh:
        parser.write(fh)


def apply_overrides(config: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``section.key=value`` override strings (CLI --set)."""
    kw = {}
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        target, raw = item.split("=", 1)
        section, key = target.split(".", 1)
        spec = _BY_SECTION_KEY.get((section.strip(), key.strip()))
        if spec is None:
            raise ConfigError(f"unknown config key [{section}] {key}")
        fieldname, load, _ = spec
        try:
            kw[fieldname] = load(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {target}: {raw!r}") from exc
    return config.replace(**kw)


def _require_positive(config: ScenarioConfig, names: tuple[str, ...]) -> None:
    for name in names:
        value = getattr(config, name)
        if not value > 0:
            raise ConfigError(f"{name} must be > 0, got {value}")


def validate(config: ScenarioConfig) -> ScenarioConfig:
    """Check all invariants and fill the derived quantities.

    Raises ConfigError naming the first violated invariant. Decay rates may be
    zero (decay-free population studies) but never negative; storage runs need
    gamma_e > 0 because the field coupling is proportional to it.
    """
    if config.kind not in SCENARIO_KINDS:
        raise ConfigError(f"kind must be one of {SCENARIO_KINDS}, got {config.kind!r}")
    if config.atom_number < 1:
        raise ConfigError("atom_number must be ≥ 1")
    if config.gamma_e < 0 or config.gamma_r < 0:
        raise ConfigError(f"decay rates must be >= 0, got gamma_e={config.gamma_e}, gamma_r={config.gamma_r}")
    _require_positive(config, ("peak_probe_rabi", "peak_control_rabi", "medium_length",
                               "dt", "dt_fast", "t_end"))
    if config.kind in ("storage", "storage6"):
        if config.gamma_e <= 0:
            raise ConfigError(f"gamma_e must be > 0 for storage runs, got {config.gamma_e}")
        _require_positive(config, ("optical_depth", "write_time", "storage_time",
                                   "readout_window"))
        if config.n_z < 2:
            raise ConfigError(f"n_z must be >= 2, got {config.n_z}")
    if not 0.0 <= config.epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in [0, 1], got {config.epsilon}")
    if config.u_rr < 0:
        raise ConfigError(f"u_rr must be >= 0, got {config.u_rr}")
    if config.temperature < 0:
        raise ConfigError(f"temperature must be >= 0, got {config.temperature}")
    if config.dephasing_k_convention not in ("sum", "difference"):
        raise ConfigError(f"dephasing_k_convention must be 'sum' or 'difference', "
                          f"got {config.dephasing_k_convention!r}")
    if config.noise_mode not in ("amplitude", "phase", "both"):
        raise ConfigError(f"noise mode must be amplitude|phase|both, got {config.noise_mode!r}")
    if not 0.0 <= config.noise_amplitude_bound < 1.0:
        raise ConfigError(f"noise amplitude_bound must be in [0, 1), got {config.noise_amplitude_bound}")
    if config.noise_phase_sigma < 0:
        raise ConfigError(f"noise phase_sigma must be >= 0, got {config.noise_phase_sigma}")
    if config.noise_realizations < 1:
        raise ConfigError(f"n_realizations must be >= 1, got {config.noise_realizations}")

    # time step must resolve the fastest angular frequency present
    sqrt_n = math.sqrt(config.atom_number)
    omega_max = max(sqrt_n * config.peak_probe_rabi, config.peak_control_rabi,
                    config.gamma_e)
    bound = 1.0 / (20.0 * omega_max)
    if config.dt > bound:
        raise ConfigError(
            f"dt={config.dt} ns too coarse: must be <= 1/(20*omega_max) = {bound:.3e} ns")
    if config.raman_enabled or config.kind == "raman_compare":
        fast_bound = 1.0 / (20.0 * config.raman_detuning)
        if config.dt_fast > fast_bound:
            raise ConfigError(
                f"dt_fast={config.dt_fast} ns too coarse for the Raman detuning: "
                f"must be <= 1/(20*Delta) = {fast_bound:.3e} ns")
        if config.raman_detuning <= 0:
            raise ConfigError(f"raman detuning must be > 0, got {config.raman_detuning}")

    k_eff, k_eff_cd, delta_k = effective_wavevectors(
        config.lambda_p, config.lambda_c, config.lambda_p_cd, config.lambda_c_cd)
    if config.dephasing_k_convention == "sum":
        k_deph = copropagating_wavevector(config.lambda_p, config.lambda_c)
    else:
        k_deph = k_eff
    v = thermal_velocity(config.temperature, CONSTANTS.rb87_mass)
    v_um_ns = m_s_to_um_ns(v)
    kappa = (config.optical_depth * config.gamma_e
             / (2.0 * sqrt_n * config.medium_length))
    return dataclasses.replace(
        config,
        validated=True,
        thermal_velocity_um_ns=v_um_ns,
        k_eff=rad_m_to_rad_um(k_eff),
        k_eff_cd=rad_m_to_rad_um(k_eff_cd),
        delta_k=rad_m_to_rad_um(delta_k),
        k_dephasing=rad_m_to_rad_um(k_deph),
        kv_rate=rad_m_to_rad_um(k_deph) * v_um_ns,
        field_coupling=kappa,
    )
