"""Double-excitation manifold: imperfect blockade and multiphoton corrections.

The basis extends the single-excitation set with the symmetric two-excitation
states, ordered (G, E, R, EE, RE, RR). The weak-field correction factor
``epsilon`` scales every coupling from the single- into the double-excitation
manifold; the finite van der Waals shift ``u_rr`` sits on |RR>. Decay channels
are independent single-atom decays mapped onto the symmetric states, with the
excited-component count setting the rate multiplier:

    E->G (g_e), R->G (g_r), EE->E (2 g_e), RE->R (g_e), RE->E (g_r), RR->R (2 g_r).
"""

from __future__ import annotations

import math

import numpy as np

from .collective import (
    E,
    G,
    R,
    Trajectory,
    dark_state_fidelity,
    evolve_master,
    ground_state,
)
from .config import ScenarioConfig
from .propagation import StorageResult, _GridEngine, _run_grid
from .pulses import build_pulse_set

EE, RE, RR = 3, 4, 5
BASIS6 = ("G", "E", "R", "EE", "RE", "RR")


def channels6(gamma_e: float, gamma_r: float):
    return (
        (G, E, gamma_e),
        (G, R, gamma_r),
        (E, EE, 2.0 * gamma_e),
        (R, RE, gamma_e),
        (E, RE, gamma_r),
        (R, RR, 2.0 * gamma_r),
    )


def build_h_t(omega_p, omega_c, omega_cd, n_atoms: int, epsilon: float,
              u_rr: float) -> np.ndarray:
    """Six-level Hamiltonian with imperfect blockade (overall -1/2 prefactor).

    Requires n_atoms >= 2 (the double-excitation couplings involve N-1).
    """
    if n_atoms < 2:
        raise ValueError(f"atom_number must be >= 2 for the double-excitation manifold, got {n_atoms}")
    sqrt_n = math.sqrt(n_atoms)
    up = np.zeros((6, 6), dtype=complex)
    up[G, E] = sqrt_n * omega_p
    up[G, R] = -1j * omega_cd
    up[E, R] = omega_c
    up[E, EE] = epsilon * math.sqrt(2.0 * (n_atoms - 1)) * omega_p
    up[R, RE] = epsilon * math.sqrt(n_atoms - 1) * omega_p
    up[EE, RE] = math.sqrt(2.0) * omega_c
    up[RE, RR] = math.sqrt(2.0) * omega_c
    h = -0.5 * (up + up.conj().T)
    h[RR, RR] = u_rr
    return h


def run_population6(config: ScenarioConfig, cd_perturbation=None,
                    record_every: int = 1) -> Trajectory:
    """Population dynamics of a single collective emitter in the six-level model."""
    if not config.validated:
        raise ValueError("config must be validated first")
    pulses = build_pulse_set(config)
    n = config.atom_number

    def drive(t):
        value = pulses.cd_drive_at(t) if config.cd_enabled else 0.0
        if cd_perturbation is not None:
            value = cd_perturbation(value, t)
        return value

    def hamiltonian(t):
        return build_h_t(pulses.probe_at(t), pulses.control_at(t), drive(t),
                         n, config.epsilon, config.u_rr)

    def fidelity(rho, t):
        return dark_state_fidelity(rho[:3, :3], pulses.probe_at(t),
                                   pulses.control_at(t), n)

    return evolve_master(ground_state(6), hamiltonian,
                         channels6(config.gamma_e, config.gamma_r),
                         config.t_end, config.dt, fidelity_fn=fidelity,
                         record_every=record_every, basis=BASIS6)


def _h_fill_6level(engine: _GridEngine, phase_cd):
    cfg = engine.config
    sqrt_n = engine.sqrt_n
    c_ee = cfg.epsilon * math.sqrt(2.0 * (cfg.atom_number - 1))
    c_re = cfg.epsilon * math.sqrt(cfg.atom_number - 1)
    sqrt2 = math.sqrt(2.0)

    def fill(h, field_column, t):
        oc = engine.pulses.control_at(t)
        h[:, G, E] = -0.5 * sqrt_n * np.conj(field_column)
        h[:, E, G] = np.conj(h[:, G, E])
        h[:, E, R] = -0.5 * oc
        h[:, R, E] = np.conj(h[:, E, R])
        h[:, E, EE] = -0.5 * c_ee * np.conj(field_column)
        h[:, EE, E] = np.conj(h[:, E, EE])
        h[:, R, RE] = -0.5 * c_re * np.conj(field_column)
        h[:, RE, R] = np.conj(h[:, R, RE])
        h[:, EE, RE] = -0.5 * sqrt2 * oc
        h[:, RE, EE] = np.conj(h[:, EE, RE])
        h[:, RE, RR] = -0.5 * sqrt2 * oc
        h[:, RR, RE] = np.conj(h[:, RE, RR])
        h[:, RR, RR] = cfg.u_rr
        drive = engine.drive_at(t)
        if np.any(drive != 0.0):
            drv = drive * phase_cd
            h[:, R, G] += -0.5j * drv
            h[:, G, R] += np.conj(h[:, R, G])
    return fill


def run_storage6(config: ScenarioConfig, cd_perturbation=None,
                 record_dt: float = 0.5) -> StorageResult:
    """Storage/retrieval with the six-level manifold per cell; the field is
    driven by the principal coherence <E|rho|G> exactly as in the 3-level run."""
    if not config.validated:
        raise ValueError("config must be validated first")
    if config.atom_number < 2:
        raise ValueError("atom_number must be >= 2 for the six-level model")
    result = _run_grid(config, 6, channels6(config.gamma_e, config.gamma_r),
                       h_fill_factory=_h_fill_6level,
                       cd_perturbation=cd_perturbation, record_dt=record_dt)
    result.basis = BASIS6
    return result
