"""Collective-state engine for a single blockaded ensemble (superatom).

Basis order is (G, E, R): collective ground state, single shared excitation of
the intermediate level, single shared Rydberg excitation. All Hamiltonians and
density matrices in this package use that index order.

The master equation is integrated with a deterministic fixed-step RK4; decay
channels are Lindblad dissipators E->G (rate gamma_e) and R->G (rate gamma_r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .pulses import build_pulse_set, raman_map, stark_terms

G, E, R = 0, 1, 2
BASIS3 = ("G", "E", "R")


class InvariantBreachError(RuntimeError):
    """A density-matrix invariant (trace/hermiticity) left tolerance mid-run."""


def build_h_eff(omega_p, omega_c, n_atoms: int) -> np.ndarray:
    """Resonant ladder Hamiltonian -(1/2)[sqrt(N) Op (|E><G|+h.c.) + Oc (|R><E|+h.c.)]."""
    sqrt_n = math.sqrt(n_atoms)
    h = np.zeros((3, 3), dtype=complex)
    h[E, G] = -0.5 * sqrt_n * omega_p
    h[G, E] = np.conj(h[E, G])
    h[R, E] = -0.5 * omega_c
    h[E, R] = np.conj(h[R, E])
    return h


def build_h_cd(drive) -> np.ndarray:
    """Counterdiabatic coupling: <G|H|R> = i*drive/2 for real drive.

    Built as -(1/2)[i*drive |R><G| + h.c.] so complex drives (noise phases,
    spatial mismatch factors) stay Hermitian.
    """
    h = np.zeros((3, 3), dtype=complex)
    h[R, G] = -0.5j * drive
    h[G, R] = np.conj(h[R, G])
    return h


def dark_bright_states(omega_p, omega_c, n_atoms: int):
    """Instantaneous dark/bright eigensystem of build_h_eff.

    Returns (psi0, psi_plus, psi_minus, e0, e_plus) with e0 = 0 and
    H psi_plus = +(rabi/2) psi_plus, H psi_minus = -(rabi/2) psi_minus.
    With the -1/2 coupling sign the +rabi/2 eigenvector carries the negative
    intermediate-state component.
    """
    sqrt_n = math.sqrt(n_atoms)
    op = sqrt_n * omega_p
    rabi = math.hypot(op, omega_c)
    if rabi == 0.0:
        raise ValueError("degenerate eigensystem: both fields are zero")
    psi0 = np.array([omega_c, 0.0, -op], dtype=complex) / rabi
    psi_p = np.array([op, -rabi, omega_c], dtype=complex) / (math.sqrt(2.0) * rabi)
    psi_m = np.array([op, rabi, omega_c], dtype=complex) / (math.sqrt(2.0) * rabi)
    return psi0, psi_p, psi_m, 0.0, 0.5 * rabi


def dark_state_fidelity(rho: np.ndarray, omega_p, omega_c, n_atoms: int) -> float:
    """<Psi0|rho|Psi0> with the matter-only convention (theta = pi/2) when both
    fields vanish."""
    sqrt_n = math.sqrt(n_atoms)
    theta = np.arctan2(sqrt_n * abs(omega_p), abs(omega_c)) if (omega_p or omega_c) else 0.5 * math.pi
    psi = np.array([math.cos(theta), 0.0, -math.sin(theta)])
    return float(np.real(psi @ rho @ psi))


def build_h_raman(t, omega_p_coll, omega_c, cd_drive, detuning: float,
                  compensation: bool = True, z_phase: complex = 1.0) -> np.ndarray:
    """Physical Hamiltonian with the CD drive realised by far-detuned Raman fields.

    The auxiliary pair is superposed on the resonant pulses with the rapidly
    oscillating factors exp(+/- i*Delta*t); no averaging is performed. When
    ``compensation`` is set, the diagonal entries (+|cd|/2, -|cd|, +|cd|/2)
    are added on (G, E, R); these cancel the light shifts induced by the
    auxiliary pair (verified against brute-force integration).

    ``omega_p_coll`` is the already collectively enhanced probe sqrt(N)*Op;
    ``z_phase`` carries the spatial mismatch factor exp(i*delta_k*z) for grid
    runs and defaults to 1 for a single emitter.
    """
    rf = raman_map(cd_drive, detuning)
    osc = np.exp(1j * detuning * t)
    tot_p = omega_p_coll + rf.aux_probe * z_phase * osc
    tot_c = omega_c + rf.aux_control / osc
    h = np.zeros((3, 3), dtype=complex)
    h[E, G] = -0.5 * tot_p
    h[G, E] = np.conj(h[E, G])
    h[R, E] = -0.5 * tot_c
    h[E, R] = np.conj(h[R, E])
    if compensation:
        sg, sr, se = stark_terms(cd_drive)
        h[G, G] += sg
        h[E, E] += se
        h[R, R] += sr
    return h



def lindblad_rhs(rho: np.ndarray, h: np.ndarray, channels) -> np.ndarray:
    """d(rho)/dt = -i[H, rho] + sum_k rate_k D[|t_k><s_k|] rho.

    Works on a single (d, d) matrix or a batch (..., d, d); channels is an
    iterable of (target_index, source_index, rate).
    """
    d = -1j * (h @ rho - rho @ h)
    for tgt, src, rate in channels:
        if rate == 0.0:
            continue
        d[..., tgt, tgt] += rate * rho[..., src, src]
        d[..., src, :] -= 0.5 * rate * rho[..., src, :]
        d[..., :, src] -= 0.5 * rate * rho[..., :, src]
    return d


@dataclass
class Trajectory:
    """Recorded population dynamics of one run."""

    t: np.ndarray
    populations: np.ndarray          # (n, d)
    fidelity_dark: np.ndarray | None
    final_rho: np.ndarray
    basis: tuple
    max_trace_dev: float = 0.0
    max_herm_dev: float = 0.0
    min_eigenvalue: float = 0.0

    @property
    def final_populations(self) -> np.ndarray:
        return self.populations[-1]


def _check_invariants(rho, step, max_trace, max_herm, min_eig,
                      trace_tol, herm_tol):
    tr_dev = abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag)
    herm_dev = float(np.max(np.abs(rho - rho.conj().swapaxes(-1, -2))))
    if tr_dev > trace_tol or herm_dev > herm_tol:
        raise InvariantBreachError(
            f"density-matrix invariant breached at step {step}: "
            f"|tr-1|={tr_dev:.3e}, herm={herm_dev:.3e}")
    eig = float(np.min(np.linalg.eigvalsh(rho)))
    return max(max_trace, tr_dev), max(max_herm, herm_dev), min(min_eig, eig)


def evolve_master(rho0: np.ndarray, hamiltonian, channel_rates, t_end: float,
                  dt: float, fidelity_fn=None, record_every: int = 1,
                  basis: tuple = BASIS3, check_every: int = 200,
                  trace_tol: float = 1e-7, herm_tol: float = 1e-8) -> Trajectory:
    """Fixed-step RK4 integration of the Lindblad equation.

    ``hamiltonian(t) -> (d, d) array``; ``channel_rates`` is a sequence of
    (target, source, rate) tuples; ``fidelity_fn(rho, t) -> float`` is recorded
    alongside the populations when given. Aborts with InvariantBreachError if
    trace or hermiticity leave tolerance.
    """
    rho = np.array(rho0, dtype=complex)
    n_steps = int(round(t_end / dt))
    n_rec = n_steps // record_every + 1
    dim = rho.shape[-1]
    t_rec = np.empty(n_rec)
    pops = np.empty((n_rec, dim))
    fid = np.empty(n_rec) if fidelity_fn is not None else None

    def record(idx, t):
        t_rec[idx] = t
        pops[idx] = np.real(np.diagonal(rho))
        if fid is not None:
            fid[idx] = fidelity_fn(rho, t)

    record(0, 0.0)
    max_trace = max_herm = 0.0
    min_eig = float(np.min(np.linalg.eigvalsh(rho)))
    idx = 1
    for n in range(n_steps):
        t = n * dt
        h1 = hamiltonian(t)
        h2 = hamiltonian(t + 0.5 * dt)
        h3 = hamiltonian(t + dt)
        k1 = lindblad_rhs(rho, h1, channel_rates)
        k2 = lindblad_rhs(rho + (0.5 * dt) * k1, h2, channel_rates)
        k3 = lindblad_rhs(rho + (0.5 * dt) * k2, h2, channel_rates)
        k4 = lindblad_rhs(rho + dt * k3, h3, channel_rates)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (n + 1) % check_every == 0 or n == n_steps - 1:
            max_trace, max_herm, min_eig = _check_invariants(
                rho, n + 1, max_trace, max_herm, min_eig, trace_tol, herm_tol)
        if (n + 1) % record_every == 0 and idx < n_rec:
            record(idx, t + dt)
            idx += 1
    return Trajectory(t=t_rec[:idx], populations=pops[:idx],
                      fidelity_dark=fid[:idx] if fid is not None else None,
                      final_rho=rho, basis=basis,
                      max_trace_dev=max_trace, max_herm_dev=max_herm,
                      min_eigenvalue=min_eig)


def evolve_master3(rho0, hamiltonian, gamma_e, gamma_r, t_end, dt,
                   fidelity_fn=None, **kw) -> Trajectory:
    channels = ((G, E, gamma_e), (G, R, gamma_r))
    return evolve_master(rho0, hamiltonian, channels, t_end, dt,
                         fidelity_fn=fidelity_fn, basis=BASIS3, **kw)


def ground_state(dim: int = 3) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[G, G] = 1.0
    return rho


def run_population_dynamics(config: ScenarioConfig, cd_perturbation=None,
                            record_every: int | None = None) -> Trajectory:
    """Population dynamics of a single collective emitter under the configured
    pulses; ``cd_perturbation(value, t)`` optionally distorts the CD drive."""
    if not config.validated:
        raise ValueError("config must be validated first")
    pulses = build_pulse_set(config)
    n = config.atom_number
    sqrt_n = math.sqrt(n)

    def drive(t):
        value = pulses.cd_drive_at(t)
        if cd_perturbation is not None:
            value = cd_perturbation(value, t)
        return value

    if config.raman_enabled:
        def hamiltonian(t):
            return build_h_raman(t, sqrt_n * pulses.probe_at(t), pulses.control_at(t),
                                 drive(t), config.raman_detuning,
                                 compensation=config.stark_compensation)
        dt = config.dt_fast
        if record_every is None:
            record_every = max(1, int(round(config.dt / dt)))
    else:
        def hamiltonian(t):
            h = build_h_eff(pulses.probe_at(t), pulses.control_at(t), n)
            if config.cd_enabled:
                h = h + build_h_cd(drive(t))
            return h
        dt = config.dt
        if record_every is None:
            record_every = 1

    def fidelity(rho, t):
        return dark_state_fidelity(rho, pulses.probe_at(t), pulses.control_at(t), n)

    return evolve_master3(ground_state(), hamiltonian, config.gamma_e,
                          config.gamma_r, config.t_end, dt,
                          fidelity_fn=fidelity, record_every=record_every)
