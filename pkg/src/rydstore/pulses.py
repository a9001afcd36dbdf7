"""Time-dependent field envelopes and the counterdiabatic drive.

Envelopes are real, non-negative and continuous, with closed-form time
derivatives per shape so the counterdiabatic (CD) drive is noise-free. The CD
drive amplitude handed to the Hamiltonian builders is ``2 * d(theta)/dt``:
with the ground-Rydberg coupling written as ``i*amp/2 (|G><R| - |R><G|)``,
transitionless following of the dark state requires the off-diagonal element
to equal ``i * d(theta)/dt`` exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .config import ScenarioConfig

log = logging.getLogger(__name__)

# coupling i*amp/2 must equal i*theta_dot for transitionless following
TRANSITIONLESS_GAIN = 2.0

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class PulseShape:
    """One envelope: gaussian, smoothed_rect (erf step pair) or zero.

    gaussian:      peak * exp(-(t-center)^2 / (2 sigma^2))
    smoothed_rect: (peak/2) * [erf((t-t_on)/(sqrt2 rise)) - erf((t-t_off)/(sqrt2 rise))]
    """

    kind: str
    peak: float = 0.0
    center: float = 0.0
    sigma: float = 1.0
    t_on: float = 0.0
    t_off: float = 0.0
    rise: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "smoothed_rect", "smoothed_square", "zero"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.peak < 0:
            raise ValueError("peak must be >= 0")


def eval_envelope(shape: PulseShape, t):
    """Envelope value at time t (scalar or array), rad/ns."""
    if shape.kind == "zero":
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    if shape.kind == "gaussian":
        return shape.peak * np.exp(-((t - shape.center) ** 2) / (2.0 * shape.sigma ** 2))
    x_on = (t - shape.t_on) / (_SQRT2 * shape.rise)
    x_off = (t - shape.t_off) / (_SQRT2 * shape.rise)
    return 0.5 * shape.peak * (erf(x_on) - erf(x_off))


def eval_derivative(shape: PulseShape, t):
    """Closed-form d/dt of the envelope."""
    if shape.kind == "zero":
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    if shape.kind == "gaussian":
        return eval_envelope(shape, t) * (-(t - shape.center) / shape.sigma ** 2)
    c = shape.peak / (_SQRT2PI * shape.rise)
    return c * (np.exp(-((t - shape.t_on) ** 2) / (2.0 * shape.rise ** 2))
                - np.exp(-((t - shape.t_off) ** 2) / (2.0 * shape.rise ** 2)))


def mixing_angle(omega_p, omega_c, n_atoms: int):
    """theta = atan2(sqrt(N)*Omega_p, Omega_c) in [0, pi/2] for non-negative fields."""
    if np.ndim(omega_p) == 0 and omega_p == 0.0 and omega_c == 0.0:
        raise ValueError("undefined mixing angle: both fields are zero")
    return np.arctan2(math.sqrt(n_atoms) * omega_p, omega_c)


@dataclass(frozen=True)
class PulseSet:
    """All drive envelopes of one scenario.

    ``control_write`` is the write-stage control pulse; the optional
    ``readout`` step reactivates the control field for retrieval. The CD drive
    is always computed from the *write-stage* envelopes and, when a gate time
    is set, smoothly switched off at the end of the write stage so the drive
    cannot keep rotating the stored spin wave.
    """

    probe: PulseShape
    control_write: PulseShape
    readout: PulseShape | None = None
    cd_enabled: bool = False
    cd_gate_time: float = 0.0
    cd_gate_rise: float = 5.0
    n_atoms: int = 500

    def probe_at(self, t):
        return eval_envelope(self.probe, t)

    def probe_rate_at(self, t):
        return eval_derivative(self.probe, t)

    def control_at(self, t):
        value = eval_envelope(self.control_write, t)
        if self.readout is not None:
            value = value + eval_envelope(self.readout, t)
        return value

    def cd_rate_at(self, t):
        return cd_rabi(self.probe, self.control_write, self.n_atoms, t)

    def cd_drive_at(self, t):
        """Complex-capable CD drive amplitude (rad/ns); 0 when cd is disabled."""
        if not self.cd_enabled:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        drive = TRANSITIONLESS_GAIN * self.cd_rate_at(t)
        if self.cd_gate_time > 0:
            gate = 0.5 * (1.0 - erf((t - self.cd_gate_time) / (_SQRT2 * self.cd_gate_rise)))
            drive = drive * gate
        return drive


def build_pulse_set(config: ScenarioConfig) -> PulseSet:
    """Assemble the PulseSet described by a validated configuration."""
    if config.probe_kind == "gaussian":
        probe = PulseShape("gaussian", peak=config.peak_probe_rabi,
                           center=config.probe_center, sigma=config.probe_sigma)
    elif config.probe_kind == "zero":
        probe = PulseShape("zero")
    else:
        raise ValueError(f"unsupported probe kind {config.probe_kind!r}")
    if config.control_kind == "gaussian":
        control = PulseShape("gaussian", peak=config.peak_control_rabi,
                             center=config.control_center, sigma=config.control_sigma)
    elif config.control_kind == "zero":
        control = PulseShape("zero")
    else:
        control = PulseShape("smoothed_rect", peak=config.peak_control_rabi,
                             t_on=config.control_on, t_off=config.control_off,
                             rise=config.control_rise)
    readout = None
    if config.readout_enabled:
        t_on = config.write_time + config.storage_time
        readout = PulseShape("smoothed_rect", peak=config.peak_control_rabi,
                             t_on=t_on, t_off=t_on + 1e7, rise=config.readout_rise)
    return PulseSet(probe=probe, control_write=control, readout=readout,
                    cd_enabled=config.cd_enabled,
                    cd_gate_time=config.cd_gate_time,
                    cd_gate_rise=config.cd_gate_rise,
                    n_atoms=config.atom_number)


def cd_rabi(probe: PulseShape, control: PulseShape, n_atoms: int, t):
    """Mixing-angle rate d(theta)/dt from the analytic envelope derivatives.

    Returns ``[Omega_c sqrt(N) dOmega_p/dt - sqrt(N) Omega_p dOmega_c/dt] /
    [N Omega_p^2 + Omega_c^2]``. Where both envelopes vanish the dark state is
    degenerate and no rotation is needed; 0 is returned and the event logged.
    """
    sqrt_n = math.sqrt(n_atoms)
    op = eval_envelope(probe, t)
    oc = eval_envelope(control, t)
    dop = eval_derivative(probe, t)
    doc = eval_derivative(control, t)
    den = n_atoms * np.square(op) + np.square(oc)
    num = oc * sqrt_n * dop - sqrt_n * op * doc
    if np.ndim(den) == 0:
        if den == 0.0:
            log.debug("cd_rabi: both envelopes zero at t=%s; returning 0", t)
            return 0.0
        return num / den
    zero = den == 0.0
    if np.any(zero):
        log.debug("cd_rabi: both envelopes zero at %d sample(s); returning 0", zero.sum())
    return np.where(zero, 0.0, num / np.where(zero, 1.0, den))


@dataclass(frozen=True)
class RamanFields:
    """Auxiliary far-detuned field pair realising the CD drive at one instant."""

    aux_probe: float
    aux_control: complex
    stark_g: float
    stark_r: float
    stark_e: float


def raman_map(omega_cd, detuning: float) -> RamanFields:
    """Map a CD drive value onto the two-photon Raman pair.

    |Omega'_p| = |Omega'_c| = sqrt(2*Delta*|Omega_cd|); the pair's two-photon
    coupling Omega'_p Omega'_c^* / (4 Delta) reproduces -i Omega_cd / 2.
    """
    if detuning <= 0:
        raise ValueError(f"raman detuning must be > 0, got {detuning}")
    mag = abs(omega_cd)
    amp = math.sqrt(2.0 * detuning * mag)
    if mag == 0.0:
        return RamanFields(0.0, 0.0j, 0.0, 0.0, 0.0)
    phase = omega_cd / mag
    sg, sr, se = stark_terms(omega_cd)
    return RamanFields(aux_probe=amp, aux_control=1j * phase * amp,
                       stark_g=sg, stark_r=sr, stark_e=se)


def stark_terms(omega_cd) -> tuple[float, float, float]:
    """Light-shift magnitudes (delta_G, delta_R, delta_E) of the Raman pair:
    (|Omega_cd|/2, |Omega_cd|/2, -|Omega_cd|)."""
    mag = np.abs(omega_cd)
    return 0.5 * mag, 0.5 * mag, -mag


def pulse_table(pulses: PulseSet, t_grid: np.ndarray) -> np.ndarray:
    """Columns (t_ns, omega_p, omega_c, omega_cd) for export/plotting."""
    op = pulses.probe_at(t_grid)
    oc = pulses.control_at(t_grid)
    ocd = pulses.cd_drive_at(t_grid)
    return np.column_stack([t_grid, op, oc, np.real(ocd)])
