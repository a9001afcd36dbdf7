"""Noise models for the CD drive and seeded ensemble execution.

Amplitude noise multiplies the drive by (1 + eta) with eta drawn once per
realization, uniform on [-bound, +bound]. Phase noise multiplies by
exp(i*dphi(t)) with dphi piecewise-constant over ``correlation_step`` windows,
each value i.i.d. Gaussian N(0, sigma^2). Realization i uses
``default_rng(base_seed + i)`` (numpy PCG64), so an ensemble is bitwise
reproducible from its base seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collective import run_population_dynamics
from .config import ScenarioConfig


@dataclass(frozen=True)
class NoiseSpec:
    amplitude_bound: float = 0.20
    phase_sigma: float = 0.1 * math.pi
    correlation_step: float = 1.0
    n_realizations: int = 30
    base_seed: int = 8
    mode: str = "amplitude"   # amplitude | phase | both

    def __post_init__(self):
        if not 0.0 <= self.amplitude_bound < 1.0:
            raise ValueError(f"amplitude_bound must be in [0, 1), got {self.amplitude_bound}")
        if self.phase_sigma < 0:
            raise ValueError(f"phase_sigma must be >= 0, got {self.phase_sigma}")
        if self.n_realizations < 1:
            raise ValueError(f"n_realizations must be >= 1, got {self.n_realizations}")

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "NoiseSpec":
        return cls(amplitude_bound=config.noise_amplitude_bound,
                   phase_sigma=config.noise_phase_sigma,
                   correlation_step=config.noise_correlation_step,
                   n_realizations=config.noise_realizations,
                   base_seed=config.seed,
                   mode=config.noise_mode)


class CDPerturbation:
    """One noise realization, applied as drive -> factor(t) * drive.

    The plateau value within each correlation window is the declared N(0,
    sigma^2) draw; transitions between windows are smoothed over the first
    40% of the window (a C1 smoothstep) so the integrator never sees a
    discontinuous Hamiltonian.
    """

    RAMP_FRACTION = 0.4

    def __init__(self, spec: NoiseSpec, realization_seed: int, t_end: float):
        rng = np.random.default_rng(realization_seed)
        self.eta = 0.0
        if spec.mode in ("amplitude", "both") and spec.amplitude_bound > 0:
            self.eta = rng.uniform(-spec.amplitude_bound, spec.amplitude_bound)
        self.step = spec.correlation_step
        n_windows = int(math.ceil(t_end / self.step)) + 2
        if spec.mode in ("phase", "both") and spec.phase_sigma > 0:
            self.phases = rng.normal(0.0, spec.phase_sigma, size=n_windows)
        else:
            self.phases = np.zeros(n_windows)
        self.seed = realization_seed

    def _phase_at(self, t):
        x = np.asarray(t, dtype=float) / self.step
        k = np.minimum(x.astype(int), len(self.phases) - 1)
        frac = x - k
        prev = self.phases[np.maximum(k - 1, 0)]
        cur = self.phases[k]
        u = np.clip(frac / self.RAMP_FRACTION, 0.0, 1.0)
        blend = u * u * (3.0 - 2.0 * u)
        return prev + (cur - prev) * blend

    def __call__(self, value, t):
        factor = (1.0 + self.eta) * np.exp(1j * self._phase_at(t))
        return value * (factor if np.ndim(t) else complex(factor))


def perturb_cd(drive_values: np.ndarray, t_grid: np.ndarray, spec: NoiseSpec,
               realization_seed: int) -> np.ndarray:
    """Perturbed (complex) copy of a sampled CD drive."""
    pert = CDPerturbation(spec, realization_seed, float(t_grid[-1]))
    return pert(np.asarray(drive_values, dtype=complex), t_grid)


@dataclass
class EnsembleResult:
    """Averaged trajectories plus per-realization records of one noise ensemble.

    ``mean_output`` and ``efficiencies`` are filled for storage ensembles only.
    """

    t: np.ndarray
    mean_populations: np.ndarray
    mean_fidelity: np.ndarray | None
    final_populations: np.ndarray      # (n_real, dim)
    seeds: list
    basis: tuple
    mean_output: np.ndarray | None = None
    efficiencies: np.ndarray | None = None
    trajectories: list = field(default_factory=list, repr=False)

    @property
    def mean_final_populations(self) -> np.ndarray:
        return self.final_populations.mean(axis=0)


def run_ensemble(config: ScenarioConfig, spec: NoiseSpec | None = None,
                 keep_trajectories: bool = False) -> EnsembleResult:
    """Execute ``n_realizations`` independent runs with perturbed CD drives and
    average them; deterministic given the base seed.

    Population scenarios average trajectories and dark-state fidelity; storage
    scenarios additionally average the output field and collect per-realization
    retrieval efficiencies.
    """
    if not config.validated:
        raise ValueError("config must be validated first")
    if spec is None:
        spec = NoiseSpec.from_config(config)
    seeds = [spec.base_seed + i for i in range(spec.n_realizations)]
    storage = config.kind in ("storage", "storage6")
    if storage:
        from . import multiexc, propagation
        runner = (multiexc.run_storage6 if config.kind == "storage6"
                  else propagation.run_storage_retrieval)
        t_end = config.write_time + config.storage_time + config.readout_window
    else:
        runner = run_population_dynamics
        t_end = config.t_end

    pops_sum = fid_sum = out_sum = None
    finals, effs, kept = [], [], []
    t = None
    basis = None
    for seed in seeds:
        pert = CDPerturbation(spec, seed, t_end)
        result = runner(config, cd_perturbation=pert)
        if storage:
            pops, fid, out = result.pop_avg, None, result.omega_out
            finals.append(pops[-1])
            effs.append(result.efficiency)
            rec_t, rec_basis = result.t, result.basis
        else:
            pops, fid, out = result.populations, result.fidelity_dark, None
            finals.append(result.final_populations)
            rec_t, rec_basis = result.t, result.basis
        if pops_sum is None:
            t, basis = rec_t, rec_basis
            pops_sum = np.zeros_like(pops)
            fid_sum = np.zeros_like(fid) if fid is not None else None
            out_sum = np.zeros_like(out) if out is not None else None
        pops_sum += pops
        if fid_sum is not None:
            fid_sum += fid
        if out_sum is not None:
            out_sum += out
        if keep_trajectories:
            kept.append(result)
    n = float(spec.n_realizations)
    return EnsembleResult(
        t=t, mean_populations=pops_sum / n,
        mean_fidelity=fid_sum / n if fid_sum is not None else None,
        final_populations=np.array(finals), seeds=seeds, basis=basis,
        mean_output=out_sum / n if out_sum is not None else None,
        efficiencies=np.array(effs) if storage else None,
        trajectories=kept)
