import math

import numpy as np
import pytest

from rydstore.config import validate
from rydstore.noise import CDPerturbation, NoiseSpec, perturb_cd, run_ensemble
from rydstore.presets import get_preset


def spec(**kw):
    base = dict(amplitude_bound=0.2, phase_sigma=0.1 * math.pi,
                correlation_step=1.0, n_realizations=30, base_seed=8,
                mode="amplitude")
    base.update(kw)
    return NoiseSpec(**base)


class TestPerturbCd:
    def test_zero_noise_identity(self):
        t = np.linspace(0, 300, 601)
        drive = np.sin(t / 40) * 0.01
        out = perturb_cd(drive, t, spec(amplitude_bound=0.0, phase_sigma=0.0, mode="both"), 8)
        assert np.allclose(out, drive, atol=1e-18)

    def test_amplitude_mode_constant_in_time_and_bounded(self):
        t = np.linspace(0, 300, 601)
        drive = np.exp(-((t - 150) / 60) ** 2) * 0.01 + 1e-6
        for seed in range(20):
            out = perturb_cd(drive, t, spec(mode="amplitude"), seed)
            ratio = np.abs(out) / np.abs(drive)
            assert np.allclose(ratio, ratio[0], rtol=1e-12)
            assert 0.8 <= ratio[0] <= 1.2

    def test_phase_mode_statistics(self):
        # sample variance of the piecewise phase over >= 1e4 windows -> sigma^2
        sigma = 0.1 * math.pi
        pert = CDPerturbation(spec(mode="phase", phase_sigma=sigma), 123, t_end=20000.0)
        variance = np.var(pert.phases)
        assert variance == pytest.approx(sigma ** 2, rel=0.05)

    def test_phase_mode_piecewise_constant(self):
        pert = CDPerturbation(spec(mode="phase"), 7, t_end=100.0)
        v1 = pert(1.0, 3.5)
        v2 = pert(1.0, 3.9)
        v3 = pert(1.0, 4.1)
        assert v1 == v2
        assert v1 != v3

    def test_bitwise_reproducibility(self):
        t = np.linspace(0, 300, 601)
        drive = np.cos(t / 25) * 0.02
        a = perturb_cd(drive, t, spec(mode="both"), 99)
        b = perturb_cd(drive, t, spec(mode="both"), 99)
        assert np.array_equal(a, b)

    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(amplitude_bound=1.5)
        with pytest.raises(ValueError):
            NoiseSpec(n_realizations=0)


class TestRunEnsemble:
    def test_single_realization_zero_noise_equals_deterministic(self):
        from rydstore.collective import run_population_dynamics
        cfg = get_preset("fig6a").config
        ens = run_ensemble(cfg, spec(amplitude_bound=0.0, phase_sigma=0.0,
                                     n_realizations=1, mode="both"))
        det = run_population_dynamics(cfg)
        assert np.allclose(ens.mean_populations, det.populations, atol=1e-15)

    def test_mean_recomputable_from_realizations(self):
        cfg = get_preset("fig6a").config
        ens = run_ensemble(cfg, spec(n_realizations=4), keep_trajectories=True)
        stacked = np.stack([t.populations for t in ens.trajectories])
        assert np.allclose(ens.mean_populations, stacked.mean(axis=0), atol=1e-15)
        assert np.allclose(ens.mean_final_populations,
                           ens.final_populations.mean(axis=0), atol=1e-15)

    def test_seeds_are_base_plus_index(self):
        cfg = get_preset("fig6a").config
        ens = run_ensemble(cfg, spec(n_realizations=3, base_seed=100))
        assert ens.seeds == [100, 101, 102]

    def test_ensemble_reproducibility(self):
        cfg = get_preset("fig6a").config
        a = run_ensemble(cfg, spec(n_realizations=3))
        b = run_ensemble(cfg, spec(n_realizations=3))
        assert np.array_equal(a.mean_populations, b.mean_populations)
        assert np.array_equal(a.final_populations, b.final_populations)

    def test_convergence_with_realization_count(self):
        # doubling n changes the mean final P_R by less than the per-realization
        # standard error
        cfg = get_preset("fig6a").config
        small = run_ensemble(cfg, spec(n_realizations=8))
        large = run_ensemble(cfg, spec(n_realizations=16))
        se = np.std(small.final_populations[:, 2], ddof=1) / math.sqrt(8)
        delta = abs(small.mean_final_populations[2] - large.mean_final_populations[2])
        assert delta <= max(se, 1e-6)

    def test_storage_ensemble_averages_output_field(self):
        cfg = validate(get_preset("fig3c").config.replace(
            n_z=30, dt=0.2, storage_time=200.0, readout_window=300.0))
        ens = run_ensemble(cfg, spec(mode="both", n_realizations=2))
        assert ens.mean_output is not None
        assert ens.mean_output.shape == ens.t.shape
        assert ens.efficiencies.shape == (2,)
        assert np.all(np.isfinite(ens.efficiencies))

    def test_each_realization_satisfies_invariants(self):
        cfg = get_preset("fig6c").config
        ens = run_ensemble(cfg, spec(mode="phase", n_realizations=3),
                           keep_trajectories=True)
        for traj in ens.trajectories:
            assert traj.max_trace_dev < 1e-9
            assert traj.max_herm_dev < 1e-10
            assert traj.min_eigenvalue > -1e-8
