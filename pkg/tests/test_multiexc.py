import math

import numpy as np
import pytest

from rydstore.collective import E, R, build_h_cd, build_h_eff, lindblad_rhs
from rydstore.config import validate
from rydstore.constants import mhz_to_rad_ns
from rydstore.multiexc import (
    EE,
    RE,
    RR,
    build_h_t,
    channels6,
    run_population6,
    run_storage6,
)
from rydstore.presets import fig7_variants, get_preset
from rydstore.propagation import run_storage_retrieval

OMP = mhz_to_rad_ns(0.28)
OMC = mhz_to_rad_ns(7.0)
URR = mhz_to_rad_ns(5.0)


class TestBuildHT:
    def test_epsilon_zero_block_structure(self):
        h = build_h_t(OMP, OMC, 0.013, 500, 0.0, URR)
        expected = build_h_eff(OMP, OMC, 500) + build_h_cd(0.013)
        assert np.allclose(h[:3, :3], expected, atol=1e-18)
        assert np.all(h[:3, 3:] == 0.0)
        assert np.all(h[3:, :3] == 0.0)

    def test_quoted_matrix_element(self):
        # (EE, E) entry: -0.5 * eps * sqrt(2(N-1)) * Omega_p for real Omega_p
        eps, n = 0.3, 500
        h = build_h_t(OMP, OMC, 0.0, n, eps, URR)
        expected = -0.5 * eps * math.sqrt(2 * (n - 1)) * OMP
        assert h[EE, E] == pytest.approx(expected, rel=1e-14)
        assert h[RE, R] == pytest.approx(-0.5 * eps * math.sqrt(n - 1) * OMP, rel=1e-14)

    def test_blockade_shift_on_doubly_excited_state(self):
        h = build_h_t(OMP, OMC, 0.0, 500, 0.3, URR)
        assert h[RR, RR] == pytest.approx(URR, rel=1e-14)

    def test_hermitian(self):
        h = build_h_t(OMP, OMC, 0.011, 500, 0.3, URR)
        assert np.all(np.abs(h - h.conj().T) < 1e-16)

    def test_small_ensemble_rejected(self):
        with pytest.raises(ValueError, match="atom_number"):
            build_h_t(OMP, OMC, 0.0, 1, 0.3, URR)


class TestLindblad6:
    def test_double_excitation_decay_bookkeeping(self):
        gamma = mhz_to_rad_ns(6.0)
        rho = np.zeros((6, 6), complex)
        rho[EE, EE] = 1.0
        d = lindblad_rhs(rho, np.zeros((6, 6), complex), channels6(gamma, 0.0))
        assert d[EE, EE] == pytest.approx(-2 * gamma, rel=1e-14)
        assert d[E, E] == pytest.approx(2 * gamma, rel=1e-14)

    def test_traceless_random(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            rho = a @ a.conj().T
            rho /= np.trace(rho)
            h = build_h_t(rng.uniform(0, 2e-3), rng.uniform(0, 0.05),
                          rng.uniform(-0.02, 0.02), 500, rng.uniform(0, 1), URR)
            d = lindblad_rhs(rho, h, channels6(0.04, 1e-4))
            assert abs(np.trace(d)) < 1e-15

    def test_purity_conserved_without_decay(self):
        # unitary limit: d tr(rho^2)/dt = 2 tr(rho drho) = 0
        rng = np.random.default_rng(24)
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        h = build_h_t(OMP, OMC, 0.01, 500, 0.3, URR)
        d = lindblad_rhs(rho, h, channels6(0.0, 0.0))
        assert abs(np.trace(rho @ d)) < 1e-15


class TestPopulation6:
    def test_perfect_blockade_limit(self):
        # U_rr/2pi = 500 MHz: double-Rydberg population stays below 1e-4
        cfg = fig7_variants()[1].replace(u_rr=mhz_to_rad_ns(500.0))
        traj = run_population6(validate(cfg))
        assert traj.populations[:, RR].max() < 1e-4

    def test_rr_leakage_monotone_in_blockade(self):
        finals = []
        for u_mhz in (5.0, 20.0, 100.0):
            cfg = validate(fig7_variants()[1].replace(u_rr=mhz_to_rad_ns(u_mhz)))
            traj = run_population6(cfg)
            finals.append(traj.populations[:, RR].max())
        assert finals[0] > finals[1] > finals[2]

    def test_fig7_values(self):
        pop_nocd, pop_cd, _, _ = fig7_variants()
        t_nocd = run_population6(pop_nocd)
        t_cd = run_population6(pop_cd)
        p_nocd = t_nocd.final_populations[R] + t_nocd.final_populations[RE]
        p_cd = t_cd.final_populations[R] + t_cd.final_populations[RE]
        assert p_nocd == pytest.approx(0.904, abs=0.03)
        assert p_cd == pytest.approx(0.946, abs=0.03)
        assert p_cd > p_nocd


class TestEquivalence:
    def test_epsilon_zero_matches_three_level_storage(self):
        base = get_preset("fig3b").config.replace(n_z=30, dt=0.2, storage_time=200.0,
                                                  readout_window=300.0)
        cfg3 = validate(base)
        cfg6 = validate(base.replace(kind="storage6", epsilon=0.0))
        res3 = run_storage_retrieval(cfg3)
        res6 = run_storage6(cfg6)
        scale = np.max(np.abs(res3.omega_out))
        assert np.max(np.abs(res3.omega_out - res6.omega_out)) < 1e-6 * scale
        assert np.max(np.abs(res3.pop_avg - res6.pop_avg[:, :3])) < 1e-9
        assert res6.efficiency == pytest.approx(res3.efficiency, rel=1e-6)

    def test_storage6_extended_snapshot_columns(self):
        _, _, _, st_cd = fig7_variants()
        cfg = validate(st_cd.replace(n_z=30, dt=0.2, storage_time=200.0,
                                     readout_window=200.0))
        res = run_storage6(cfg)
        cols = res.snapshots["write"]
        assert {"P_EE", "P_RE", "P_RR"} <= set(cols)
