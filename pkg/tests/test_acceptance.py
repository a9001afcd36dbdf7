"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s or check the captured
output). Expensive storage runs are shared through module-scoped fixtures.
"""

import math

import numpy as np
import pytest

from rydstore.collective import (
    G,
    R,
    build_h_cd,
    build_h_eff,
    dark_bright_states,
    dark_state_fidelity,
    evolve_master3,
    run_population_dynamics,
)
from rydstore.config import ScenarioConfig, validate
from rydstore.constants import effective_wavevectors, mhz_to_rad_ns
from rydstore.multiexc import RE, run_population6
from rydstore.noise import NoiseSpec, run_ensemble
from rydstore.presets import PRESETS, fig7_variants, get_preset
from rydstore.propagation import PropagationParams, obe_rhs, run_storage_retrieval
from rydstore.pulses import build_pulse_set
from rydstore.runner import sweep


def report(criterion: int, description: str, ok: bool, detail: str):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {criterion:2d} [{status}] {description}: {detail}")
    assert ok, f"criterion {criterion} failed: {detail}"


@pytest.fixture(scope="module")
def fig3b_result():
    return run_storage_retrieval(get_preset("fig3b").config)


@pytest.fixture(scope="module")
def fig3c_result():
    return run_storage_retrieval(get_preset("fig3c").config)


def test_criterion_01_adiabatic_baseline():
    traj = run_population_dynamics(get_preset("fig2b").config)
    p_r = traj.final_populations[R]
    report(1, "fig2b final P_R > 0.985", p_r > 0.985, f"P_R = {p_r:.4f}")


def test_criterion_02_adiabaticity_breakdown():
    traj = run_population_dynamics(get_preset("fig2d").config)
    p_r = traj.final_populations[R]
    report(2, "fig2d final P_R = 0.50 +/- 0.10", abs(p_r - 0.50) <= 0.10,
           f"P_R = {p_r:.4f}")


def test_criterion_03_cd_restoration():
    traj = run_population_dynamics(get_preset("fig2f").config)
    p_r = traj.final_populations[R]
    f_min = traj.fidelity_dark.min()
    ok = p_r >= 0.98 and f_min >= 0.98
    report(3, "fig2f final P_R >= 0.98 and min dark fidelity >= 0.98", ok,
           f"P_R = {p_r:.4f}, min F = {f_min:.4f}")


def test_criterion_04_transitionless_property():
    rng = np.random.default_rng(2024)
    worst = 1.0
    for _ in range(20):
        T = 250.0
        n = 500
        peak_p = mhz_to_rad_ns(rng.uniform(0.1, 0.5))
        peak_c = mhz_to_rad_ns(rng.uniform(3.0, 10.0))
        cfg = validate(ScenarioConfig(
            kind="population",
            peak_probe_rabi=peak_p, peak_control_rabi=peak_c,
            probe_center=rng.uniform(0.55, 0.75) * T,
            probe_sigma=rng.uniform(0.15, 0.30) * T,
            control_kind="gaussian",
            control_center=rng.uniform(0.30, 0.50) * T,
            control_sigma=rng.uniform(0.15, 0.30) * T,
            cd_enabled=True, gamma_e=0.0, gamma_r=0.0,
            atom_number=n, t_end=1.2 * T))
        pulses = build_pulse_set(cfg)
        psi0, _, _, _, _ = dark_bright_states(pulses.probe_at(0.0),
                                              pulses.control_at(0.0), n)
        rho0 = np.outer(psi0, psi0.conj())

        def hamiltonian(t, pulses=pulses):
            return build_h_eff(pulses.probe_at(t), pulses.control_at(t), n) \
                + build_h_cd(pulses.cd_drive_at(t))

        def fidelity(rho, t, pulses=pulses):
            return dark_state_fidelity(rho, pulses.probe_at(t), pulses.control_at(t), n)

        traj = evolve_master3(rho0, hamiltonian, 0.0, 0.0, cfg.t_end, cfg.dt,
                              fidelity_fn=fidelity)
        worst = min(worst, traj.fidelity_dark.min())
    report(4, "lossless transitionless following, 20 random pulse pairs",
           worst >= 0.999, f"worst min-F = {worst:.6f}")


def test_criterion_05_wavevector_arithmetic(fig3c_result):
    _, _, dk = effective_wavevectors(780.2415, 479.8389, 780.1139, 479.8871)
    ok_dk = abs(dk - 2633.0) / 2633.0 < 0.01
    cfg0 = validate(get_preset("fig3c").config.replace(
        lambda_p_cd=780.2415, lambda_c_cd=479.8389))
    assert cfg0.delta_k == 0.0
    res0 = run_storage_retrieval(cfg0)
    rel = abs(fig3c_result.efficiency - res0.efficiency) / fig3c_result.efficiency
    ok = ok_dk and rel < 0.01
    report(5, "delta_k = 2633 rad/m +/- 1% and < 1% efficiency effect", ok,
           f"delta_k = {dk:.1f} rad/m, efficiency shift = {rel:.2e}")


def test_criterion_06_storage_orderings(fig3b_result, fig3c_result):
    cfg = get_preset("fig4a").config
    ts_values = (800.0, 1500.0, 3000.0)
    etas_ts = [res.efficiency for _, res in
               sweep(cfg, "protocol.storage_time_ns", ts_values)]
    cfg_b = get_preset("fig4b").config
    alphas = (3.0, 5.0, 7.0)
    etas_alpha = [res.efficiency for _, res in
                  sweep(cfg_b, "medium.optical_depth", alphas)]
    ok_ts = etas_ts[0] > etas_ts[1] > etas_ts[2]
    ok_alpha = etas_alpha[0] < etas_alpha[1] < etas_alpha[2]
    ok_cd = fig3c_result.efficiency > fig3b_result.efficiency
    ok = ok_ts and ok_alpha and ok_cd
    report(6, "eta orderings: t_s decreasing, alpha increasing, CD > no-CD", ok,
           f"eta(t_s) = {[f'{v:.4f}' for v in etas_ts]}, "
           f"eta(alpha) = {[f'{v:.4f}' for v in etas_alpha]}, "
           f"eta_c = {fig3c_result.efficiency:.4f} vs eta_b = {fig3b_result.efficiency:.4f}")


def test_criterion_07_dephasing_oracle():
    cfg = validate(get_preset("fig3c").config)
    params = PropagationParams(kappa=cfg.field_coupling, delta_k=cfg.delta_k,
                               kv_rate=cfg.kv_rate, t_ref=0.0, gamma_e=0.0,
                               gamma_r=0.0, n_atoms=cfg.atom_number)
    rho = np.zeros((3, 3), complex)
    rho[G, G] = rho[R, R] = 0.5
    rho[R, G] = rho[G, R] = 0.25
    dt = 0.5
    worst = 0.0
    for k in range(int(3000.0 / dt)):
        t = k * dt
        k1 = obe_rhs(rho, 0.0, 0.0, 0.0, 0.0, t, params)
        k2 = obe_rhs(rho + 0.5 * dt * k1, 0.0, 0.0, 0.0, 0.0, t + 0.5 * dt, params)
        k3 = obe_rhs(rho + 0.5 * dt * k2, 0.0, 0.0, 0.0, 0.0, t + 0.5 * dt, params)
        k4 = obe_rhs(rho + dt * k3, 0.0, 0.0, 0.0, 0.0, t + dt, params)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_s = t + dt
        if t_s % 250.0 == 0.0:
            expected = 0.25 * math.exp(-0.5 * (params.kv_rate * t_s) ** 2)
            worst = max(worst, abs(abs(rho[R, G]) - expected) / expected)
    report(7, "stored-coherence decay matches exp[-(k v t)^2/2] to 1% (t <= 3 us)",
           worst < 0.01, f"worst relative deviation = {worst:.2e}")


def test_criterion_08_noise_robustness():
    means = {}
    for name in ("fig6a", "fig6c"):
        cfg = get_preset(name).config
        ens = run_ensemble(cfg, NoiseSpec.from_config(cfg))
        means[name] = ens.mean_final_populations[R]
    ok = all(abs(m - 0.99) <= 0.01 for m in means.values())
    report(8, "fig6a/fig6c ensemble mean final P_R = 0.99 +/- 0.01", ok,
           f"amplitude noise: {means['fig6a']:.4f}, phase noise: {means['fig6c']:.4f}")


def test_criterion_09_imperfect_blockade():
    pop_nocd, pop_cd, _, _ = fig7_variants()
    t_nocd = run_population6(pop_nocd)
    t_cd = run_population6(pop_cd)
    p_nocd = t_nocd.final_populations[R] + t_nocd.final_populations[RE]
    p_cd = t_cd.final_populations[R] + t_cd.final_populations[RE]
    ok = (abs(p_nocd - 0.904) <= 0.03 and abs(p_cd - 0.946) <= 0.03
          and p_cd > p_nocd)
    report(9, "fig7 (P_R + P_RE): 0.904 +/- 0.03 without CD, 0.946 +/- 0.03 with CD",
           ok, f"no-CD = {p_nocd:.4f}, CD = {p_cd:.4f}")


def test_criterion_10_raman_equivalence():
    cfg8 = get_preset("fig8").config
    trajectories = {}
    for tag, kw in (("ideal", dict(raman_enabled=False)),
                    ("comp", dict(raman_enabled=True, stark_compensation=True)),
                    ("nocomp", dict(raman_enabled=True, stark_compensation=False))):
        trajectories[tag] = run_population_dynamics(validate(cfg8.replace(**kw)))
    n = min(len(trajectories[tag].populations) for tag in trajectories)
    dev_comp = np.abs(trajectories["comp"].populations[:n]
                      - trajectories["ideal"].populations[:n]).max()
    dev_final = np.abs(trajectories["nocomp"].final_populations
                       - trajectories["ideal"].final_populations).max()
    storage_base = PRESETS["fig3c"].config.replace(
        raman_detuning=cfg8.raman_detuning, dt_fast=cfg8.dt_fast)
    outs = {}
    for tag, kw in (("ideal", dict(raman_enabled=False)),
                    ("comp", dict(raman_enabled=True, stark_compensation=True)),
                    ("nocomp", dict(raman_enabled=True, stark_compensation=False))):
        res = run_storage_retrieval(validate(storage_base.replace(**kw)))
        outs[tag] = res.omega_out
    m = min(len(v) for v in outs.values())
    l2 = {}
    for a, b in (("ideal", "comp"), ("ideal", "nocomp"), ("comp", "nocomp")):
        l2[f"{a}/{b}"] = (np.linalg.norm(outs[a][:m] - outs[b][:m])
                          / np.linalg.norm(outs[a][:m]))
    ok = dev_comp <= 0.02 and dev_final <= 0.05 and all(v <= 0.05 for v in l2.values())
    report(10, "Raman realization: traces within 0.02 (comp) / 0.05 (final, no comp); "
               "output pulses within 5% L2", ok,
           f"pointwise comp dev = {dev_comp:.4f}, no-comp final dev = {dev_final:.4f}, "
           f"L2 = {({k: f'{v:.4f}' for k, v in l2.items()})}")


def test_criterion_11_structural_invariants(fig3b_result):
    # trace / hermiticity budgets on a representative population run
    cfg2f = get_preset("fig2f").config
    traj = run_population_dynamics(cfg2f)
    steps = cfg2f.t_end / cfg2f.dt
    ok_trace = traj.max_trace_dev < 1e-9 * max(1.0, steps / 1000.0)
    ok_herm = traj.max_herm_dev < 1e-10
    # per-cell budgets on the storage run
    cfg_b = get_preset("fig3b").config
    grid_steps = (cfg_b.write_time + cfg_b.storage_time + cfg_b.readout_window) / cfg_b.dt
    ok_grid = (fig3b_result.max_trace_dev < 1e-9 * max(1.0, grid_steps / 1000.0)
               and fig3b_result.max_herm_dev < 1e-10)

    # epsilon = 0 six-level <-> three-level equivalence
    from rydstore.multiexc import run_storage6
    small = validate(cfg_b.replace(n_z=30, dt=0.2, storage_time=200.0,
                                   readout_window=300.0))
    res3 = run_storage_retrieval(small)
    res6 = run_storage6(validate(small.replace(kind="storage6", epsilon=0.0)))
    eq_dev = (np.max(np.abs(res3.omega_out - res6.omega_out))
              / np.max(np.abs(res3.omega_out)))
    ok_eq = eq_dev < 1e-6

    # dt- and n_z-halving convergence on the field output
    res_dt = run_storage_retrieval(validate(cfg_b.replace(dt=cfg_b.dt / 2)))
    rel_dt = (np.linalg.norm(fig3b_result.omega_out - res_dt.omega_out)
              / np.linalg.norm(fig3b_result.omega_out))
    res_nz = run_storage_retrieval(validate(cfg_b.replace(n_z=cfg_b.n_z // 2)))
    rel_nz = (np.linalg.norm(fig3b_result.omega_out - res_nz.omega_out)
              / np.linalg.norm(fig3b_result.omega_out))
    ok_conv = rel_dt < 1e-4 and rel_nz < 1e-4

    ok = ok_trace and ok_herm and ok_grid and ok_eq and ok_conv
    report(11, "structural invariants (trace/herm budgets, eps=0 equivalence, "
               "dt/n_z halving < 1e-4)", ok,
           f"trace = {traj.max_trace_dev:.1e}, herm = {traj.max_herm_dev:.1e}, "
           f"grid trace = {fig3b_result.max_trace_dev:.1e}, eq = {eq_dev:.1e}, "
           f"dt-halving = {rel_dt:.1e}, nz-halving = {rel_nz:.1e}")
