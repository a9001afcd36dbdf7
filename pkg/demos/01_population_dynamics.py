"""Counterdiabatic rescue of fast population transfer.

Three runs of the single-superatom engine tell the core story:

* a 500 ns write follows the dark state adiabatically and parks >99% of the
  population in the collective Rydberg state;
* compressing the same pulse sequence to 250 ns breaks adiabatic following
  and the transfer collapses to ~50%;
* adding the counterdiabatic drive to the 250 ns Gaussian pair restores the
  transfer to ~99% while the dark-state fidelity stays pinned near 1.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rydstore import get_preset, run_population_dynamics
from rydstore.pulses import build_pulse_set, pulse_table

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(2, 3, figsize=(13, 6), sharex="col")
for col, (name, title) in enumerate((("fig2b", "500 ns, adiabatic"),
                                     ("fig2d", "250 ns, no CD"),
                                     ("fig2f", "250 ns, CD on"))):
    cfg = get_preset(name).config
    table = pulse_table(build_pulse_set(cfg), np.linspace(0, cfg.t_end, 800))
    ax = axes[0, col]
    ax.plot(table[:, 0], table[:, 1] * 1e3, label=r"$\Omega_p$")
    ax.plot(table[:, 0], table[:, 2] * 1e3, label=r"$\Omega_c$")
    if np.any(table[:, 3]):
        ax.plot(table[:, 0], table[:, 3] * 1e3, label=r"$\Omega_{CD}$")
    ax.set_title(title)
    ax.set_ylabel("drive (mrad/ns)")
    ax.legend(fontsize="small")

    traj = run_population_dynamics(cfg)
    ax = axes[1, col]
    for i, label in enumerate(traj.basis):
        ax.plot(traj.t, traj.populations[:, i], label=f"$P_{label}$")
    ax.plot(traj.t, traj.fidelity_dark, "k--", lw=1, label="dark fidelity")
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("population")
    ax.legend(fontsize="small")
    print(f"{name}: final P_R = {traj.final_populations[2]:.4f}, "
          f"min dark fidelity = {traj.fidelity_dark.min():.4f}")

fig.tight_layout()
fig.savefig(OUT / "population_dynamics.png", dpi=140)
print(f"wrote {OUT / 'population_dynamics.png'}")
