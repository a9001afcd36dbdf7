"""Robustness of the CD protocol against drive imperfections.

The CD amplitude is perturbed by a random offset within +/-20% (drawn once
per realization) or by a fluctuating phase (N(0, (0.1 pi)^2), refreshed every
nanosecond). Averaged over 30 seeded realizations the final Rydberg
population barely moves: exact transitionless driving is first-order
insensitive to both error channels.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rydstore import NoiseSpec, get_preset, run_ensemble, run_population_dynamics

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

ideal = run_population_dynamics(get_preset("fig2f").config)

fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, name, title in ((axes[0], "fig6a", "amplitude noise, +/-20%"),
                        (axes[1], "fig6c", "phase noise, sigma = 0.1 pi")):
    cfg = get_preset(name).config
    ens = run_ensemble(cfg, NoiseSpec.from_config(cfg))
    for i, label in enumerate(ens.basis):
        ax.plot(ens.t, ens.mean_populations[:, i], label=f"$P_{label}$ (mean)")
    ax.plot(ideal.t, ideal.populations[:, 2], "k:", lw=1, label="$P_R$ ideal")
    ax.set_title(f"{title}\nmean final $P_R$ = {ens.mean_final_populations[2]:.4f}")
    ax.set_xlabel("t (ns)")
    ax.legend(fontsize="small")
    spread = ens.final_populations[:, 2].std(ddof=1)
    print(f"{name}: mean final P_R = {ens.mean_final_populations[2]:.4f} "
          f"(per-realization spread {spread:.4f}, seeds {ens.seeds[0]}..{ens.seeds[-1]})")
axes[0].set_ylabel("population")

fig.tight_layout()
fig.savefig(OUT / "noise_robustness.png", dpi=140)
print(f"wrote {OUT / 'noise_robustness.png'}")
