"""Writing a signal pulse into the medium and reading it back.

The 1-D medium stores the probe pulse as a collective ground-Rydberg spin
wave during the write stage, holds it while all drives are off, and re-emits
it when the control field returns. Comparing the three protocols shows the
speed-fidelity trade-off of the conventional scheme and how the CD drive
lifts it (note the CD drive also pumps the spin wave directly, so the
retrieved pulse there is not bounded by the input energy).
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rydstore import get_preset, run_storage_retrieval

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(3, 2, figsize=(12, 8))
for row, (name, title) in enumerate((("fig3a", "conventional, 500 ns write"),
                                     ("fig3b", "conventional, 250 ns write"),
                                     ("fig3c", "CD-assisted, 250 ns write"))):
    res = run_storage_retrieval(get_preset(name).config)
    ax = axes[row, 0]
    ax.plot(res.t, np.abs(res.omega_in) * 1e3, label=r"$|\Omega_{in}|$")
    ax.plot(res.t, np.abs(res.omega_out) * 1e3, label=r"$|\Omega_{out}|$")
    ax.plot(res.t, res.control * 0.05 * 1e3, color="0.7", ls="--",
            label=r"$\Omega_c/20$")
    ax.set_title(f"{title}: efficiency = {res.efficiency:.3f}")
    ax.set_ylabel("field (mrad/ns)")
    ax.legend(fontsize="small", loc="upper right")

    ax = axes[row, 1]
    snap = res.snapshots["hold"]
    ax.plot(snap["z_um"], snap["abs_rho_rg"], label=r"$|\rho_{rg}|$ after write")
    ax.plot(snap["z_um"], snap["P_R"], label=r"$P_R$")
    ax.set_ylabel("stored spin wave")
    ax.legend(fontsize="small")
    print(f"{name}: efficiency = {res.efficiency:.4f}, write leakage = {res.leakage:.3f}")

axes[-1, 0].set_xlabel("t (ns)")
axes[-1, 1].set_xlabel("z (um)")
fig.tight_layout()
fig.savefig(OUT / "storage_retrieval.png", dpi=140)
print(f"wrote {OUT / 'storage_retrieval.png'}")
