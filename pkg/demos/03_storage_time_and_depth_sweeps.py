"""How storage time and optical depth shape the retrieved signal.

Thermal motion scrambles the spin-wave phase as exp[-(k v t_s)^2 / 2], so the
retrieved pulse fades with storage time and is nearly erased by 3 us at
10 uK. A deeper medium couples the field more strongly and retrieves more.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rydstore import get_preset, sweep

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(2, 3, figsize=(13, 6), sharey="row")

cfg = get_preset("fig4a").config
for col, (t_s, result) in enumerate(sweep(cfg, "protocol.storage_time_ns",
                                          (800.0, 1500.0, 3000.0))):
    ax = axes[0, col]
    read = result.t >= result.readout_window[0] - 100
    ax.plot(result.t[read], np.abs(result.omega_out[read]) * 1e3)
    ax.set_title(f"$t_s$ = {t_s:.0f} ns, eta = {result.efficiency:.3f}")
    ax.set_xlabel("t (ns)")
    print(f"t_s = {t_s:6.0f} ns: efficiency = {result.efficiency:.4f}")
axes[0, 0].set_ylabel("retrieved field (mrad/ns)")

cfg_b = get_preset("fig4b").config
for col, (alpha, result) in enumerate(sweep(cfg_b, "medium.optical_depth",
                                            (3.0, 5.0, 7.0))):
    ax = axes[1, col]
    read = result.t >= result.readout_window[0] - 100
    ax.plot(result.t[read], np.abs(result.omega_out[read]) * 1e3, color="C1")
    ax.set_title(f"alpha = {alpha:.0f}, eta = {result.efficiency:.3f}")
    ax.set_xlabel("t (ns)")
    print(f"alpha = {alpha}: efficiency = {result.efficiency:.4f}")
axes[1, 0].set_ylabel("retrieved field (mrad/ns)")

fig.tight_layout()
fig.savefig(OUT / "sweeps.png", dpi=140)
print(f"wrote {OUT / 'sweeps.png'}")
