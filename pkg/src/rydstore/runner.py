"""Preset execution, artifact emission (CSV + plot scripts) and run manifests.

Every run writes ``manifest.json`` (config snapshot, seeds, artifact list,
wall time, invariant summary), a ``data/`` directory of schema-checked CSV
files and a ``plots/make_plots.py`` matplotlib script that renders them.
Re-running the same preset/config with the same seed reproduces the data
files bit-identically (RNG: numpy PCG64 via default_rng(base_seed + i)).
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import multiexc, noise, propagation
from .collective import Trajectory, run_population_dynamics
from .config import ConfigError, ScenarioConfig, apply_overrides, dump_config, validate
from .presets import PRESETS, fig7_variants, get_preset
from .pulses import build_pulse_set, pulse_table

log = logging.getLogger(__name__)

RNG_NOTE = "numpy default_rng (PCG64); realization i uses base_seed + i"


def _write_csv(path: Path, header: list[str], array: np.ndarray) -> Path:
    array = np.atleast_2d(np.asarray(array))
    if array.shape[1] != len(header):
        raise ValueError(f"CSV schema mismatch for {path.name}: "
                         f"{array.shape[1]} columns vs header {header}")
    np.savetxt(path, array, delimiter=",", header=",".join(header), comments="")
    return path


def _trajectory_rows(traj: Trajectory) -> tuple[list[str], np.ndarray]:
    header = ["t_ns"] + [f"P_{b}" for b in traj.basis]
    cols = [traj.t] + [traj.populations[:, i] for i in range(len(traj.basis))]
    if traj.fidelity_dark is not None:
        header.append("fidelity_dark")
        cols.append(traj.fidelity_dark)
    return header, np.column_stack(cols)


def _field_rows(res: propagation.StorageResult) -> tuple[list[str], np.ndarray]:
    header = ["t_ns", "omega_in_re", "omega_in_im", "omega_out_re", "omega_out_im",
              "omega_c", "omega_cd_re"]
    data = np.column_stack([
        res.t, np.real(res.omega_in), np.imag(res.omega_in),
        np.real(res.omega_out), np.imag(res.omega_out),
        res.control, np.real(res.cd_drive)])
    return header, data


def _snapshot_rows(cols: dict) -> tuple[list[str], np.ndarray]:
    header = list(cols)
    return header, np.column_stack([cols[k] for k in header])


class RunError(RuntimeError):
    pass


def _make_out_dir(out_root: str | Path, preset_name: str) -> Path:
    stamp = time.strftime("%Y%m%dT%H%M%S")
    base = Path(out_root) / preset_name
    out = base / stamp
    k = 1
    while out.exists():
        out = base / f"{stamp}-{k}"
        k += 1
    (out / "data").mkdir(parents=True)
    (out / "plots").mkdir()
    return out


def _storage_run(config: ScenarioConfig):
    if config.kind == "storage6":
        return multiexc.run_storage6(config)
    return propagation.run_storage_retrieval(config)


def _scenario_run(config: ScenarioConfig):
    if config.kind in ("storage", "storage6"):
        return _storage_run(config)
    if config.kind == "population6":
        return multiexc.run_population6(config)
    return run_population_dynamics(config)


def _sweep_worker(args):
    key, value, config = args
    cfg = validate(apply_overrides(config, [f"{key}={value}"]))
    result = _scenario_run(cfg)
    return value, result


def sweep(config: ScenarioConfig, key: str, values, threads: int = 1):
    """One storage run per value of ``key`` (a ``section.key`` config path).

    Returns a list of (value, StorageResult | error-string) in input order;
    failed points are recorded and the sweep continues.
    """
    jobs = [(key, v, config) for v in values]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_sweep_worker, jobs))
    results = []
    for job in jobs:
        try:
            results.append(_sweep_worker(job))
        except (ConfigError, propagation.InvariantBreachError) as exc:
            log.error("sweep point %s=%s failed: %s", key, job[1], exc)
            results.append((job[1], f"error: {exc}"))
    return results


def run(preset_or_config: str | ScenarioConfig, overrides=(), out_root="out",
        seed: int | None = None, threads: int = 1) -> dict:
    """Execute a preset (or an explicit config) and write all artifacts.

    Returns the manifest dictionary (also written to manifest.json).
    """
    t_start = time.time()
    if isinstance(preset_or_config, str):
        preset = get_preset(preset_or_config)
        config = preset.config
        mode = preset.mode
        name = preset.name
    else:
        config = preset_or_config
        mode = {"population": "population", "population6": "population",
                "storage": "storage", "storage6": "storage",
                "ensemble": "ensemble", "raman_compare": "raman_compare",
                "pulses": "pulses"}[preset_or_config.kind]
        name = config.label or "custom"
        preset = None
    if overrides:
        config = apply_overrides(config, list(overrides))
    if seed is not None:
        config = config.replace(seed=seed)
    config = validate(config)

    out = _make_out_dir(out_root, name)
    data = out / "data"
    artifacts: list[str] = []
    metrics: dict = {}
    invariants: dict = {}
    seeds: list[int] = [config.seed]

    def emit(fname, header, rows):
        path = _write_csv(data / fname, header, rows)
        artifacts.append(str(path.relative_to(out)))

    def note_invariants(tag, obj):
        invariants[tag] = {
            "max_trace_dev": obj.max_trace_dev,
            "max_herm_dev": obj.max_herm_dev,
            "min_eigenvalue": obj.min_eigenvalue,
        }

    def emit_pulse_table(cfg, fname="pulses.csv"):
        ps = build_pulse_set(cfg)
        t_end = cfg.t_end if cfg.kind in ("population", "population6", "pulses",
                                          "ensemble", "raman_compare") else (
            cfg.write_time + cfg.storage_time + cfg.readout_window)
        grid = np.arange(0.0, t_end + cfg.dt, max(cfg.dt, 0.5))
        emit(fname, ["t_ns", "omega_p", "omega_c", "omega_cd"], pulse_table(ps, grid))

    try:
        if mode == "pulses":
            emit_pulse_table(config)
        elif mode == "population":
            runner = (multiexc.run_population6 if config.kind == "population6"
                      else run_population_dynamics)
            traj = runner(config)
            emit("trajectory.csv", *_trajectory_rows(traj))
            emit_pulse_table(config)
            note_invariants("population", traj)
            metrics["final_populations"] = {f"P_{b}": float(p) for b, p in
                                            zip(traj.basis, traj.final_populations)}
            if traj.fidelity_dark is not None:
                metrics["min_dark_fidelity"] = float(np.min(traj.fidelity_dark))
        elif mode == "storage":
            res = _storage_run(config)
            emit("output_field.csv", *_field_rows(res))
            for label, cols in res.snapshots.items():
                emit(f"snapshot_{label}.csv", *_snapshot_rows(cols))
            header = ["t_ns"] + [f"P_{b}" for b in (res.basis or ("G", "E", "R"))]
            emit("populations_avg.csv", header,
                 np.column_stack([res.t, res.pop_avg]))
            emit_pulse_table(config)
            note_invariants("storage", res)
            metrics["efficiency"] = res.efficiency
            metrics["leakage"] = res.leakage
        elif mode == "sweep":
            rows = []
            for value, result in sweep(config, preset.sweep_key,
                                       preset.sweep_values, threads=threads):
                if isinstance(result, str):
                    rows.append([value, np.nan, np.nan, np.nan, np.nan])
                    metrics.setdefault("errors", []).append({str(value): result})
                    continue
                tag = str(value).replace(".", "p")
                emit(f"output_field_{tag}.csv", *_field_rows(result))
                finals = result.pop_avg[-1]
                rows.append([value, result.efficiency, finals[0], finals[1], finals[2]])
                note_invariants(f"sweep_{tag}", result)
            emit("sweep_table.csv",
                 [preset.sweep_key.split(".", 1)[1], "efficiency", "P_G", "P_E", "P_R"],
                 np.array(rows))
            metrics["sweep"] = {str(r[0]): float(r[1]) for r in rows}
        elif mode == "ensemble":
            spec = noise.NoiseSpec.from_config(config)
            ens = noise.run_ensemble(config, spec)
            seeds = list(ens.seeds)
            header = ["t_ns"] + [f"P_{b}" for b in ens.basis]
            cols = [ens.t] + [ens.mean_populations[:, i] for i in range(len(ens.basis))]
            if ens.mean_fidelity is not None:
                header.append("fidelity_dark")
                cols.append(ens.mean_fidelity)
            emit("mean_trajectory.csv", header, np.column_stack(cols))
            finals_header = ["seed"] + [f"P_{b}" for b in ens.basis]
            finals_cols = [np.array(seeds, dtype=float), ens.final_populations]
            if ens.efficiencies is not None:
                finals_header.append("efficiency")
                finals_cols.append(ens.efficiencies[:, None])
            emit("realization_finals.csv", finals_header, np.column_stack(finals_cols))
            if ens.mean_output is not None:
                emit("mean_output_field.csv",
                     ["t_ns", "omega_out_re", "omega_out_im"],
                     np.column_stack([ens.t, np.real(ens.mean_output),
                                      np.imag(ens.mean_output)]))
                metrics["mean_efficiency"] = float(ens.efficiencies.mean())
            metrics["mean_final_populations"] = {
                f"P_{b}": float(p) for b, p in zip(ens.basis, ens.mean_final_populations)}
        elif mode == "blockade_pair":
            pop_nocd, pop_cd, st_nocd, st_cd = fig7_variants()
            for tag, cfg, fn in (("nocd", pop_nocd, multiexc.run_population6),
                                 ("cd", pop_cd, multiexc.run_population6)):
                traj = fn(cfg)
                emit(f"trajectory_{tag}.csv", *_trajectory_rows(traj))
                note_invariants(f"population_{tag}", traj)
                finals = {f"P_{b}": float(p) for b, p in zip(traj.basis, traj.final_populations)}
                finals["P_R_plus_P_RE"] = finals["P_R"] + finals["P_RE"]
                metrics[f"final_{tag}"] = finals
            for tag, cfg in (("nocd", st_nocd), ("cd", st_cd)):
                res = multiexc.run_storage6(cfg)
                emit(f"output_field_{tag}.csv", *_field_rows(res))
                emit(f"snapshot_write_{tag}.csv", *_snapshot_rows(res.snapshots["write"]))
                note_invariants(f"storage_{tag}", res)
                metrics[f"efficiency_{tag}"] = res.efficiency
        elif mode == "raman_compare":
            variants = {
                "ideal": config.replace(raman_enabled=False),
                "raman_comp": config.replace(raman_enabled=True, stark_compensation=True),
                "raman_nocomp": config.replace(raman_enabled=True, stark_compensation=False),
            }
            finals = {}
            for tag, cfg in variants.items():
                traj = run_population_dynamics(validate(cfg))
                emit(f"trajectory_{tag}.csv", *_trajectory_rows(traj))
                note_invariants(f"population_{tag}", traj)
                finals[tag] = float(traj.final_populations[2])
            metrics["final_P_R"] = finals
            storage_base = PRESETS["fig3c"].config.replace(
                raman_detuning=config.raman_detuning, dt_fast=config.dt_fast,
                n_z=config.n_z, dt=config.dt, storage_time=config.storage_time,
                readout_window=config.readout_window)
            effs = {}
            for tag in variants:
                cfg = storage_base.replace(
                    raman_enabled=(tag != "ideal"),
                    stark_compensation=(tag != "raman_nocomp"))
                res = propagation.run_storage_retrieval(validate(cfg))
                emit(f"output_field_{tag}.csv", *_field_rows(res))
                note_invariants(f"storage_{tag}", res)
                effs[tag] = res.efficiency
            metrics["efficiency"] = effs
        else:
            raise RunError(f"unknown run mode {mode!r}")
    except Exception as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "preset": name}
        with open(out / "errors.jsonl", "a") as fh:
            fh.write(json.dumps(record) + "\n")
        raise

    dump_config(config, out / "config.ini")
    artifacts.append("config.ini")
    script = _plot_script(name)
    (out / "plots" / "make_plots.py").write_text(script)
    artifacts.append("plots/make_plots.py")

    manifest = {
        "preset": name,
        "mode": mode,
        "config": {k: (v if not isinstance(v, float) or np.isfinite(v) else str(v))
                   for k, v in dataclasses.asdict(config).items()},
        "seeds": seeds,
        "rng": RNG_NOTE,
        "artifacts": artifacts,
        "metrics": metrics,
        "invariants": invariants,
        "wall_time_s": round(time.time() - t_start, 3),
        "out_dir": str(out),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    log.info("run %s complete in %.1fs -> %s", name, manifest["wall_time_s"], out)
    return manifest


def _plot_script(preset_name: str) -> str:
    return f'''"""Render the CSV artifacts of this run ({preset_name}).

Usage: python make_plots.py   (figures are written next to this script)
"""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
DATA = HERE.parent / "data"


def load(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1)


for path in sorted(DATA.glob("*.csv")):
    header, arr = load(path)
    arr = np.atleast_2d(arr)
    stem = path.stem
    fig, ax = plt.subplots(figsize=(7, 4))
    if stem.startswith("trajectory") or stem.startswith("mean_trajectory") \\
            or stem.startswith("populations_avg"):
        for i, name in enumerate(header[1:], start=1):
            ax.plot(arr[:, 0], arr[:, i], label=name)
        ax.set_xlabel("t (ns)"); ax.set_ylabel("population / fidelity")
    elif stem.startswith("output_field"):
        t = arr[:, 0]
        w_in = np.hypot(arr[:, 1], arr[:, 2])
        w_out = np.hypot(arr[:, 3], arr[:, 4])
        ax.plot(t, w_in, label="|omega_in|")
        ax.plot(t, w_out, label="|omega_out|")
        ax2 = ax.twinx()
        ax2.plot(t, arr[:, 5], color="0.6", ls="--", label="omega_c")
        ax.set_xlabel("t (ns)"); ax.set_ylabel("|Omega| (rad/ns)")
    elif stem.startswith("snapshot"):
        for i, name in enumerate(header[1:], start=1):
            ax.plot(arr[:, 0], arr[:, i], label=name)
        ax.set_xlabel("z (um)")
    elif stem.startswith("pulses"):
        for i, name in enumerate(header[1:], start=1):
            ax.plot(arr[:, 0], arr[:, i], label=name)
        ax.set_xlabel("t (ns)"); ax.set_ylabel("Omega (rad/ns)")
    elif stem.startswith("sweep_table"):
        ax.plot(arr[:, 0], arr[:, 1], "o-")
        ax.set_xlabel(header[0]); ax.set_ylabel("efficiency")
    else:
        for i, name in enumerate(header[1:], start=1):
            ax.plot(arr[:, 0], arr[:, i], label=name)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")
    ax.set_title(stem)
    fig.tight_layout()
    fig.savefig(HERE / (stem + ".png"), dpi=130)
    plt.close(fig)
    print("wrote", HERE / (stem + ".png"))
'''
