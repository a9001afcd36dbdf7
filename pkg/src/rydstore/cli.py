"""Command-line interface.

Verbs: run, sweep, list-presets, validate, export-pulses.
Exit codes: 0 ok, 2 configuration error, 3 invariant breach, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .collective import InvariantBreachError
from .config import ConfigError, apply_overrides, load_config, validate
from .presets import PRESETS, get_preset
from .pulses import build_pulse_set, pulse_table
from .runner import run as run_preset
from .runner import sweep as run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_IO = 4


def _add_common(p):
    p.add_argument("--config", help="config file (overrides the preset's bound config)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="SECTION.KEY=VALUE", help="override a config key")
    p.add_argument("--out", default="out", help="output root directory")
    p.add_argument("--seed", type=int, default=None, help="override the base RNG seed")
    p.add_argument("--threads", type=int, default=1, help="parallel workers for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydstore",
        description="1-D Maxwell-Bloch simulator for CD-accelerated Rydberg-EIT storage")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="execute a scenario preset or config file")
    p_run.add_argument("preset", nargs="?", help=f"one of: {', '.join(sorted(PRESETS))}")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a preset across a parameter axis")
    p_sweep.add_argument("preset")
    p_sweep.add_argument("--param", required=True, metavar="SECTION.KEY")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values, e.g. 800,1500,3000")
    _add_common(p_sweep)

    sub.add_parser("list-presets", help="list the available presets")

    p_val = sub.add_parser("validate", help="validate a config file or preset")
    p_val.add_argument("target", help="preset name or config file path")
    p_val.add_argument("--set", dest="overrides", action="append", default=[])

    p_exp = sub.add_parser("export-pulses", help="write the pulse table of a preset")
    p_exp.add_argument("preset")
    _add_common(p_exp)
    return parser


def _resolve_config(args):
    if getattr(args, "config", None):
        config = load_config(args.config)
    elif args.preset:
        config = get_preset(args.preset).config
    else:
        raise ConfigError("give a preset name or --config FILE")
    if args.overrides:
        config = apply_overrides(config, args.overrides)
    if getattr(args, "seed", None) is not None:
        config = config.replace(seed=args.seed)
    return validate(config)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "list-presets":
            for name in sorted(PRESETS):
                print(f"{name:8s} {PRESETS[name].description}")
            return EXIT_OK

        if args.verb == "validate":
            if args.target in PRESETS:
                config = get_preset(args.target).config
            else:
                config = load_config(args.target)
            if args.overrides:
                config = apply_overrides(config, args.overrides)
            config = validate(config)
            print(f"ok: kind={config.kind} "
                  f"k_eff={config.k_eff:.6f} rad/um delta_k={config.delta_k:.3e} rad/um "
                  f"kv={config.kv_rate:.3e} rad/ns")
            return EXIT_OK

        if args.verb == "export-pulses":
            preset = get_preset(args.preset)
            config = _resolve_config(args)
            pulses = build_pulse_set(config)
            t_end = config.t_end if config.kind not in ("storage", "storage6") else (
                config.write_time + config.storage_time + config.readout_window)
            grid = np.arange(0.0, t_end + config.dt, max(config.dt, 0.5))
            from pathlib import Path
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"pulses_{preset.name}.csv"
            table = pulse_table(pulses, grid)
            np.savetxt(path, table, delimiter=",",
                       header="t_ns,omega_p,omega_c,omega_cd", comments="")
            print(f"wrote {path}")
            return EXIT_OK

        if args.verb == "run":
            if args.config:
                config = _resolve_config(args)
                manifest = run_preset(config, out_root=args.out, threads=args.threads)
            else:
                manifest = run_preset(args.preset, overrides=args.overrides,
                                      out_root=args.out, seed=args.seed,
                                      threads=args.threads)
            print(json.dumps({"out_dir": manifest["out_dir"],
                              "metrics": manifest["metrics"]}, indent=2))
            return EXIT_OK

        if args.verb == "sweep":
            config = _resolve_config(args)
            values = [float(v) for v in args.values.split(",")]
            results = run_sweep(config, args.param, values, threads=args.threads)
            from pathlib import Path
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            rows = []
            for value, result in results:
                if isinstance(result, str):
                    rows.append((value, float("nan")))
                else:
                    rows.append((value, getattr(result, "efficiency", float("nan"))))
            path = out / f"sweep_{args.param.replace('.', '_')}.csv"
            np.savetxt(path, np.array(rows), delimiter=",",
                       header=f"{args.param},efficiency", comments="")
            print(f"wrote {path}")
            for value, eff in rows:
                print(f"  {args.param}={value}: efficiency={eff:.5f}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantBreachError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
