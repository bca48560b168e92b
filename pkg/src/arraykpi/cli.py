"""Command line interface: ``arraykpi {run,sweep,layout,validate}``."""

from __future__ import annotations

import argparse
import sys
import time

from .config import CONFIG_KEYS, config_from_mapping, config_to_mapping, load_config_file, serialize_config
from .errors import ArrayKpiError
from .geometry import format_layout, make_nula_tchebyshev, make_ula
from .montecarlo import ScenarioConfig, run_scenario
from .results import make_manifest, write_results, write_sweep
from .sweep import run_sweep


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario file (key = value) or a run manifest")
    group = p.add_argument_group("scenario keys (override --config)")
    for key in CONFIG_KEYS:
        group.add_argument(f"--{key}", dest=f"key:{key}", metavar="VALUE")


def _resolve_config(args, **aliases) -> ScenarioConfig:
    base = load_config_file(args.config) if args.config else ScenarioConfig()
    mapping = config_to_mapping(base)
    for key in CONFIG_KEYS:
        value = getattr(args, f"key:{key}")
        if value is not None:
            mapping[key] = value
    for key, value in aliases.items():
        if value is not None:
            mapping[key] = value
    return config_from_mapping(mapping)


def _cmd_run(args) -> int:
    cfg = _resolve_config(args, **{"out.dir": args.out})
    t0 = time.perf_counter()
    ds = run_scenario(cfg, workers=args.workers)
    manifest = make_manifest(ds, time.perf_counter() - t0)
    paths = write_results(ds, manifest, cfg.out_dir)
    print(
        f"{cfg.mc_trials} trials, drop probability {manifest['drop_probability']:.4f}, "
        f"ergodic sum rate {manifest['ergodic_sum_rate']:.4f} bit/s/Hz"
    )
    for p in paths:
        print(p)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _resolve_config(args, **{"out.dir": args.out, "mc.trials": args.trials, "mc.seed": args.seed})
    t0 = time.perf_counter()
    results = run_sweep(cfg, workers=args.workers)
    paths = write_sweep(results, cfg.out_dir, time.perf_counter() - t0)
    for (name, dropping), ds in results.items():
        m = make_manifest(ds)
        print(
            f"{name:16s} {'drop  ' if dropping else 'nodrop'} "
            f"P(drop)={m['drop_probability']:.4f} sum rate={m['ergodic_sum_rate']:.4f}"
        )
    print(f"wrote {len(paths)} files to {cfg.out_dir}")
    return 0


def _cmd_layout(args) -> int:
    if args.nula is not None:
        layout = make_nula_tchebyshev(args.nula, args.davg, 1.0, args.sll)
    else:
        layout = make_ula(args.ula, args.davg)
    sys.stdout.write(format_layout(layout))
    return 0


def _cmd_validate(args) -> int:
    cfg = _resolve_config(args)
    sys.stdout.write(serialize_config(cfg))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arraykpi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write CDF files and a manifest")
    _add_config_options(p)
    p.add_argument("--out", help="output directory (same as --out.dir)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="simulate all compared arrays with and without dropping")
    _add_config_options(p)
    p.add_argument("--out", help="output directory (same as --out.dir)")
    p.add_argument("--trials", help="realizations per array (same as --mc.trials)")
    p.add_argument("--seed", help="master seed (same as --mc.seed)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("layout", help="print element positions in wavelengths")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--ula", type=int, metavar="N")
    kind.add_argument("--nula", type=int, metavar="N")
    p.add_argument("--davg", type=float, default=0.5, help="average spacing in wavelengths")
    p.add_argument("--sll", type=float, default=-20.0, help="NULA taper sidelobe level in dB")
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("validate", help="check a configuration and print it fully resolved")
    _add_config_options(p)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ArrayKpiError, OSError) as exc:
        print(f"arraykpi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
