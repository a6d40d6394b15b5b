"""Command-line entry point: ``gtdyn {simulate,warren,converge,compare}``.

Every flag mirrors a config key; a flag given on the command line
overrides the value read from ``--config``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, config_from_dict
from .driving import SeedSpec, ingest_path, make_driver
from .dynamics import run_dynamics
from .errors import ConfigError, DomainError, GTDynError
from .io import dump_json, grid_csv, read_samples_csv, samples_csv, trajectory_csv
from .patterns import ContinuousPattern, DiscretePattern, packed_pattern, slot_of
from .rescale import convergence_pipeline, dynamics_marginals
from .stats import empirical_ks, moment_summary
from .warren import warren_marginals, warren_sample

__all__ = ["main", "run_command", "build_parser"]

GENERATOR = "numpy PCG64, SeedSequence(seed, spawn_key=(stream, *tags))"

# flag dest -> config key
_FLAG_KEYS = {
    "seed": "seed", "out": "out", "levels": "N", "driver": "driver", "horizon": "horizon",
    "grid_step": "grid_step", "replicas": "replicas", "rate": "rate", "p": "p", "q": "q",
    "times": "times", "n_values": "n_values", "initial": "initial", "samples": "samples",
    "driver_file": "driver_file", "stride": "stride", "inputs": "inputs",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON run configuration")
        p.add_argument("--seed", type=int, metavar="U64")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--replicas", type=int, metavar="M")

    def model(p):
        p.add_argument("--levels", type=int, metavar="N")
        p.add_argument("--driver", choices=("poisson", "bernoulli", "lazy"))
        p.add_argument("--rate", type=float)
        p.add_argument("--p", type=float)
        p.add_argument("--q", type=float)
        p.add_argument("--grid-step", type=float, metavar="H")
        p.add_argument("--initial", metavar="packed|zero|PATH",
                       help="initial pattern; PATH holds one line per level")

    p = sub.add_parser("simulate", help="driven interlacing dynamics -> trajectory CSV")
    common(p)
    model(p)
    p.add_argument("--horizon", type=float, metavar="T")
    p.add_argument("--driver-file", metavar="PATH", help="event-list CSV driving the run")
    p.add_argument("--samples", metavar="PATH",
                   help="dump rescaled states at the horizon for --replicas runs")

    p = sub.add_parser("warren", help="Warren grid sampler -> grid trajectory CSV")
    common(p)
    model(p)
    p.add_argument("--horizon", type=float, metavar="T")
    p.add_argument("--stride", type=int, help="write every STRIDE-th grid time")
    p.add_argument("--samples", metavar="PATH",
                   help="dump states at the horizon for --replicas runs")

    p = sub.add_parser("converge", help="KS convergence report (JSON)")
    common(p)
    model(p)
    p.add_argument("--times", type=float, nargs="+")
    p.add_argument("--n-values", type=int, nargs="+")

    p = sub.add_parser("compare", help="KS and moments between two sample dumps (JSON)")
    common(p)
    p.add_argument("inputs", nargs="*", metavar="DUMP")
    return parser


def _initial_arg(value: str):
    if value in ("packed", "zero"):
        return value
    text = Path(value).read_text()
    return [[float(tok) for tok in line.split()] for line in text.splitlines()
            if line.strip() and not line.startswith("#")]


def _merge(args) -> tuple[RunConfig, dict]:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}", key_path="$") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object", key_path="$")
        if raw.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {raw['command']!r}, not {args.command!r}",
                              key_path="$.command")
    raw["command"] = args.command
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is None or (dest == "inputs" and not value):
            continue
        raw[key] = _initial_arg(value) if dest == "initial" else value
    return config_from_dict(raw), raw


def _discrete_initial(cfg: RunConfig) -> DiscretePattern:
    if cfg.initial == "packed":
        return packed_pattern(cfg.N)
    if cfg.initial == "zero":
        if cfg.N > 1:
            raise DomainError("the all-zero pattern is not a valid discrete pattern for N > 1",
                              module="cli_io")
        return DiscretePattern(1, [0])
    levels = [[int(round(v)) for v in lvl] for lvl in cfg.initial]
    return DiscretePattern.from_levels(levels)


def _continuous_initial(cfg: RunConfig) -> ContinuousPattern:
    if cfg.initial == "zero":
        return ContinuousPattern.zeros(cfg.N)
    if cfg.initial == "packed":
        return packed_pattern(cfg.N).to_continuous()
    return ContinuousPattern.from_levels(cfg.initial)


def _meta(cfg: RunConfig) -> dict:
    # the output location is not part of what produced the output
    d = cfg.to_dict()
    del d["out"]
    d["generator"] = GENERATOR
    return d


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _simulate(cfg: RunConfig, raw: dict):
    initial = _discrete_initial(cfg)
    if initial.N != cfg.N:
        raise DomainError(f"initial pattern has {initial.N} levels, expected {cfg.N}",
                          module="cli_io")
    if cfg.driver_file:
        driving = ingest_path(Path(cfg.driver_file).read_text(), cfg.N)
        horizon = cfg.horizon if "horizon" in raw else driving.horizon
    else:
        driving = make_driver(cfg.driver, cfg.N, cfg.horizon, SeedSpec(cfg.seed),
                              **cfg.driver_params())
        horizon = cfg.horizon
    traj = run_dynamics(initial, driving, horizon)
    _emit(trajectory_csv(traj, _meta(cfg)), cfg.out)
    if cfg.samples:
        n = int(round(cfg.horizon))
        if n != cfg.horizon or n < 1:
            raise DomainError("sample dumps need an integer horizon >= 1 (used as the time "
                              "factor n)", module="cli_io")
        vals = dynamics_marginals(cfg.driver, cfg.N, n, [1.0], cfg.replicas, cfg.seed,
                                  initial=initial, params=cfg.driver_params())
        Path(cfg.samples).write_text(samples_csv(vals[:, 0, :], cfg.N, _meta(cfg)))


def _warren(cfg: RunConfig, raw: dict):
    initial = _continuous_initial(cfg)
    traj = warren_sample(cfg.N, initial, cfg.horizon, cfg.grid_step, SeedSpec(cfg.seed))
    _emit(grid_csv(traj, cfg.stride, _meta(cfg)), cfg.out)
    if cfg.samples:
        vals = warren_marginals(cfg.N, [cfg.horizon], cfg.replicas, cfg.seed,
                                h=cfg.grid_step, initial=initial)
        Path(cfg.samples).write_text(samples_csv(vals[:, 0, :], cfg.N, _meta(cfg)))


def _converge(cfg: RunConfig, raw: dict):
    initial = _discrete_initial(cfg)
    report = convergence_pipeline(cfg.driver, cfg.n_values, cfg.N, cfg.times, cfg.replicas,
                                  cfg.seed, h=cfg.grid_step, params=cfg.driver_params(),
                                  initial=None if cfg.initial == "packed" else initial)
    report["config"] = _meta(cfg)
    _emit(dump_json(report), cfg.out)


def _compare(cfg: RunConfig, raw: dict):
    (Na, a), (Nb, b) = (read_samples_csv(Path(p).read_text()) for p in cfg.inputs)
    if Na != Nb:
        raise DomainError(f"sample dumps have different sizes ({Na} vs {Nb})", module="cli_io")
    slots = []
    for k in range(a.shape[1]):
        i, j = slot_of(k)
        slots.append({
            "level": j, "index": i,
            "ks": empirical_ks(a[:, k], b[:, k]),
            "a": moment_summary(a[:, k])._asdict(),
            "b": moment_summary(b[:, k])._asdict(),
        })
    report = {"schema": "gtdyn.compare/1", "inputs": cfg.inputs, "N": Na,
              "samples": [int(a.shape[0]), int(b.shape[0])], "slots": slots,
              "config": _meta(cfg)}
    _emit(dump_json(report), cfg.out)


_COMMANDS = {"simulate": _simulate, "warren": _warren, "converge": _converge,
             "compare": _compare}


def run_command(argv: list[str]) -> int:
    """Run one CLI invocation; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, raw = _merge(args)
        _COMMANDS[cfg.command](cfg, raw)
    except ConfigError as exc:
        where = f" at {exc.key_path}" if exc.key_path else ""
        print(f"gtdyn: config error{where}: {exc.message}", file=sys.stderr)
        return 2
    except GTDynError as exc:
        print(f"gtdyn: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gtdyn: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
