"""Command-line front end.

Subcommands: generate, census, limit, converge, probe.  Exit codes:
0 success, 1 configuration error, 2 runtime error.  Identical
(config, seed) inputs produce byte-identical outputs regardless of
``--threads``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .build import build_radius_digraph, build_sector_digraph
from .census import census as run_census
from .census import feasibility_probe
from .config import ConfigError, RunConfig, parse_config
from .harness import (
    ExperimentReport,
    RadiusModelParams,
    SectorModelParams,
    run_convergence,
)
from .limits import (
    estimate_mu,
    estimate_phi,
    isolated_vertex_limit,
    thermodynamic_limit,
)
from .model import (
    RadiusLawSpec,
    SectorConfig,
    sample_orientations,
    sample_points,
    sample_radii,
)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def emit_report(report: ExperimentReport, fmt: str, path: str | None) -> None:
    """Serialize an experiment report; byte-stable given an identical report."""
    if fmt == "csv":
        _write(report.csv_text(), path)
    elif fmt == "json":
        _write(_json_text(report.json_dict()), path)
    else:
        raise ValueError(f"unknown format: {fmt!r}")


def _build_from_config(cfg: RunConfig, seed: int):
    pts = sample_points(cfg.density, cfg.run_n, seed)
    if isinstance(cfg.model, SectorModelParams):
        ys = sample_orientations(cfg.run_n, seed + 1)
        return build_sector_digraph(
            pts, ys, SectorConfig(alpha=cfg.model.alpha, radius=cfg.run_r)
        )
    law = RadiusLawSpec(kind=cfg.model.law_kind, scale=cfg.run_r, d=cfg.density.d)
    radii = sample_radii(law, cfg.run_n, seed + 1)
    return build_radius_digraph(pts, radii, cfg.model.norm)


def _cmd_generate(cfg: RunConfig, args) -> None:
    g = _build_from_config(cfg, args.seed)
    _write(g.to_text(), args.out)


def _cmd_census(cfg: RunConfig, args) -> None:
    g = _build_from_config(cfg, args.seed)
    result = run_census(g, cfg.pattern)
    _write(
        _json_text(
            {
                "n": result.n,
                "induced": result.induced_count,
                "isolated": result.isolated_count,
                "wall_time": round(result.wall_time, 6),
                "config": cfg.raw,
                "seed": args.seed,
            }
        ),
        args.out,
    )


def _cmd_limit(cfg: RunConfig, args) -> None:
    which = cfg.limit_which
    if which == "phi":
        est = estimate_phi(
            cfg.pattern,
            cfg.model.alpha,
            cfg.limit_t,
            samples=cfg.samples,
            seed=args.seed,
            inner_samples=cfg.inner_samples,
        )
    elif which == "thermo":
        est = thermodynamic_limit(
            cfg.pattern,
            cfg.model.alpha,
            cfg.limit_lambda,
            cfg.density,
            samples=cfg.samples,
            seed=args.seed,
            inner_samples=cfg.inner_samples,
        )
    elif which == "mu":
        est = estimate_mu(
            cfg.pattern, cfg.model.alpha, cfg.density, samples=cfg.samples, seed=args.seed
        )
    else:  # isolated-vertex
        est = isolated_vertex_limit(
            cfg.density, cfg.model.norm, cfg.limit_lambda, samples=cfg.samples, seed=args.seed
        )
    _write(
        _json_text(
            {
                "which": which,
                "value": est.value,
                "std_error": est.std_error,
                "samples": est.samples,
                "method": est.method,
                "config": cfg.raw,
                "seed": args.seed,
            }
        ),
        args.out,
    )


def _cmd_converge(cfg: RunConfig, args) -> None:
    report = run_convergence(
        cfg.schedule,
        cfg.pattern,
        cfg.model,
        cfg.density,
        cfg.n_list,
        seeds_per_n=cfg.seeds_per_n,
        master_seed=args.seed,
        limit_samples=cfg.limit_samples,
        inner_samples=cfg.inner_samples,
        threads=args.threads,
    )
    emit_report(report, args.format, args.out)


def _cmd_probe(cfg: RunConfig, args) -> None:
    if isinstance(cfg.model, SectorModelParams):
        params = SectorConfig(alpha=cfg.model.alpha, radius=1.0)
    else:
        params = cfg.model.norm
    feasible, rate = feasibility_probe(
        cfg.pattern, params, trials=cfg.trials, seed=args.seed
    )
    _write(
        _json_text(
            {
                "feasible": feasible,
                "hit_rate": rate,
                "trials": cfg.trials,
                "config": cfg.raw,
                "seed": args.seed,
            }
        ),
        args.out,
    )


_COMMANDS = {
    "generate": _cmd_generate,
    "census": _cmd_census,
    "limit": _cmd_limit,
    "converge": _cmd_converge,
    "probe": _cmd_probe,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodigraph",
        description="Directed random geometric network simulation and limit checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        sys.stderr.write(f"error: cannot read config: {exc}\n")
        sys.stderr.write(parser.format_usage())
        return 1
    try:
        cfg = parse_config(text, command=args.command)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    try:
        _COMMANDS[args.command](cfg, args)
    except Exception as exc:  # runtime failure, not a config problem
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
