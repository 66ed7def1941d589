"""Sectioned key-value configuration files.

The grammar is deliberately flat: ``[section]`` headers, ``key = value``
lines, ``#`` comments, and nothing else.  Values may contain ``=`` (the
pattern literal does).  Unknown sections or keys are errors; every error
carries the key, the line number, and a reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .census import MotifPattern, PatternError, parse_pattern
from .harness import (
    RadiusModelParams,
    RegimeError,
    RegimeSchedule,
    SectorModelParams,
)
from .model import (
    DENSITY_KINDS,
    NORM_KINDS,
    RADIUS_LAW_KINDS,
    DensitySpec,
    ModelError,
    NormSpec,
    TWO_PI,
)


class ConfigError(ValueError):
    """One or more configuration errors; ``errors`` lists (key, line, reason)."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{key} (line {line}): {reason}" for key, line, reason in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


_SCHEMA = {
    "model": {"kind", "alpha", "norm", "law"},
    "density": {"kind", "d", "scale"},
    "pattern": {"literal"},
    "regime": {"kind", "lambda", "beta", "delta", "n_list", "seeds_per_n"},
    "mc": {"samples", "inner_samples", "limit_samples", "trials"},
    "limit": {"which", "t", "lambda"},
    "run": {"n", "r"},
}

LIMIT_KINDS = ("phi", "thermo", "mu", "isolated-vertex")


def _scan(text: str):
    """Parse raw sections; returns {section: {key: (value, line)}} plus errors."""
    sections: dict = {}
    errors = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SCHEMA:
                errors.append((current, lineno, "unknown section"))
                sections.setdefault(current, {})
            else:
                sections.setdefault(current, {})
            continue
        if "=" not in line:
            errors.append((line, lineno, "expected 'key = value'"))
            continue
        if current is None:
            errors.append((line.split("=")[0].strip(), lineno, "key outside any section"))
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if current in _SCHEMA and key not in _SCHEMA[current]:
            errors.append((f"{current}.{key}", lineno, "unknown key"))
            continue
        if key in sections[current]:
            errors.append((f"{current}.{key}", lineno, "duplicate key"))
            continue
        sections[current][key] = (value, lineno)
    return sections, errors


@dataclass
class RunConfig:
    """A validated experiment configuration (echoed verbatim into reports)."""

    command: str
    raw: dict
    model: object = None  # SectorModelParams | RadiusModelParams
    density: DensitySpec | None = None
    pattern: MotifPattern | None = None
    schedule: RegimeSchedule | None = None
    n_list: list = field(default_factory=list)
    seeds_per_n: int = 20
    samples: int = 200_000
    inner_samples: int = 4096
    limit_samples: int = 200_000
    trials: int = 10_000
    limit_which: str | None = None
    limit_t: float | None = None
    limit_lambda: float | None = None
    run_n: int | None = None
    run_r: float | None = None


class _Reader:
    def __init__(self, sections, errors):
        self.sections = sections
        self.errors = errors

    def has(self, section):
        return section in self.sections

    def get(self, section, key, convert=str, default=None, required=False):
        sec = self.sections.get(section, {})
        if key not in sec:
            if required:
                self.errors.append((f"{section}.{key}", 0, "missing required key"))
            return default
        value, line = sec[key]
        try:
            return convert(value)
        except (ValueError, TypeError):
            self.errors.append(
                (f"{section}.{key}", line, f"cannot parse {value!r} as {convert.__name__}")
            )
            return default

    def fail(self, section, key, reason):
        sec = self.sections.get(section, {})
        line = sec[key][1] if key in sec else 0
        self.errors.append((f"{section}.{key}", line, reason))


def _int_list(value: str):
    return [int(v.strip()) for v in value.split(",") if v.strip()]


def parse_config(text: str, command: str = "converge") -> RunConfig:
    """Parse and validate a configuration for the given subcommand.

    Raises ConfigError listing every problem found (unknown keys, type
    mismatches, admissibility violations such as a sparse-regime exponent
    outside its window or an unbounded-support density in the
    induced-count regime).
    """
    sections, errors = _scan(text)
    r = _Reader(sections, errors)
    cfg = RunConfig(
        command=command,
        raw={s: {k: v for k, (v, _) in kv.items()} for s, kv in sections.items()},
    )

    # density
    if r.has("density"):
        kind = r.get("density", "kind", str, required=True)
        d = r.get("density", "d", int, default=2)
        scale = r.get("density", "scale", float, default=1.0)
        if kind is not None and kind not in DENSITY_KINDS:
            r.fail("density", "kind", f"must be one of {DENSITY_KINDS}")
        elif kind is not None and d is not None and scale is not None:
            try:
                cfg.density = DensitySpec(kind=kind, d=d, scale=scale)
            except ModelError as exc:
                r.fail("density", "kind", str(exc))

    # model
    if r.has("model"):
        kind = r.get("model", "kind", str, required=True)
        if kind == "sector":
            alpha = r.get("model", "alpha", float, required=True)
            if alpha is not None:
                if not (0.0 < alpha <= TWO_PI):
                    r.fail("model", "alpha", f"must lie in (0, 2*pi]; got {alpha}")
                else:
                    cfg.model = SectorModelParams(alpha=alpha)
        elif kind == "radius":
            norm_kind = r.get("model", "norm", str, default="L2")
            law = r.get("model", "law", str, default="deterministic")
            d = cfg.density.d if cfg.density is not None else 2
            if norm_kind not in NORM_KINDS:
                r.fail("model", "norm", f"must be one of {NORM_KINDS}")
            elif law not in RADIUS_LAW_KINDS:
                r.fail("model", "law", f"must be one of {RADIUS_LAW_KINDS}")
            else:
                cfg.model = RadiusModelParams(norm=NormSpec(kind=norm_kind, d=d), law_kind=law)
        elif kind is not None:
            r.fail("model", "kind", "must be 'sector' or 'radius'")

    # pattern
    if r.has("pattern"):
        literal = r.get("pattern", "literal", str, required=True)
        if literal is not None:
            try:
                cfg.pattern = parse_pattern(literal)
            except PatternError as exc:
                r.fail("pattern", "literal", str(exc))

    # regime
    if r.has("regime"):
        kind = r.get("regime", "kind", str, required=True)
        lam = r.get("regime", "lambda", float)
        beta = r.get("regime", "beta", float)
        delta = r.get("regime", "delta", float, default=0.5)
        cfg.n_list = r.get("regime", "n_list", _int_list, default=[]) or []
        cfg.seeds_per_n = r.get("regime", "seeds_per_n", int, default=20)
        k = cfg.pattern.k if cfg.pattern is not None else 1
        if kind is not None:
            try:
                cfg.schedule = RegimeSchedule(
                    regime=kind, k=k, lam=lam, beta=beta, delta=delta
                )
                if cfg.density is not None:
                    cfg.schedule.check_density(cfg.density)
            except RegimeError as exc:
                r.fail("regime", "kind", str(exc))

    # mc knobs
    cfg.samples = r.get("mc", "samples", int, default=cfg.samples)
    cfg.inner_samples = r.get("mc", "inner_samples", int, default=cfg.inner_samples)
    cfg.limit_samples = r.get("mc", "limit_samples", int, default=cfg.limit_samples)
    cfg.trials = r.get("mc", "trials", int, default=cfg.trials)

    # limit request
    if r.has("limit"):
        which = r.get("limit", "which", str, required=True)
        if which is not None and which not in LIMIT_KINDS:
            r.fail("limit", "which", f"must be one of {LIMIT_KINDS}")
        cfg.limit_which = which
        cfg.limit_t = r.get("limit", "t", float)
        cfg.limit_lambda = r.get("limit", "lambda", float)

    # run geometry (generate / census)
    cfg.run_n = r.get("run", "n", int)
    cfg.run_r = r.get("run", "r", float)

    # per-command completeness
    need = {
        "generate": ("model", "density"),
        "census": ("model", "density", "pattern"),
        "limit": ("density", "limit"),
        "converge": ("model", "density", "pattern", "regime"),
        "probe": ("model", "pattern"),
    }
    for section in need.get(command, ()):
        if not r.has(section):
            errors.append((section, 0, f"section required by '{command}'"))
    if command in ("generate", "census"):
        if cfg.run_n is None:
            errors.append(("run.n", 0, f"required by '{command}'"))
        if cfg.run_r is None:
            errors.append(("run.r", 0, f"required by '{command}'"))
        elif cfg.run_r <= 0 or not math.isfinite(cfg.run_r):
            r.fail("run", "r", "must be a positive real")

    if errors:
        raise ConfigError(errors)
    return cfg
