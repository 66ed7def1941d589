"""End-to-end convergence experiments.

For each regime the harness sweeps n, runs (sample, build, census) per
seed, normalizes the counts with the regime's scaling, evaluates the
matching limit once, and aggregates everything into a report.  All cells
are independent tasks seeded by substreams of the master seed, so results
do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .build import build_radius_digraph, build_sector_digraph
from .census import MotifPattern, census, feasibility_probe, single_vertex
from .limits import (
    LimitEstimate,
    estimate_mu,
    isolated_vertex_limit,
    thermodynamic_limit,
)
from .model import (
    DensitySpec,
    NormSpec,
    RadiusLawSpec,
    SectorConfig,
    sample_orientations,
    sample_points,
    sample_radii,
)
from .rng import substream

REGIMES = ("thermo-T1", "radius-T2", "sparse-isolated-T3", "sparse-induced-T4")


class RegimeError(ValueError):
    """Schedule parameters violate the regime's growth conditions."""


def sparse_beta_window(k: int, delta: float = 0.0) -> tuple[float, float]:
    """Admissible exponent window for r_n = n^-beta in the sparse regimes.

    Isolated-count regime: (1/2, (2k-1)/(4(k-1))).
    Induced-count regime with slack delta: (0, (2k-1-delta)/(4(k-1))).
    """
    if k < 2:
        raise RegimeError("sparse regimes require k >= 2")
    hi = (2 * k - 1 - delta) / (4.0 * (k - 1))
    lo = 0.5 if delta == 0.0 else 0.0
    return lo, hi


@dataclass(frozen=True)
class RegimeSchedule:
    """Which theorem regime to drive and its parameters.

    * thermo-T1: r_n = sqrt(lam/n), isolated counts, normalization 1/n.
    * radius-T2: radius law with n*E[R^d] = lam, isolated vertices, 1/n.
    * sparse-isolated-T3: r_n = n^-beta, isolated counts,
      normalization 1/(n^k r_n^(2(k-1))).
    * sparse-induced-T4: same scaling on induced counts; needs bounded
      support and slack delta > 0.
    """

    regime: str
    k: int
    lam: float | None = None
    beta: float | None = None
    delta: float = 0.5

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise RegimeError(f"unknown regime: {self.regime!r}")
        if self.k < 1:
            raise RegimeError("k must be >= 1")
        if self.regime == "thermo-T1":
            if self.lam is None or self.lam <= 0:
                raise RegimeError("thermo-T1 requires lam in (0, inf)")
        elif self.regime == "radius-T2":
            if self.k != 1:
                raise RegimeError("radius-T2 counts isolated vertices (k = 1)")
            if self.lam is None or self.lam < 0:
                raise RegimeError("radius-T2 requires lam in [0, inf)")
        else:
            if self.k < 2:
                raise RegimeError("sparse regimes require k >= 2")
            if self.beta is None:
                raise RegimeError("sparse regimes require beta")
            if self.regime == "sparse-isolated-T3":
                lo, hi = sparse_beta_window(self.k)
                if not (lo < self.beta < hi):
                    raise RegimeError(
                        f"beta={self.beta} outside the admissible window "
                        f"({lo}, {hi:.6g}) for k={self.k}"
                    )
            else:
                if self.delta <= 0:
                    raise RegimeError("sparse-induced-T4 requires delta > 0")
                _, hi = sparse_beta_window(self.k, self.delta)
                if not (0.0 < self.beta < hi):
                    raise RegimeError(
                        f"beta={self.beta} outside the admissible window "
                        f"(0, {hi:.6g}) for k={self.k}, delta={self.delta}"
                    )

    def check_density(self, density: DensitySpec) -> None:
        if self.regime == "sparse-induced-T4" and not density.bounded_support:
            raise RegimeError(
                "sparse-induced-T4 requires a density with bounded support"
            )

    def r_n(self, n: int) -> float:
        if self.regime == "thermo-T1":
            return math.sqrt(self.lam / n)
        if self.regime == "radius-T2":
            raise RegimeError("radius-T2 uses a radius law, not a cutoff r_n")
        return float(n) ** (-self.beta)

    def radius_law(self, n: int, kind: str, d: int) -> RadiusLawSpec:
        """Radius law for size n with E[R^d] = lam/n."""
        if self.regime != "radius-T2":
            raise RegimeError("radius laws apply to radius-T2 only")
        if self.lam is None or self.lam <= 0:
            raise RegimeError("simulation requires lam > 0")
        target = self.lam / n
        if kind == "deterministic":
            scale = target ** (1.0 / d)
        elif kind == "scaled-uniform":
            scale = ((d + 1) * target) ** (1.0 / d)
        elif kind == "scaled-exponential":
            scale = (target / math.factorial(d)) ** (1.0 / d)
        else:
            raise RegimeError(f"unsupported radius law kind: {kind!r}")
        return RadiusLawSpec(kind=kind, scale=scale, d=d)


@dataclass(frozen=True)
class SectorModelParams:
    alpha: float


@dataclass(frozen=True)
class RadiusModelParams:
    norm: NormSpec
    law_kind: str = "deterministic"


def normalize_count(count: int, n: int, r_n: float, k: int, regime: str) -> float:
    """Regime normalization of a raw count."""
    if regime in ("thermo-T1", "radius-T2"):
        return count / n
    return count / (float(n) ** k * r_n ** (2 * (k - 1)))


def _interior_mask_and_fraction(
    density: DensitySpec, coords: np.ndarray, margin: float
) -> tuple[np.ndarray | None, float | None]:
    """Vertices at least ``margin`` from the support boundary, plus the
    probability mass of that interior region (uniform densities only)."""
    if density.kind == "uniform-square":
        s = density.scale
        if s <= 2 * margin:
            return None, None
        mask = np.all((coords >= margin) & (coords <= s - margin), axis=1)
        return mask, ((s - 2 * margin) / s) ** density.d
    if density.kind == "uniform-disk":
        rho = density.scale
        if rho <= margin:
            return None, None
        mask = np.hypot(coords[:, 0], coords[:, 1]) <= rho - margin
        return mask, ((rho - margin) / rho) ** 2
    return np.ones(coords.shape[0], dtype=bool), 1.0


@dataclass
class ExperimentReport:
    """Per-cell rows, per-n aggregates, the evaluated limit, diagnostics."""

    regime: str
    pattern: MotifPattern
    config_echo: dict
    limit: LimitEstimate
    rows: list = field(default_factory=list)
    per_n: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    CSV_COLUMNS = (
        "regime", "n", "r_n", "seed", "induced", "isolated",
        "normalized", "limit", "limit_se",
    )

    def csv_text(self) -> str:
        def fmt(v):
            if isinstance(v, float):
                return format(v, ".12g")
            return str(v)

        lines = [",".join(self.CSV_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(fmt(row[c]) for c in self.CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    def json_dict(self) -> dict:
        return {
            "regime": self.regime,
            "pattern": {
                "k": self.pattern.k,
                "arcs": sorted(list(a) for a in self.pattern.arcs),
            },
            "config": self.config_echo,
            "limit": {
                "value": self.limit.value,
                "std_error": self.limit.std_error,
                "samples": self.limit.samples,
                "method": self.limit.method,
            },
            "rows": self.rows,
            "per_n": self.per_n,
            "diagnostics": self.diagnostics,
        }


def _cell_seed(master_seed: int, ni: int, si: int, role: int) -> int:
    """Stable per-cell integer seed, independent of execution order."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(ni, si, role))
    return int(ss.generate_state(2, np.uint64)[0])


def _run_cell(
    schedule: RegimeSchedule,
    pattern: MotifPattern,
    model,
    density: DensitySpec,
    n: int,
    ni: int,
    si: int,
    master_seed: int,
) -> dict:
    pts = sample_points(density, n, _cell_seed(master_seed, ni, si, 0))
    if isinstance(model, SectorModelParams):
        r_n = schedule.r_n(n)
        ys = sample_orientations(n, _cell_seed(master_seed, ni, si, 1))
        g = build_sector_digraph(pts, ys, SectorConfig(alpha=model.alpha, radius=r_n))
    else:
        law = schedule.radius_law(n, model.law_kind, density.d)
        radii = sample_radii(law, n, _cell_seed(master_seed, ni, si, 1))
        g = build_radius_digraph(pts, radii, model.norm)
        r_n = law.moment_d() ** (1.0 / density.d)
    result = census(g, pattern)
    count = (
        result.induced_count
        if schedule.regime == "sparse-induced-T4"
        else result.isolated_count
    )
    row = {
        "regime": schedule.regime,
        "n": n,
        "r_n": r_n,
        "seed": si,
        "induced": result.induced_count,
        "isolated": result.isolated_count,
        "normalized": normalize_count(count, n, r_n, pattern.k, schedule.regime),
    }
    mask, frac = _interior_mask_and_fraction(density, pts.coords, pattern.k * r_n)
    if mask is not None:
        interior = census(g, pattern, allowed=mask)
        icount = (
            interior.induced_count
            if schedule.regime == "sparse-induced-T4"
            else interior.isolated_count
        )
        row["interior_normalized"] = (
            normalize_count(icount, n, r_n, pattern.k, schedule.regime) / frac
        )
    return row


def _evaluate_limit(
    schedule: RegimeSchedule,
    pattern: MotifPattern,
    model,
    density: DensitySpec,
    master_seed: int,
    limit_samples: int,
    inner_samples: int,
) -> LimitEstimate:
    seed = _cell_seed(master_seed, 0, 0, 99)
    if schedule.regime == "thermo-T1":
        return thermodynamic_limit(
            pattern, model.alpha, schedule.lam, density,
            samples=limit_samples, seed=seed, inner_samples=inner_samples,
        )
    if schedule.regime == "radius-T2":
        return isolated_vertex_limit(
            density, model.norm, schedule.lam, samples=limit_samples, seed=seed
        )
    return estimate_mu(
        pattern, model.alpha, density, samples=limit_samples, seed=seed
    )


def run_convergence(
    schedule: RegimeSchedule,
    pattern: MotifPattern,
    model,
    density: DensitySpec,
    n_list,
    seeds_per_n: int = 20,
    master_seed: int = 0,
    *,
    limit_samples: int = 200_000,
    inner_samples: int = 4096,
    threads: int = 1,
) -> ExperimentReport:
    """Sweep n, simulate all seeds, evaluate the limit, and aggregate."""
    if pattern.k != schedule.k:
        raise RegimeError("pattern order does not match the schedule's k")
    schedule.check_density(density)
    if isinstance(model, SectorModelParams):
        if schedule.regime == "radius-T2":
            raise RegimeError("radius-T2 requires radius-model params")
        if pattern.k >= 2:
            feasible, _ = feasibility_probe(
                pattern, SectorConfig(alpha=model.alpha, radius=1.0),
                trials=4000, seed=_cell_seed(master_seed, 0, 0, 98),
            )
            if not feasible:
                raise RegimeError("pattern is infeasible for this model")
    elif isinstance(model, RadiusModelParams):
        if schedule.regime != "radius-T2":
            raise RegimeError("only radius-T2 uses radius-model params")
        if pattern.iso_codes() != single_vertex().iso_codes():
            raise RegimeError("radius-T2 counts the single-vertex pattern")
    else:
        raise RegimeError(f"unsupported model params: {type(model).__name__}")

    n_list = [int(n) for n in n_list]
    limit = _evaluate_limit(
        schedule, pattern, model, density, master_seed, limit_samples, inner_samples
    )
    cells = [(ni, n, si) for ni, n in enumerate(n_list) for si in range(seeds_per_n)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(
                    lambda c: _run_cell(
                        schedule, pattern, model, density, c[1], c[0], c[2], master_seed
                    ),
                    cells,
                )
            )
    else:
        results = [
            _run_cell(schedule, pattern, model, density, n, ni, si, master_seed)
            for ni, n, si in cells
        ]
    rows = sorted(results, key=lambda r: (r["n"], r["seed"]))
    for row in rows:
        row["limit"] = limit.value
        row["limit_se"] = limit.std_error

    per_n = []
    for n in n_list:
        vals = np.array([r["normalized"] for r in rows if r["n"] == n])
        mean = float(vals.mean())
        std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
        se = std / math.sqrt(vals.size) if vals.size > 1 else 0.0
        entry = {
            "n": n,
            "r_n": next(r["r_n"] for r in rows if r["n"] == n),
            "seeds": int(vals.size),
            "mean": mean,
            "std": std,
            "std_error": se,
            "max_abs_dev": float(np.abs(vals - mean).max()),
            "rel_err_vs_limit": (
                abs(mean - limit.value) / abs(limit.value) if limit.value else None
            ),
        }
        interior = [r.get("interior_normalized") for r in rows if r["n"] == n]
        if all(v is not None for v in interior):
            entry["interior_mean"] = float(np.mean(interior))
        per_n.append(entry)

    report = ExperimentReport(
        regime=schedule.regime,
        pattern=pattern,
        config_echo={
            "regime": schedule.regime,
            "k": schedule.k,
            "lam": schedule.lam,
            "beta": schedule.beta,
            "delta": schedule.delta,
            "model": (
                {"kind": "sector", "alpha": model.alpha}
                if isinstance(model, SectorModelParams)
                else {
                    "kind": "radius",
                    "norm": model.norm.kind,
                    "d": model.norm.d,
                    "law": model.law_kind,
                }
            ),
            "density": {
                "kind": density.kind,
                "d": density.d,
                "scale": density.scale,
            },
            "n_list": n_list,
            "seeds_per_n": seeds_per_n,
            "master_seed": master_seed,
            "limit_samples": limit_samples,
            "inner_samples": inner_samples,
        },
        limit=limit,
        rows=rows,
        per_n=per_n,
    )
    report.diagnostics = concentration_diagnostic(report)
    return report


def concentration_diagnostic(report: ExperimentReport) -> dict:
    """Across-seed spread per n and whether it shrinks along the sweep.

    An empirical reflection of the almost-sure convergence: the std/mean
    ratio of the normalized statistic should decrease as n grows.
    """
    entries = []
    for agg in report.per_n:
        mean = agg["mean"]
        entries.append(
            {
                "n": agg["n"],
                "std_over_mean": (agg["std"] / abs(mean)) if mean else None,
                "max_abs_dev": agg["max_abs_dev"],
                "max_dev_over_mean": (
                    agg["max_abs_dev"] / abs(mean) if mean else None
                ),
            }
        )
    diag = {"per_n": entries}
    ratios = [e["std_over_mean"] for e in entries if e["std_over_mean"] is not None]
    if len(ratios) >= 2:
        diag["spread_decreasing"] = all(
            b <= a for a, b in zip(ratios, ratios[1:])
        )
        diag["trend_flag"] = not diag["spread_decreasing"]
    return diag
