"""Independent Monte Carlo evaluation of the limiting constants.

Three families of limits are computed here:

* the thermodynamic-regime functional for isolated motifs in the sector
  model (via the per-intensity density phi_T(t)),
* the isolated-vertex limit for the random-radius ball model,
* the sparse-regime constant mu_T, which factorizes into a purely
  geometric integral times the integral of f^k.

Estimators use the fact that any weakly connected configuration of k
unit-range sectors lies inside the disk of radius k around the first apex,
so sampling the free apexes uniformly in that disk is an exact truncation:
the configuration indicator vanishes outside.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .census import (
    MotifPattern,
    match_codes,
    sector_config_codes,
)
from .model import DensitySpec, NormSpec, TWO_PI, density_power_integral
from .rng import substream


class LimitError(ValueError):
    """Invalid limit-evaluation request."""


@dataclass(frozen=True)
class LimitEstimate:
    """A limiting constant with its Monte Carlo uncertainty."""

    value: float
    std_error: float
    samples: int
    method: str  # "closed-form" | "monte-carlo"
    seed: int | None = None
    inner_std_error: float | None = None

    def __post_init__(self):
        if self.std_error < 0:
            raise LimitError("std_error must be nonnegative")
        if self.method == "closed-form" and self.std_error != 0:
            raise LimitError("closed forms carry zero std_error")


@dataclass(frozen=True)
class SectorConfiguration:
    """k unit-radius sectors: apex points (first at the origin), beam
    orientations, and the common amplitude."""

    apexes: np.ndarray  # (k, 2)
    orientations: np.ndarray  # (k,)
    alpha: float

    def __post_init__(self):
        apexes = np.ascontiguousarray(self.apexes, dtype=float)
        orientations = np.ascontiguousarray(self.orientations, dtype=float)
        if apexes.ndim != 2 or apexes.shape[1] != 2:
            raise LimitError("apexes must be a (k, 2) array")
        if orientations.shape != (apexes.shape[0],):
            raise LimitError("one orientation per apex required")
        if np.any(apexes[0] != 0.0):
            raise LimitError("first apex must be at the origin")
        apexes.setflags(write=False)
        orientations.setflags(write=False)
        object.__setattr__(self, "apexes", apexes)
        object.__setattr__(self, "orientations", orientations)

    @property
    def k(self) -> int:
        return self.apexes.shape[0]


def _union_hit_fractions(
    apexes: np.ndarray,
    orientations: np.ndarray,
    alpha: float,
    inner_samples: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Hit-or-miss union areas for a batch of sector configurations.

    ``apexes`` is (m, k, 2), ``orientations`` is (m, k).  Returns per-config
    (area, std_error) arrays and the mean box area (for diagnostics).
    """
    m, k, _ = apexes.shape
    lo = apexes.min(axis=1) - 1.0
    hi = apexes.max(axis=1) + 1.0
    span = hi - lo
    box_area = span[:, 0] * span[:, 1]
    u = rng.random((m, inner_samples, 2))
    pts = lo[:, None, :] + u * span[:, None, :]
    hit = np.zeros((m, inner_samples), dtype=bool)
    for i in range(k):
        dx = pts[..., 0] - apexes[:, i, 0][:, None]
        dy = pts[..., 1] - apexes[:, i, 1][:, None]
        dist = np.hypot(dx, dy)
        rel = np.mod(np.arctan2(dy, dx) - orientations[:, i][:, None], TWO_PI)
        hit |= (dist <= 1.0) & (rel <= alpha)
    p = hit.mean(axis=1)
    areas = p * box_area
    se = box_area * np.sqrt(p * (1.0 - p) / inner_samples)
    return areas, se, float(box_area.mean())


def sector_union_area(
    config: SectorConfiguration, mc_samples: int = 65_536, seed: int = 0
) -> LimitEstimate:
    """Hit-or-miss Monte Carlo area of the union of k unit-radius sectors."""
    if mc_samples < 1:
        raise LimitError("mc_samples must be >= 1")
    rng = substream(seed)
    areas, se, _ = _union_hit_fractions(
        config.apexes[None], config.orientations[None], config.alpha, mc_samples, rng
    )
    return LimitEstimate(
        value=float(areas[0]),
        std_error=float(se[0]),
        samples=mc_samples,
        method="monte-carlo",
        seed=seed,
    )


def _sample_configurations(
    k: int, m: int, rng: np.random.Generator, disk_radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """m configurations: first apex at origin, k-1 apexes uniform in the
    disk of the given radius, orientations uniform."""
    rho = disk_radius * np.sqrt(rng.random((m, k - 1)))
    ang = rng.random((m, k - 1)) * TWO_PI
    others = np.stack((rho * np.cos(ang), rho * np.sin(ang)), axis=-1)
    apexes = np.concatenate((np.zeros((m, 1, 2)), others), axis=1)
    orientations = rng.random((m, k)) * TWO_PI
    return apexes, orientations


def estimate_phi(
    pattern: MotifPattern,
    alpha: float,
    t: float,
    samples: int = 20_000,
    seed: int = 0,
    inner_samples: int = 4096,
    disk_radius: float | None = None,
) -> LimitEstimate:
    """Per-intensity density of isolated pattern occurrences at intensity t.

    k=1 is the closed form exp(-t*alpha/2).  For k>=2 the estimator is

        t^(k-1)/(k-1)! * (pi*rho^2)^(k-1) * mean(h * exp(-t*|S|))

    with the free apexes sampled uniformly in the disk of radius
    rho = disk_radius (default k, which contains the support of h for any
    weakly connected pattern), orientations sampled uniformly (absorbing
    the angular integrals), and |S| the union area of the k unit sectors
    supplied by an inner hit-or-miss estimate.  The inner standard error is
    reported so the (second-order) bias of exp(-t*|S|) can be bounded.
    """
    if t < 0:
        raise LimitError("t must be nonnegative")
    k = pattern.k
    if k == 1:
        return LimitEstimate(
            value=math.exp(-t * alpha / 2.0),
            std_error=0.0,
            samples=0,
            method="closed-form",
            seed=seed,
        )
    if samples < 2:
        raise LimitError("samples must be >= 2")
    rho = float(disk_radius) if disk_radius is not None else float(k)
    rng = substream(seed)
    vals = np.zeros(samples)
    inner_se_acc = 0.0
    hits = 0
    chunk = max(1, 2_000_000 // max(inner_samples, 1))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        apexes, orientations = _sample_configurations(k, m, rng, rho)
        codes = sector_config_codes(apexes, orientations, alpha)
        matched = match_codes(codes, pattern)
        idx = np.nonzero(matched)[0]
        if idx.size:
            areas, se, _ = _union_hit_fractions(
                apexes[idx], orientations[idx], alpha, inner_samples, rng
            )
            vals[done + idx] = np.exp(-t * areas)
            inner_se_acc += float(se.sum())
            hits += idx.size
        done += m
    prefactor = t ** (k - 1) / math.factorial(k - 1) * (math.pi * rho**2) ** (k - 1)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    if hits == 0:
        warnings.warn(
            "pattern produced no hits; it is likely infeasible at this alpha",
            stacklevel=2,
        )
    return LimitEstimate(
        value=prefactor * mean,
        std_error=prefactor * se,
        samples=samples,
        method="monte-carlo",
        seed=seed,
        inner_std_error=(inner_se_acc / hits if hits else None),
    )


def thermodynamic_limit(
    pattern: MotifPattern,
    alpha: float,
    lam: float,
    density: DensitySpec,
    samples: int = 20_000,
    seed: int = 0,
    inner_samples: int = 4096,
) -> LimitEstimate:
    """Limit of the per-vertex isolated-pattern count in the regime where
    n * r_n^2 -> lam: (1/k) * E_f[phi_T(lam * f(X))].

    For uniform densities this collapses to (1/k) * phi_T(lam * f0); for the
    gaussian density the outer expectation over X ~ f is itself sampled.
    """
    if lam <= 0:
        raise LimitError("lam must be positive")
    k = pattern.k
    f0 = density.uniform_value
    if f0 is not None:
        est = estimate_phi(
            pattern, alpha, lam * f0, samples=samples, seed=seed, inner_samples=inner_samples
        )
        return LimitEstimate(
            value=est.value / k,
            std_error=est.std_error / k,
            samples=est.samples,
            method=est.method,
            seed=seed,
            inner_std_error=est.inner_std_error,
        )
    rng = substream(seed, 1)
    if k == 1:
        x = density.sample(samples, rng)
        vals = np.exp(-lam * density.pdf(x) * alpha / 2.0)
        return LimitEstimate(
            value=float(vals.mean()),
            std_error=float(vals.std(ddof=1) / math.sqrt(samples)),
            samples=samples,
            method="monte-carlo",
            seed=seed,
        )
    outer = min(64, max(8, samples // 1000))
    per = max(samples // outer, 500)
    x = density.sample(outer, rng)
    ts = lam * density.pdf(x)
    vals = np.empty(outer)
    ses = np.empty(outer)
    for i, t in enumerate(ts):
        est = estimate_phi(
            pattern, alpha, float(t), samples=per, seed=seed + 7919 * (i + 1),
            inner_samples=inner_samples,
        )
        vals[i] = est.value
        ses[i] = est.std_error
    value = float(vals.mean()) / k
    se = math.sqrt(float(vals.var(ddof=1)) / outer + float((ses**2).mean()) / outer) / k
    return LimitEstimate(
        value=value, std_error=se, samples=outer * per, method="monte-carlo", seed=seed
    )


def isolated_vertex_limit(
    density: DensitySpec,
    norm: NormSpec,
    lam: float,
    samples: int = 200_000,
    seed: int = 0,
) -> LimitEstimate:
    """Limit of the isolated-vertex fraction in the ball model with
    n * E[R^d] -> lam: the integral of exp(-theta*lam*f) f over R^d."""
    if lam < 0:
        raise LimitError("lam must be nonnegative")
    theta = norm.theta
    f0 = density.uniform_value
    if lam == 0:
        return LimitEstimate(1.0, 0.0, 0, "closed-form", seed)
    if f0 is not None:
        return LimitEstimate(math.exp(-theta * lam * f0), 0.0, 0, "closed-form", seed)
    rng = substream(seed)
    x = density.sample(samples, rng)
    vals = np.exp(-theta * lam * density.pdf(x))
    return LimitEstimate(
        value=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / math.sqrt(samples)),
        samples=samples,
        method="monte-carlo",
        seed=seed,
    )


def estimate_mu(
    pattern: MotifPattern,
    alpha: float,
    density: DensitySpec,
    samples: int = 200_000,
    seed: int = 0,
    disk_radius: float | None = None,
) -> LimitEstimate:
    """Sparse-regime constant: the normalized pattern count converges to

        mu = [1/k! * (pi*rho^2)^(k-1) * P(h = 1)] * integral(f^k)

    where P(h = 1) is over free apexes uniform in the disk of radius rho
    and uniform orientations.  The two factors are estimated independently
    and their errors propagate in quadrature.
    """
    k = pattern.k
    if k < 2:
        raise LimitError("mu is defined for patterns of order >= 2")
    if samples < 2:
        raise LimitError("samples must be >= 2")
    rho = float(disk_radius) if disk_radius is not None else float(k)
    rng = substream(seed)
    apexes, orientations = _sample_configurations(k, samples, rng, rho)
    codes = sector_config_codes(apexes, orientations, alpha)
    h = match_codes(codes, pattern).astype(float)
    p = float(h.mean())
    p_se = float(h.std(ddof=1) / math.sqrt(samples))
    if p == 0.0:
        warnings.warn(
            "pattern produced no hits; it is likely infeasible at this alpha",
            stacklevel=2,
        )
    geo = (math.pi * rho**2) ** (k - 1) / math.factorial(k) * p
    geo_se = (math.pi * rho**2) ** (k - 1) / math.factorial(k) * p_se
    fk, fk_se = density_power_integral(density, k, samples=samples, seed=seed + 1)
    value = geo * fk
    se = math.sqrt((geo * fk_se) ** 2 + (fk * geo_se) ** 2)
    return LimitEstimate(
        value=value,
        std_error=se,
        samples=samples,
        method="monte-carlo",
        seed=seed,
    )


def closed_form_mu_k2(
    pattern: MotifPattern, alpha: float, density: DensitySpec
) -> LimitEstimate:
    """Analytic oracle for the two order-2 patterns.

    mutual pair: (pi/2) * (alpha/2pi)^2 * integral(f^2)
    single arc:   pi * (alpha/2pi) * (1 - alpha/2pi) * integral(f^2)
    """
    if pattern.k != 2:
        raise LimitError("closed form available only for k=2 patterns")
    q = alpha / TWO_PI
    f2 = _exact_f_squared(density)
    codes = pattern.iso_codes()
    if codes == MotifPattern(2, frozenset({(0, 1), (1, 0)})).iso_codes():
        value = math.pi / 2.0 * q * q * f2
    elif codes == MotifPattern(2, frozenset({(0, 1)})).iso_codes():
        value = math.pi * q * (1.0 - q) * f2
    else:
        raise LimitError("unrecognized k=2 pattern")
    return LimitEstimate(value=value, std_error=0.0, samples=0, method="closed-form")


def _exact_f_squared(density: DensitySpec) -> float:
    """integral of f^2 in closed form for each supported density family."""
    f0 = density.uniform_value
    if f0 is not None:
        return f0
    # isotropic gaussian: product of two gaussians integrates to
    # (4*pi*sigma^2)^(-d/2)
    return (4.0 * math.pi * density.scale**2) ** (-density.d / 2.0)
