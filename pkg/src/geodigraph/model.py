"""Densities, norms, sector/radius parameters, and the membership predicates
that define arcs in both digraph models.

Conventions fixed here and relied on everywhere else:

* sector membership is CLOSED in both distance and angle,
* ball membership is OPEN in distance,
* angles are measured anticlockwise from the horizontal and normalized
  into [0, 2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import substream

TWO_PI = 2.0 * math.pi

DENSITY_KINDS = ("uniform-square", "uniform-disk", "isotropic-gaussian")
NORM_KINDS = ("L1", "L2", "Linf")
RADIUS_LAW_KINDS = ("deterministic", "scaled-uniform", "scaled-exponential")


class ModelError(ValueError):
    """Invalid model parameter or unsupported kind."""


@dataclass(frozen=True)
class DensitySpec:
    """A sampling density: uniform cube [0,s]^d, uniform disk of radius s
    (d=2 only), or isotropic gaussian with standard deviation s per axis."""

    kind: str
    d: int = 2
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise ModelError(f"unsupported density kind: {self.kind!r}")
        if self.d < 1:
            raise ModelError("dimension must be positive")
        if self.kind == "uniform-disk" and self.d != 2:
            raise ModelError("uniform-disk density is two-dimensional")
        if self.scale <= 0:
            raise ModelError("density scale must be positive")

    @property
    def f_max(self) -> float:
        """Essential supremum of the density, stored analytically."""
        if self.kind == "uniform-square":
            return self.scale ** (-self.d)
        if self.kind == "uniform-disk":
            return 1.0 / (math.pi * self.scale**2)
        return (TWO_PI * self.scale**2) ** (-self.d / 2.0)

    @property
    def uniform_value(self) -> float | None:
        """The constant density value on the support, or None if non-uniform."""
        if self.kind in ("uniform-square", "uniform-disk"):
            return self.f_max
        return None

    @property
    def bounded_support(self) -> bool:
        return self.kind != "isotropic-gaussian"

    def support_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Axis-aligned bounding box of the support, or None if unbounded."""
        if self.kind == "uniform-square":
            return np.zeros(self.d), np.full(self.d, self.scale)
        if self.kind == "uniform-disk":
            return np.full(2, -self.scale), np.full(2, self.scale)
        return None

    def pdf(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the density at an (m, d) array of points."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if self.kind == "uniform-square":
            inside = np.all((x >= 0.0) & (x <= self.scale), axis=-1)
            return np.where(inside, self.f_max, 0.0)
        if self.kind == "uniform-disk":
            inside = np.hypot(x[..., 0], x[..., 1]) <= self.scale
            return np.where(inside, self.f_max, 0.0)
        sq = (x**2).sum(axis=-1)
        return self.f_max * np.exp(-sq / (2.0 * self.scale**2))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform-square":
            return rng.random((n, self.d)) * self.scale
        if self.kind == "uniform-disk":
            rho = self.scale * np.sqrt(rng.random(n))
            ang = rng.random(n) * TWO_PI
            return np.column_stack((rho * np.cos(ang), rho * np.sin(ang)))
        return rng.standard_normal((n, self.d)) * self.scale


@dataclass(frozen=True)
class NormSpec:
    """A norm choice on R^d together with its unit-ball volume theta."""

    kind: str
    d: int = 2

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ModelError(f"unsupported norm kind: {self.kind!r}")
        if self.d < 1:
            raise ModelError("dimension must be positive")

    @property
    def theta(self) -> float:
        return unit_ball_volume(self)

    def distance(self, diff: np.ndarray) -> np.ndarray:
        """Norm of an (..., d) array of difference vectors."""
        diff = np.asarray(diff, dtype=float)
        if self.kind == "L2":
            return np.sqrt((diff**2).sum(axis=-1))
        if self.kind == "L1":
            return np.abs(diff).sum(axis=-1)
        return np.abs(diff).max(axis=-1)


def unit_ball_volume(norm: NormSpec) -> float:
    """Exact d-volume of the open unit ball for the given norm."""
    d = norm.d
    if norm.kind == "L2":
        return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    if norm.kind == "L1":
        return 2.0**d / math.factorial(d)
    return float(2**d)


@dataclass(frozen=True)
class SectorConfig:
    """Beam amplitude alpha in (0, 2*pi] and beam radius."""

    alpha: float
    radius: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= TWO_PI):
            raise ModelError("alpha must lie in (0, 2*pi]")
        if self.radius <= 0:
            raise ModelError("radius must be positive")


@dataclass(frozen=True)
class RadiusLawSpec:
    """Law of the per-vertex communication radius.

    * deterministic: the constant ``scale``.
    * scaled-uniform: uniform on (0, scale).
    * scaled-exponential: exponential with mean ``scale``.
    """

    kind: str
    scale: float
    d: int = 2

    def __post_init__(self):
        if self.kind not in RADIUS_LAW_KINDS:
            raise ModelError(f"unsupported radius law kind: {self.kind!r}")
        if self.scale <= 0:
            raise ModelError("radius law scale must be positive")
        if self.d < 1:
            raise ModelError("dimension must be positive")

    def moment_d(self) -> float:
        """E[R^d] in closed form."""
        if self.kind == "deterministic":
            return self.scale**self.d
        if self.kind == "scaled-uniform":
            return self.scale**self.d / (self.d + 1.0)
        return self.scale**self.d * math.factorial(self.d)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "deterministic":
            return np.full(n, self.scale)
        if self.kind == "scaled-uniform":
            return rng.random(n) * self.scale
        return rng.exponential(self.scale, size=n)


@dataclass(frozen=True)
class PointSet:
    """An immutable batch of sampled points plus its provenance."""

    coords: np.ndarray  # (n, d) float64
    seed: int | None = None

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=float)
        if coords.ndim != 2:
            raise ModelError("coords must be an (n, d) array")
        if not np.isfinite(coords).all():
            raise ModelError("coordinates must be finite")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def sample_points(density: DensitySpec, n: int, seed: int) -> PointSet:
    """Draw n i.i.d. points from the density, reproducibly by seed."""
    if n < 1:
        raise ModelError("n must be >= 1")
    coords = density.sample(n, substream(seed))
    return PointSet(coords=coords, seed=seed)


def sample_orientations(n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. uniform beam inclinations in [0, 2*pi)."""
    if n < 1:
        raise ModelError("n must be >= 1")
    return substream(seed).random(n) * TWO_PI


def sample_radii(law: RadiusLawSpec, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. radii from the law, reproducibly by seed."""
    if n < 1:
        raise ModelError("n must be >= 1")
    return law.sample(n, substream(seed))


def sector_mask(
    apex: np.ndarray,
    orientation: np.ndarray,
    alpha: float,
    radius: float,
    query: np.ndarray,
) -> np.ndarray:
    """Vectorized closed-sector membership test.

    ``apex`` and ``query`` are (..., 2) arrays, ``orientation`` broadcasts
    against their leading shape.  Both the grid builder and the brute-force
    oracle call this, so boundary rounding is identical on both paths.
    """
    apex = np.asarray(apex, dtype=float)
    query = np.asarray(query, dtype=float)
    dx = query[..., 0] - apex[..., 0]
    dy = query[..., 1] - apex[..., 1]
    dist = np.hypot(dx, dy)
    rel = np.mod(np.arctan2(dy, dx) - orientation, TWO_PI)
    return (dist <= radius) & (rel <= alpha)


def ball_mask(
    center: np.ndarray, radius: np.ndarray, norm: NormSpec, query: np.ndarray
) -> np.ndarray:
    """Vectorized open-ball membership test (strict inequality)."""
    diff = np.asarray(query, dtype=float) - np.asarray(center, dtype=float)
    return norm.distance(diff) < radius


def in_sector(apex, orientation: float, cfg: SectorConfig, query) -> bool:
    """True iff ``query`` lies in the closed sector of ``cfg`` at ``apex``."""
    apex = np.asarray(apex, dtype=float)
    query = np.asarray(query, dtype=float)
    if np.array_equal(apex, query):
        raise ModelError("query must differ from apex")
    return bool(sector_mask(apex, float(orientation), cfg.alpha, cfg.radius, query))


def in_ball(center, radius: float, norm: NormSpec, query) -> bool:
    """True iff ``query`` lies in the open ball of the given radius."""
    center = np.asarray(center, dtype=float)
    query = np.asarray(query, dtype=float)
    if np.array_equal(center, query):
        raise ModelError("query must differ from center")
    return bool(ball_mask(center, float(radius), norm, query))


def density_power_integral(
    density: DensitySpec, k: int, samples: int = 100_000, seed: int = 0
) -> tuple[float, float]:
    """Estimate the integral of f^k over R^d; returns (value, std_error).

    For uniform densities the integral is f0^(k-1) exactly (std_error 0).
    Otherwise it is the Monte Carlo estimate of E_f[f^(k-1)(X)].
    """
    if k < 1:
        raise ModelError("k must be >= 1")
    if k == 1:
        return 1.0, 0.0
    f0 = density.uniform_value
    if f0 is not None:
        return f0 ** (k - 1), 0.0
    rng = substream(seed)
    x = density.sample(samples, rng)
    vals = density.pdf(x) ** (k - 1)
    value = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    return value, se
