"""Induced and isolated motif counting.

Patterns are small digraphs up to digraph isomorphism; "connected" means
weak connectivity of the underlying undirected graph.  Counts are over
vertex subsets: a k-subset S contributes iff the induced digraph g[S] is
isomorphic to the pattern, and it is isolated iff additionally no arc
leaves S (incoming arcs are permitted).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .build import GeoDigraph, brute_force_build
from .model import (
    ModelError,
    NormSpec,
    PointSet,
    SectorConfig,
    TWO_PI,
    sector_mask,
)
from .rng import substream

MAX_PATTERN_ORDER = 8


class PatternError(ValueError):
    """Invalid motif pattern or pattern literal."""


def _encode(k: int, arcs) -> int:
    """Adjacency-matrix bit encoding; bit a*k+b set iff arc a->b."""
    code = 0
    for a, b in arcs:
        code |= 1 << (a * k + b)
    return code


def _permuted_codes(k: int, arcs) -> set[int]:
    """Encodings of every relabeling of the arc set (the isomorphism class)."""
    out = set()
    for p in itertools.permutations(range(k)):
        out.add(_encode(k, ((p[a], p[b]) for a, b in arcs)))
    return out


def _is_weakly_connected(k: int, arcs) -> bool:
    if k == 1:
        return True
    adj = {i: set() for i in range(k)}
    for a, b in arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == k


@dataclass(frozen=True)
class MotifPattern:
    """A target digraph on k vertices, closed under relabeling via its
    canonical code."""

    k: int
    arcs: frozenset

    def __post_init__(self):
        if not (1 <= self.k <= MAX_PATTERN_ORDER):
            raise PatternError(f"pattern order must be in [1, {MAX_PATTERN_ORDER}]")
        arcs = frozenset((int(a), int(b)) for a, b in self.arcs)
        for a, b in arcs:
            if a == b:
                raise PatternError("self-loops are not allowed")
            if not (0 <= a < self.k and 0 <= b < self.k):
                raise PatternError("arc endpoint out of range")
        if not _is_weakly_connected(self.k, arcs):
            raise PatternError("pattern must be weakly connected")
        object.__setattr__(self, "arcs", arcs)

    @property
    def canonical(self) -> bytes:
        return canonical_code(self)

    def iso_codes(self) -> frozenset:
        """All adjacency encodings isomorphic to this pattern."""
        return frozenset(_permuted_codes(self.k, self.arcs))


def canonical_code(pattern: MotifPattern) -> bytes:
    """Minimal adjacency encoding over all k! vertex orderings."""
    nbytes = (pattern.k * pattern.k + 7) // 8
    code = min(_permuted_codes(pattern.k, pattern.arcs))
    return code.to_bytes(nbytes, "big")


def parse_pattern(literal: str) -> MotifPattern:
    """Parse a pattern literal, e.g. ``k=3; arcs=0>1,1>0,1>2``.

    ``arcs`` may be empty or omitted only for k=1 (the single vertex).
    """
    k = None
    arcs = []
    for part in literal.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise PatternError(f"malformed pattern clause: {part!r}")
        key, _, val = part.partition("=")
        key, val = key.strip(), val.strip()
        if key == "k":
            try:
                k = int(val)
            except ValueError:
                raise PatternError(f"k must be an integer, got {val!r}") from None
        elif key == "arcs":
            if not val:
                continue
            for token in val.split(","):
                token = token.strip()
                ends = token.split(">")
                if len(ends) != 2:
                    raise PatternError(f"malformed arc token: {token!r}")
                try:
                    arcs.append((int(ends[0]), int(ends[1])))
                except ValueError:
                    raise PatternError(f"malformed arc token: {token!r}") from None
        else:
            raise PatternError(f"unknown pattern key: {key!r}")
    if k is None:
        raise PatternError("pattern literal must declare k")
    return MotifPattern(k=k, arcs=frozenset(arcs))


def single_vertex() -> MotifPattern:
    return MotifPattern(k=1, arcs=frozenset())


def mutual_pair() -> MotifPattern:
    return MotifPattern(k=2, arcs=frozenset({(0, 1), (1, 0)}))


def single_arc() -> MotifPattern:
    return MotifPattern(k=2, arcs=frozenset({(0, 1)}))


@lru_cache(maxsize=None)
def all_weakly_connected_patterns(k: int) -> tuple:
    """All weakly connected digraph patterns of order k, one per iso class."""
    if k == 1:
        return (single_vertex(),)
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
    seen = {}
    for bits in range(1 << len(pairs)):
        arcs = frozenset(p for i, p in enumerate(pairs) if bits >> i & 1)
        if not _is_weakly_connected(k, arcs):
            continue
        canon = min(_permuted_codes(k, arcs))
        if canon not in seen:
            seen[canon] = MotifPattern(k=k, arcs=arcs)
    return tuple(seen[c] for c in sorted(seen))


@dataclass(frozen=True)
class CensusResult:
    pattern: MotifPattern
    n: int
    induced_count: int
    isolated_count: int
    wall_time: float = 0.0

    def __post_init__(self):
        limit = math.comb(self.n, self.pattern.k)
        if not (0 <= self.isolated_count <= self.induced_count <= limit):
            raise PatternError("inconsistent census counts")


def enumerate_weakly_connected_subsets(g: GeoDigraph, k: int):
    """Yield each size-k vertex subset (as a sorted tuple) whose induced
    underlying undirected graph is connected, exactly once.

    Uses the canonical-parent (ESU) rule: grow from a root v using only
    vertices with index > v drawn from the exclusive neighborhood of the
    current subset.
    """
    if k < 1:
        raise PatternError("k must be >= 1")
    n = g.n
    if k == 1:
        for v in range(n):
            yield (v,)
        return
    und = [set(a.tolist()) for a in g.undirected_adjacency()]

    def extend(sub: list, ext: set, root: int, closed: set):
        if len(sub) == k - 1:
            for w in ext:
                yield tuple(sorted(sub + [w]))
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            new_closed = closed | und[w]
            new_ext = ext | {u for u in und[w] if u > root and u not in closed}
            new_ext.discard(w)
            yield from extend(sub + [w], new_ext, root, new_closed | {w})

    for v in range(n):
        ext0 = {u for u in und[v] if u > v}
        yield from extend([v], ext0, v, und[v] | {v})


def _induced_code(out_sets: list, subset: tuple) -> int:
    k = len(subset)
    code = 0
    for a, va in enumerate(subset):
        row = out_sets[va]
        for b, vb in enumerate(subset):
            if a != b and vb in row:
                code |= 1 << (a * k + b)
    return code


def _is_isolated(out_sets: list, subset: tuple, sset: set, k: int) -> bool:
    for v in subset:
        row = out_sets[v]
        if len(row) >= k or not row <= sset:
            return False
    return True


def census(
    g: GeoDigraph, pattern: MotifPattern, allowed: np.ndarray | None = None
) -> CensusResult:
    """Count induced and isolated pattern occurrences in one pass.

    ``allowed``, if given, is a boolean vertex mask; only subsets drawn
    entirely from allowed vertices are counted (isolation is still judged
    against the full digraph).  Used for interior-only diagnostics.
    """
    t0 = time.perf_counter()
    k = pattern.k
    if k == 1:
        degs = g.out_degrees
        if allowed is None:
            induced = g.n
            isolated = int((degs == 0).sum())
        else:
            induced = int(allowed.sum())
            isolated = int(((degs == 0) & allowed).sum())
        return CensusResult(pattern, g.n, induced, isolated, time.perf_counter() - t0)
    codes = pattern.iso_codes()
    out_sets = g.out_sets()
    induced = 0
    isolated = 0
    for subset in enumerate_weakly_connected_subsets(g, k):
        if allowed is not None and not all(allowed[v] for v in subset):
            continue
        if _induced_code(out_sets, subset) in codes:
            induced += 1
            if _is_isolated(out_sets, subset, set(subset), k):
                isolated += 1
    return CensusResult(pattern, g.n, induced, isolated, time.perf_counter() - t0)


def count_induced(g: GeoDigraph, pattern: MotifPattern) -> int:
    return census(g, pattern).induced_count


def count_isolated(g: GeoDigraph, pattern: MotifPattern) -> int:
    return census(g, pattern).isolated_count


def full_census(g: GeoDigraph, k: int) -> dict:
    """Counts for every order-k iso class at once: {canonical: (ind, iso)}.

    Single enumeration pass shared across patterns; used by the oracle
    equality suite.
    """
    out_sets = g.out_sets()
    tally: dict = {}
    canon_of: dict = {}
    nbytes = (k * k + 7) // 8
    for subset in enumerate_weakly_connected_subsets(g, k):
        code = _induced_code(out_sets, subset)
        canon = canon_of.get(code)
        if canon is None:
            canon = min(
                _encode(k, ((p[a], p[b]) for a in range(k) for b in range(k)
                            if a != b and code >> (a * k + b) & 1))
                for p in itertools.permutations(range(k))
            ).to_bytes(nbytes, "big")
            canon_of[code] = canon
        ind, iso = tally.get(canon, (0, 0))
        ind += 1
        if _is_isolated(out_sets, subset, set(subset), k):
            iso += 1
        tally[canon] = (ind, iso)
    return tally


def brute_force_census(g: GeoDigraph, pattern: MotifPattern) -> CensusResult:
    """Exact counts by checking every one of the C(n, k) subsets."""
    t0 = time.perf_counter()
    k = pattern.k
    codes = pattern.iso_codes()
    out_sets = g.out_sets()
    induced = 0
    isolated = 0
    for subset in itertools.combinations(range(g.n), k):
        if _induced_code(out_sets, subset) in codes:
            induced += 1
            if _is_isolated(out_sets, subset, set(subset), k):
                isolated += 1
    return CensusResult(pattern, g.n, induced, isolated, time.perf_counter() - t0)


def sector_config_codes(coords: np.ndarray, orientations: np.ndarray, alpha: float) -> np.ndarray:
    """Adjacency encodings of unit-radius sector digraphs, batched.

    ``coords`` is (m, k, 2), ``orientations`` is (m, k); returns (m,) int64
    codes compatible with MotifPattern.iso_codes().
    """
    m, k, _ = coords.shape
    codes = np.zeros(m, dtype=np.int64)
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            mask = sector_mask(coords[:, a], orientations[:, a], alpha, 1.0, coords[:, b])
            codes |= mask.astype(np.int64) << (a * k + b)
    return codes


def radius_config_codes(coords: np.ndarray, radii: np.ndarray, norm: NormSpec) -> np.ndarray:
    """Adjacency encodings of ball digraphs, batched like sector_config_codes."""
    m, k, _ = coords.shape
    codes = np.zeros(m, dtype=np.int64)
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            diff = coords[:, b] - coords[:, a]
            mask = norm.distance(diff) < radii[:, a]
            codes |= mask.astype(np.int64) << (a * k + b)
    return codes


def match_codes(codes: np.ndarray, pattern: MotifPattern) -> np.ndarray:
    """Boolean mask of which batched configuration codes match the pattern."""
    return np.isin(codes, np.fromiter(pattern.iso_codes(), dtype=np.int64))


def feasibility_probe(
    pattern: MotifPattern,
    params,
    trials: int = 10_000,
    seed: int = 0,
) -> tuple[bool, float]:
    """Sample random k-point unit-scale configurations and report whether
    any induces the pattern; returns (feasible, hit_rate).

    ``params`` is a SectorConfig (only alpha matters; geometry is probed at
    unit radius) or a NormSpec (radii drawn uniform on (0, 2k)).
    """
    if trials < 1:
        raise PatternError("trials must be >= 1")
    k = pattern.k
    rng = substream(seed)
    if k == 1:
        return True, 1.0
    # one apex pinned at the origin, the rest uniform in a disk/cube of radius k
    if isinstance(params, SectorConfig):
        rho = k * np.sqrt(rng.random((trials, k - 1)))
        ang = rng.random((trials, k - 1)) * TWO_PI
        others = np.stack((rho * np.cos(ang), rho * np.sin(ang)), axis=-1)
        coords = np.concatenate((np.zeros((trials, 1, 2)), others), axis=1)
        ys = rng.random((trials, k)) * TWO_PI
        codes = sector_config_codes(coords, ys, params.alpha)
    elif isinstance(params, NormSpec):
        d = params.d
        others = (rng.random((trials, k - 1, d)) * 2.0 - 1.0) * k
        coords = np.concatenate((np.zeros((trials, 1, d)), others), axis=1)
        radii = rng.random((trials, k)) * (2.0 * k)
        codes = radius_config_codes(coords, radii, params)
    else:
        raise ModelError(f"unsupported probe params: {type(params).__name__}")
    hits = int(match_codes(codes, pattern).sum())
    return hits > 0, hits / trials
