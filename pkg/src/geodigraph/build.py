"""Arc-structure construction for both digraph models.

A uniform grid with cell size equal to the interaction radius restricts
candidate arc endpoints to the 3^d surrounding cells; the brute-force
builders check all ordered pairs and serve as the correctness oracle.
Adjacency is stored in compressed-sparse-row form, sorted per row.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass

import numpy as np

from .model import (
    ModelError,
    NormSpec,
    PointSet,
    SectorConfig,
    ball_mask,
    sector_mask,
)


@dataclass(frozen=True)
class GeoDigraph:
    """Immutable digraph over a point set.

    ``marks`` holds per-vertex beam orientations (sector model) or
    per-vertex radii (radius model).  ``params`` is the SectorConfig or
    NormSpec used at build time (None for imported fixtures).
    """

    model: str  # "sector" | "radius"
    points: PointSet
    marks: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    params: object = None

    def __post_init__(self):
        for name in ("marks", "indptr", "indices"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.points.n

    def out(self, i: int) -> np.ndarray:
        """Sorted out-neighbor indices of vertex i."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def arc_count(self) -> int:
        return int(self.indices.shape[0])

    def has_arc(self, i: int, j: int) -> bool:
        row = self.out(i)
        pos = np.searchsorted(row, j)
        return pos < row.shape[0] and row[pos] == j

    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        """All arcs as parallel (src, dst) arrays."""
        src = np.repeat(np.arange(self.n), self.out_degrees)
        return src, self.indices.copy()

    def out_sets(self) -> list[frozenset]:
        """Per-vertex out-neighborhoods as frozensets (census fast path)."""
        return [
            frozenset(self.indices[self.indptr[i] : self.indptr[i + 1]].tolist())
            for i in range(self.n)
        ]

    def undirected_adjacency(self) -> list[np.ndarray]:
        """Sorted neighbor lists of the underlying undirected graph."""
        src, dst = self.arcs()
        a = np.concatenate((src, dst))
        b = np.concatenate((dst, src))
        order = np.lexsort((b, a))
        a, b = a[order], b[order]
        adj: list[np.ndarray] = []
        counts = np.bincount(a, minlength=self.n)
        ptr = np.concatenate(([0], np.cumsum(counts)))
        for i in range(self.n):
            adj.append(np.unique(b[ptr[i] : ptr[i + 1]]))
        return adj

    def to_text(self) -> str:
        """Serialize in the plain-text exchange format."""
        buf = io.StringIO()
        buf.write(f"{self.n} {self.points.d} {self.model}\n")
        for i in range(self.n):
            coords = " ".join(format(c, ".17g") for c in self.points.coords[i])
            buf.write(f"{coords} {format(float(self.marks[i]), '.17g')}\n")
        for i in range(self.n):
            buf.write(" ".join(str(int(j)) for j in self.out(i)) + "\n")
        return buf.getvalue()


def digraph_from_text(text: str) -> GeoDigraph:
    """Parse the plain-text exchange format (build params are not stored)."""
    lines = text.splitlines()
    header = lines[0].split()
    n, d, model = int(header[0]), int(header[1]), header[2]
    if model not in ("sector", "radius"):
        raise ModelError(f"unknown model tag: {model!r}")
    coords = np.empty((n, d))
    marks = np.empty(n)
    for i in range(n):
        vals = [float(v) for v in lines[1 + i].split()]
        coords[i] = vals[:d]
        marks[i] = vals[d]
    rows = []
    for i in range(n):
        rows.append(sorted(int(v) for v in lines[1 + n + i].split()))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.array(
        [j for r in rows for j in r] or [], dtype=np.int64
    )
    return GeoDigraph(
        model=model,
        points=PointSet(coords=coords),
        marks=marks,
        indptr=indptr,
        indices=indices,
    )


def _csr_from_arcs(n: int, src: np.ndarray, dst: np.ndarray):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=n))
    return indptr, dst.astype(np.int64)


def _grid_candidate_pairs(coords: np.ndarray, cell_size: float):
    """Yield (src, dst) candidate index arrays from 3^d neighboring cells.

    Each ordered pair (i, j) with j in one of the 3^d cells around i's cell
    is produced exactly once (including i == j, which callers drop).
    """
    n, d = coords.shape
    cells = np.floor(coords / cell_size).astype(np.int64)
    # shift into a padded index box so every neighbor cell id is encodable
    cells = cells - cells.min(axis=0) + 1
    dims = cells.max(axis=0) + 2
    strides = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    cid = cells @ strides
    order = np.argsort(cid, kind="stable")
    sorted_cid = cid[order]
    all_src = np.arange(n, dtype=np.int64)
    for off in itertools.product((-1, 0, 1), repeat=d):
        ncid = cid + np.dot(np.array(off, dtype=np.int64), strides)
        left = np.searchsorted(sorted_cid, ncid, side="left")
        right = np.searchsorted(sorted_cid, ncid, side="right")
        counts = right - left
        total = int(counts.sum())
        if total == 0:
            continue
        src = np.repeat(all_src, counts)
        starts = np.repeat(left, counts)
        shift = np.concatenate(([0], np.cumsum(counts)[:-1]))
        pos = starts + np.arange(total) - np.repeat(shift, counts)
        yield src, order[pos]


def build_sector_digraph(
    points: PointSet, orientations: np.ndarray, cfg: SectorConfig
) -> GeoDigraph:
    """Grid-accelerated construction of the sector-model digraph."""
    if points.d != 2:
        raise ModelError("sector model requires dimension 2")
    orientations = np.asarray(orientations, dtype=float)
    if orientations.shape != (points.n,):
        raise ModelError("orientations length must equal point count")
    coords = points.coords
    srcs, dsts = [], []
    for src, dst in _grid_candidate_pairs(coords, cfg.radius):
        keep = src != dst
        src, dst = src[keep], dst[keep]
        mask = sector_mask(
            coords[src], orientations[src], cfg.alpha, cfg.radius, coords[dst]
        )
        srcs.append(src[mask])
        dsts.append(dst[mask])
    src = np.concatenate(srcs) if srcs else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dsts) if dsts else np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_arcs(points.n, src, dst)
    return GeoDigraph(
        model="sector",
        points=points,
        marks=orientations,
        indptr=indptr,
        indices=indices,
        params=cfg,
    )


def build_radius_digraph(
    points: PointSet, radii: np.ndarray, norm: NormSpec
) -> GeoDigraph:
    """Grid-accelerated construction of the random-radius ball digraph.

    The grid cell size is the maximum radius, so a single heavy-tailed draw
    can degrade candidate generation toward O(n^2); the intended regimes
    keep radii small.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (points.n,):
        raise ModelError("radii length must equal point count")
    if np.any(radii <= 0):
        raise ModelError("radii must be positive")
    if norm.d != points.d:
        raise ModelError("norm dimension must match point dimension")
    coords = points.coords
    cell = float(radii.max())
    srcs, dsts = [], []
    for src, dst in _grid_candidate_pairs(coords, cell):
        keep = src != dst
        src, dst = src[keep], dst[keep]
        mask = ball_mask(coords[src], radii[src], norm, coords[dst])
        srcs.append(src[mask])
        dsts.append(dst[mask])
    src = np.concatenate(srcs) if srcs else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dsts) if dsts else np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_arcs(points.n, src, dst)
    return GeoDigraph(
        model="radius",
        points=points,
        marks=radii,
        indptr=indptr,
        indices=indices,
        params=norm,
    )


def brute_force_build(points: PointSet, marks: np.ndarray, params) -> GeoDigraph:
    """O(n^2) oracle builder; dispatches on the parameter type."""
    marks = np.asarray(marks, dtype=float)
    n = points.n
    coords = points.coords
    i_idx, j_idx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i_idx, j_idx = i_idx.ravel(), j_idx.ravel()
    keep = i_idx != j_idx
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    if isinstance(params, SectorConfig):
        if points.d != 2:
            raise ModelError("sector model requires dimension 2")
        mask = sector_mask(
            coords[i_idx], marks[i_idx], params.alpha, params.radius, coords[j_idx]
        )
        model = "sector"
    elif isinstance(params, NormSpec):
        if np.any(marks <= 0):
            raise ModelError("radii must be positive")
        mask = ball_mask(coords[i_idx], marks[i_idx], params, coords[j_idx])
        model = "radius"
    else:
        raise ModelError(f"unsupported build params: {type(params).__name__}")
    indptr, indices = _csr_from_arcs(n, i_idx[mask], j_idx[mask])
    return GeoDigraph(
        model=model,
        points=points,
        marks=marks,
        indptr=indptr,
        indices=indices,
        params=params,
    )


def underlying_undirected_edges(g: GeoDigraph) -> set[tuple[int, int]]:
    """Edge set {i, j} (as sorted tuples) of the underlying undirected graph."""
    src, dst = g.arcs()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    pairs = np.unique(np.column_stack((lo, hi)), axis=0) if lo.size else np.empty((0, 2), int)
    return {(int(a), int(b)) for a, b in pairs}
