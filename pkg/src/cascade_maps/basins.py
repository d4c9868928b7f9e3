"""Basin-of-attraction rendering and accumulation diagnostics.

Every grid cell launches one lattice orbit from the cell centre; after a
transient the excesses of a fixed window are summed into the cell's
fingerprint, fingerprints are bucketed into classes, and classes are split
into 4-connected components.  Corner boxes and interior disks then count
how many distinct components they meet, the finite-resolution proxy for
basin components accumulating at the corners and at interior points.

Mirror symmetry is preserved exactly: on the default unit square the cell
centres are stored as offsets ``u`` from 1/2 with ``u`` exactly
antisymmetric across the grid, and the first logistic application is
evaluated as ``1 - 4u**2``, which is bit-identical for ``+u`` and ``-u``.
Reflected cells therefore run bit-identical orbits from step one, making
the class map exactly symmetric under ``(x, y) -> (1-x, 1-y)``.

Cells are independent work items: the renderer optionally splits the grid
into row blocks across threads, each writing its own slice, so the output
is bit-identical for any worker count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .lattice import cascade_batch
from .scalar import Threshold

__all__ = [
    "GridSpec",
    "BasinGrid",
    "ComponentStats",
    "render_basins",
    "cell_fingerprint",
    "label_components",
    "corner_accumulation",
    "interior_accumulation",
    "CLASS_TOL",
]

#: Absolute fingerprint bucketing tolerance.  Super-stable attractors give
#: exactly equal sums; distinct attractors at the parameters studied differ
#: by far more than this.
CLASS_TOL = 1e-6

_UNIT = (0.0, 1.0)
_CORNERS = ("00", "01", "10", "11")

#: 4-connectivity structuring element for component labelling.
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class GridSpec:
    """Sampling protocol for a two-axis basin slice.

    Cells are sampled at their centres.  ``pinned_sites`` holds constant
    values for sites 3..N when rendering a 2-D slice of a larger lattice.
    """

    resolution: int = 499
    x_range: tuple[float, float] = _UNIT
    y_range: tuple[float, float] = _UNIT
    pinned_sites: tuple[float, ...] = ()
    transient: int = 100
    window: int = 12

    def __post_init__(self):
        if self.resolution < 2:
            raise ParameterError("resolution must be >= 2")
        for lo, hi in (self.x_range, self.y_range):
            if not (0.0 <= lo < hi <= 1.0):
                raise ParameterError("domain ranges must be sub-intervals of [0, 1]")
        if any(not 0.0 <= p <= 1.0 for p in self.pinned_sites):
            raise ParameterError("pinned site values must lie in [0, 1]")
        if self.transient < 0:
            raise ParameterError("transient must be >= 0")
        if self.window < 1:
            raise ParameterError("window must be >= 1")

    @property
    def n_sites(self) -> int:
        return 2 + len(self.pinned_sites)


@dataclass(frozen=True)
class BasinGrid:
    """Rendered fingerprints and their bucketed class labels.

    Arrays are indexed ``[i, j]`` with ``i`` the x cell index and ``j`` the
    y cell index.  ``class_table`` maps each dense class id to its
    representative (lowest) fingerprint; ids are assigned in ascending
    representative order.
    """

    spec: GridSpec
    fingerprints: np.ndarray
    classes: np.ndarray
    class_table: dict[int, float]

    @property
    def n_classes(self) -> int:
        return len(self.class_table)


@dataclass(frozen=True)
class ComponentStats:
    """4-connected components of the class map plus accumulation counts."""

    component_ids: np.ndarray  # 1-based ids over the full grid
    class_component_counts: dict[int, int]
    total_components: int
    corner_counts: dict[tuple[str, float], int]
    disk_counts: dict[float, int]
    point: Optional[tuple[float, float]]


def _axis_offsets(axis_range: tuple[float, float], resolution: int) -> np.ndarray:
    """Cell-centre offsets from 1/2 along one axis.

    On the full unit axis the offsets are computed from exact integer
    numerators, so ``u[R-1-i] == -u[i]`` holds bit-exactly.
    """
    lo, hi = axis_range
    r = resolution
    if (lo, hi) == _UNIT:
        num = 2.0 * np.arange(r) + (1.0 - r)
        return num / (2.0 * r)
    width = hi - lo
    return lo + (np.arange(r) + 0.5) * (width / r) - 0.5


def _axis_centers(axis_range: tuple[float, float], resolution: int) -> np.ndarray:
    return _axis_offsets(axis_range, resolution) + 0.5


def _window_sums(u: np.ndarray, c1: float, transient: int, window: int) -> np.ndarray:
    """Fingerprints for a block of cells given centre offsets ``u`` (m, N).

    The first step maps each site through ``1 - 4u**2`` (the symmetric form
    of the logistic map at ``1/2 + u``); later steps use the standard form.
    """
    y = 1.0 - 4.0 * (u * u)
    x, e = cascade_batch(y, c1)
    total = np.zeros(u.shape[0])
    if transient < 1:
        total += e
    k = 1
    while k < transient + window:
        y = 4.0 * x * (1.0 - x)
        x, e = cascade_batch(y, c1)
        k += 1
        if k > transient:
            total += e
    return total


def _block_offsets(
    ux: np.ndarray, uy: np.ndarray, spec: GridSpec, i0: int, i1: int
) -> np.ndarray:
    """Offsets array (m, N) for cells with x index in [i0, i1)."""
    r = spec.resolution
    m = (i1 - i0) * r
    u = np.empty((m, spec.n_sites))
    u[:, 0] = np.repeat(ux[i0:i1], r)
    u[:, 1] = np.tile(uy, i1 - i0)
    for k, pinned in enumerate(spec.pinned_sites):
        u[:, 2 + k] = pinned - 0.5
    return u


def render_basins(t: Threshold, spec: GridSpec, workers: int = 1) -> BasinGrid:
    """Render the fingerprint grid and bucket it into classes.

    Deterministic and schedule independent: cells are pure functions of
    their centre, and each worker writes a disjoint row block.
    """
    r = spec.resolution
    ux = _axis_offsets(spec.x_range, r)
    uy = _axis_offsets(spec.y_range, r)
    fingerprints = np.empty((r, r))

    def run_block(i0: int, i1: int) -> None:
        u = _block_offsets(ux, uy, spec, i0, i1)
        sums = _window_sums(u, t.c1, spec.transient, spec.window)
        fingerprints[i0:i1] = sums.reshape(i1 - i0, r)

    if workers <= 1:
        run_block(0, r)
    else:
        bounds = np.linspace(0, r, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_block, int(bounds[k]), int(bounds[k + 1]))
                for k in range(workers)
                if bounds[k] < bounds[k + 1]
            ]
            for fut in futures:
                fut.result()

    classes, class_table = _bucket_fingerprints(fingerprints)
    return BasinGrid(
        spec=spec, fingerprints=fingerprints, classes=classes, class_table=class_table
    )


def cell_fingerprint(t: Threshold, spec: GridSpec, i: int, j: int) -> float:
    """Re-simulate a single cell through the renderer's exact code path."""
    r = spec.resolution
    if not (0 <= i < r and 0 <= j < r):
        raise ParameterError("cell index out of range")
    ux = _axis_offsets(spec.x_range, r)
    uy = _axis_offsets(spec.y_range, r)
    u = np.empty((1, spec.n_sites))
    u[0, 0] = ux[i]
    u[0, 1] = uy[j]
    for k, pinned in enumerate(spec.pinned_sites):
        u[0, 2 + k] = pinned - 0.5
    return float(_window_sums(u, t.c1, spec.transient, spec.window)[0])


def _bucket_fingerprints(fingerprints: np.ndarray) -> tuple[np.ndarray, dict[int, float]]:
    """Greedy absolute-tolerance bucketing of fingerprint values.

    Buckets are grown over the sorted unique values; a new bucket starts
    when a value exceeds the current representative (the bucket's lowest
    member) by more than CLASS_TOL.  Ids are dense and ascend with the
    representative fingerprint.
    """
    uniq = np.unique(fingerprints)
    reps: list[float] = []
    for v in uniq:
        if not reps or v > reps[-1] + CLASS_TOL:
            reps.append(float(v))
    # Values below rep + CLASS_TOL belong to the bucket of that rep.
    edges = np.array(reps[1:])
    uniq_class = np.searchsorted(edges, uniq, side="right")
    lookup = np.searchsorted(uniq, fingerprints.ravel())
    classes = uniq_class[lookup].reshape(fingerprints.shape).astype(np.int32)
    return classes, {k: rep for k, rep in enumerate(reps)}


def label_components(
    g: BasinGrid,
    eps_list: Sequence[float] = (),
    point: Optional[tuple[float, float]] = None,
    radii: Sequence[float] = (),
) -> ComponentStats:
    """Two-pass 4-connected labelling of same-class cells.

    ``eps_list`` requests counts of distinct components meeting each corner
    box of side eps (all four corners); ``point`` and ``radii`` request
    counts over grid-rasterised disks.  Components are counted as meeting a
    region when any member cell centre falls inside it.
    """
    classes = g.classes
    r = g.spec.resolution
    component_ids = np.zeros((r, r), dtype=np.int32)
    class_counts: dict[int, int] = {}
    next_id = 0
    for k in g.class_table:
        mask = classes == k
        labels, count = ndimage.label(mask, structure=_CROSS)
        component_ids[mask] = labels[mask] + next_id
        class_counts[k] = int(count)
        next_id += int(count)

    cx = _axis_centers(g.spec.x_range, r)
    cy = _axis_centers(g.spec.y_range, r)

    corner_counts: dict[tuple[str, float], int] = {}
    for eps in eps_list:
        if eps <= 0.0:
            raise ParameterError("corner box size must be positive")
        lo_x, hi_x = cx <= eps, cx >= 1.0 - eps
        lo_y, hi_y = cy <= eps, cy >= 1.0 - eps
        for corner, mx, my in (
            ("00", lo_x, lo_y),
            ("01", lo_x, hi_y),
            ("10", hi_x, lo_y),
            ("11", hi_x, hi_y),
        ):
            sub = component_ids[np.ix_(mx, my)]
            corner_counts[(corner, float(eps))] = int(np.unique(sub).size)

    disk_counts: dict[float, int] = {}
    if point is not None:
        px, py = point
        if not (0.0 < px < 1.0 and 0.0 < py < 1.0):
            raise ParameterError("accumulation point must lie in the open square")
        dist2 = (cx[:, None] - px) ** 2 + (cy[None, :] - py) ** 2
        for radius in radii:
            if radius <= 0.0:
                raise ParameterError("disk radius must be positive")
            sel = component_ids[dist2 <= radius * radius]
            disk_counts[float(radius)] = int(np.unique(sel).size)

    return ComponentStats(
        component_ids=component_ids,
        class_component_counts=class_counts,
        total_components=next_id,
        corner_counts=corner_counts,
        disk_counts=disk_counts,
        point=point,
    )


def corner_accumulation(
    t: Threshold,
    base_spec: GridSpec,
    eps_list: Sequence[float],
    resolutions: Sequence[int],
    workers: int = 1,
) -> tuple[list[str], list[tuple]]:
    """Corner-box component counts across grid refinements.

    Returns a (header, rows) table with one row per resolution, box size
    and corner, ready for CSV export.
    """
    eps_list = [float(e) for e in eps_list]
    resolutions = [int(r) for r in resolutions]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ParameterError("eps_list must be strictly decreasing")
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise ParameterError("resolutions must be strictly increasing")
    header = ["resolution", "eps", "corner", "components"]
    rows: list[tuple] = []
    for r in resolutions:
        spec = dataclasses.replace(base_spec, resolution=r)
        stats = label_components(render_basins(t, spec, workers=workers), eps_list)
        for eps in eps_list:
            for corner in _CORNERS:
                rows.append((r, eps, corner, stats.corner_counts[(corner, eps)]))
    return header, rows


def interior_accumulation(
    t: Threshold,
    spec: GridSpec,
    point: tuple[float, float],
    radii: Sequence[float],
    workers: int = 1,
) -> tuple[list[str], list[tuple]]:
    """Component counts over disks around an interior point (one render)."""
    radii = [float(x) for x in radii]
    stats = label_components(
        render_basins(t, spec, workers=workers), point=point, radii=radii
    )
    header = ["radius", "components"]
    rows = [(radius, stats.disk_counts[radius]) for radius in radii]
    return header, rows
