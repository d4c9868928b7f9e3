"""Parameter-space and attractor analysis for the cascading lattice.

Covers the scalar bifurcation structure (the period-2 window, the "star"
thresholds where the orbit of ``c1`` hits the repelling fixed point 3/4,
the Markov partition near 3/4 and its entropy bound) and the lattice side
(anti-phase existence condition, periodic-orbit detection with in-phase /
anti-phase / ripple classification, and a seeded attractor census).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import BracketError, ParameterError
from .lattice import LatticeState, step, step_batch
from .scalar import (
    MAX_ITER_DEFAULT,
    OrbitClass,
    SuperStable,
    Threshold,
    classify_orbit,
    make_threshold,
)

__all__ = [
    "XI2",
    "PERIOD2_WINDOW_END",
    "StarValue",
    "MarkovModel",
    "AttractorRecord",
    "BifurcationSample",
    "antiphase_condition",
    "antiphase_root",
    "find_star",
    "star_values",
    "build_markov",
    "detect_periodic_orbit",
    "census",
    "bifurcation_scan",
    "central_component_reaches_boundary",
]

#: Threshold where the orbit of c1 reaches 3/4 in two steps; bifurcations of
#: the clipped map accumulate here and the repelling set turns uncountable.
XI2 = (2.0 + math.sqrt(3.0)) / 4.0

#: Right end of the unique period-2 window (image of c1 hits c0 exactly).
PERIOD2_WINDOW_END = (5.0 + math.sqrt(5.0)) / 8.0

RECURRENCE_TOL = 1e-9
DEDUP_HAUSDORFF = 1e-6
FINGERPRINT_WINDOW = 12

OrbitType = Literal["in_phase", "anti_phase", "ripple", "other"]


@dataclass(frozen=True)
class StarValue:
    """Threshold whose orbit first reaches 3/4 after exactly ``s`` steps."""

    s: int
    value: float


@dataclass(frozen=True)
class MarkovModel:
    """Interval partition near 3/4 with its 0/1 transition matrix.

    ``j0`` is the gap (c2, c0); ``branch_preimages[i]`` is its (i+1)-fold
    preimage under the right inverse branch of the logistic map, shrinking
    onto 3/4.  ``n0`` is the first depth from which every deeper interval
    is covered by the image of the gap, which produces the one-superdiagonal
    plus first-column-block transition pattern.
    """

    j0: tuple[float, float]
    branch_preimages: tuple[tuple[float, float], ...]
    n0: int
    matrix: np.ndarray
    spectral_radius: float

    @property
    def entropy_bound(self) -> float:
        """Lower bound ``log(spectral_radius)`` for the topological entropy."""
        return math.log(self.spectral_radius)


@dataclass(frozen=True)
class AttractorRecord:
    """A detected periodic lattice orbit in canonical phase."""

    period: int
    orbit: np.ndarray  # shape (period, n_sites), lexicographically least rotation
    kind: OrbitType
    window_fingerprint: float

    @property
    def n_sites(self) -> int:
        return self.orbit.shape[1]


@dataclass(frozen=True)
class BifurcationSample:
    """One grid point of a threshold scan."""

    c1: float
    orbit_class: OrbitClass
    period: Optional[int]


def antiphase_condition(t: Threshold) -> bool:
    """Whether the kicked partner site stays inside C: ``c2 + e(c2) <= 1 - c0``.

    Exactly this inequality decides existence of the two-site anti-phase
    orbit in the period-2 window.
    """
    e_c2 = 4.0 * t.c2 * (1.0 - t.c2) - t.c1
    return t.c2 + e_c2 <= 1.0 - t.c0


def _antiphase_gap(c: float) -> float:
    # 19c - 84c^2 + 128c^3 - 64c^4 is c2 + e(c2) written out as a polynomial;
    # the right-hand side is 1 - c0.
    lhs = (((-64.0 * c + 128.0) * c - 84.0) * c + 19.0) * c
    rhs = 0.5 * (1.0 + math.sqrt(1.0 - c))
    return lhs - rhs


def _bisect(fn, lo: float, hi: float, width: float) -> float:
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def antiphase_root() -> float:
    """The threshold where the anti-phase existence condition turns on.

    Bisection on the polynomial form of the condition inside the period-2
    window; below the root the condition fails, above it holds.
    """
    return _bisect(_antiphase_gap, 0.76, 0.9, 1e-13)


def _star_gap(c: float, s: int) -> float:
    """``f^s(c) - 3/4`` on the branch where iterates 1..s-1 stay below 1/2.

    Orbits that climb past 1/2 too early belong to thresholds below the
    star and are reported as +inf, which keeps the effective function
    one-signed on each side of the root.
    """
    y = 4.0 * c * (1.0 - c)
    for _ in range(s - 1):
        if y >= 0.5:
            return math.inf
        y = 4.0 * y * (1.0 - y)
    return y - 0.75


def find_star(s: int, bracket: Optional[tuple[float, float]] = None) -> StarValue:
    """Locate the star threshold with ``f^s(value) = 3/4`` to 1e-13.

    Without an explicit bracket the stars are built up recursively: each
    star is the only sign change of the constrained ``f^s`` gap between its
    predecessor and 1.
    """
    if s < 2:
        raise ParameterError("star index s must be >= 2")
    if bracket is not None:
        lo, hi = bracket
        return StarValue(s=s, value=_bisect(lambda c: _star_gap(c, s), lo, hi, 1e-13))
    return star_values(s)[-1]


def star_values(max_s: int) -> list[StarValue]:
    """Stars for ``s = 2..max_s``, each bracketed just past its predecessor."""
    if max_s < 2:
        raise ParameterError("max_s must be >= 2")
    stars: list[StarValue] = []
    prev = 0.75  # s = 1 degenerates to the fixed point itself
    for s in range(2, max_s + 1):
        lo = prev + (1.0 - prev) * 1e-4
        hi = 1.0 - 1e-9
        value = _bisect(lambda c: _star_gap(c, s), lo, hi, 1e-13)
        stars.append(StarValue(s=s, value=value))
        prev = value
    return stars


#: Endpoint slack for the open-inclusion tests used below: inclusion of a
#: branch preimage in the image of the gap is an open condition, so the
#: comparison is done with closed intervals widened by this much.
_INCLUSION_SLACK = 1e-14


def build_markov(t: Threshold, n: int) -> MarkovModel:
    """Markov partition of depth ``n`` near 3/4 and its transition matrix.

    Requires ``c1 > XI2`` so that the image of the gap (c2, c0) reaches
    across 3/4.  The matrix over (J0, J_-1, ..., J_-n) has ones exactly on
    the superdiagonal (each preimage maps onto the previous one) and in the
    last ``n - n0 + 1`` rows of the first column (the gap covers every
    preimage from depth n0 on).  Its spectral radius, computed by power
    iteration, exceeds 1 whenever ``n >= n0 + 1``.
    """
    if t.c1 <= XI2:
        raise ParameterError(
            f"Markov partition needs c1 > {XI2:.12f}, got {t.c1!r}"
        )
    c2, c0 = t.c2, t.c0
    if not c2 < c0:
        raise ParameterError("gap (c2, c0) is empty for this threshold")
    j0 = (c2, c0)
    f_lo = 4.0 * c2 * (1.0 - c2)  # image of the gap is (f(c2), c1)
    f_hi = t.c1

    def g(y: float) -> float:
        # right inverse branch of the logistic map; fixes 3/4
        return 0.5 + 0.5 * math.sqrt(1.0 - y)

    intervals: list[tuple[float, float]] = []
    lo, hi = j0
    for _ in range(n):
        lo, hi = g(hi), g(lo)
        intervals.append((lo, hi))
    contained = [
        lo >= f_lo - _INCLUSION_SLACK and hi <= f_hi + _INCLUSION_SLACK
        for lo, hi in intervals
    ]
    n0 = None
    for i in range(len(contained), 0, -1):
        if not contained[i - 1]:
            break
        n0 = i
    if n0 is None:
        raise ParameterError("no branch preimage is covered by the gap image")
    if n < n0 + 1:
        raise ParameterError(f"partition depth n={n} too small, need n >= {n0 + 1}")

    matrix = np.zeros((n + 1, n + 1), dtype=np.int8)
    for i in range(n):
        matrix[i, i + 1] = 1
    matrix[n0:, 0] = 1

    return MarkovModel(
        j0=j0,
        branch_preimages=tuple(intervals),
        n0=n0,
        matrix=matrix,
        spectral_radius=_power_iteration(matrix),
    )


def _power_iteration(matrix: np.ndarray, tol: float = 1e-10, max_iter: int = 200_000) -> float:
    m = matrix.astype(float)
    v = np.ones(m.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= tol:
            return lam_new
        lam = lam_new
    raise RuntimeError("power iteration did not converge")


def _canonical_rotation(orbit: np.ndarray) -> np.ndarray:
    """Lexicographically least rotation of the orbit's state sequence."""
    p = orbit.shape[0]
    if p == 1:
        return orbit
    keys = [tuple(np.roll(orbit, -r, axis=0).ravel()) for r in range(p)]
    best = min(range(p), key=keys.__getitem__)
    return np.roll(orbit, -best, axis=0)


def _lag_matches(orbit: np.ndarray, lag: int, t: Threshold, tol: float) -> bool:
    """Shifted-site comparison: site i+1 repeats site i ``lag`` steps later.

    Slots inside C are exempt from the strict comparison: that is where the
    upstream clip deposits its carry, and the perturbation is absorbed by
    the receiving site's own clip one step later.  Both partners must still
    lie inside C for the slot to count as matching.
    """
    p, n = orbit.shape
    lo, hi = t.c_interval
    for i in range(n - 1):
        for j in range(p):
            a = orbit[j, i]
            b = orbit[(j + lag) % p, i + 1]
            if abs(a - b) <= tol:
                continue
            if lo <= a <= hi and lo <= b <= hi:
                continue
            return False
    return True


def _classify_orbit_kind(orbit: np.ndarray, t: Threshold, tol: float) -> OrbitType:
    p, n = orbit.shape
    spread = np.max(orbit, axis=1) - np.min(orbit, axis=1)
    if np.all(spread <= tol):
        return "in_phase"
    if n == 2 and p % 2 == 0 and _lag_matches(orbit, p // 2, t, tol):
        return "anti_phase"
    if _lag_matches(orbit, 1, t, tol):
        return "ripple"
    return "other"


def _orbit_fingerprint(orbit: np.ndarray, t: Threshold, window: int) -> float:
    cur = LatticeState(sites=orbit[0])
    total = 0.0
    for _ in range(window):
        cur = step(cur, t)
        total += cur.last_excess
    return total


def detect_periodic_orbit(
    t: Threshold,
    s0: LatticeState,
    transient: int,
    max_period: int,
    tol: float = RECURRENCE_TOL,
    fingerprint_window: int = FINGERPRINT_WINDOW,
) -> Optional[AttractorRecord]:
    """Find the periodic orbit reached from ``s0``, if any.

    After the transient, looks for the least ``p <= max_period`` with a
    max-norm return to the reference state within ``tol``, canonicalises
    the phase and classifies the synchronisation pattern.  Returns None if
    no recurrence is found.
    """
    if tol <= 0.0:
        raise ParameterError("tol must be positive")
    cur = s0
    for _ in range(transient):
        cur = step(cur, t)
    ref = cur.sites
    history = [ref]
    x = cur
    period = 0
    for p in range(1, max_period + 1):
        x = step(x, t)
        history.append(x.sites)
        if np.max(np.abs(x.sites - ref)) <= tol:
            period = p
            break
    if period == 0:
        return None
    orbit = _canonical_rotation(np.array(history[:period]))
    return AttractorRecord(
        period=period,
        orbit=orbit,
        kind=_classify_orbit_kind(orbit, t, tol),
        window_fingerprint=_orbit_fingerprint(orbit, t, fingerprint_window),
    )


_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    """One round of the splitmix64 finaliser (the documented seed mixer)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def _census_initial_states(seed: int, samples: int, n: int) -> np.ndarray:
    """Deterministic initial states: coordinate (i, j) depends only on the
    master seed and its flat index, so any processing order gives the same
    sample set."""
    out = np.empty((samples, n))
    base = seed & _MASK64
    for i in range(samples):
        for j in range(n):
            z = (base + (i * n + j + 1) * _SPLITMIX_GAMMA) & _MASK64
            bits = _splitmix64(z) >> 11
            out[i, j] = (bits + 0.5) * 2.0**-53  # strictly inside (0, 1)
    return out


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two orbits' state sets (max norm)."""
    d = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    return max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))


def census(
    t: Threshold,
    n_sites: int,
    samples: int,
    seed: int,
    transient: int = 100,
    max_period: int = 64,
    tol: float = RECURRENCE_TOL,
    fingerprint_window: int = FINGERPRINT_WINDOW,
) -> list[tuple[AttractorRecord, int]]:
    """Seeded random-start survey of attractors with basin-hit counts.

    All samples are advanced together through the transient; a sample's
    period is the least ``p <= max_period`` with a max-norm return to its
    post-transient state within ``tol``.  Orbits are deduplicated by exact
    state content first, then merged when their Hausdorff distance is below
    ``DEDUP_HAUSDORFF``.  The result is sorted by decreasing hit count
    (ties by fingerprint, period and orbit) and is a pure function of the
    arguments.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    x = _census_initial_states(seed, samples, n_sites)
    for _ in range(transient):
        x, _ = step_batch(x, t)
    ref = x.copy()
    history = np.empty((max_period + 1, samples, n_sites))
    history[0] = ref
    periods = np.zeros(samples, dtype=int)
    for p in range(1, max_period + 1):
        x, _ = step_batch(x, t)
        history[p] = x
        hit = (periods == 0) & (np.max(np.abs(x - ref), axis=1) <= tol)
        periods[hit] = p

    # Group samples by the multiset of orbit states (rotation invariant and
    # exact: super-stable orbits repeat bit-identically after clipping).
    groups: dict[bytes, tuple[np.ndarray, int]] = {}
    for i in range(samples):
        p = periods[i]
        if p == 0:
            continue
        orbit = history[:p, i, :]
        sorted_rows = orbit[np.lexsort(orbit.T[::-1])]
        key = sorted_rows.tobytes()
        if key in groups:
            groups[key] = (groups[key][0], groups[key][1] + 1)
        else:
            groups[key] = (orbit.copy(), 1)

    entries: list[tuple[AttractorRecord, int]] = []
    for orbit, hits in groups.values():
        canon = _canonical_rotation(orbit)
        record = AttractorRecord(
            period=orbit.shape[0],
            orbit=canon,
            kind=_classify_orbit_kind(canon, t, tol),
            window_fingerprint=_orbit_fingerprint(canon, t, fingerprint_window),
        )
        entries.append((record, hits))

    # Merge records closer than the dedup distance (defensive: exact grouping
    # already collapses super-stable orbits).
    merged: list[tuple[AttractorRecord, int]] = []
    for record, hits in sorted(
        entries,
        key=lambda e: (e[0].window_fingerprint, e[0].period, tuple(e[0].orbit.ravel())),
    ):
        for k, (other, other_hits) in enumerate(merged):
            if (
                other.n_sites == record.n_sites
                and _hausdorff(other.orbit, record.orbit) <= DEDUP_HAUSDORFF
            ):
                merged[k] = (other, other_hits + hits)
                break
        else:
            merged.append((record, hits))

    merged.sort(
        key=lambda e: (
            -e[1],
            e[0].window_fingerprint,
            e[0].period,
            tuple(e[0].orbit.ravel()),
        )
    )
    return merged


def bifurcation_scan(
    c1_lo: float,
    c1_hi: float,
    steps: int,
    max_iter: int = MAX_ITER_DEFAULT,
) -> list[BifurcationSample]:
    """Classify the scalar orbit on an even grid of thresholds."""
    if not 0.75 < c1_lo < c1_hi < 1.0:
        raise ParameterError("scan range must satisfy 3/4 < lo < hi < 1")
    if steps < 2:
        raise ParameterError("steps must be >= 2")
    out = []
    for c1 in np.linspace(c1_lo, c1_hi, steps):
        t = make_threshold(float(c1))
        oc = classify_orbit(t, max_iter=max_iter)
        period = oc.period if isinstance(oc, SuperStable) else None
        out.append(BifurcationSample(c1=float(c1), orbit_class=oc, period=period))
    return out


def central_component_reaches_boundary(t: Threshold, n_sites: int) -> bool:
    """Whether accumulated carries can push the in-phase core to the boundary.

    True iff some ``j < n_sites`` has ``j * (1 - c1) > 1``: enough upstream
    sites clipping at once to lift a downstream site past 1.
    """
    if n_sites < 2:
        raise ParameterError("n_sites must be >= 2")
    return any(j * (1.0 - t.c1) > 1.0 for j in range(1, n_sites))
