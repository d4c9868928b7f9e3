"""N-site cascading lattice: simultaneous logistic iteration plus excess carry.

A step of the lattice applies the logistic map at every site independently
and then sweeps left to right: each site's image receives the carry from
its left neighbour, values above the threshold are clipped to ``c1`` and
the overflow is carried on.  The carry leaving the last site is the step's
emitted excess, the observable time series of the system.

The sweep is inherently sequential across sites, but distinct orbits are
independent: :func:`step_batch` advances any number of orbits at once as
rows of an array, and is the kernel behind the basin renderer and the
attractor census.  Scalar and batched paths perform the identical IEEE
operations in the same order, so single orbits advanced either way agree
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .scalar import Threshold

__all__ = [
    "LatticeState",
    "cascade",
    "step",
    "step_batch",
    "iterate",
    "excess_window_sum",
]


@dataclass(frozen=True)
class LatticeState:
    """Immutable lattice state: site values plus the last emitted excess."""

    sites: np.ndarray
    last_excess: float = 0.0

    def __post_init__(self):
        arr = np.array(self.sites, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("sites must be a non-empty 1-D vector")
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise DomainError("site values must lie in [0, 1]")
        if self.last_excess < 0.0:
            raise DomainError("last_excess must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "sites", arr)

    @property
    def n_sites(self) -> int:
        return self.sites.size


def cascade(y, t: Threshold) -> tuple[np.ndarray, float]:
    """Left-to-right clipping sweep over logistic images ``y``.

    Carries each site's overflow into the next site before comparing with
    ``c1``; a value exactly at the threshold is kept with zero carry (both
    branches agree there).  Returns ``(new_sites, excess)`` where the
    excess is the carry leaving the last site.  ``sum(new_sites) + excess``
    equals ``sum(y)`` up to rounding.
    """
    y = np.asarray(y, dtype=float)
    c1 = t.c1
    out = np.empty_like(y)
    e = 0.0
    for i in range(y.size):
        yh = y[i] + e
        if yh > c1:
            out[i] = c1
            e = yh - c1
        else:
            out[i] = yh
            e = 0.0
    return out, e


def step(s: LatticeState, t: Threshold) -> LatticeState:
    """One lattice step: sitewise logistic map, then the cascade sweep."""
    x = s.sites
    y = 4.0 * x * (1.0 - x)
    out, e = cascade(y, t)
    return LatticeState(sites=out, last_excess=e)


def step_batch(x: np.ndarray, t: Threshold) -> tuple[np.ndarray, np.ndarray]:
    """Advance many independent orbits one step.

    ``x`` has shape (M, N): M orbits of N sites.  Returns the new states
    and the M emitted excesses.  Purely elementwise over orbits, so the
    result does not depend on how a larger batch is split into blocks.
    """
    y = 4.0 * x * (1.0 - x)
    return cascade_batch(y, t.c1)


def cascade_batch(y: np.ndarray, c1: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised cascade sweep over rows of ``y`` (shape (M, N))."""
    m, n = y.shape
    out = np.empty_like(y)
    carry = np.zeros(m)
    for i in range(n):
        yh = y[:, i] + carry
        over = yh > c1
        out[:, i] = np.where(over, c1, yh)
        carry = np.where(over, yh - c1, 0.0)
    return out, carry


def iterate(
    s: LatticeState,
    t: Threshold,
    k: int,
    record_last: int = 0,
) -> tuple[LatticeState, np.ndarray, np.ndarray | None]:
    """Apply ``k`` steps, collecting the excess trace.

    Returns ``(final_state, trace, states)`` where ``trace`` holds the k
    emitted excesses.  When ``record_last > 0`` the last
    ``min(k, record_last)`` states are kept (ring buffer, returned in
    chronological order); otherwise ``states`` is None so long runs stay
    memory-bounded.
    """
    if k < 0:
        raise ParameterError("step count k must be >= 0")
    trace = np.empty(k)
    buf = None
    if record_last > 0:
        buf = np.empty((min(k, record_last), s.n_sites))
    cur = s
    for j in range(k):
        cur = step(cur, t)
        trace[j] = cur.last_excess
        if buf is not None:
            buf[j % buf.shape[0]] = cur.sites
    states = None
    if buf is not None and buf.shape[0] > 0:
        states = np.roll(buf, -(k % buf.shape[0]), axis=0) if k > buf.shape[0] else buf
    return cur, trace, states


def excess_window_sum(
    s: LatticeState, t: Threshold, transient: int, window: int
) -> float:
    """Total excess over ``window`` steps after discarding a transient.

    This is the fingerprint used to colour basins: on a super-stable
    attractor whose period divides the window the sum is an exact
    invariant of the attractor, independent of phase.
    """
    if transient < 0:
        raise ParameterError("transient must be >= 0")
    if window < 1:
        raise ParameterError("window must be >= 1")
    cur = s
    for _ in range(transient):
        cur = step(cur, t)
    total = 0.0
    for _ in range(window):
        cur = step(cur, t)
        total += cur.last_excess
    return total
