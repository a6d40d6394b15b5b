"""Grid sampler for reflected interlacing Brownian motions.

Slot (1, 1) is a Brownian motion.  Slot (i, k), k >= 2, is an independent
Brownian motion reflected in

    [w(i-1, k-1), w(i, k-1)]   for 1 < i < k
    (-inf,        w(1, k-1)]   for i = 1
    [w(k-1, k-1), +inf)        for i = k

On the grid 0, h, ..., T this is the one-step clamp

    w(t + h) = min(max(w(t) + dB, lower(t + h)), upper(t + h))

with the boundaries read from level k-1 at the end of the step.  The
scheme's weak error shrinks like sqrt(h); at h = 1e-3 it is visible in
boundary-sensitive statistics (see README).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .driving import SeedSpec
from .errors import DomainError, StructuralError
from .patterns import (
    ContinuousPattern,
    interlacing_margins,
    level_slice,
    num_slots,
    offset,
    validate_continuous,
)

__all__ = [
    "GridPath",
    "WarrenTrajectory",
    "grid_length",
    "brownian_grid",
    "continuum_sk_map",
    "reflect_grid",
    "warren_sample",
    "warren_marginals",
    "collision_fraction",
]

DEFAULT_STEP = 1e-3
# keeps Brownian draws apart from other consumers of the same SeedSpec
BROWNIAN_TAG = 1


def grid_length(h: float, T: float) -> int:
    """Number of grid points 0, h, ..., T; T must be a multiple of h."""
    if not h > 0:
        raise DomainError(f"grid step must be positive, got {h}", module="warren")
    if not T >= 0:
        raise DomainError(f"time horizon must be >= 0, got {T}", module="warren")
    n = T / h
    steps = int(round(n))
    if abs(n - steps) > 1e-9 * max(1.0, n):
        raise DomainError(f"horizon {T} is not a multiple of the step {h}", module="warren")
    return steps + 1


@dataclass(frozen=True, eq=False)
class GridPath:
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"grid step must be positive, got {self.h}", module="warren")
        v = np.asarray(self.values, np.float64).reshape(-1)
        if v.size < 1:
            raise StructuralError("grid path needs at least one value", module="warren")
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> float:
        return (self.values.size - 1) * self.h

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.h


class WarrenTrajectory:
    """Per-slot grid paths; ``values[s, n]`` is slot s at time n * h."""

    def __init__(self, N: int, h: float, values):
        self.N = int(N)
        self.h = float(h)
        self.values = np.asarray(values, np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != num_slots(self.N):
            raise StructuralError(f"values shape {self.values.shape} does not fit N={self.N}",
                                  module="warren")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.shape[1]) * self.h

    def index(self, t: float) -> int:
        n = int(round(t / self.h))
        if not 0 <= n < self.values.shape[1] or abs(n * self.h - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"time {t} is not on the grid", module="warren")
        return n

    def at(self, t: float) -> ContinuousPattern:
        return ContinuousPattern(self.N, self.values[:, self.index(t)])

    def cross_section(self, n: int) -> ContinuousPattern:
        return ContinuousPattern(self.N, self.values[:, n])

    def slot(self, i: int, j: int) -> GridPath:
        return GridPath(self.h, self.values[offset(i, j)])

    def interlacing_ok(self, slack: float = 1e-12) -> bool:
        left, right = interlacing_margins(self.values.T, self.N)
        return bool(np.all(left >= -slack) and np.all(right >= -slack))


def brownian_grid(count: int, h: float, T: float, seed: SeedSpec) -> list[GridPath]:
    """``count`` independent Brownian paths from 0 on the grid 0, h, ..., T."""
    L = grid_length(h, T)
    z = seed.rng(BROWNIAN_TAG).standard_normal((count, L - 1))
    paths = np.zeros((count, L))
    np.cumsum(z * np.sqrt(h), axis=1, out=paths[:, 1:])
    return [GridPath(h, row) for row in paths]


def reflect_grid(drivers: np.ndarray, initial: np.ndarray, N: int) -> np.ndarray:
    """Clamp recursion on stacked drivers.

    ``drivers`` has shape (L, B, S) (grid time, batch, slot); ``initial``
    has shape (S,) or (B, S).  Returns an array of the same shape as
    ``drivers`` holding the reflected paths.
    """
    L, B, S = drivers.shape
    out = np.empty_like(drivers)
    init = np.broadcast_to(np.asarray(initial, np.float64), (B, S))
    out[:, :, 0] = init[:, 0] + (drivers[:, :, 0] - drivers[0, :, 0])
    inc = np.diff(drivers, axis=0)
    for k in range(2, N + 1):
        sl, below = level_slice(k), level_slice(k - 1)
        lower = np.full((L, B, k), -np.inf)
        upper = np.full((L, B, k), np.inf)
        lower[:, :, 1:] = out[:, :, below]
        upper[:, :, :-1] = out[:, :, below]
        dk = inc[:, :, sl]
        cur = np.minimum(np.maximum(init[:, sl], lower[0]), upper[0])
        out[0, :, sl] = cur
        for n in range(1, L):
            cur = np.minimum(np.maximum(cur + dk[n - 1], lower[n]), upper[n])
            out[n, :, sl] = cur
    return out


def _initial_values(N, initial) -> np.ndarray:
    if initial is None:
        return np.zeros(num_slots(N))
    if not isinstance(initial, ContinuousPattern):
        initial = ContinuousPattern.from_levels(initial)
    if initial.N != N:
        raise StructuralError(f"initial pattern size {initial.N} != {N}", module="warren")
    res = validate_continuous(initial)
    if not res.ok:
        raise DomainError("initial pattern does not interlace: "
                          + "; ".join(v.describe() for v in res.violations), module="warren")
    return np.array(initial.values)


def continuum_sk_map(drivers: Sequence[GridPath], initial) -> WarrenTrajectory:
    """Reflect one driver per slot, level by level, on a shared grid."""
    drivers = list(drivers)
    S = len(drivers)
    N = int((np.sqrt(1 + 8 * S) - 1) // 2)
    if num_slots(N) != S:
        raise StructuralError(f"{S} drivers do not fill a triangular pattern", module="warren")
    h, L = drivers[0].h, drivers[0].values.size
    if any(d.h != h or d.values.size != L for d in drivers):
        raise StructuralError("drivers live on different grids", module="warren")
    init = _initial_values(N, initial)
    stacked = np.stack([d.values for d in drivers], axis=1)[:, None, :]
    return WarrenTrajectory(N, h, reflect_grid(stacked, init, N)[:, 0, :].T)


def warren_sample(N: int, initial=None, T: float = 1.0, h: float = DEFAULT_STEP,
                  seed: SeedSpec = SeedSpec(0)) -> WarrenTrajectory:
    """One grid trajectory started from ``initial`` (all zeros by default)."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}", module="warren")
    init = _initial_values(N, initial)
    drivers = brownian_grid(num_slots(N), h, T, seed)
    return continuum_sk_map(drivers, ContinuousPattern(N, init))


def warren_marginals(N: int, times: Sequence[float], replicas: int, seed: int, *,
                     h: float = DEFAULT_STEP, initial=None, first_stream: int = 0,
                     chunk: int = 500) -> np.ndarray:
    """Cross-sections at ``times`` for many replicas.

    Replica r uses ``SeedSpec(seed, first_stream + r)`` and reproduces
    :func:`warren_sample` with that seed exactly.  Returns an array of shape
    (replicas, len(times), N(N+1)/2).
    """
    T = max(times)
    L = grid_length(h, T)
    idx = [int(round(t / h)) for t in times]
    for t, n in zip(times, idx):
        if abs(n * h - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"evaluation time {t} is not on the grid", module="warren")
    init = _initial_values(N, initial)
    S = num_slots(N)
    out = np.empty((replicas, len(times), S))
    for lo in range(0, replicas, chunk):
        hi = min(lo + chunk, replicas)
        drv = np.empty((L, hi - lo, S))
        for b, r in enumerate(range(lo, hi)):
            paths = brownian_grid(S, h, T, SeedSpec(seed, first_stream + r))
            drv[:, b, :] = np.stack([p.values for p in paths], axis=1)
        vals = reflect_grid(drv, init, N)
        out[lo:hi] = vals[idx].transpose(1, 0, 2)
    return out


def collision_fraction(traj: WarrenTrajectory, tol: float = 1e-12) -> float:
    """Fraction of grid times after 0 where two neighbours on a level coincide."""
    if traj.N < 2 or traj.values.shape[1] < 2:
        return 0.0
    hits = np.zeros(traj.values.shape[1] - 1, bool)
    for k in range(2, traj.N + 1):
        lvl = traj.values[level_slice(k), 1:]
        hits |= np.any(np.abs(np.diff(lvl, axis=0)) <= tol, axis=0)
    return float(hits.mean())
