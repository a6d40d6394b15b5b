"""Unit-step driving processes and their event-list file format.

A driving path is stored as parallel arrays (event time, slot offset,
increment) sorted by time, then slot.  Discrete-time drivers are
extrapolated to piecewise-constant paths, so their jumps sit exactly at
integer times: ``X(t) = X(n)`` for ``n <= t < n + 1``.

Randomness comes from numpy's PCG64 seeded through
``SeedSequence(seed, spawn_key=(stream, *tags))``.  A fixed ``SeedSpec``
therefore replays bit-identically, and distinct stream ids give
independent streams.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import DomainError, FormatError, RegularityError, StructuralError
from .patterns import num_slots, offset, slot_of

__all__ = [
    "SeedSpec",
    "DrivingEvent",
    "DrivingPath",
    "poisson_driver",
    "bernoulli_driver",
    "lazy_walk_driver",
    "make_driver",
    "serialize_path",
    "ingest_path",
    "DRIVER_KINDS",
]

DRIVER_KINDS = ("poisson", "bernoulli", "lazy")
_U64 = 1 << 64


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus stream id; ``rng(*tags)`` derives a generator.

    ``tags`` namespaces every generator drawn from this spec, so two
    consumers sharing (seed, stream) can still draw independent numbers.
    """

    seed: int
    stream: int = 0
    tags: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < _U64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}",
                              module="driving")
        if int(self.stream) < 0:
            raise DomainError(f"stream id must be nonnegative, got {self.stream}",
                              module="driving")

    def rng(self, *tags: int) -> np.random.Generator:
        key = (int(self.stream), *map(int, self.tags), *map(int, tags))
        ss = np.random.SeedSequence(int(self.seed), spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def with_stream(self, stream: int) -> "SeedSpec":
        return SeedSpec(self.seed, stream, self.tags)

    def tagged(self, *tags: int) -> "SeedSpec":
        return SeedSpec(self.seed, self.stream, self.tags + tuple(int(t) for t in tags))


class DrivingEvent(NamedTuple):
    time: float
    slot: tuple[int, int]
    increment: int


class DrivingPath:
    """Piecewise-constant unit-step path for every slot of a size-N pattern.

    Attributes are read-only numpy arrays: ``initial`` (per slot),
    ``times``, ``offsets`` (flat slot offsets) and ``increments``.
    Jumps happen at strictly positive times; ``initial`` is the value X(0).
    """

    def __init__(self, N, times, offsets, increments, horizon, initial=None):
        if N < 1:
            raise DomainError(f"N must be positive, got {N}", module="driving")
        self.N = int(N)
        self.horizon = float(horizon)
        S = num_slots(self.N)
        self.initial = np.zeros(S, np.int64) if initial is None else np.array(initial, np.int64)
        self.times = np.array(times, np.float64).reshape(-1)
        self.offsets = np.array(offsets, np.int64).reshape(-1)
        raw_inc = np.array(increments).reshape(-1)
        if not (self.times.size == self.offsets.size == raw_inc.size):
            raise StructuralError("event arrays differ in length", module="driving")
        if self.initial.shape != (S,):
            raise StructuralError(f"need {S} initial values, got {self.initial.size}",
                                  module="driving")
        self._check(raw_inc)
        self.increments = raw_inc.astype(np.int8)
        for a in (self.initial, self.times, self.offsets, self.increments):
            a.setflags(write=False)

    def _check(self, inc):
        S = num_slots(self.N)
        if not np.isfinite(self.horizon) or self.horizon < 0:
            raise DomainError(f"horizon must be finite and >= 0, got {self.horizon}",
                              module="driving")
        bad = np.flatnonzero(np.abs(inc) != 1)
        if bad.size:
            k = bad[0]
            raise RegularityError(
                f"jump of size {inc[k]} violates the unit-increment condition",
                module="driving", time=float(self.times[k]), slot=slot_of(int(self.offsets[k])),
            )
        if self.offsets.size and (self.offsets.min() < 0 or self.offsets.max() >= S):
            raise StructuralError("event slot outside the pattern", module="driving")
        if np.any(~np.isfinite(self.times)):
            raise FormatError("non-finite event time", module="driving")
        if self.times.size and (self.times[0] <= 0 or self.times[-1] > self.horizon):
            raise FormatError(f"event times must lie in (0, {self.horizon}]", module="driving")
        dt = np.diff(self.times)
        if np.any(dt < 0):
            k = int(np.flatnonzero(dt < 0)[0]) + 1
            raise FormatError("event times are not sorted", module="driving",
                              time=float(self.times[k]))
        same = (dt == 0) & (np.diff(self.offsets) <= 0)
        if np.any(same):
            k = int(np.flatnonzero(same)[0]) + 1
            msg = ("duplicate (time, slot) event" if self.offsets[k] == self.offsets[k - 1]
                   else "events at equal times are not sorted by slot")
            raise FormatError(msg, module="driving", time=float(self.times[k]),
                              slot=slot_of(int(self.offsets[k])))

    @classmethod
    def from_events(cls, N, events: Iterable, horizon, initial=None) -> "DrivingPath":
        """Build from ``(time, (i, j), increment)`` triples in any order."""
        rows = sorted((float(t), offset(*s), int(d)) for t, s, d in events)
        times = [r[0] for r in rows]
        offs = [r[1] for r in rows]
        incs = [r[2] for r in rows]
        return cls(N, times, offs, incs, horizon, initial)

    def __len__(self):
        return self.times.size

    def __iter__(self) -> Iterator[DrivingEvent]:
        for t, k, d in zip(self.times.tolist(), self.offsets.tolist(), self.increments.tolist()):
            yield DrivingEvent(t, slot_of(k), d)

    def __eq__(self, other):
        if not isinstance(other, DrivingPath):
            return NotImplemented
        return (self.N == other.N and self.horizon == other.horizon
                and np.array_equal(self.initial, other.initial)
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.increments, other.increments))

    def __repr__(self):
        return f"DrivingPath(N={self.N}, events={len(self)}, horizon={self.horizon})"

    def groups(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct jump times and the start index of each group (plus end)."""
        if not len(self):
            return np.empty(0), np.zeros(1, np.int64)
        new = np.flatnonzero(np.diff(self.times) != 0) + 1
        starts = np.concatenate(([0], new, [len(self)])).astype(np.int64)
        return self.times[starts[:-1]], starts

    def value_at(self, t: float) -> np.ndarray:
        """X(t) for every slot (right-continuous)."""
        n = np.searchsorted(self.times, t, side="right")
        out = self.initial.copy()
        np.add.at(out, self.offsets[:n], self.increments[:n].astype(np.int64))
        return out

    def slot_path(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Jump times and post-jump values of the slot at flat offset ``k``."""
        mask = self.offsets == k
        return self.times[mask], self.initial[k] + np.cumsum(self.increments[mask], dtype=np.int64)

    def shifted(self, delta) -> "DrivingPath":
        """Same increments, initial values moved by ``delta``."""
        return DrivingPath(self.N, self.times, self.offsets, self.increments, self.horizon,
                           self.initial + np.asarray(delta, np.int64))

    def truncated(self, horizon: float) -> "DrivingPath":
        n = np.searchsorted(self.times, horizon, side="right")
        return DrivingPath(self.N, self.times[:n], self.offsets[:n], self.increments[:n],
                           horizon, self.initial)


def _check_N(N):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}", module="driving")


def poisson_driver(N: int, rate: float, horizon: float, seed: SeedSpec) -> DrivingPath:
    """Independent rate-``rate`` Poisson clocks, one per slot; all jumps +1."""
    _check_N(N)
    if not rate > 0:
        raise DomainError(f"Poisson rate must be positive, got {rate}", module="driving")
    if not horizon >= 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}", module="driving")
    S = num_slots(N)
    rng = seed.rng()
    counts = rng.poisson(rate * horizon, S)
    # 1 - U lies in (0, 1], keeping jumps off time 0
    times = horizon * (1.0 - rng.random(int(counts.sum())))
    offs = np.repeat(np.arange(S), counts)
    order = np.lexsort((offs, times))
    return DrivingPath(N, times[order], offs[order], np.ones(order.size, np.int8), horizon)


def _lattice_path(N, steps, jumps) -> DrivingPath:
    # jumps: (steps, S) array in {-1, 0, 1}; row s holds the jump at time s + 1
    s_idx, k_idx = np.nonzero(jumps)
    return DrivingPath(N, s_idx + 1.0, k_idx, jumps[s_idx, k_idx], float(steps))


def _check_steps(steps):
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise DomainError(f"steps must be a nonnegative integer, got {steps!r}",
                          module="driving")


def bernoulli_driver(N: int, p: float, steps: int, seed: SeedSpec) -> DrivingPath:
    """Partial sums of i.i.d. Bernoulli(p) variables, jumping at integer times."""
    _check_N(N)
    _check_steps(steps)
    if not 0 <= p <= 1:
        raise DomainError(f"Bernoulli parameter must lie in [0, 1], got {p}", module="driving")
    xi = seed.rng().random((steps, num_slots(N))) < p
    return _lattice_path(N, steps, xi.astype(np.int8))


def lazy_walk_driver(N: int, q: float, steps: int, seed: SeedSpec) -> DrivingPath:
    """Lazy walk: +1 w.p. q, -1 w.p. q, else 0, at each integer time."""
    _check_N(N)
    _check_steps(steps)
    if not 0 <= q <= 0.5:
        raise DomainError(f"lazy-walk parameter must lie in [0, 1/2], got {q}",
                          module="driving")
    u = seed.rng().random((steps, num_slots(N)))
    jumps = (u < q).astype(np.int8) - (u >= 1.0 - q).astype(np.int8)
    return _lattice_path(N, steps, jumps)


def make_driver(kind: str, N: int, horizon: float, seed: SeedSpec, *, rate: float = 1.0,
                p: float = 0.5, q: float = 0.5) -> DrivingPath:
    """Dispatch on driver kind; discrete kinds use ``horizon`` as step count."""
    if kind == "poisson":
        return poisson_driver(N, rate, horizon, seed)
    if kind in ("bernoulli", "lazy"):
        steps = int(round(horizon))
        if steps != horizon:
            raise DomainError(f"{kind} driver needs an integer horizon, got {horizon}",
                              module="driving")
        if kind == "bernoulli":
            return bernoulli_driver(N, p, steps, seed)
        return lazy_walk_driver(N, q, steps, seed)
    raise DomainError(f"unknown driver kind {kind!r}", module="driving")


_HEADER = "time,level,index,increment"


def serialize_path(path: DrivingPath) -> str:
    buf = io.StringIO()
    for k in range(num_slots(path.N)):
        i, j = slot_of(k)
        buf.write(f"# init {j} {i} {int(path.initial[k])}\n")
    buf.write(f"# horizon {format(path.horizon, '.17g')}\n")
    buf.write(_HEADER + "\n")
    for t, k, d in zip(path.times.tolist(), path.offsets.tolist(), path.increments.tolist()):
        i, j = slot_of(k)
        buf.write(f"{format(t, '.17g')},{j},{i},{d}\n")
    return buf.getvalue()


def ingest_path(source: str, N: int | None = None) -> DrivingPath:
    """Parse and validate an event-list CSV.

    The size N defaults to the largest level named by an ``# init`` line or
    event.  Slots without an ``# init`` line start at 0.
    """
    init: dict[tuple[int, int], int] = {}
    horizon = None
    rows = []
    header_seen = False
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tok = line[1:].split()
            try:
                if tok and tok[0] == "init" and len(tok) == 4:
                    j, i, v = int(tok[1]), int(tok[2]), int(tok[3])
                    init[(i, j)] = v
                elif tok and tok[0] == "horizon" and len(tok) == 2:
                    horizon = float(tok[1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad comment directive {raw!r}",
                                  module="driving") from None
            continue
        if not header_seen:
            if line.replace(" ", "") != _HEADER:
                raise FormatError(f"line {lineno}: expected header {_HEADER!r}", module="driving")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(f"line {lineno}: expected 4 fields", module="driving")
        try:
            t, j, i, d = float(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            raise FormatError(f"line {lineno}: unparsable row {raw!r}", module="driving") from None
        if not 1 <= i <= j:
            raise FormatError(f"line {lineno}: invalid slot (i={i}, j={j})", module="driving")
        rows.append((t, (i, j), d))
    if not header_seen:
        raise FormatError("missing header line", module="driving")
    levels = [j for _, j in init] + [s[1] for _, s, _ in rows]
    if not levels:
        raise FormatError("cannot infer pattern size from an empty file", module="driving")
    if N is None:
        N = max(levels)
    elif max(levels, default=0) > N:
        raise FormatError(f"file names level {max(levels)} but the pattern has {N} levels",
                          module="driving")
    if horizon is None:
        horizon = max((r[0] for r in rows), default=0.0)
    initial = np.zeros(num_slots(N), np.int64)
    for s, v in init.items():
        initial[offset(*s)] = v
    incs = [d for _, _, d in rows]
    bad = [k for k, d in enumerate(incs) if abs(d) != 1]
    if bad:
        t, s, d = rows[bad[0]]
        raise RegularityError(f"jump of size {d} violates the unit-increment condition",
                              module="driving", time=t, slot=s)
    return DrivingPath(N, [r[0] for r in rows], [offset(*r[1]) for r in rows], incs,
                       horizon, initial)
