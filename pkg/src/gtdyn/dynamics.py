"""Interlacing block/push dynamics driven by a unit-step path.

At a jump time t the pattern is rebuilt level by level.  Level 1 copies its
driver increment.  On level k >= 2 every slot (i, k) looks only at its own
value at t- and at level k-1 already updated to time t, and takes the first
rule that applies:

1. pushed up by (i-1, k-1) if i > 1 and x(i, k) = x(i-1, k-1) - 1;
2. pushed down by (i, k-1) if i < k and x(i, k) = x(i, k-1);
3. driver +1: blocked by (i, k-1) if i < k and x(i, k-1) = x(i, k) + 1,
   otherwise move up;
4. driver -1: blocked by (i-1, k-1) if i > 1 and x(i-1, k-1) = x(i, k),
   otherwise move down;
5. driver 0: stay.

When a push fires, the driver increment at that instant is discarded.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .driving import DrivingPath
from .errors import ContractError, DomainError, RegularityError, StructuralError
from .patterns import (
    DiscretePattern,
    interlacing_margins,
    num_slots,
    offset,
    slot_of,
    slots,
    validate_discrete,
)

__all__ = [
    "OUTCOMES",
    "DynamicsState",
    "UpdateRecord",
    "Trajectory",
    "apply_event",
    "run_dynamics",
]

OUTCOMES = ("idle", "moved +1", "moved -1", "pushed up", "pushed down", "blocked")


@dataclass(frozen=True)
class DynamicsState:
    pattern: DiscretePattern
    clock: float = 0.0


@dataclass(frozen=True)
class UpdateRecord:
    """Per-slot outcome of one sequential update.

    ``outcomes[(i, j)]`` is one of :data:`OUTCOMES`; ``actors[(i, j)]`` names
    the pushing or blocking slot on level j - 1 when there is one.
    """

    time: float
    outcomes: dict
    actors: dict


class Trajectory:
    """Piecewise-constant, right-continuous record of pattern states.

    ``times[0]`` is 0 and holds the initial state; ``states[k]`` is the
    pattern from ``times[k]`` until the next recorded time.
    """

    def __init__(self, N: int, times, states):
        self.N = int(N)
        self.times = np.asarray(times, dtype=np.float64)
        self.states = np.asarray(states)
        if self.states.shape != (self.times.size, num_slots(self.N)):
            raise StructuralError(
                f"states shape {self.states.shape} does not match {self.times.size} times "
                f"and N={self.N}", module="dynamics")

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.N == other.N and np.array_equal(self.times, other.times)
                and np.array_equal(self.states, other.states))

    def __repr__(self):
        return f"Trajectory(N={self.N}, snapshots={len(self)}, end={self.times[-1]})"

    def index_at(self, t) -> np.ndarray | int:
        return np.searchsorted(self.times, t, side="right") - 1

    def at(self, t: float) -> np.ndarray:
        """State values at time t (right-continuous lookup)."""
        k = self.index_at(t)
        if np.any(k < 0):
            raise DomainError(f"time {t} precedes the trajectory start", module="dynamics")
        return self.states[k]

    def pattern(self, k: int) -> DiscretePattern:
        return DiscretePattern(self.N, self.states[k])

    def slot(self, i: int, j: int) -> np.ndarray:
        return self.states[:, offset(i, j)]

    def compressed(self) -> "Trajectory":
        """Drop snapshots identical to their predecessor."""
        keep = np.ones(len(self), bool)
        keep[1:] = np.any(self.states[1:] != self.states[:-1], axis=1)
        return Trajectory(self.N, self.times[keep], self.states[keep])


def _as_increments(increments, N) -> np.ndarray:
    S = num_slots(N)
    if isinstance(increments, Mapping):
        inc = np.zeros(S, np.int64)
        for s, d in increments.items():
            inc[offset(*s)] = d
    else:
        inc = np.array(increments, np.int64).reshape(-1)
        if inc.size != S:
            raise StructuralError(f"need {S} increments, got {inc.size}", module="dynamics")
    bad = np.flatnonzero(np.abs(inc) > 1)
    if bad.size:
        raise RegularityError(f"increment {inc[bad[0]]} has magnitude > 1",
                              module="dynamics", slot=slot_of(int(bad[0])))
    return inc


def _require_valid(pattern: DiscretePattern, t=None):
    res = validate_discrete(pattern)
    if not res.ok:
        raise ContractError(
            "state is not interlacing: " + "; ".join(v.describe() for v in res.violations),
            module="dynamics", time=t)


def apply_event(state: DynamicsState, increments, t: float,
                check_order: bool = False) -> tuple[DynamicsState, UpdateRecord]:
    """One sequential update at time ``t`` with the given driver increments.

    ``increments`` is a mapping ``{(i, j): d}`` (missing slots are 0) or a
    flat array.  With ``check_order`` the update is also computed with the
    slots of each level visited in reverse and the results compared.
    """
    N = state.pattern.N
    if t < state.clock:
        raise DomainError(f"event time {t} precedes the state clock {state.clock}",
                          module="dynamics", time=t)
    _require_valid(state.pattern, t)
    inc = _as_increments(increments, N)
    S = num_slots(N)
    prev = np.array(state.pattern.values, np.int64)
    out = np.empty(S, np.int64)
    outcome = np.empty(S, np.int64)
    actor = np.empty(S, np.int64)
    bad = _kernels.sweep(prev, inc, N, out, outcome, actor, False)
    if bad >= 0:
        raise ContractError("push up and push down conditions hold simultaneously",
                            module="dynamics", time=t, slot=slot_of(bad))
    if check_order:
        alt = np.empty(S, np.int64)
        _kernels.sweep(prev, inc, N, alt, np.empty(S, np.int64), np.empty(S, np.int64), True)
        if not np.array_equal(alt, out):
            raise ContractError("update depends on the within-level order",
                                module="dynamics", time=t)
    names = slots(N)
    record = UpdateRecord(
        time=t,
        outcomes={s: OUTCOMES[c] for s, c in zip(names, outcome.tolist())},
        actors={s: slot_of(a) for s, a in zip(names, actor.tolist()) if a >= 0},
    )
    return DynamicsState(DiscretePattern(N, out), t), record


def run_dynamics(initial: DiscretePattern, driving: DrivingPath, horizon: float | None = None,
                 check_order: bool = False, check_states: bool = False) -> Trajectory:
    """Drive ``initial`` through every jump time of ``driving`` up to ``horizon``.

    Simultaneous jumps form one sequential update.  The result holds the
    initial state at time 0 and one snapshot per jump time.  Only the
    increments of ``driving`` matter, not its initial values.
    """
    if initial.N != driving.N:
        raise StructuralError(f"pattern size {initial.N} != driving size {driving.N}",
                              module="dynamics")
    if horizon is None:
        horizon = driving.horizon
    if horizon > driving.horizon:
        raise DomainError(f"horizon {horizon} exceeds the driving horizon {driving.horizon}",
                          module="dynamics")
    _require_valid(initial, 0.0)
    if horizon < driving.horizon:
        driving = driving.truncated(horizon)
    group_times, starts = driving.groups()
    states = np.empty((group_times.size + 1, num_slots(initial.N)), np.int64)
    status, g, s = _kernels.run(np.array(initial.values, np.int64), driving.offsets,
                                driving.increments.astype(np.int64), starts, initial.N,
                                states, check_order)
    if status == _kernels.PUSH_CONFLICT:
        raise ContractError("push up and push down conditions hold simultaneously",
                            module="dynamics", time=float(group_times[g]), slot=slot_of(s))
    if status != _kernels.OK:
        raise ContractError("update depends on the within-level order",
                            module="dynamics", time=float(group_times[g]), slot=slot_of(s))
    times = np.concatenate(([0.0], group_times))
    traj = Trajectory(initial.N, times, states)
    if check_states:
        left, right = interlacing_margins(states, initial.N)
        if np.any(left < 1) or np.any(right < 0):
            k = int(np.flatnonzero(np.any(left < 1, axis=1) | np.any(right < 0, axis=1))[0])
            raise ContractError("interlacing broken", module="dynamics", time=float(times[k]))
    return traj
