"""Reflection of piecewise-constant paths in a time-dependent interval.

Given boundaries l <= r and a path psi, the reflected path phi = psi + eta
stays in [l(t), r(t)], and the regulator eta may only increase while phi is
below r and only decrease while phi is above l (eta(0-) = 0).  For
right-continuous step functions this is computed on the merged breakpoint
timeline by the clamp recursion

    phi(0)   = min(max(psi(0), l(0)), r(0))
    phi(t_k) = min(max(phi(t_{k-1}) + psi(t_k) - psi(t_{k-1}), l(t_k)), r(t_k))

:func:`check_reflection` verifies the defining conditions independently of
how phi was produced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .driving import DrivingPath
from .dynamics import Trajectory
from .errors import DomainError, StructuralError
from .patterns import DiscretePattern, num_slots, offset

__all__ = [
    "PiecewisePath",
    "TimeDependentInterval",
    "gamma_reflect",
    "Prop6Report",
    "check_reflection",
    "check_prop6",
    "discrete_sk_map",
]


@dataclass(frozen=True, eq=False)
class PiecewisePath:
    """Right-continuous step function: ``initial`` on [0, times[0]), then
    ``values[k]`` on [times[k], times[k+1]).  Breakpoint times are strictly
    increasing and positive.  Values may be infinite (boundaries)."""

    initial: float
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))
    horizon: float = math.inf

    def __post_init__(self):
        t = np.array(self.times, np.float64).reshape(-1)
        v = np.array(self.values, np.float64).reshape(-1)
        if t.size != v.size:
            raise StructuralError("breakpoint times and values differ in length",
                                  module="skorokhod")
        if t.size and (t[0] <= 0 or np.any(np.diff(t) <= 0)):
            raise StructuralError("breakpoint times must be positive and strictly increasing",
                                  module="skorokhod")
        if t.size and t[-1] > self.horizon:
            raise StructuralError("breakpoint beyond the horizon", module="skorokhod")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "initial", float(self.initial))
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "horizon", float(self.horizon))

    @classmethod
    def constant(cls, value: float, horizon: float = math.inf) -> "PiecewisePath":
        return cls(value, horizon=horizon)

    @classmethod
    def from_samples(cls, times, values, horizon: float = math.inf) -> "PiecewisePath":
        """Build from values at times ``(0, t_1, t_2, ...)``."""
        times = np.asarray(times, np.float64)
        values = np.asarray(values, np.float64)
        if times.size == 0 or times[0] != 0:
            raise StructuralError("samples must start at time 0", module="skorokhod")
        return cls(values[0], times[1:], values[1:], horizon)

    def __call__(self, t):
        """Value at ``t`` (scalar or array), right-continuous."""
        k = np.searchsorted(self.times, t, side="right")
        table = np.concatenate(([self.initial], self.values))
        out = table[k]
        return out.item() if np.ndim(out) == 0 else out

    def left_limit(self, t):
        k = np.searchsorted(self.times, t, side="left")
        table = np.concatenate(([self.initial], self.values))
        out = table[k]
        return out.item() if np.ndim(out) == 0 else out

    def simplified(self) -> "PiecewisePath":
        """Drop breakpoints that do not change the value."""
        table = np.concatenate(([self.initial], self.values))
        keep = table[1:] != table[:-1]
        return PiecewisePath(self.initial, self.times[keep], self.values[keep], self.horizon)

    def same_as(self, other: "PiecewisePath") -> bool:
        a, b = self.simplified(), other.simplified()
        return (a.initial == b.initial and np.array_equal(a.times, b.times)
                and np.array_equal(a.values, b.values))

    def __repr__(self):
        pts = [f"0:{self.initial:g}"] + [f"{t:g}:{v:g}" for t, v in zip(self.times, self.values)]
        return "PiecewisePath(" + ", ".join(pts) + ")"


@dataclass(frozen=True)
class TimeDependentInterval:
    lower: PiecewisePath
    upper: PiecewisePath

    @classmethod
    def unbounded(cls) -> "TimeDependentInterval":
        return cls(PiecewisePath.constant(-math.inf), PiecewisePath.constant(math.inf))


def _merged_times(*paths: PiecewisePath) -> np.ndarray:
    return np.union1d(np.zeros(1), np.concatenate([p.times for p in paths]))


def gamma_reflect(interval: TimeDependentInterval, psi: PiecewisePath) -> PiecewisePath:
    """Reflect ``psi`` in ``interval`` by the clamp recursion."""
    lo, hi = interval.lower, interval.upper
    if not math.isfinite(psi.initial) or not np.all(np.isfinite(psi.values)):
        raise DomainError("driving path must be finite", module="skorokhod")
    T = _merged_times(lo, hi, psi)
    lv, rv, pv = lo(T), hi(T), psi(T)
    crossed = np.flatnonzero(lv > rv)
    if crossed.size:
        t = float(T[crossed[0]])
        raise DomainError(f"empty interval: l={lv[crossed[0]]} > r={rv[crossed[0]]}",
                          module="skorokhod", time=t)
    phi = np.empty(T.size)
    cur = min(max(pv[0], lv[0]), rv[0])
    phi[0] = cur
    for k in range(1, T.size):
        cur = min(max(cur + (pv[k] - pv[k - 1]), lv[k]), rv[k])
        phi[k] = cur
    return PiecewisePath(phi[0], T[1:], phi[1:], psi.horizon).simplified()


@dataclass(frozen=True)
class Prop6Report:
    """Outcome of :func:`check_reflection`.

    ``condition`` is ``"containment"``, ``"(4)"``, ``"(5)"``, ``"(6)"`` or
    ``"(7)"``; ``window`` is the time window (s, t] of the first violation.
    """

    ok: bool
    condition: str | None = None
    window: tuple[float, float] | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def check_reflection(interval: TimeDependentInterval, psi: PiecewisePath, phi: PiecewisePath,
                     atol: float = 0.0) -> Prop6Report:
    """Verify that ``phi`` reflects ``psi`` in ``interval``.

    Checks, at the resolution of the merged breakpoints and in time order:
    containment phi in [l, r]; (4) eta nondecreasing over windows where
    phi < r throughout; (5) eta nonincreasing over windows where phi > l
    throughout; (6)/(7) the sign of each jump of eta (eta(0-) = 0).
    ``atol`` absorbs floating-point rounding.
    """
    lo, hi = interval.lower, interval.upper
    horizons = {lo.horizon, hi.horizon, psi.horizon, phi.horizon}
    finite = {h for h in horizons if math.isfinite(h)}
    if len(finite) > 1 or (finite and len(horizons) > 1):
        raise StructuralError(f"paths have mismatched horizons {sorted(horizons)}",
                              module="skorokhod")
    T = _merged_times(lo, hi, psi, phi)
    lv, rv, pv, fv = lo(T), hi(T), psi(T), phi(T)
    eta = fv - pv
    below_r = fv < rv - atol
    above_l = fv > lv + atol

    def fail(cond, k, detail):
        s = float(T[k - 1]) if k > 0 else None
        return Prop6Report(False, cond, (s, float(T[k])), detail)

    for k in range(T.size):
        if not (lv[k] - atol <= fv[k] <= rv[k] + atol):
            return fail("containment", k, f"phi={fv[k]} outside [{lv[k]}, {rv[k]}]")
        if k > 0:
            step = eta[k] - eta[k - 1]
            # on (t_{k-1}, t_k] phi takes the values at t_{k-1} and t_k
            if below_r[k - 1] and below_r[k] and step < -atol:
                return fail("(4)", k, f"eta decreased by {-step} while phi < r")
            if above_l[k - 1] and above_l[k] and step > atol:
                return fail("(5)", k, f"eta increased by {step} while phi > l")
        jump = eta[k] - (eta[k - 1] if k > 0 else 0.0)
        if below_r[k] and jump < -atol:
            return fail("(6)", k, f"eta jumped by {jump} while phi < r")
        if above_l[k] and jump > atol:
            return fail("(7)", k, f"eta jumped by {jump} while phi > l")
    return Prop6Report(True)


check_prop6 = check_reflection


def _slot_driver(driving: DrivingPath, k: int, start: float) -> PiecewisePath:
    t, v = driving.slot_path(k)
    v = v - driving.initial[k] + start
    return PiecewisePath(float(start), t, v.astype(np.float64), driving.horizon)


def _minus_one(p: PiecewisePath) -> PiecewisePath:
    return PiecewisePath(p.initial - 1, p.times, p.values - 1, p.horizon)


def discrete_sk_map(driving: DrivingPath, initial: DiscretePattern) -> Trajectory:
    """Build the interlacing dynamics level by level through reflections.

    Slot (1, 1) follows its driver started at its initial value.  Slot
    (i, k), k >= 2, is its driver reflected in

        [x(i-1, k-1), x(i, k-1) - 1]   for 1 < i < k
        (-inf,        x(1, k-1) - 1]   for i = 1
        [x(k-1, k-1), +inf)            for i = k

    built from the already constructed level k - 1.  The trajectory is
    reported at time 0 and at every jump time of ``driving``.
    """
    if initial.N != driving.N:
        raise StructuralError(f"pattern size {initial.N} != driving size {driving.N}",
                              module="skorokhod")
    N = initial.N
    paths: list[PiecewisePath] = [None] * num_slots(N)
    paths[0] = _slot_driver(driving, 0, initial.values[0])
    neg = PiecewisePath.constant(-math.inf, driving.horizon)
    pos = PiecewisePath.constant(math.inf, driving.horizon)
    for k in range(2, N + 1):
        for i in range(1, k + 1):
            lower = paths[offset(i - 1, k - 1)] if i > 1 else neg
            upper = _minus_one(paths[offset(i, k - 1)]) if i < k else pos
            s = offset(i, k)
            psi = _slot_driver(driving, s, initial.values[s])
            try:
                paths[s] = gamma_reflect(TimeDependentInterval(lower, upper), psi)
            except DomainError as exc:
                exc.slot = (i, k)
                raise
    group_times, _ = driving.groups()
    times = np.concatenate(([0.0], group_times))
    states = np.column_stack([p(times) for p in paths])
    return Trajectory(N, times, states.astype(np.int64))
