"""Diffusive rescaling and the convergence pipeline.

A state (t, x) of a run in sped-up time becomes (t / n, (x - a(t)) / b).
The pipeline simulates driven dynamics for several n, rescales them, and
compares one-dimensional marginals with the Warren grid sampler through
the two-sample KS distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .driving import SeedSpec, make_driver
from .dynamics import Trajectory
from .errors import DomainError, StructuralError
from .patterns import DiscretePattern, num_slots, packed_pattern, slot_of, validate_discrete
from .stats import empirical_ks
from .warren import DEFAULT_STEP, warren_marginals

__all__ = [
    "ScalingPreset",
    "RescaledTrajectory",
    "rescale_trajectory",
    "unrescale",
    "preset_scaling",
    "dynamics_marginals",
    "convergence_pipeline",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "gtdyn.convergence/1"
# stream tags separating the two sides of a comparison
DRIVER_TAG = 3


@dataclass(frozen=True)
class ScalingPreset:
    """Time factor n, centering a(s) = slope * s (or ``centering``), normalization b."""

    n: float
    slope: float
    b: float
    centering: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"time factor must be positive, got {self.n}", module="rescale")
        if not self.b > 0:
            raise DomainError(f"normalization must be positive, got {self.b}", module="rescale")

    def a(self, s):
        s = np.asarray(s, np.float64)
        return self.centering(s) if self.centering is not None else self.slope * s

    @classmethod
    def identity(cls) -> "ScalingPreset":
        return cls(1.0, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class RescaledTrajectory:
    N: int
    times: np.ndarray
    states: np.ndarray

    def at(self, t: float) -> np.ndarray:
        k = np.searchsorted(self.times, t, side="right") - 1
        return self.states[k]


def rescale_trajectory(traj: Trajectory, preset: ScalingPreset) -> RescaledTrajectory:
    a = preset.a(traj.times)
    states = (traj.states - a[:, None]) / preset.b
    return RescaledTrajectory(traj.N, traj.times / preset.n, states)


def unrescale(rt: RescaledTrajectory, preset: ScalingPreset) -> Trajectory:
    """Inverse affine map; integer states are recovered by rounding."""
    times = rt.times * preset.n
    states = rt.states * preset.b + preset.a(times)[:, None]
    return Trajectory(rt.N, times, np.rint(states).astype(np.int64))


def preset_scaling(kind: str, n: float, *, rate: float = 1.0, p: float = 0.5,
                   q: float = 0.5) -> ScalingPreset:
    """Invariance-principle scaling for the built-in drivers.

    poisson(rate): a(s) = rate * s, b = sqrt(rate * n); for rate 1 this is
    (Y(nt) - nt) / sqrt(n).  bernoulli(p): a(s) = p * s,
    b = sqrt(p (1 - p) n).  lazy(q): a = 0, b = sqrt(2 q n).
    """
    if not n >= 1:
        raise DomainError(f"time factor must be >= 1, got {n}", module="rescale")
    if kind == "poisson":
        return ScalingPreset(n, rate, math.sqrt(rate * n))
    if kind == "bernoulli":
        if not 0 < p < 1:
            raise DomainError(f"Bernoulli scaling needs 0 < p < 1, got {p}", module="rescale")
        return ScalingPreset(n, p, math.sqrt(p * (1 - p) * n))
    if kind == "lazy":
        if not 0 < q <= 0.5:
            raise DomainError(f"lazy scaling needs 0 < q <= 1/2, got {q}", module="rescale")
        return ScalingPreset(n, 0.0, math.sqrt(2 * q * n))
    raise DomainError(f"unknown driver kind {kind!r}", module="rescale")


def _driver_params(params: dict | None) -> dict:
    params = dict(params or {})
    unknown = set(params) - {"rate", "p", "q"}
    if unknown:
        raise DomainError(f"unknown driver parameters {sorted(unknown)}", module="rescale")
    return params


def dynamics_marginals(kind: str, N: int, n: int, times: Sequence[float], replicas: int,
                       seed: int, *, initial: DiscretePattern | None = None,
                       params: dict | None = None, first_stream: int = 0) -> np.ndarray:
    """Rescaled states at ``times`` for many replicas of the driven dynamics.

    Replica r is driven by a ``make_driver`` path seeded ``SeedSpec(seed, first_stream + r)``
    tagged ``(DRIVER_TAG, n)``.  Returns shape (replicas, len(times), N(N+1)/2).
    """
    params = _driver_params(params)
    preset = preset_scaling(kind, n, **params)
    initial = packed_pattern(N) if initial is None else initial
    if initial.N != N or not validate_discrete(initial).ok:
        raise DomainError("initial pattern must be a valid size-N pattern", module="rescale")
    horizon = n * max(times)
    eval_t = np.asarray(times, np.float64) * n
    shift = preset.a(eval_t)[:, None]
    init = np.array(initial.values, np.int64)
    out = np.empty((replicas, len(times), num_slots(N)))
    for r in range(replicas):
        drv = make_driver(kind, N, horizon, SeedSpec(seed, first_stream + r, (DRIVER_TAG, n)), **params)
        group_times, starts = drv.groups()
        states = np.empty((group_times.size + 1, init.size), np.int64)
        status, g, s = _kernels.run(init, drv.offsets, drv.increments.astype(np.int64),
                                    starts, N, states, False)
        if status != _kernels.OK:
            raise DomainError("dynamics update failed", module="rescale",
                              time=float(group_times[g]), slot=slot_of(s))
        idx = np.searchsorted(group_times, eval_t, side="right")
        out[r] = (states[idx] - shift) / preset.b
    return out


def _slot_label(k: int) -> tuple[int, int]:
    i, j = slot_of(k)
    return j, i


def convergence_pipeline(kind: str, n_values: Sequence[int], N: int, times: Sequence[float],
                         replicas: int, seed: int, *, h: float = DEFAULT_STEP,
                         params: dict | None = None, warren_replicas: int | None = None,
                         initial: DiscretePattern | None = None) -> dict:
    """KS distance between rescaled dynamics and the Warren sampler.

    For each n, ``replicas`` runs of the ``kind``-driven dynamics over
    horizon n * max(times) are rescaled and their per-slot marginals at each
    evaluation time compared with ``warren_replicas`` (default: ``replicas``)
    Warren grid samples started from 0.  Returns a JSON-ready report.
    """
    n_values = [int(n) for n in n_values]
    if not n_values or any(n < 1 for n in n_values):
        raise DomainError("n values must be positive integers", module="rescale")
    if replicas < 1:
        raise DomainError("need at least one replica", module="rescale")
    params = _driver_params(params)
    if kind in ("bernoulli", "lazy"):
        for n in n_values:
            for t in times:
                if abs(n * t - round(n * t)) > 1e-9:
                    raise DomainError(f"n * t = {n * t} must be an integer for {kind} drivers",
                                      module="rescale")
    M_w = replicas if warren_replicas is None else int(warren_replicas)
    ref = warren_marginals(N, list(times), M_w, seed, h=h)
    entries = []
    for n in n_values:
        sim = dynamics_marginals(kind, N, n, times, replicas, seed, initial=initial,
                                 params=params)
        preset = preset_scaling(kind, n, **params)
        for ti, t in enumerate(times):
            for k in range(num_slots(N)):
                j, i = _slot_label(k)
                entries.append({
                    "n": n, "level": j, "index": i, "time": float(t),
                    "ks": empirical_ks(sim[:, ti, k], ref[:, ti, k]),
                    "b_n": preset.b, "slope": preset.slope,
                })
    return {
        "schema": REPORT_SCHEMA,
        "driver": kind,
        "params": params,
        "N": N,
        "times": [float(t) for t in times],
        "n_values": n_values,
        "grid_step": h,
        "seed": seed,
        "samples": {"dynamics": replicas, "warren": M_w},
        "streams": {"dynamics": f"SeedSpec({seed}, r) tagged ({DRIVER_TAG}, n), r < {replicas}",
                    "warren": f"SeedSpec({seed}, r), r < {M_w}"},
        "initial": "packed" if initial is None else initial.to_text(),
        "entries": entries,
    }
