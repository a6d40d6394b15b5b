import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtdyn.driving import DrivingPath, SeedSpec, poisson_driver
from gtdyn.dynamics import run_dynamics
from gtdyn.errors import DomainError, StructuralError
from gtdyn.patterns import DiscretePattern, packed_pattern
from gtdyn.skorokhod import (
    PiecewisePath,
    TimeDependentInterval,
    check_prop6,
    discrete_sk_map,
    gamma_reflect,
)

from cases import mixed_case
from oracles import one_sided_lower, stepwise_clamp

INF = math.inf


def path(samples):
    """PiecewisePath from values at times 0, 1, 2, ..."""
    return PiecewisePath.from_samples(range(len(samples)), samples)


def values_at(p, times):
    return [p(t) for t in times]


def test_unbounded_is_identity():
    psi = path([0, 3, -2, 5])
    phi = gamma_reflect(TimeDependentInterval.unbounded(), psi)
    assert phi.same_as(psi)


def test_one_sided_example():
    iv = TimeDependentInterval(PiecewisePath.constant(0), PiecewisePath.constant(INF))
    psi = path([0, -1, -2, -1])
    phi = gamma_reflect(iv, psi)
    assert values_at(phi, [0, 1, 2, 3]) == [0, 0, 0, 1]
    assert check_prop6(iv, psi, phi)


def test_two_sided_example():
    iv = TimeDependentInterval(PiecewisePath.constant(0), PiecewisePath.constant(1))
    psi = path([0, 1, 2])
    phi = gamma_reflect(iv, psi)
    assert values_at(phi, [0, 1, 2]) == [0, 1, 1]
    assert check_prop6(iv, psi, phi)


def test_boundary_pushes_path():
    lower = PiecewisePath(0.0, [1.0], [2.0])
    iv = TimeDependentInterval(lower, PiecewisePath.constant(INF))
    psi = PiecewisePath.constant(0)
    phi = gamma_reflect(iv, psi)
    assert phi(0.5) == 0 and phi(1.0) == 2 and phi(7.0) == 2
    assert check_prop6(iv, psi, phi)


def test_initial_clamp():
    iv = TimeDependentInterval(PiecewisePath.constant(1), PiecewisePath.constant(2))
    phi = gamma_reflect(iv, PiecewisePath.constant(5))
    assert phi(0) == 2
    assert check_prop6(iv, PiecewisePath.constant(5), phi)


def test_degenerate_interval_pins():
    iv = TimeDependentInterval(PiecewisePath.constant(3), PiecewisePath.constant(3))
    phi = gamma_reflect(iv, path([0, 4, -9]))
    assert values_at(phi, [0, 1, 2]) == [3, 3, 3]


def test_crossed_interval_names_time():
    iv = TimeDependentInterval(PiecewisePath(0.0, [2.0], [5.0]), PiecewisePath.constant(1))
    with pytest.raises(DomainError) as exc:
        gamma_reflect(iv, PiecewisePath.constant(0))
    assert exc.value.time == 2.0


def test_checker_containment_failure():
    iv = TimeDependentInterval(PiecewisePath.constant(0), PiecewisePath.constant(INF))
    psi = PiecewisePath.constant(-1)
    rep = check_prop6(iv, psi, psi)
    assert not rep and rep.condition == "containment"


def test_checker_catches_bump():
    iv = TimeDependentInterval(PiecewisePath.constant(0), PiecewisePath.constant(INF))
    psi = PiecewisePath.constant(5)
    phi = gamma_reflect(iv, psi)
    assert check_prop6(iv, psi, phi)
    bumped = PiecewisePath(5.0, [1.0, 2.0], [6.0, 5.0])
    rep = check_prop6(iv, psi, bumped)
    assert not rep and rep.condition == "(5)"
    assert rep.window == (0.0, 1.0)


def test_checker_horizon_mismatch():
    iv = TimeDependentInterval(PiecewisePath.constant(0, 2.0), PiecewisePath.constant(INF, 3.0))
    psi = PiecewisePath.constant(1, 2.0)
    with pytest.raises(StructuralError):
        check_prop6(iv, psi, psi)


def _random_step(rng, times, lo, hi):
    vals = [rng.randint(lo, hi) for _ in range(len(times) + 1)]
    return PiecewisePath(vals[0], times, vals[1:]), (vals[0], list(zip(times, vals[1:])))


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_one_sided_closed_form(seed):
    rng = random.Random(seed)
    tl = sorted(rng.sample(range(1, 30), rng.randint(0, 8)))
    tp = sorted(rng.sample(range(1, 30), rng.randint(0, 8)))
    lower, lo_raw = _random_step(rng, [float(t) for t in tl], -5, 5)
    psi, psi_raw = _random_step(rng, [float(t) for t in tp], -5, 5)
    iv = TimeDependentInterval(lower, PiecewisePath.constant(INF))
    phi = gamma_reflect(iv, psi)
    for t, v in one_sided_lower(lo_raw, psi_raw).items():
        assert phi(t) == v
    # mirror image: upper boundary only
    iv2 = TimeDependentInterval(PiecewisePath.constant(-INF),
                                PiecewisePath(-lower.initial, lower.times, -lower.values))
    psi2 = PiecewisePath(-psi.initial, psi.times, -psi.values)
    phi2 = gamma_reflect(iv2, psi2)
    for t, v in one_sided_lower(lo_raw, psi_raw).items():
        assert phi2(t) == -v
    assert check_prop6(iv, psi, phi) and check_prop6(iv2, psi2, phi2)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_two_sided_clamp_oracle(seed):
    rng = random.Random(seed)
    T = lambda: sorted(float(t) for t in rng.sample(range(1, 40), rng.randint(0, 10)))  # noqa: E731
    tl, tr, tp = T(), T(), T()
    lower, lo_raw = _random_step(rng, tl, -6, 0)
    upper, up_raw = _random_step(rng, tr, 0, 6)
    psi, psi_raw = _random_step(rng, tp, -8, 8)
    iv = TimeDependentInterval(lower, upper)
    phi = gamma_reflect(iv, psi)
    for t, v in stepwise_clamp(lo_raw, up_raw, psi_raw).items():
        assert phi(t) == v
    assert check_prop6(iv, psi, phi)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32), eps=st.floats(0, 1e-3))
def test_continuity(seed, eps):
    rng = random.Random(seed)
    times = sorted(float(t) for t in rng.sample(range(1, 40), 12))
    lv = [rng.uniform(-3, 0) for _ in range(13)]
    rv = [rng.uniform(0, 3) for _ in range(13)]
    pv = [rng.uniform(-5, 5) for _ in range(13)]
    mk = lambda v: PiecewisePath(v[0], times, v[1:])  # noqa: E731
    jitter = lambda v: [x + rng.uniform(-eps, eps) for x in v]  # noqa: E731
    phi = gamma_reflect(TimeDependentInterval(mk(lv), mk(rv)), mk(pv))
    phi_eps = gamma_reflect(TimeDependentInterval(mk(jitter(lv)), mk(jitter(rv))), mk(jitter(pv)))
    grid = [0.0] + times
    gap = max(abs(phi(t) - phi_eps(t)) for t in grid)
    assert gap <= 3 * eps + 1e-12


def test_sk_map_N1_is_driver():
    drv = poisson_driver(1, 1.0, 10.0, SeedSpec(2))
    init = DiscretePattern.from_levels([[4]])
    traj = discrete_sk_map(drv, init)
    assert np.array_equal(traj.slot(1, 1), [4 + len(drv.times[drv.times <= t])
                                           for t in traj.times])


def test_sk_map_push_example():
    drv = DrivingPath.from_events(2, [(1.0, (1, 1), 1)], 2.0)
    traj = discrete_sk_map(drv, packed_pattern(2))
    assert traj.states[-1].tolist() == [1, -1, 1]
    assert traj == run_dynamics(packed_pattern(2), drv)


@pytest.mark.parametrize("index", range(80))
def test_sk_map_equals_dynamics(index):
    _, initial, drv = mixed_case(index, seed=23)
    assert discrete_sk_map(drv, initial) == run_dynamics(initial, drv)
