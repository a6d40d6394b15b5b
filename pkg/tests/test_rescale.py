import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtdyn.driving import SeedSpec, make_driver
from gtdyn.dynamics import Trajectory, run_dynamics
from gtdyn.errors import DomainError
from gtdyn.patterns import level_slice, packed_pattern
from gtdyn.rescale import (
    DRIVER_TAG,
    REPORT_SCHEMA,
    ScalingPreset,
    convergence_pipeline,
    dynamics_marginals,
    preset_scaling,
    rescale_trajectory,
    unrescale,
)

from cases import mixed_case


def _single(t, x):
    return Trajectory(1, [0.0, t], [[0], [x]])


def test_identity_preset():
    _, init, drv = mixed_case(7)
    traj = run_dynamics(init, drv)
    rt = rescale_trajectory(traj, ScalingPreset.identity())
    assert np.array_equal(rt.times, traj.times)
    assert np.array_equal(rt.states, traj.states)


@pytest.mark.parametrize("t, x, expected", [(100, 110, (1.0, 1.0)), (25, 30, (0.25, 0.5))])
def test_substitution(t, x, expected):
    rt = rescale_trajectory(_single(t, x), ScalingPreset(100, 1.0, 10.0))
    assert (rt.times[1], rt.states[1, 0]) == expected


def test_presets():
    p = preset_scaling("poisson", 400)
    assert (p.slope, p.b) == (1.0, 20.0)
    p = preset_scaling("bernoulli", 400, p=0.5)
    assert (p.slope, p.b) == (0.5, 10.0)
    assert p.a(8.0) == 4.0
    p = preset_scaling("lazy", 100, q=0.5)
    assert (p.slope, p.b) == (0.0, 10.0)
    with pytest.raises(DomainError):
        preset_scaling("cauchy", 10)
    with pytest.raises(DomainError):
        ScalingPreset(10, 1.0, 0.0)


@pytest.mark.parametrize("kind", ["poisson", "bernoulli", "lazy"])
def test_b_increasing(kind):
    bs = [preset_scaling(kind, n, q=0.25, p=0.3).b for n in range(1, 500)]
    assert all(x < y for x, y in zip(bs, bs[1:]))


@settings(max_examples=60, deadline=None)
@given(index=st.integers(0, 1000), n=st.integers(1, 10_000),
       kind=st.sampled_from(["poisson", "bernoulli", "lazy"]))
def test_round_trip_and_order(index, n, kind):
    _, init, drv = mixed_case(index, seed=5)
    traj = run_dynamics(init, drv)
    preset = preset_scaling(kind, n, p=0.37, q=0.21, rate=1.7)
    rt = rescale_trajectory(traj, preset)
    back = unrescale(rt, preset)
    assert np.array_equal(back.states, traj.states)
    assert np.allclose(back.times, traj.times, rtol=1e-12, atol=0)
    for k in range(1, init.N + 1):
        lvl = rt.states[:, level_slice(k)]
        assert np.all(np.diff(lvl, axis=1) >= 0)


def test_dynamics_marginals_match_run_dynamics():
    vals = dynamics_marginals("poisson", 3, 25, [0.5, 1.0], 3, 4)
    preset = preset_scaling("poisson", 25)
    for r in range(3):
        drv = make_driver("poisson", 3, 25.0, SeedSpec(4, r, (DRIVER_TAG, 25)))
        traj = run_dynamics(packed_pattern(3), drv)
        for ti, t in enumerate((0.5, 1.0)):
            expected = (traj.at(25 * t) - preset.a(25 * t)) / preset.b
            assert np.array_equal(vals[r, ti], expected)


def test_pipeline_degenerate_n1():
    rep = convergence_pipeline("poisson", [1], 2, [1.0], 50, 0, h=1e-2)
    assert rep["schema"] == REPORT_SCHEMA
    assert len(rep["entries"]) == 3
    assert all(0.0 <= e["ks"] <= 1.0 for e in rep["entries"])


def test_pipeline_replay():
    a = convergence_pipeline("bernoulli", [4, 16], 2, [0.5, 1.0], 40, 3, h=1e-2, params={"p": 0.5})
    b = convergence_pipeline("bernoulli", [4, 16], 2, [0.5, 1.0], 40, 3, h=1e-2, params={"p": 0.5})
    assert a == b
    assert {e["n"] for e in a["entries"]} == {4, 16}


def test_pipeline_rejects_fractional_lattice_time():
    with pytest.raises(DomainError):
        convergence_pipeline("lazy", [3], 2, [0.5], 10, 0, h=1e-2)


def test_pipeline_slot_33_improves():
    rep = convergence_pipeline("poisson", [25, 100, 400], 3, [1.0], 4000, 1)
    ks = {e["n"]: e["ks"] for e in rep["entries"] if (e["level"], e["index"]) == (3, 3)}
    print("slot (3,3) KS by n:", ks)
    assert ks[400] < ks[25]


def test_random_orders_unchanged():
    rng = random.Random(0)
    for _ in range(20):
        x = sorted(rng.sample(range(-50, 50), 3))
        traj = Trajectory(2, [0.0, 5.0], [[0, -1, 0], [x[1], x[0], x[2]]])
        rt = rescale_trajectory(traj, ScalingPreset(7, 0.3, 2.5))
        assert rt.states[1, 1] < rt.states[1, 2]
