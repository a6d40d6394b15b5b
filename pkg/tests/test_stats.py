import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats as sps

from gtdyn.driving import SeedSpec
from gtdyn.errors import DomainError
from gtdyn.patterns import validate_continuous
from gtdyn.stats import (
    EXPECTED_LEVEL2_GAP,
    SampleSet,
    corner_eigenvalues,
    eig2_closed_form,
    empirical_ks,
    gue_corners_batch,
    gue_corners_sample,
    gue_matrix,
    moment_summary,
)

from oracles import ks_quadratic


def test_expected_gap_oracles():
    # E[gap] = 2 E sqrt(a^2 + b^2 + c^2), a, b, c ~ N(0, 1/2): sqrt(2) * E chi_3
    assert math.isclose(EXPECTED_LEVEL2_GAP, 2.256758334191025, rel_tol=1e-12)
    assert math.isclose(math.sqrt(2) * sps.chi(3).mean(), EXPECTED_LEVEL2_GAP, rel_tol=1e-12)
    dens = lambda r: r * r * math.exp(-r * r / 2) * math.sqrt(2 / math.pi)  # noqa: E731
    m, _ = integrate.quad(lambda r: r * dens(r), 0, math.inf)
    assert math.isclose(math.sqrt(2) * m, EXPECTED_LEVEL2_GAP, rel_tol=1e-10)
    # brute-force Monte Carlo of the same chi moment, independent of the sampler
    abc = np.random.default_rng(0).standard_normal((200_000, 3)) * math.sqrt(0.5)
    assert abs(2 * np.linalg.norm(abc, axis=1).mean() - EXPECTED_LEVEL2_GAP) < 0.01


def test_N1_moments():
    v = gue_corners_batch(1, 1.0, 10_000, 3)[:, 0]
    assert -0.03 <= v.mean() <= 0.03
    assert 0.95 <= v.var(ddof=1) <= 1.05


def test_every_draw_interlaces():
    draws = gue_corners_batch(4, 2.0, 2000, 4)
    for row in draws:
        assert validate_continuous(dict(zip(_slots(4), row)), slack=1e-10).ok


def _slots(N):
    return [(i, j) for j in range(1, N + 1) for i in range(1, j + 1)]


def test_level2_gap():
    v = gue_corners_batch(2, 1.0, 10_000, 5)
    gap = v[:, 2] - v[:, 1]
    assert 2.21 <= gap.mean() <= 2.31


def test_scaling():
    a = gue_corners_sample(3, 1.0, SeedSpec(8, 1))
    b = gue_corners_sample(3, 4.0, SeedSpec(8, 1))
    assert np.allclose(b.values, 2.0 * np.asarray(a.values), rtol=0, atol=1e-12)


def test_single_matches_batch():
    batch = gue_corners_batch(3, 1.0, 3, 8)
    for r in range(3):
        assert np.array_equal(batch[r], gue_corners_sample(3, 1.0, SeedSpec(8, r)).values)


def test_closed_form_2x2():
    rng = np.random.default_rng(1)
    H = np.stack([gue_matrix(2, rng) for _ in range(500)])
    assert np.allclose(eig2_closed_form(H), np.linalg.eigvalsh(H), atol=1e-10)
    assert np.allclose(corner_eigenvalues(H)[:, 1:], eig2_closed_form(H), atol=1e-10)


def test_matrix_is_hermitian_with_right_variances():
    rng = np.random.default_rng(2)
    H = np.stack([gue_matrix(3, rng) for _ in range(20_000)])
    assert np.array_equal(H, np.conj(np.swapaxes(H, -1, -2)))
    assert abs(H[:, 0, 0].real.var() - 1) < 0.03
    assert abs(H[:, 0, 1].real.var() - 0.5) < 0.02
    assert abs(H[:, 0, 1].imag.var() - 0.5) < 0.02


def test_bad_time():
    with pytest.raises(DomainError):
        gue_corners_sample(2, 0.0, SeedSpec(0))


def test_ks_examples():
    a = np.random.default_rng(0).standard_normal(100)
    assert empirical_ks(a, a.copy()) == 0.0
    assert empirical_ks([0.0], [1.0]) == 1.0
    with pytest.raises(DomainError):
        empirical_ks([], [1.0])


def test_ks_quadratic_oracle():
    rng = np.random.default_rng(3)
    for _ in range(3):
        a = rng.standard_normal(1000)
        b = rng.standard_normal(1000) * 1.1 + 0.05
        assert empirical_ks(a, b) == ks_quadratic(a.tolist(), b.tolist())
    # ties and unequal sizes
    a = rng.integers(0, 5, 300).astype(float)
    b = rng.integers(0, 6, 170).astype(float)
    assert empirical_ks(a, b) == ks_quadratic(a.tolist(), b.tolist())


def test_ks_matches_scipy():
    rng = np.random.default_rng(4)
    a, b = rng.standard_normal(777), rng.standard_normal(1234) + 0.1
    assert math.isclose(empirical_ks(a, b), sps.ks_2samp(a, b).statistic, rel_tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(a=st.lists(st.floats(-50, 50), min_size=1, max_size=40),
       b=st.lists(st.floats(-50, 50), min_size=1, max_size=40))
def test_ks_symmetry_and_invariance(a, b):
    d = empirical_ks(a, b)
    assert 0.0 <= d <= 1.0
    assert d == empirical_ks(b, a)
    f = lambda v: [math.atan(x) * 3 + 1 for x in v]  # noqa: E731
    # atan is strictly increasing; rounding may merge values only if they were tied
    if len(set(f(a + b))) == len(set(a + b)):
        assert d == empirical_ks(f(a), f(b))
    assert d == ks_quadratic(a, b)


def test_moment_examples():
    m = moment_summary([1, 1, 1])
    assert (m.mean, m.variance, m.count) == (1.0, 0.0, 3)
    m = moment_summary(SampleSet("x", [0, 2]))
    assert (m.mean, m.variance, m.min, m.max) == (1.0, 2.0, 0.0, 2.0)
    assert math.isnan(moment_summary([5.0]).variance)
    with pytest.raises(DomainError):
        moment_summary([])


def test_moments_normal():
    m = moment_summary(np.random.default_rng(6).standard_normal(100_000))
    assert abs(m.mean) < 0.015 and abs(m.variance - 1) < 0.015
