import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtdyn.errors import DomainError, StructuralError
from gtdyn.patterns import (
    ContinuousPattern,
    DiscretePattern,
    interlacing_margins,
    num_slots,
    offset,
    packed_pattern,
    slot_of,
    slots,
    validate_continuous,
    validate_discrete,
)

from oracles import brute_force_interlacing, random_valid_levels


def test_valid_examples():
    assert validate_discrete([[0], [-1, 0]]).ok
    assert validate_discrete([[0], [-1, 0], [-2, -1, 0]]).ok


def test_left_inequality_must_be_strict():
    res = validate_discrete([[0], [0, 0]])
    assert not res.ok
    [v] = res.violations
    assert (v.i, v.j, v.side) == (2, 2, "left")
    assert v.coords == (0, 0, 0)


def test_missing_entry_is_structural():
    with pytest.raises(StructuralError):
        validate_discrete({(1, 1): 0, (1, 2): -1})


def test_all_violations_reported():
    res = validate_discrete([[0], [0, -1], [5, 5, -9]])
    assert len(res.violations) >= 3
    assert {(v.i, v.j) for v in res.violations} >= {(2, 2), (2, 3), (3, 3)}


@pytest.mark.parametrize("N, expected", [
    (1, [[0]]),
    (2, [[0], [-1, 0]]),
    (3, [[0], [-1, 0], [-2, -1, 0]]),
])
def test_packed_examples(N, expected):
    assert packed_pattern(N).levels() == [tuple(l) for l in expected]


@pytest.mark.parametrize("N", [1, 2, 3])
def test_packed_is_unique_minimal(N):
    # among all valid patterns anchored at x(1,1)=0 with values in [-N, N],
    # the packed one uniquely minimizes the sum of absolute values
    best, winners = None, []
    S = num_slots(N)
    for vals in itertools.product(range(-N, N + 1), repeat=S - 1):
        flat = (0,) + vals
        levels = [list(flat[j * (j - 1) // 2: j * (j + 1) // 2]) for j in range(1, N + 1)]
        if not brute_force_interlacing(levels, strict_left=True):
            continue
        cost = sum(abs(v) for v in flat)
        if best is None or cost < best:
            best, winners = cost, [levels]
        elif cost == best:
            winners.append(levels)
    assert len(winners) == 1
    assert packed_pattern(N).levels() == [tuple(l) for l in winners[0]]


@pytest.mark.parametrize("N", range(1, 9))
def test_packed_valid(N):
    assert validate_discrete(packed_pattern(N)).ok


@pytest.mark.parametrize("N", [0, -1])
def test_packed_rejects_small_N(N):
    with pytest.raises(DomainError):
        packed_pattern(N)


def test_offset_round_trip():
    for k in range(num_slots(40)):
        assert offset(*slot_of(k)) == k
    assert [offset(i, j) for i, j in slots(3)] == list(range(6))
    assert slots(3) == [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]


def test_text_round_trip():
    p = DiscretePattern.from_levels([[0], [-1, 2], [-3, 1, 4]])
    assert p.to_text() == "0\n-1 2\n-3 1 4\n"
    assert DiscretePattern.from_text(p.to_text()) == p
    q = ContinuousPattern.from_levels([[0.25], [-1.5, 2.0]])
    assert ContinuousPattern.from_text(q.to_text()) == q


def test_discrete_rejects_fractional():
    with pytest.raises(DomainError):
        DiscretePattern.from_levels([[0.5]])


def test_values_are_immutable():
    p = packed_pattern(3)
    with pytest.raises(ValueError):
        p.values[0] = 5


@settings(max_examples=200, deadline=None)
@given(N=st.integers(1, 6), seed=st.integers(0, 2**32))
def test_validator_matches_oracle_on_random_valid(N, seed):
    levels = random_valid_levels(N, random.Random(seed))
    assert brute_force_interlacing(levels, strict_left=True)
    p = DiscretePattern.from_levels(levels)
    assert validate_discrete(p).ok
    # strict implies weak
    assert validate_continuous(p.to_continuous()).ok
    # permutation-free: each level nondecreasing
    for lvl in p.levels():
        assert list(lvl) == sorted(lvl)


@settings(max_examples=300, deadline=None)
@given(N=st.integers(1, 4), data=st.data())
def test_validator_matches_oracle_on_arbitrary(N, data):
    flat = data.draw(st.lists(st.integers(-3, 3), min_size=num_slots(N),
                              max_size=num_slots(N)))
    levels = [flat[j * (j - 1) // 2: j * (j + 1) // 2] for j in range(1, N + 1)]
    assert validate_discrete(levels).ok == brute_force_interlacing(levels, True)
    assert validate_continuous(levels).ok == brute_force_interlacing(levels, False)


def test_margins_agree_with_validator():
    rng = random.Random(3)
    for _ in range(100):
        N = rng.randint(2, 5)
        vals = np.array([rng.randint(-3, 3) for _ in range(num_slots(N))])
        left, right = interlacing_margins(vals, N)
        ok = bool(np.all(left >= 1) and np.all(right >= 0))
        assert ok == validate_discrete(DiscretePattern(N, vals)).ok


def test_continuous_slack():
    p = [[0.0], [1e-13, 0.0]]
    assert not validate_continuous(p).ok
    assert validate_continuous(p, slack=1e-12).ok
