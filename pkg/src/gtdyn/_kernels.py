"""Compiled inner loops for the block/push update."""
from __future__ import annotations

import numba
import numpy as np

IDLE, MOVED_UP, MOVED_DOWN, PUSHED_UP, PUSHED_DOWN, BLOCKED = range(6)

OK = 0
PUSH_CONFLICT = 1


@numba.njit(cache=True)
def sweep(prev, inc, N, out, outcome, actor, reverse):
    """One sequential update: levels 1..N, five-step rule per slot.

    Writes the new pattern to ``out``; ``outcome``/``actor`` receive the
    per-slot outcome code and the flat offset of the pusher/blocker (-1 if
    none).  Returns the flat offset of a slot where both push conditions
    held (impossible for a valid state), else -1.
    """
    out[0] = prev[0] + inc[0]
    actor[0] = -1
    if inc[0] == 1:
        outcome[0] = MOVED_UP
    elif inc[0] == -1:
        outcome[0] = MOVED_DOWN
    else:
        outcome[0] = IDLE
    for k in range(2, N + 1):
        base = k * (k - 1) // 2
        below = (k - 1) * (k - 2) // 2
        for ii in range(k):
            i = k - ii if reverse else ii + 1
            s = base + i - 1
            x = prev[s]
            d = inc[s]
            # level k-1 already holds its time-t values in ``out``
            push_up = i > 1 and x == out[below + i - 2] - 1
            push_down = i < k and x == out[below + i - 1]
            actor[s] = -1
            if push_up and push_down:
                return s
            if push_up:
                out[s] = x + 1
                outcome[s] = PUSHED_UP
                actor[s] = below + i - 2
            elif push_down:
                out[s] = x - 1
                outcome[s] = PUSHED_DOWN
                actor[s] = below + i - 1
            elif d == 1:
                if i < k and out[below + i - 1] == x + 1:
                    out[s] = x
                    outcome[s] = BLOCKED
                    actor[s] = below + i - 1
                else:
                    out[s] = x + 1
                    outcome[s] = MOVED_UP
            elif d == -1:
                if i > 1 and out[below + i - 2] == x:
                    out[s] = x
                    outcome[s] = BLOCKED
                    actor[s] = below + i - 2
                else:
                    out[s] = x - 1
                    outcome[s] = MOVED_DOWN
            else:
                out[s] = x
                outcome[s] = IDLE
    return -1


@numba.njit(cache=True)
def run(initial, offsets, increments, starts, N, states, check_order):
    """Apply every event group in order; ``states[g + 1]`` is the state after group g.

    Returns (status, group index, slot offset); status OK means success.
    With ``check_order`` each update is recomputed with levels swept in
    descending position order and the two results must agree.
    """
    S = initial.size
    states[0, :] = initial
    inc = np.zeros(S, np.int64)
    outcome = np.zeros(S, np.int64)
    actor = np.zeros(S, np.int64)
    alt = np.zeros(S, np.int64)
    for g in range(starts.size - 1):
        for e in range(starts[g], starts[g + 1]):
            inc[offsets[e]] = increments[e]
        bad = sweep(states[g], inc, N, states[g + 1], outcome, actor, False)
        if bad >= 0:
            return PUSH_CONFLICT, g, bad
        if check_order:
            sweep(states[g], inc, N, alt, outcome, actor, True)
            for s in range(S):
                if alt[s] != states[g + 1, s]:
                    return 2, g, s
        for e in range(starts[g], starts[g + 1]):
            inc[offsets[e]] = 0
    return OK, -1, -1
