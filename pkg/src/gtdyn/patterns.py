"""Gelfand-Tsetlin patterns: storage, text form and interlacing checks.

A pattern of size N holds one coordinate per slot (i, j) with
1 <= i <= j <= N; j is the level, i the position within the level.
Values are stored densely in a flat triangular layout, level 1 first:

    offset(i, j) = j * (j - 1) / 2 + (i - 1)

so level j occupies offsets [j(j-1)/2, j(j+1)/2).  The inverse recovers j
as (1 + isqrt(1 + 8 * offset)) // 2.

Discrete patterns satisfy, for 2 <= i <= j <= N,

    x(i-1, j) < x(i-1, j-1) <= x(i, j)

and continuous patterns the same chain with both inequalities weak.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, StructuralError

__all__ = [
    "num_slots",
    "offset",
    "slot_of",
    "slots",
    "level_slice",
    "DiscretePattern",
    "ContinuousPattern",
    "Violation",
    "ValidationResult",
    "validate_discrete",
    "validate_continuous",
    "packed_pattern",
    "interlacing_margins",
]


def num_slots(N: int) -> int:
    return N * (N + 1) // 2


def offset(i: int, j: int) -> int:
    """Flat offset of slot (i, j)."""
    if not 1 <= i <= j:
        raise StructuralError(f"invalid slot (i={i}, j={j})", module="gt_pattern")
    return j * (j - 1) // 2 + (i - 1)


def slot_of(k: int) -> tuple[int, int]:
    """Inverse of :func:`offset`: flat offset -> (i, j)."""
    if k < 0:
        raise StructuralError(f"negative offset {k}", module="gt_pattern")
    j = (1 + math.isqrt(1 + 8 * k)) // 2
    return k - j * (j - 1) // 2 + 1, j


def slots(N: int) -> list[tuple[int, int]]:
    """All slots (i, j) of a size-N pattern in flat order."""
    return [(i, j) for j in range(1, N + 1) for i in range(1, j + 1)]


def level_slice(j: int) -> slice:
    return slice(j * (j - 1) // 2, j * (j + 1) // 2)


def _infer_size(n_values: int) -> int:
    N = (math.isqrt(1 + 8 * n_values) - 1) // 2
    if num_slots(N) != n_values:
        raise StructuralError(
            f"{n_values} values do not fill a triangular pattern", module="gt_pattern"
        )
    return N


@dataclass(frozen=True, eq=False)
class _Pattern:
    N: int
    values: np.ndarray = field(repr=False)

    _dtype = np.float64

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise DomainError(f"pattern size must be a positive integer, got {self.N!r}",
                              module="gt_pattern")
        raw = np.asarray(self.values)
        if self._dtype is np.int64 and raw.dtype.kind == "f":
            if not np.all(np.isfinite(raw)) or np.any(raw != np.round(raw)):
                raise DomainError("discrete pattern values must be integers",
                                  module="gt_pattern")
        arr = np.array(raw, dtype=self._dtype).reshape(-1)
        if arr.size != num_slots(self.N):
            raise StructuralError(
                f"size-{self.N} pattern needs {num_slots(self.N)} values, got {arr.size}",
                module="gt_pattern",
            )
        arr.setflags(write=False)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_levels(cls, levels: Sequence[Sequence[float]]):
        """Build from ``[[x(1,1)], [x(1,2), x(2,2)], ...]``."""
        levels = [list(level) for level in levels]
        for j, level in enumerate(levels, start=1):
            if len(level) != j:
                raise StructuralError(
                    f"level {j} has {len(level)} entries, expected {j}", module="gt_pattern"
                )
        if not levels:
            raise DomainError("pattern needs at least one level", module="gt_pattern")
        return cls(len(levels), [v for level in levels for v in level])

    @classmethod
    def from_mapping(cls, N: int, mapping: Mapping[tuple[int, int], float]):
        """Build from ``{(i, j): value}``; every slot must be present."""
        missing = [s for s in slots(N) if s not in mapping]
        if missing:
            raise StructuralError(f"missing entries for slots {missing}", module="gt_pattern")
        extra = [s for s in mapping if s not in set(slots(N))]
        if extra:
            raise StructuralError(f"unknown slots {extra}", module="gt_pattern")
        return cls(N, [mapping[s] for s in slots(N)])

    @classmethod
    def from_text(cls, text: str):
        """Parse the text form: one line per level, level 1 first."""
        levels = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            levels.append([cls._parse_scalar(tok) for tok in line.split()])
        return cls.from_levels(levels)

    @staticmethod
    def _parse_scalar(tok):
        return float(tok)

    def __getitem__(self, slot: tuple[int, int]):
        i, j = slot
        if j > self.N:
            raise StructuralError(f"slot {slot} outside size-{self.N} pattern",
                                  module="gt_pattern")
        return self.values[offset(i, j)].item()

    def level(self, j: int) -> tuple:
        return tuple(v.item() for v in self.values[level_slice(j)])

    def levels(self) -> list[tuple]:
        return [self.level(j) for j in range(1, self.N + 1)]

    def to_text(self) -> str:
        return "\n".join(" ".join(_fmt(v) for v in lvl) for lvl in self.levels()) + "\n"

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((type(self).__name__, self.N, self.values.tobytes()))

    def __repr__(self):
        body = " / ".join("(" + ", ".join(_fmt(v) for v in lvl) + ")" for lvl in self.levels())
        return f"{type(self).__name__}({body})"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


class DiscretePattern(_Pattern):
    """Integer-valued pattern (lattice sites)."""

    _dtype = np.int64

    @staticmethod
    def _parse_scalar(tok):
        return int(tok)

    def to_continuous(self) -> "ContinuousPattern":
        return ContinuousPattern(self.N, self.values.astype(np.float64))


class ContinuousPattern(_Pattern):
    """Real-valued pattern."""

    @classmethod
    def zeros(cls, N: int) -> "ContinuousPattern":
        return cls(N, np.zeros(num_slots(N)))


@dataclass(frozen=True)
class Violation:
    """One broken inequality of the interlacing chain at (i, j).

    ``side`` is ``"left"`` for x(i-1, j) vs x(i-1, j-1) and ``"right"`` for
    x(i-1, j-1) vs x(i, j).  ``coords`` is the triple
    (x(i-1, j), x(i-1, j-1), x(i, j)).
    """

    i: int
    j: int
    side: str
    coords: tuple

    def describe(self) -> str:
        a, b, c = self.coords
        if self.side == "left":
            return f"x({self.i - 1},{self.j})={a} vs x({self.i - 1},{self.j - 1})={b}"
        return f"x({self.i - 1},{self.j - 1})={b} vs x({self.i},{self.j})={c}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _coerce(p, cls):
    if isinstance(p, _Pattern):
        return p
    if isinstance(p, Mapping):
        N = max(j for _, j in p)
        return cls.from_mapping(N, p)
    return cls.from_levels(p)


def _validate(p: _Pattern, strict_left: bool, slack: float = 0.0) -> ValidationResult:
    out = []
    v = p.values
    for j in range(2, p.N + 1):
        for i in range(2, j + 1):
            a = v[offset(i - 1, j)].item()
            b = v[offset(i - 1, j - 1)].item()
            c = v[offset(i, j)].item()
            left_ok = a < b if strict_left else a <= b + slack
            if not left_ok:
                out.append(Violation(i, j, "left", (a, b, c)))
            if not b <= c + slack:
                out.append(Violation(i, j, "right", (a, b, c)))
    return ValidationResult(tuple(out))


def validate_discrete(p) -> ValidationResult:
    """Check every instance of x(i-1, j) < x(i-1, j-1) <= x(i, j).

    Accepts a :class:`DiscretePattern`, a list of levels or a slot mapping;
    incomplete input raises :class:`StructuralError`.  All violations are
    reported, not just the first.
    """
    return _validate(_coerce(p, DiscretePattern), strict_left=True)


def validate_continuous(p, slack: float = 0.0) -> ValidationResult:
    """Weak-inequality version of :func:`validate_discrete`.

    ``slack`` admits rounding error of that size in each inequality.
    """
    return _validate(_coerce(p, ContinuousPattern), strict_left=False, slack=slack)


def packed_pattern(N: int) -> DiscretePattern:
    """Densely packed start, x(i, j) = i - j, anchored at x(1, 1) = 0."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"packed pattern needs N >= 1, got {N!r}", module="gt_pattern")
    return DiscretePattern(N, [i - j for i, j in slots(N)])


def interlacing_margins(values: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized slack of both chain inequalities over a batch of patterns.

    ``values`` has shape (..., N(N+1)/2).  Returns ``(left, right)`` with
    left = x(i-1, j-1) - x(i-1, j) and right = x(i, j) - x(i-1, j-1) for all
    2 <= i <= j <= N, stacked on the last axis.  A discrete pattern is valid
    iff left >= 1 and right >= 0; a continuous one iff both are >= 0.
    """
    lo, mid, hi = [], [], []
    for j in range(2, N + 1):
        for i in range(2, j + 1):
            lo.append(offset(i - 1, j))
            mid.append(offset(i - 1, j - 1))
            hi.append(offset(i, j))
    values = np.asarray(values)
    if not lo:
        empty = values[..., :0]
        return empty, empty
    return values[..., mid] - values[..., lo], values[..., hi] - values[..., mid]
