"""Statistical oracles: GUE corners, two-sample KS distance, moments.

The Hermitian ensemble has N(0, 1) real diagonal entries and complex
off-diagonal entries whose real and imaginary parts are N(0, 1/2), so the
1x1 corner is standard normal.  Scaling by sqrt(t) gives the fixed-time law
of the interlacing Brownian motions started from 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .driving import SeedSpec
from .errors import DomainError
from .patterns import ContinuousPattern, level_slice, num_slots

__all__ = [
    "SampleSet",
    "MomentSummary",
    "gue_matrix",
    "corner_eigenvalues",
    "gue_corners_sample",
    "gue_corners_batch",
    "eig2_closed_form",
    "empirical_ks",
    "moment_summary",
    "EXPECTED_LEVEL2_GAP",
]

# E[gap] of the 2x2 ensemble: gap = sqrt(2) * chi_3, E chi_3 = 2 sqrt(2 / pi)
EXPECTED_LEVEL2_GAP = 4.0 / np.sqrt(np.pi)
GUE_TAG = 2


@dataclass(frozen=True)
class SampleSet:
    label: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, np.float64).reshape(-1))


def _values(a) -> np.ndarray:
    v = a.values if isinstance(a, SampleSet) else np.asarray(a, np.float64).reshape(-1)
    if v.size == 0:
        raise DomainError("sample set is empty", module="stats")
    return v


def gue_matrix(N: int, rng: np.random.Generator) -> np.ndarray:
    diag = rng.standard_normal(N)
    m = N * (N - 1) // 2
    re = rng.standard_normal(m) * np.sqrt(0.5)
    im = rng.standard_normal(m) * np.sqrt(0.5)
    H = np.diag(diag).astype(np.complex128)
    iu = np.triu_indices(N, 1)
    H[iu] = re + 1j * im
    H[(iu[1], iu[0])] = re - 1j * im
    return H


def corner_eigenvalues(H: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of every top-left corner, in flat pattern order.

    ``H`` may carry leading batch dimensions.
    """
    N = H.shape[-1]
    out = np.empty(H.shape[:-2] + (num_slots(N),))
    for k in range(1, N + 1):
        out[..., level_slice(k)] = np.linalg.eigvalsh(H[..., :k, :k])
    return out


def _check(N, t):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}", module="stats")
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}", module="stats")


def gue_corners_sample(N: int, t: float, seed: SeedSpec) -> ContinuousPattern:
    """Corner eigenvalues of sqrt(t) * H; level k holds the k x k corner."""
    _check(N, t)
    H = gue_matrix(N, seed.rng(GUE_TAG))
    return ContinuousPattern(N, np.sqrt(t) * corner_eigenvalues(H))


def gue_corners_batch(N: int, t: float, replicas: int, seed: int,
                      first_stream: int = 0) -> np.ndarray:
    """``replicas`` draws, replica r seeded by ``SeedSpec(seed, first_stream + r)``.

    Returns shape (replicas, N(N+1)/2).
    """
    _check(N, t)
    H = np.stack([gue_matrix(N, SeedSpec(seed, first_stream + r).rng(GUE_TAG))
                  for r in range(replicas)])
    return np.sqrt(t) * corner_eigenvalues(H)


def eig2_closed_form(H: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of 2x2 Hermitian matrices (batch-friendly)."""
    a = H[..., 0, 0].real
    d = H[..., 1, 1].real
    z = np.abs(H[..., 0, 1])
    mid = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), z)
    return np.stack([mid - rad, mid + rad], axis=-1)


def empirical_ks(a, b) -> float:
    """Two-sample KS statistic sup_x |F_a(x) - F_b(x)|, exact.

    The supremum is attained at a sample point, so both empirical CDFs are
    evaluated on the pooled sample.
    """
    x = np.sort(_values(a))
    y = np.sort(_values(b))
    pooled = np.concatenate([x, y])
    fa = np.searchsorted(x, pooled, side="right") / x.size
    fb = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(fa - fb)))


class MomentSummary(NamedTuple):
    mean: float
    variance: float
    min: float
    max: float
    count: int


def moment_summary(a) -> MomentSummary:
    """Mean, unbiased variance (NaN for a single value), min, max, count."""
    v = _values(a)
    var = float(np.var(v, ddof=1)) if v.size > 1 else float("nan")
    return MomentSummary(float(v.mean()), var, float(v.min()), float(v.max()), int(v.size))
