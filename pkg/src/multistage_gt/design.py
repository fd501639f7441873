"""Stage-1 design: test-count parameters and the random constant-weight pool matrix."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import InvalidParams
from .model import DesignParams, OutcomeVector, PoolMatrix, sparsity_threshold
from .rates import c3_constant, entropy

P_DIGITS = 12
# relative column weights, stored as exact 12-digit rationals so k = floor(pN) is reproducible
P_S2 = Fraction(round((1 - math.sqrt(0.5)) * 10**P_DIGITS), 10**P_DIGITS)
P_S3 = Fraction(round((1 - 0.5 ** (1 / 3)) * 10**P_DIGITS), 10**P_DIGITS)


def default_p(s: int) -> Fraction:
    if s == 2:
        return P_S2
    if s == 3:
        return P_S3
    raise InvalidParams(f"s must be 2 or 3, got {s}")


def compute_params(t: int, s: int, N: int | None = None, p=None, L1: int | None = None,
                   seed: int = 0) -> DesignParams:
    """Stage-1 parameters for ``t`` samples and ``s`` defectives.

    s = 2: N = ceil((d+4)/d * log2 t / (h(p) - p)).
    s = 3: N = ceil((2 L1 + 10)/L1 * log2 t * c3), c3 = max 1/A2(2, p, omega) over [p, 3p].
    Any of N, p, L1 may be overridden; overridden names are listed in ``params.overrides``.
    """
    if s not in (2, 3):
        raise InvalidParams(f"s must be 2 or 3, got {s}")
    if t < max(s + 1, 4):
        raise InvalidParams(f"t={t} too small: need t >= {max(s + 1, 4)} so that log2 log2 t >= 1")
    overrides = set()
    if p is not None:
        p = Fraction(p)
        overrides.add("p")
    else:
        p = default_p(s)
    if L1 is not None:
        if L1 <= 0:
            raise InvalidParams(f"L1 must be positive, got {L1}")
        overrides.add("L1")
    else:
        L1 = sparsity_threshold(t)
    if not 0 < p < 1:
        raise InvalidParams(f"p must lie in (0, 1), got {p}")

    c3 = None
    log_t = math.log2(t)
    if s == 3:
        c3, _ = c3_constant(float(p))
    if N is not None:
        overrides.add("N")
    elif s == 2:
        pf = float(p)
        gap = entropy(pf) - pf
        if gap <= 0:
            raise InvalidParams(f"h(p) - p = {gap} is not positive for p = {p}")
        N = math.ceil((L1 + 4) / L1 * log_t / gap)
    else:
        N = math.ceil((2 * L1 + 10) / L1 * log_t * c3)
    return DesignParams(t=t, s=s, p=p, N=N, d_or_L1=L1, seed=seed,
                        overrides=frozenset(overrides), c3=c3)


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _column_streams(seed: int, columns: np.ndarray, draws: int) -> np.ndarray:
    """Counter-mode random words: entry (j, i) depends only on (seed, j, i)."""
    with np.errstate(over="ignore"):
        keys = _splitmix64(np.uint64(seed) ^ _splitmix64(columns.astype(np.uint64)))
        counters = np.arange(draws, dtype=np.uint64)
        return _splitmix64(keys[:, None] + counters[None, :] * _GOLDEN)


def sample_supports(seed: int, N: int, k: int, columns: Iterable[int]) -> np.ndarray:
    """Row positions of the ones of each requested column, via a partial Fisher-Yates shuffle.

    Returns an array of shape (len(columns), k). Column j's support depends only on
    (seed, j, N, k), never on how many other columns are drawn.
    """
    cols = np.asarray(list(columns), dtype=np.int64)
    words = _column_streams(seed, cols, k)
    perm = np.tile(np.arange(N, dtype=np.int64), (cols.size, 1))
    rows = np.arange(cols.size)
    for i in range(k):
        span = np.uint64(N - i)
        # multiply-shift maps the top 32 bits onto [0, N - i)
        offset = ((words[:, i] >> np.uint64(32)) * span) >> np.uint64(32)
        j = i + offset.astype(np.int64)
        a = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = a
    return perm[:, :k]


def generate_matrix(params: DesignParams) -> PoolMatrix:
    """t columns drawn i.i.d. uniformly among weight-k binary vectors of length N."""
    N, k, t = params.N, params.k, params.t
    if not 0 < k < N:
        raise InvalidParams(f"column weight k={k} must satisfy 0 < k < N={N}")
    supports = sample_supports(params.seed, N, k, range(t))
    dense = np.zeros((N, t), dtype=bool)
    dense[supports, np.arange(t)[:, None]] = True
    return PoolMatrix(params, dense)


def outcome(X: PoolMatrix, S: Iterable[int]) -> OutcomeVector:
    """r(X, S): bitwise OR of the columns indexed by S."""
    S = list(S)
    if not S:
        raise ValueError("outcome of an empty set is undefined")
    cols = X.columns
    bits = 0
    for j in S:
        if not 0 <= j < X.t:
            raise IndexError(f"sample index {j} outside [0, {X.t})")
        bits |= cols[j]
    return OutcomeVector(bits, X.N)
