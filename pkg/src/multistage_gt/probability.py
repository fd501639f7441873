"""Exact probabilities for unions of random constant-weight columns.

All columns are uniform over the C(N, k) binary vectors of weight k; every
value is an exact ``Fraction`` built from big-integer binomials.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _comb(n: int, r: int) -> int:
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


def cover_count(s: int, m: int, w: int, k: int) -> int:
    """Ordered s-tuples of k-subsets of a w-set whose union contains a fixed m-subset.

    Inclusion-exclusion over the m mandatory positions:
    sum_j (-1)^j C(m, j) C(w - j, k)^s.
    """
    if s < 1:
        raise ValueError("s must be positive")
    if not 0 <= m <= w:
        raise ValueError(f"need 0 <= m <= w, got m={m}, w={w}")
    if k < 0 or k > w:
        return 0
    total = 0
    c_mj = 1  # C(m, j)
    c_wk = math.comb(w, k)  # C(w - j, k)
    for j in range(0, min(m, w - k) + 1):
        term = c_mj * c_wk**s
        total += -term if j & 1 else term
        c_mj = c_mj * (m - j) // (j + 1)
        n = w - j
        c_wk = c_wk * (n - k) // n if n else 0
    return total


def pr1(s: int, w: int, N: int, k: int) -> Fraction:
    """Probability that the union of s random weight-k columns equals a fixed weight-w vector."""
    if not 0 <= w <= N:
        raise ValueError(f"need 0 <= w <= N, got w={w}, N={N}")
    return Fraction(cover_count(s, w, w, k), math.comb(N, k) ** s)


def pr2(s: int, w1: int, w: int, N: int, k: int) -> Fraction:
    """Probability that s random columns together with a fixed weight-w1 vector y1 give a fixed
    weight-w vector y (y1 under y): each column must sit under y, jointly covering y minus y1."""
    if not 0 <= w1 <= w <= N:
        raise ValueError(f"need 0 <= w1 <= w <= N, got w1={w1}, w={w}, N={N}")
    return Fraction(cover_count(s, w - w1, w, k), math.comb(N, k) ** s)


def q_value(w: int, N: int, k: int) -> Fraction:
    """C(w, k) C(k, w - k) / C(N, k)^2: a pair of columns covering a fixed weight-w vector."""
    if not 0 <= w <= N:
        raise ValueError(f"need 0 <= w <= N, got w={w}, N={N}")
    return Fraction(_comb(w, k) * _comb(k, w - k), math.comb(N, k) ** 2)


def b_threshold(N: int, t: int, w1: int, w: int, L1: int, k: int) -> Fraction:
    """Piecewise column-count threshold used by the third 3-good property.

    With x = t * pr2(1, w1, w): x if x > N; N if t^(-1/sqrt(L1)) <= x <= N; L1/10 below.
    """
    x = t * pr2(1, w1, w, N, k)
    if x > N:
        return x
    if x > 0 and math.log2(x.numerator) - math.log2(x.denominator) >= -math.log2(t) / math.sqrt(L1):
        return Fraction(N)
    return Fraction(L1, 10)


def log2_fraction(x: Fraction) -> float:
    """log2 of a positive Fraction with arbitrarily large numerator and denominator."""
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    return _log2_int(x.numerator) - _log2_int(x.denominator)


def _log2_int(n: int) -> float:
    shift = max(n.bit_length() - 60, 0)
    return math.log2(n >> shift) + shift
