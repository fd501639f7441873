"""Brute-force reference implementations, independent of the package's algorithms."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

import networkx as nx


def weight_k_columns(N: int, k: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(N), k)]


@lru_cache(maxsize=None)
def union_histogram(s: int, N: int, k: int) -> Counter:
    """Counts of the OR of every ordered s-tuple of weight-k columns."""
    cols = weight_k_columns(N, k)
    hist: Counter = Counter()
    for tup in product(cols, repeat=s):
        acc = 0
        for c in tup:
            acc |= c
        hist[acc] += 1
    return hist


def brute_pr1(s: int, w: int, N: int, k: int) -> Fraction:
    y = (1 << w) - 1
    return Fraction(union_histogram(s, N, k)[y], math.comb(N, k) ** s)


def brute_pr2(s: int, w1: int, w: int, N: int, k: int) -> Fraction:
    """y = first w positions, y1 = its first w1; count tuples with y1 | union == y."""
    y, y1 = (1 << w) - 1, (1 << w1) - 1
    hits = sum(c for u, c in union_histogram(s, N, k).items() if y1 | u == y)
    return Fraction(hits, math.comb(N, k) ** s)


def brute_q(w: int, N: int, k: int) -> Fraction:
    return brute_pr1(2, w, N, k)


def brute_candidates(columns, s: int, y_bits: int) -> set:
    out = set()
    for S in combinations(range(len(columns)), s):
        acc = 0
        for j in S:
            acc |= columns[j]
        if acc == y_bits:
            out.add(S)
    return out


def brute_configuration_exists(edges, k: int, L: int) -> bool:
    """Some L edges whose pairwise intersections all equal one k-set."""
    sets = [frozenset(e) for e in edges]
    for sub in combinations(range(len(sets)), L):
        chosen = [sets[i] for i in sub]
        cores = {a & b for a, b in combinations(chosen, 2)}
        if len(cores) == 1 and len(next(iter(cores))) == k:
            return True
        if L == 1:
            return any(len(e) > k for e in chosen)
    return False


def brute_max_packing(edges) -> int:
    sets = [frozenset(e) for e in edges]
    for r in range(len(sets), 0, -1):
        for sub in combinations(sets, r):
            if sum(map(len, sub)) == len(frozenset().union(*sub)):
                return r
    return 0


def max_matching_size(pairs) -> int:
    G = nx.Graph()
    G.add_edges_from(pairs)
    return len(nx.max_weight_matching(G, maxcardinality=True))
