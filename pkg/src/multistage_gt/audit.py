"""Empirical audits of a pool matrix against the 2-good and 3-good properties.

The properties quantify over every outcome vector; audits run over a scope of
outcome vectors instead, by default the reachable ones {r(X, S) : |S| = s},
which are exactly the vectors a decoder can observe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import networkx as nx

from .hypergraph import candidates, find_configuration, maximal_matching, maximum_packing
from .model import OutcomeVector, PoolMatrix
from .probability import b_threshold, pr1, q_value

ALL_SCOPE_MAX_N = 20


@dataclass(frozen=True)
class Violation:
    property: str
    outcome: OutcomeVector | None
    witness: dict = field(default_factory=dict, compare=False)


@dataclass
class AuditReport:
    checked_outcomes: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, prop: str, outcome, **witness) -> None:
        self.violations.append(Violation(prop, outcome, witness))

    def extend(self, other: AuditReport) -> None:
        self.checked_outcomes += other.checked_outcomes
        self.violations.extend(other.violations)

    def summary(self) -> dict:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.property] = counts.get(v.property, 0) + 1
        return {"checked_outcomes": self.checked_outcomes, "passed": self.passed, "violations": counts}


def outcome_scope(X: PoolMatrix, s: int, scope="reachable") -> list[OutcomeVector]:
    """Distinct outcome vectors to audit, sorted by their bit pattern.

    ``scope`` is "reachable", "all" (every vector, N <= 20 only), or an iterable of
    hidden sets / OutcomeVectors.
    """
    if scope == "reachable":
        cols = X.columns
        bits = {_or(cols, S) for S in combinations(range(X.t), s)}
    elif scope == "all":
        if X.N > ALL_SCOPE_MAX_N:
            raise ValueError(f"exhaustive outcome scope needs N <= {ALL_SCOPE_MAX_N}, got N={X.N}")
        bits = set(range(1 << X.N))
    else:
        bits = set()
        cols = X.columns
        for item in scope:
            bits.add(item.bits if isinstance(item, OutcomeVector) else _or(cols, item))
    return [OutcomeVector(b, X.N) for b in sorted(bits)]


def _or(cols, S) -> int:
    acc = 0
    for j in S:
        acc |= cols[j]
    return acc


def _pair_matching_size(pairs) -> int:
    G = nx.Graph()
    G.add_edges_from(pairs)
    return len(nx.max_weight_matching(G, maxcardinality=True))


def audit_2good(X: PoolMatrix, scope="reachable", d: int | None = None) -> AuditReport:
    """Per outcome y: max vertex degree of H(X, 2, y) below d, and matching size below
    10 max(N, t^2 q(|y|)). The greedy matching is a witness; an exact maximum matching
    is computed only when the witness exceeds half the bound."""
    d = X.params.d if d is None else d
    N, t, k = X.N, X.t, X.k
    report = AuditReport()
    for y in outcome_scope(X, 2, scope):
        report.checked_outcomes += 1
        H = candidates(X, 2, y)
        if not H.edges:
            continue
        v, deg = max(((v, len(ix)) for v, ix in H.adjacency.items()), key=lambda a: (a[1], -a[0]))
        if deg >= d:
            report.add("2good.degree", y, vertex=v, degree=deg, bound=d)
        bound = 10 * max(Fraction(N), t * t * q_value(y.weight, N, k))
        size = len(maximal_matching(H))
        if bound > size >= bound / 2:
            size = max(size, _pair_matching_size(H.edges))
        if size >= bound:
            report.add("2good.matching", y, matching=size, bound=float(bound))
    return report


class _Thresholds:
    """Cached property-2/3/4 thresholds for one (N, t, k, L1)."""

    def __init__(self, N: int, t: int, k: int, L1: int):
        self.N, self.t, self.k, self.L1 = N, t, k, L1
        self.config30 = lru_cache(maxsize=None)(self._config30)
        self.columns = lru_cache(maxsize=None)(self._columns)
        self.pairs = lru_cache(maxsize=None)(self._pairs)

    def _config30(self, w: int) -> Fraction:
        return 10 * max(self.t**3 * pr1(3, w, self.N, self.k), Fraction(self.N))

    def _columns(self, w1: int, w: int) -> Fraction:
        return 10 * b_threshold(self.N, self.t, w1, w, self.L1, self.k)

    def _pairs(self, w1: int, w: int) -> Fraction:
        return 10 * max(Fraction(self.N), math.comb(w, w1) * self.t**2 * pr1(2, w1, self.N, self.k))


def audit_3good(X: PoolMatrix, scope="reachable", L1: int | None = None) -> AuditReport:
    """Per outcome y, the four 3-good properties:

    1. no (3,1) configuration of size L1 in H(X, 3, y);
    2. no (3,0) configuration of size 10 max(t^3 pr1(3, |y|), N);
    3. for y1 realised by one column or a pair of columns under y, fewer than
       10 B(N, t) columns z with y1 | z == y;
    4. for each weight w1, fewer than 10 max(N, C(|y|, w1) t^2 pr1(2, w1)) pairwise
       column-disjoint pairs (z1, z2) under y with |z1 | z2| == w1.
    """
    L1 = X.params.L1 if L1 is None else L1
    N, t, k = X.N, X.t, X.k
    th = _Thresholds(N, t, k, L1)
    cols = X.columns
    report = AuditReport()
    for y in outcome_scope(X, 3, scope):
        report.checked_outcomes += 1
        w = y.weight
        H = candidates(X, 3, y)

        conf = find_configuration(H, 1, L1)
        if conf is not None:
            report.add("3good.config31", y, core=sorted(conf.core), edges=list(conf.edges), bound=L1)

        bound = th.config30(w)
        size = len(maximal_matching(H))
        if bound > size >= bound / 3:
            size = max(size, len(maximum_packing(H.edges, target=math.ceil(bound))))
        if size >= bound:
            report.add("3good.config30", y, size=size, bound=float(bound))

        covered = X.covered_columns(y).tolist()
        unions = {cols[z] for z in covered} | {cols[a] | cols[b] for a, b in combinations(covered, 2)}
        for y1 in sorted(unions):
            count = sum(1 for z in covered if y1 | cols[z] == y.bits)
            if count >= th.columns(y1.bit_count(), w):
                report.add("3good.columns", y, y1=str(OutcomeVector(y1, N)), count=count,
                           bound=float(th.columns(y1.bit_count(), w)))

        by_weight: dict[int, list] = {}
        for a, b in combinations(covered, 2):
            by_weight.setdefault((cols[a] | cols[b]).bit_count(), []).append((a, b))
        for w1, pairs in sorted(by_weight.items()):
            bound = th.pairs(w1, w)
            if len(pairs) < bound:
                continue
            size = _pair_matching_size(pairs)
            if size >= bound:
                report.add("3good.pairs", y, w1=w1, size=size, bound=float(bound))
    return report

