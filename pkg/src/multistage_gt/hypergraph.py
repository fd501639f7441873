"""Candidate enumeration and the combinatorial subroutines shared by the decoders."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Hashable, Iterable, Sequence

from .errors import AmbiguousCandidates
from .model import CandidateHypergraph, OutcomeVector, PoolMatrix


def candidates(X: PoolMatrix, s: int, y: OutcomeVector) -> CandidateHypergraph:
    """H(X, s, y): every s-set of samples whose column union equals y.

    Only columns lying under y can take part, so those are filtered first and the
    s-subsets of the survivors are enumerated in lexicographic order.
    """
    if y.N != X.N:
        raise ValueError(f"outcome length {y.N} != N={X.N}")
    if s < 1:
        raise ValueError("s must be positive")
    covered = X.covered_columns(y).tolist()
    cols = X.columns
    target = y.bits
    edges = []

    def extend(start: int, acc: int, chosen: list):
        if len(chosen) == s:
            if acc == target:
                edges.append(tuple(chosen))
            return
        for i in range(start, len(covered) - (s - len(chosen)) + 1):
            j = covered[i]
            chosen.append(j)
            extend(i + 1, acc | cols[j], chosen)
            chosen.pop()

    extend(0, 0, [])
    return CandidateHypergraph.build(s, y, edges)


@dataclass(frozen=True)
class Configuration:
    """Hyperedges whose pairwise intersections all equal ``core``."""

    core: frozenset
    edges: tuple

    def __post_init__(self):
        for a, b in combinations(self.edges, 2):
            if set(a) & set(b) != self.core:
                raise ValueError(f"edges {a} and {b} do not intersect exactly in {sorted(self.core)}")

    def __len__(self):
        return len(self.edges)


def _max_packing(sets: Sequence[frozenset], target: int | None = None) -> list[int]:
    """Indices of a largest family of pairwise-disjoint sets (exact backtracking).

    Stops early once ``target`` sets are found, or once the packing reaches the
    trivial bound |union| // (smallest set size). Branches follow index order, so the
    first packing found is the lexicographically first.
    """
    best: list[int] = []
    n = len(sets)
    if n:
        ceiling = len(frozenset().union(*sets)) // max(min(map(len, sets)), 1)
        target = ceiling if target is None else min(target, ceiling)

    def dfs(start: int, used: frozenset, chosen: list[int]) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
            if target is not None and len(best) >= target:
                return True
        if len(chosen) + (n - start) <= len(best):
            return False
        for i in range(start, n):
            if len(chosen) + (n - i) <= len(best):
                break
            if used.isdisjoint(sets[i]):
                chosen.append(i)
                if dfs(i + 1, used | sets[i], chosen):
                    return True
                chosen.pop()
        return False

    dfs(0, frozenset(), [])
    return best


def find_configuration(H: CandidateHypergraph, k: int, L: int) -> Configuration | None:
    """First (s, k) configuration with at least L edges, or None.

    Cores are tried in lexicographic order; for a core U the edges containing U
    form a configuration exactly when their remainders outside U are pairwise disjoint.
    """
    if not 0 <= k < H.s:
        raise ValueError(f"need 0 <= k < s={H.s}, got k={k}")
    if L <= 0:
        return Configuration(frozenset(), ())
    cores = sorted({c for e in H.edges for c in combinations(e, k)})
    for core in cores:
        core_set = frozenset(core)
        members = [e for e in H.edges if core_set.issubset(e)]
        if len(members) < L:
            continue
        rests = [frozenset(e) - core_set for e in members]
        chosen = _max_packing(rests, target=L)
        if len(chosen) >= L:
            return Configuration(core_set, tuple(members[i] for i in chosen[:L]))
    return None


def maximum_packing(edges: Sequence, target: int | None = None) -> list:
    """A largest set of pairwise-disjoint edges, or any ``target`` of them; exponential,
    for audits and oracles only."""
    sets = [frozenset(e) for e in edges]
    return [edges[i] for i in _max_packing(sets, target)]


def maximal_matching(H: CandidateHypergraph | Sequence) -> list:
    """Greedy inclusion-maximal set of pairwise-disjoint edges, scanning edges in index order."""
    edges = H.edges if isinstance(H, CandidateHypergraph) else H
    used: set = set()
    out = []
    for e in edges:
        if used.isdisjoint(e):
            out.append(e)
            used.update(e)
    return out


@dataclass(frozen=True, init=False)
class ConflictGraph:
    """Directed constraint graph: an arc (a, b) forbids a and b from sharing a group."""

    items: tuple
    arcs: frozenset

    def __init__(self, items: Iterable[Hashable], arcs: Iterable[tuple] = ()):
        items = tuple(items)
        if len(set(items)) != len(items):
            raise ValueError("duplicate items")
        arcs = frozenset(tuple(a) for a in arcs)
        known = set(items)
        for a, b in arcs:
            if a == b:
                raise ValueError(f"self-arc on {a!r}")
            if a not in known or b not in known:
                raise ValueError(f"arc ({a!r}, {b!r}) references an unknown item")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "arcs", arcs)

    def neighbours(self) -> dict:
        nbr: dict = {x: set() for x in self.items}
        for a, b in self.arcs:
            nbr[a].add(b)
            nbr[b].add(a)
        return nbr

    def out_degree(self) -> dict:
        deg = dict.fromkeys(self.items, 0)
        for a, _ in self.arcs:
            deg[a] += 1
        return deg


def greedy_partition(G: ConflictGraph) -> list[list]:
    """Colour items in index order with the smallest colour unused by any neighbour."""
    nbr = G.neighbours()
    colour: dict = {}
    groups: list[list] = []
    for x in G.items:
        taken = {colour[y] for y in nbr[x] if y in colour}
        c = 0
        while c in taken:
            c += 1
        colour[x] = c
        if c == len(groups):
            groups.append([])
        groups[c].append(x)
    return groups


def bitmask_identify(items: Sequence[Iterable[int]]) -> tuple[list[frozenset], Callable]:
    """Non-adaptive binary search over m items, exactly one of which is hot.

    Test b is the union of the items whose index has bit b set, so the outcomes
    spell the hot item's index in binary (least significant bit first).
    """
    items = [frozenset(it) for it in items]
    m = len(items)
    if m == 0:
        raise ValueError("bitmask_identify needs at least one item")
    nbits = (m - 1).bit_length()
    tests = [frozenset().union(*(it for i, it in enumerate(items) if i >> b & 1)) for b in range(nbits)]

    def decode(outcomes: Sequence[bool]) -> int:
        if len(outcomes) != nbits:
            raise ValueError(f"expected {nbits} outcomes, got {len(outcomes)}")
        index = sum(1 << b for b, o in enumerate(outcomes) if o)
        if index >= m:
            raise AmbiguousCandidates(f"decoded index {index} outside {m} items")
        return index

    return tests, decode
