"""Shared data model: design parameters, pool matrices, outcomes, hypergraphs, transcripts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParams

Hyperedge = tuple  # canonical form: ascending tuple of distinct 0-based sample indices
VertexSet = frozenset

UINT64_MAX = 2**64 - 1


def make_edge(vertices: Iterable[int]) -> tuple[int, ...]:
    """Canonical hyperedge: sorted tuple of distinct sample indices."""
    edge = tuple(sorted(vertices))
    if len(set(edge)) != len(edge):
        raise ValueError(f"repeated vertex in hyperedge {edge}")
    return edge


def sparsity_threshold(t: int) -> int:
    """ceil(log2 log2 t), the degree/configuration threshold d (s=2) or L1 (s=3)."""
    if t < 4:
        raise InvalidParams(f"t={t}: log2 log2 t < 1, need t >= 4")
    # smallest m with t <= 2**(2**m), in integers so powers of two are exact
    m = 0
    while t > 1 << (1 << m):
        m += 1
    return m


@dataclass(frozen=True)
class DesignParams:
    t: int
    s: int
    p: Fraction
    N: int
    d_or_L1: int
    seed: int = 0
    overrides: frozenset = frozenset()
    c3: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.s not in (2, 3):
            raise InvalidParams(f"s must be 2 or 3, got {self.s}")
        if self.t < self.s:
            raise InvalidParams(f"t={self.t} < s={self.s}")
        if self.N <= 0:
            raise InvalidParams(f"N must be positive, got {self.N}")
        if not 0 < self.p < 1:
            raise InvalidParams(f"p must lie in (0, 1), got {self.p}")
        if not 0 < self.k < self.N:
            raise InvalidParams(f"column weight k={self.k} must satisfy 0 < k < N={self.N}")
        if self.d_or_L1 <= 0:
            raise InvalidParams("sparsity threshold must be a positive integer")
        if not 0 <= self.seed <= UINT64_MAX:
            raise InvalidParams(f"seed {self.seed} is not a 64-bit unsigned integer")

    @property
    def k(self) -> int:
        return math.floor(self.p * self.N)

    @property
    def d(self) -> int:
        return self.d_or_L1

    @property
    def L1(self) -> int:
        return self.d_or_L1

    @property
    def L2(self) -> int | None:
        return 3 * self.d_or_L1 if self.s == 3 else None

    def with_seed(self, seed: int) -> DesignParams:
        return DesignParams(self.t, self.s, self.p, self.N, self.d_or_L1, seed, self.overrides, self.c3)


class PoolMatrix:
    """Binary N x t test design with constant column weight k.

    Column j is stored as a Python int whose bit i is the membership of sample j
    in test i; a packed uint64 copy serves the vectorised coverage filter.
    """

    def __init__(self, params: DesignParams, dense):
        dense = np.asarray(dense, dtype=bool)
        if dense.shape != (params.N, params.t):
            raise InvalidParams(f"matrix shape {dense.shape} != (N, t) = {(params.N, params.t)}")
        weights = dense.sum(axis=0)
        bad = np.nonzero(weights != params.k)[0]
        if bad.size:
            j = int(bad[0])
            raise InvalidParams(f"column {j} has weight {int(weights[j])}, expected k={params.k}")
        dense = dense.copy()
        dense.flags.writeable = False
        self.params = params
        self.dense = dense

    @classmethod
    def from_columns(cls, columns: Sequence, s: int = 2, seed: int = 0) -> PoolMatrix:
        """Build from column strings such as ``"1100"`` (row 0 first); params are inferred."""
        cols = [str(c) for c in columns]
        N = len(cols[0])
        if any(len(c) != N for c in cols):
            raise InvalidParams("columns have different lengths")
        dense = np.array([[ch == "1" for ch in c] for c in cols], dtype=bool).T
        k = int(dense[:, 0].sum())
        t = len(cols)
        params = DesignParams(
            t=t, s=s, p=Fraction(k, N), N=N,
            d_or_L1=sparsity_threshold(t) if t >= 4 else 1,
            seed=seed, overrides=frozenset({"N", "p"}),
        )
        return cls(params, dense)

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def t(self) -> int:
        return self.params.t

    @property
    def k(self) -> int:
        return self.params.k

    @cached_property
    def packed(self) -> np.ndarray:
        words = (self.N + 63) // 64
        packed = np.zeros((self.t, words), dtype=np.uint64)
        for r in range(self.N):
            packed[:, r // 64] |= self.dense[r].astype(np.uint64) << np.uint64(r % 64)
        packed.flags.writeable = False
        return packed

    @cached_property
    def columns(self) -> tuple[int, ...]:
        packed = self.packed.tolist()
        return tuple(sum(w << (64 * i) for i, w in enumerate(row)) for row in packed)

    @cached_property
    def row_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(np.nonzero(row)[0].tolist()) for row in self.dense)

    def covered_columns(self, y: OutcomeVector) -> np.ndarray:
        """Ascending indices of columns z with z | y == y."""
        ywords = np.array(
            [(y.bits >> (64 * i)) & UINT64_MAX for i in range(self.packed.shape[1])],
            dtype=np.uint64,
        )
        return np.nonzero(~(self.packed & ~ywords).any(axis=1))[0]

    def column_string(self, j: int) -> str:
        return "".join("1" if b else "0" for b in self.dense[:, j])

    def __eq__(self, other):
        if not isinstance(other, PoolMatrix):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.dense, other.dense)

    def __hash__(self):
        return hash((self.params, self.dense.tobytes()))

    def __repr__(self):
        return f"PoolMatrix(N={self.N}, t={self.t}, k={self.k}, seed={self.params.seed})"


@dataclass(frozen=True)
class OutcomeVector:
    bits: int
    N: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.N:
            raise ValueError(f"outcome bits exceed length N={self.N}")

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @classmethod
    def from_bools(cls, values: Sequence[bool]) -> OutcomeVector:
        return cls(sum(1 << i for i, v in enumerate(values) if v), len(values))

    @classmethod
    def from_string(cls, text: str) -> OutcomeVector:
        return cls.from_bools([ch == "1" for ch in text])

    def __str__(self):
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.N))

    def __le__(self, other: OutcomeVector) -> bool:
        return self.bits | other.bits == other.bits


@dataclass(frozen=True)
class CandidateHypergraph:
    """All s-sets whose column union equals ``outcome``; edges kept in lexicographic order."""

    s: int
    outcome: OutcomeVector
    edges: tuple
    adjacency: dict = field(compare=False, repr=False)

    @classmethod
    def build(cls, s: int, outcome: OutcomeVector, edges: Iterable) -> CandidateHypergraph:
        canon = sorted({make_edge(e) for e in edges})
        if any(len(e) != s for e in canon):
            raise ValueError(f"every hyperedge must have exactly {s} vertices")
        adjacency: dict[int, list[int]] = {}
        for idx, e in enumerate(canon):
            for v in e:
                adjacency.setdefault(v, []).append(idx)
        return cls(s, outcome, tuple(canon), {v: tuple(ix) for v, ix in adjacency.items()})

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency.get(v, ()))

    def max_degree(self) -> int:
        return max((len(ix) for ix in self.adjacency.values()), default=0)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class Stage:
    tests: tuple  # of frozensets of 0-based vertices
    outcomes: tuple  # of bool

    def __post_init__(self):
        if len(self.tests) != len(self.outcomes):
            raise ValueError("each test needs exactly one outcome")

    def __len__(self):
        return len(self.tests)


@dataclass
class Transcript:
    """Stages in logical order. A skipped stage is kept as an empty placeholder so that
    list position always equals the stage number."""

    stages: list = field(default_factory=list)
    max_stages: int | None = 5

    def record(self, stage_number: int, tests, outcomes) -> None:
        while len(self.stages) < stage_number - 1:
            self.stages.append(Stage((), ()))
        if len(self.stages) != stage_number - 1:
            raise ValueError(f"stage {stage_number} recorded out of order")
        self.stages.append(Stage(tuple(frozenset(t) for t in tests), tuple(bool(o) for o in outcomes)))
        if self.max_stages is not None and len(self.stages) > self.max_stages:
            raise ValueError(f"transcript exceeds its limit of {self.max_stages} stages")

    @property
    def stage_counts(self) -> list[int]:
        return [len(st) for st in self.stages]

    @property
    def total_tests(self) -> int:
        return sum(self.stage_counts)

    @property
    def n_stages(self) -> int:
        """Number of stages that actually issued tests."""
        return sum(1 for st in self.stages if len(st))

    def consistent_with(self, defectives) -> bool:
        """True if every recorded outcome matches what ``defectives`` would produce."""
        hidden = frozenset(defectives)
        return all(
            (not hidden.isdisjoint(test)) == out
            for st in self.stages
            for test, out in zip(st.tests, st.outcomes)
        )

    def to_json_obj(self) -> dict:
        return {
            "stages": [
                {
                    "tests": [sorted(v + 1 for v in test) for test in st.tests],
                    "outcomes": [int(o) for o in st.outcomes],
                }
                for st in self.stages
            ]
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> Transcript:
        tr = cls(max_stages=None)
        for n, st in enumerate(obj["stages"], start=1):
            tr.record(n, [{v - 1 for v in test} for test in st["tests"]], st["outcomes"])
        return tr


FAILURE_REASONS = ("AmbiguousCandidates", "StructuralViolation", "InvalidParams")


@dataclass
class DecodeResult:
    defectives: tuple | None
    transcript: Transcript
    failure: str | None = None
    detail: str = ""
    info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if (self.defectives is None) == (self.failure is None):
            raise ValueError("exactly one of defectives / failure must be set")
        if self.failure is not None and self.failure not in FAILURE_REASONS:
            raise ValueError(f"unknown failure reason {self.failure!r}")
        if self.defectives is not None:
            self.defectives = make_edge(self.defectives)

    @property
    def ok(self) -> bool:
        return self.failure is None

    @classmethod
    def recovered(cls, defectives, transcript: Transcript, **info) -> DecodeResult:
        return cls(tuple(defectives), transcript, info=info)

    @classmethod
    def failed(cls, reason: str, transcript: Transcript, detail: str = "", **info) -> DecodeResult:
        return cls(None, transcript, reason, detail, info)
