"""Three-stage decoder for two defectives."""

from __future__ import annotations

from .errors import AmbiguousCandidates, DecodeFailure
from .hypergraph import ConflictGraph, bitmask_identify, candidates, greedy_partition
from .model import CandidateHypergraph, DecodeResult, OutcomeVector, PoolMatrix, Transcript
from .oracle import as_staged, run_recorded_stage

MAX_STAGES = 3


def partition_edges_s2(H: CandidateHypergraph) -> list[list[tuple]]:
    """Group the candidate edges so that no two edges of a group intersect, and no
    single candidate edge touches two edges of the same group."""
    edges = H.edges
    touching = [
        {f for v in e for f in H.adjacency[v]}  # includes the edge itself
        for e in edges
    ]
    arcs = set()
    for i in range(len(edges)):
        for f in touching[i]:
            for j in touching[f]:
                if j > i:
                    arcs.add((edges[i], edges[j]))
    return greedy_partition(ConflictGraph(edges, arcs))


def pair_tests(groups, t: int) -> list[frozenset]:
    """For each group: its vertex union, then the complement of that union in [t]."""
    everything = frozenset(range(t))
    tests = []
    for group in groups:
        inside = frozenset(v for e in group for v in e)
        tests.extend((inside, everything - inside))
    return tests


def firing_groups(outcomes) -> list[int]:
    """Groups whose (union, complement) pair read (positive, negative)."""
    return [i for i in range(len(outcomes) // 2) if outcomes[2 * i] and not outcomes[2 * i + 1]]


def stage_one(X: PoolMatrix, oracle, transcript: Transcript) -> OutcomeVector:
    tests = X.row_sets
    outcomes = run_recorded_stage(oracle, transcript, 1, tests)
    return OutcomeVector.from_bools(outcomes)


def confirm(edge, transcript: Transcript, **info) -> DecodeResult:
    if not transcript.consistent_with(edge):
        raise AmbiguousCandidates(f"identified set {edge} contradicts a recorded outcome")
    return DecodeResult.recovered(edge, transcript, **info)


def decode_s2(X: PoolMatrix, oracle) -> DecodeResult:
    """Find two defectives in at most three stages.

    Stage 1 runs the rows of X. Unless a single candidate pair remains, stage 2
    tests every partition group's vertex union and its complement; exactly one
    group reads (1, 0) and stage 3 locates the pair inside it by bit-mask tests.
    """
    oracle = as_staged(oracle, MAX_STAGES)
    transcript = Transcript()
    try:
        y = stage_one(X, oracle, transcript)
        H = candidates(X, 2, y)
        if not H.edges:
            raise AmbiguousCandidates("no pair matches the stage-1 outcomes")
        if len(H) == 1:
            return confirm(H.edges[0], transcript, candidates=1)

        groups = partition_edges_s2(H)
        outcomes = run_recorded_stage(oracle, transcript, 2, pair_tests(groups, X.t))
        hits = firing_groups(outcomes)
        if len(hits) != 1:
            raise AmbiguousCandidates(f"{len(hits)} groups read (1, 0), expected exactly one")
        group = groups[hits[0]]
        tests, decode = bitmask_identify(group)
        index = decode(run_recorded_stage(oracle, transcript, 3, tests))
        return confirm(group[index], transcript, candidates=len(H), groups=len(groups))
    except DecodeFailure as exc:
        return DecodeResult.failed(exc.reason, transcript, str(exc))
