import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multistage_gt import (
    CandidateHypergraph,
    OutcomeVector,
    PoolMatrix,
    candidates,
    compute_params,
    decode_s2,
    generate_matrix,
    make_oracle,
    outcome,
    partition_edges_s2,
)
from multistage_gt.decode_two import firing_groups, pair_tests

from conftest import identity_matrix


def graph(edges):
    return CandidateHypergraph.build(2, OutcomeVector(0, 1), edges)


def assert_separated(H, groups):
    colour = {e: i for i, g in enumerate(groups) for e in g}
    assert sorted(colour) == sorted(H.edges)
    for a, b in combinations(H.edges, 2):
        if colour[a] != colour[b]:
            continue
        assert not set(a) & set(b)
        assert not any(set(e) & set(a) and set(e) & set(b) for e in H.edges)


def test_partition_examples():
    assert partition_edges_s2(graph([(1, 2), (3, 4)])) == [[(1, 2), (3, 4)]]
    assert len(partition_edges_s2(graph([(1, 2), (1, 3)]))) == 2
    path = graph([(1, 2), (2, 3), (3, 4)])
    groups = partition_edges_s2(path)
    assert len(groups) == 3
    assert_separated(path, groups)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda e: e[0] != e[1]),
               min_size=1, max_size=25))
def test_partition_separation_and_size(pairs):
    H = graph(pairs)
    groups = partition_edges_s2(H)
    assert_separated(H, groups)
    d = H.max_degree() + 1  # smallest d with max degree < d
    assert len(groups) <= 2 * d * d


def test_identity_short_circuit():
    r = decode_s2(identity_matrix(8), make_oracle({3, 7}, 8))
    assert r.defectives == (3, 7)
    assert r.transcript.stage_counts == [8]


def test_identical_columns_instance():
    X = PoolMatrix.from_columns(["1100", "1100", "0011", "0110"])
    H = candidates(X, 2, outcome(X, [0, 2]))
    assert H.edges == ((0, 2), (1, 2))
    groups = partition_edges_s2(H)
    assert len(groups) == 2
    r = decode_s2(X, make_oracle({0, 2}, 4))
    assert r.ok and r.defectives == (0, 2)
    stage2 = r.transcript.stages[1]
    assert firing_groups(stage2.outcomes) == [groups.index([(0, 2)])]


@pytest.mark.parametrize("N", [8, 10, 12, 16])
def test_exhaustive_small_designs(N):
    t = 40
    X = generate_matrix(compute_params(t, 2, N=N, seed=N))
    for S in combinations(range(t), 2):
        o = make_oracle(S, t, 3)
        r = decode_s2(X, o)
        assert r.ok and r.defectives == S
        assert r.transcript.n_stages <= 3
        assert o.queries == r.transcript.total_tests
        assert r.transcript.consistent_with(S)
        assert outcome(X, r.defectives) == outcome(X, S)
        H = candidates(X, 2, outcome(X, S))
        counts = r.transcript.stage_counts
        if len(H) > 1:
            groups = partition_edges_s2(H)
            assert counts[1] == 2 * len(groups)
            # exactly one (1, 0) group, and it holds the hidden pair
            tests = pair_tests(groups, t)
            fired = firing_groups([not set(T).isdisjoint(S) for T in tests])
            assert len(fired) == 1 and S in groups[fired[0]]
            size = len(groups[fired[0]])
            assert (counts[2] if len(counts) > 2 else 0) == math.ceil(math.log2(size))
        else:
            assert counts == [N]


def test_failure_reported_not_raised():
    X = identity_matrix(6)
    # oracle that lies: every test positive gives an outcome no pair explains
    r = decode_s2(X, lambda T: True)
    assert not r.ok and r.failure == "AmbiguousCandidates"
