from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multistage_gt import (
    CandidateHypergraph,
    DecodeResult,
    DesignParams,
    InvalidParams,
    OutcomeVector,
    PoolMatrix,
    Transcript,
)
from multistage_gt.model import make_edge, sparsity_threshold


@given(st.sets(st.integers(0, 100), min_size=1, max_size=5), st.randoms())
def test_edge_canonical_under_permutation(vertices, rnd):
    shuffled = list(vertices)
    rnd.shuffle(shuffled)
    assert make_edge(shuffled) == make_edge(vertices) == tuple(sorted(vertices))


def test_edge_rejects_repeats():
    with pytest.raises(ValueError):
        make_edge([1, 1, 2])


@pytest.mark.parametrize("t, expected", [(4, 1), (5, 2), (16, 2), (17, 3), (64, 3), (256, 3),
                                         (1024, 4), (65536, 4), (65537, 5), (2**20, 5)])
def test_sparsity_threshold(t, expected):
    assert sparsity_threshold(t) == expected


def test_sparsity_threshold_needs_t_at_least_4():
    with pytest.raises(InvalidParams):
        sparsity_threshold(3)


def test_params_derived_fields():
    P = DesignParams(t=1024, s=3, p=Fraction(1, 5), N=61, d_or_L1=4)
    assert P.k == 12 and P.L1 == 4 and P.L2 == 12
    assert DesignParams(t=64, s=2, p=Fraction(1, 4), N=25, d_or_L1=3).L2 is None


@pytest.mark.parametrize("kwargs", [
    dict(t=64, s=4, p=Fraction(1, 4), N=25, d_or_L1=3),
    dict(t=1, s=2, p=Fraction(1, 4), N=25, d_or_L1=3),
    dict(t=64, s=2, p=Fraction(1, 4), N=0, d_or_L1=3),
    dict(t=64, s=2, p=Fraction(1, 100), N=25, d_or_L1=3),  # k = 0
    dict(t=64, s=2, p=Fraction(1), N=4, d_or_L1=3),  # k = N
    dict(t=64, s=2, p=Fraction(1, 4), N=25, d_or_L1=0),
    dict(t=64, s=2, p=Fraction(1, 4), N=25, d_or_L1=3, seed=-1),
    dict(t=64, s=2, p=Fraction(1, 4), N=25, d_or_L1=3, seed=2**64),
])
def test_params_invariants(kwargs):
    with pytest.raises(InvalidParams):
        DesignParams(**kwargs)


def test_pool_matrix_rejects_bad_column_weight():
    P = DesignParams(t=4, s=2, p=Fraction(1, 2), N=4, d_or_L1=1)
    dense = np.zeros((4, 4), dtype=bool)
    dense[:2, :] = True
    PoolMatrix(P, dense)
    dense[2, 3] = True
    with pytest.raises(InvalidParams, match="column 3"):
        PoolMatrix(P, dense)
    with pytest.raises(InvalidParams, match="shape"):
        PoolMatrix(P, dense[:3])


def test_pool_matrix_views_agree():
    X = PoolMatrix.from_columns(["1100", "0110", "0011"])
    assert X.N == 4 and X.t == 3 and X.k == 2
    assert X.columns == (0b0011, 0b0110, 0b1100)
    assert X.row_sets == (frozenset({0}), frozenset({0, 1}), frozenset({1, 2}), frozenset({2}))
    assert X.column_string(1) == "0110"
    assert not X.dense.flags.writeable


def test_pool_matrix_wide_packing():
    rng = np.random.default_rng(3)
    cols = []
    for _ in range(7):
        c = ["0"] * 130
        for i in rng.choice(130, 9, replace=False):
            c[i] = "1"
        cols.append("".join(c))
    X = PoolMatrix.from_columns(cols)
    assert X.packed.shape == (7, 3)
    for j, c in enumerate(cols):
        assert X.columns[j] == int(c[::-1], 2)
    y = OutcomeVector(X.columns[2] | X.columns[5], 130)
    assert set(X.covered_columns(y).tolist()) >= {2, 5}


@given(st.lists(st.booleans(), min_size=1, max_size=80))
def test_outcome_vector_string_round_trip(bits):
    y = OutcomeVector.from_bools(bits)
    assert y.weight == sum(bits)
    assert OutcomeVector.from_string(str(y)) == y


def test_outcome_vector_order_and_bounds():
    assert OutcomeVector.from_string("1000") <= OutcomeVector.from_string("1010")
    assert not OutcomeVector.from_string("0100") <= OutcomeVector.from_string("1010")
    with pytest.raises(ValueError):
        OutcomeVector(0b10000, 4)


def test_candidate_hypergraph_adjacency():
    y = OutcomeVector(0, 1)
    H = CandidateHypergraph.build(2, y, [(3, 1), (1, 2), (1, 3)])
    assert H.edges == ((1, 2), (1, 3))
    assert H.adjacency == {1: (0, 1), 2: (0,), 3: (1,)}
    assert all(sum(i in ix for ix in H.adjacency.values()) == 2 for i in range(len(H)))
    assert H.max_degree() == 2 and H.degree(7) == 0
    with pytest.raises(ValueError):
        CandidateHypergraph.build(3, y, [(1, 2)])


def test_transcript_counters_and_placeholders():
    tr = Transcript()
    tr.record(1, [{0, 1}, {2}], [True, False])
    tr.record(3, [{4}], [1])
    assert tr.stage_counts == [2, 0, 1]
    assert tr.total_tests == 3 and tr.n_stages == 2
    assert tr.consistent_with({1, 4}) and not tr.consistent_with({2, 4})
    with pytest.raises(ValueError):
        tr.record(2, [], [])


def test_transcript_stage_limit():
    tr = Transcript()
    for n in range(1, 6):
        tr.record(n, [{0}], [True])
    with pytest.raises(ValueError):
        tr.record(6, [{0}], [True])
    unlimited = Transcript(max_stages=None)
    for n in range(1, 9):
        unlimited.record(n, [{0}], [True])
    assert unlimited.n_stages == 8


def test_transcript_json_is_one_based():
    tr = Transcript()
    tr.record(1, [{0, 2}], [True])
    obj = tr.to_json_obj()
    assert obj == {"stages": [{"tests": [[1, 3]], "outcomes": [1]}]}
    assert Transcript.from_json_obj(obj).stages == tr.stages


def test_decode_result_variants():
    ok = DecodeResult.recovered((5, 2), Transcript())
    assert ok.ok and ok.defectives == (2, 5)
    bad = DecodeResult.failed("AmbiguousCandidates", Transcript(), "two groups")
    assert not bad.ok and bad.defectives is None
    with pytest.raises(ValueError):
        DecodeResult.failed("Timeout", Transcript())
    with pytest.raises(ValueError):
        DecodeResult(None, Transcript())
