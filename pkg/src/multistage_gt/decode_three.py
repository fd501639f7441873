"""Five-stage decoder for three defectives.

After stage 1 the candidate hypergraph H is split using the sibling graph G'
(vertex pairs that lie together in at least L2 = 3 L1 candidate edges):
edges containing a sibling pair form E1, the rest E2. Stage 2 runs paired
union/complement tests over a separated partition of E2. If the defective set
is in E2 one group fires and a bit-mask stage finishes; otherwise the
defective set is in E1 and is found through the arc graph G'' over the
remaining three stages.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .audit import AuditReport
from .decode_two import confirm, firing_groups, pair_tests, stage_one
from .errors import AmbiguousCandidates, DecodeFailure
from .hypergraph import ConflictGraph, bitmask_identify, candidates, greedy_partition, maximal_matching
from .model import CandidateHypergraph, DecodeResult, PoolMatrix, Transcript
from .oracle import as_staged, run_recorded_stage

MAX_STAGES = 5


@dataclass(frozen=True)
class StructuredHypergraph:
    H: CandidateHypergraph
    L1: int
    gprime: frozenset  # sibling pairs (a, b), a < b
    E1: tuple
    E2: tuple
    additional: dict = field(compare=False)  # E1 edge -> its additional vertex
    gdd: frozenset = frozenset()  # arcs of G''
    e2_arcs: frozenset = field(default=frozenset(), compare=False)
    e2_groups: tuple = ()
    v_groups: tuple = ()

    @property
    def L2(self) -> int:
        return 3 * self.L1

    def gprime_degree(self) -> Counter:
        deg: Counter = Counter()
        for a, b in self.gprime:
            deg[a] += 1
            deg[b] += 1
        return deg

    def gdd_out_degree(self) -> Counter:
        return Counter(a for a, _ in self.gdd)

    def h2_degree(self) -> Counter:
        return Counter(v for e in self.E2 for v in e)


def _sibling_pairs(H: CandidateHypergraph, L2: int) -> frozenset:
    counts = Counter(pair for e in H.edges for pair in combinations(e, 2))
    return frozenset(pair for pair, c in counts.items() if c >= L2)


def build_structure(H: CandidateHypergraph, L1: int) -> StructuredHypergraph:
    """Sibling graph, E1/E2 split, additional vertices, G'', and both partitions.

    The E2 partition colours the conflict graph whose arcs (e1, e2) come from
    (1) e1 and e2 intersecting, (2) an E2 edge or sibling pair meeting both,
    (3) an E1 edge whose additional vertex lies in e1 and which meets e2.
    """
    if H.s != 3:
        raise ValueError("structure is defined for 3-uniform candidate hypergraphs")
    L2 = 3 * L1
    gprime = _sibling_pairs(H, L2)

    E1, E2, additional = [], [], {}
    for e in H.edges:
        adds = [v for v in e if tuple(u for u in e if u != v) in gprime]
        if adds:
            E1.append(e)
            additional[e] = min(adds)
        else:
            E2.append(e)

    gdd = set()
    for e in E1:
        a = additional[e]
        b, c = (u for u in e if u != a)
        gdd.update(((a, b), (a, c), (b, c), (c, b)))

    e2_at: dict[int, set] = {}
    for e in E2:
        for v in e:
            e2_at.setdefault(v, set()).add(e)

    def touching(vertices) -> set:
        out: set = set()
        for v in vertices:
            out |= e2_at.get(v, set())
        return out

    arcs = set()
    for toucher in (*E2, *gprime):  # cases 1 and 2: every E2 edge touches itself
        members = touching(toucher)
        arcs.update(permutations(members, 2))
    for e in E1:  # case 3
        hosts = e2_at.get(additional[e], ())
        met = touching(e)
        arcs.update((x, y) for x in hosts for y in met if x != y)

    e2_groups = greedy_partition(ConflictGraph(E2, arcs))
    active = sorted({v for arc in gdd for v in arc})
    v_groups = greedy_partition(ConflictGraph(active, gdd))
    return StructuredHypergraph(
        H=H, L1=L1, gprime=gprime, E1=tuple(E1), E2=tuple(E2), additional=additional,
        gdd=frozenset(gdd), e2_arcs=frozenset(arcs),
        e2_groups=tuple(tuple(g) for g in e2_groups), v_groups=tuple(tuple(g) for g in v_groups),
    )


def separation_violations(S: StructuredHypergraph) -> list[tuple]:
    """Pairs of E2 edges sharing a group although they intersect or some candidate edge
    meets both; pairs of G'' vertices sharing a group although joined by an arc."""
    bad = []
    for group in S.e2_groups:
        for e1, e2 in combinations(group, 2):
            if set(e1) & set(e2):
                bad.append(("e2.intersect", e1, e2))
            elif any(set(e) & set(e1) and set(e) & set(e2) for e in S.H.edges):
                bad.append(("e2.common", e1, e2))
    for group in S.v_groups:
        members = set(group)
        bad.extend(("v.arc", a, b) for a, b in S.gdd if a in members and b in members)
    return bad


def structural_audit(S: StructuredHypergraph, L1: int | None = None) -> AuditReport:
    """Size and degree bounds the decoder's test count relies on. Violations are
    reported, not raised: they mean the matrix should be regenerated."""
    L1 = S.L1 if L1 is None else L1
    L2 = 3 * L1
    y = S.H.outcome
    report = AuditReport(checked_outcomes=1)

    for v, deg in S.gprime_degree().items():
        if deg >= L1:
            report.add("structure.gprime_degree", y, vertex=v, degree=deg, bound=L1)
    for v, deg in S.h2_degree().items():
        if deg > 2 * L1 * L2:
            report.add("structure.h2_degree", y, vertex=v, degree=deg, bound=2 * L1 * L2)
    packing = len(maximal_matching(list(S.E2)))
    if len(S.E2) > 6 * L1 * L2 * packing:
        report.add("structure.e2_size", y, size=len(S.E2), packing=packing, bound=6 * L1 * L2 * packing)
    for v, deg in S.gdd_out_degree().items():
        if deg >= 3 * L1 * L1:
            report.add("structure.gdd_out_degree", y, vertex=v, degree=deg, bound=3 * L1 * L1)
    if len(S.e2_groups) > 96 * L1 * L1 * L2 * L2:
        report.add("structure.e2_groups", y, groups=len(S.e2_groups), bound=96 * L1 * L1 * L2 * L2)
    if len(S.v_groups) > 6 * L1 * L1:
        report.add("structure.v_groups", y, groups=len(S.v_groups), bound=6 * L1 * L1)
    for kind, a, b in separation_violations(S):
        report.add("structure.separation", y, kind=kind, first=a, second=b)
    return report


def stage_five_sets(S: StructuredHypergraph, v: int) -> tuple[list[int], list[int], list[int]]:
    """(W, V', U) for the located vertex v.

    W: other vertices of E1 edges whose additional vertex is v.
    V': sibling partners v' of v in E1 edges (v, v', u) with additional vertex u.
    U: those additional vertices u, minus V' and v.
    """
    W, Vp, U = set(), set(), set()
    for e in S.E1:
        if v not in e:
            continue
        a = S.additional[e]
        if a == v:
            W.update(u for u in e if u != v)
        else:
            Vp.update(u for u in e if u not in (v, a))
            U.add(a)
    U -= Vp | {v}
    return sorted(W), sorted(Vp), sorted(U)


def _individual_fallback(S: StructuredHypergraph, oracle, transcript: Transcript) -> tuple:
    """One extra stage testing every E1 vertex alone; the positives must form an E1 edge."""
    vertices = sorted({v for e in S.E1 for v in e})
    outcomes = run_recorded_stage(oracle, transcript, len(transcript.stages) + 1,
                                  [frozenset([v]) for v in vertices])
    found = tuple(v for v, o in zip(vertices, outcomes) if o)
    if found not in S.E1:
        raise AmbiguousCandidates(f"individual tests found {found}, not a candidate")
    return found


def decode_s3(X: PoolMatrix, oracle, L1: int | None = None, fallback: bool = False) -> DecodeResult:
    """Find three defectives in at most five stages.

    With ``fallback`` an ambiguous case-2 decode spends a sixth stage on individual tests.
    """
    L1 = X.params.L1 if L1 is None else L1
    limit = MAX_STAGES + 1 if fallback else MAX_STAGES
    oracle = as_staged(oracle, limit)
    transcript = Transcript(max_stages=limit)
    info: dict = {}
    try:
        y = stage_one(X, oracle, transcript)
        H = candidates(X, 3, y)
        info["candidates"] = len(H)
        if not H.edges:
            raise AmbiguousCandidates("no triple matches the stage-1 outcomes")
        if len(H) == 1:
            return confirm(H.edges[0], transcript, case=0, **info)

        S = build_structure(H, L1)
        info["structure"] = S
        outcomes = run_recorded_stage(oracle, transcript, 2, pair_tests(S.e2_groups, X.t))
        hits = firing_groups(outcomes)
        if len(hits) > 1:
            raise AmbiguousCandidates(f"{len(hits)} E2 groups read (1, 0)")
        if hits:
            info.update(case=1, group=hits[0])
            group = S.e2_groups[hits[0]]
            tests, decode = bitmask_identify(group)
            index = decode(run_recorded_stage(oracle, transcript, 3, tests))
            return confirm(group[index], transcript, **info)

        info["case"] = 2
        if not S.E1:
            raise AmbiguousCandidates("no E2 group fired and E1 is empty")
        try:
            outcomes = run_recorded_stage(oracle, transcript, 3, [frozenset(g) for g in S.v_groups])
            positive = [i for i, o in enumerate(outcomes) if o]
            if len(positive) != 3:
                raise AmbiguousCandidates(f"{len(positive)} vertex groups tested positive, expected 3")
            V1 = sorted(S.v_groups[positive[0]])
            tests, decode = bitmask_identify([[u] for u in V1])
            v = V1[decode(run_recorded_stage(oracle, transcript, 4, tests))]
            info["vertex"] = v

            W, Vp, U = stage_five_sets(S, v)
            singles = sorted(set(W) | set(Vp))
            u_tests = bitmask_identify([[u] for u in U])[0] if U else []
            run_recorded_stage(oracle, transcript, 5, [frozenset([x]) for x in singles] + u_tests)
            info.update(W=len(W), Vp=len(Vp), U=len(U), singles=len(singles))

            survivors = [e for e in S.E1 if v in e and transcript.consistent_with(e)]
            if len(survivors) != 1:
                raise AmbiguousCandidates(f"{len(survivors)} candidates survive stage 5")
            return confirm(survivors[0], transcript, **info)
        except AmbiguousCandidates:
            if not fallback:
                raise
            info["fallback"] = True
            return confirm(_individual_fallback(S, oracle, transcript), transcript, **info)
    except DecodeFailure as exc:
        return DecodeResult.failed(exc.reason, transcript, str(exc), **info)
