"""Verification campaigns: generate (and audit) a matrix, decode many hidden sets, aggregate."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations, islice

import numpy as np

from .audit import AuditReport, audit_2good, audit_3good
from .baseline import baseline_binary_splitting
from .decode_three import build_structure, decode_s3, structural_audit
from .decode_two import decode_s2
from .design import compute_params, generate_matrix, outcome
from .errors import CampaignError
from .hypergraph import candidates
from .model import PoolMatrix
from .oracle import make_oracle

log = logging.getLogger(__name__)

EXHAUSTIVE_BUDGET = 2_000_000
RETRY_BUDGET = 16
AUDIT_SAMPLE = 200
GOODNESS_SAMPLE = 50
MAX_STAGES = 5


@dataclass
class CampaignReport:
    t: int
    s: int
    seed: int
    matrix_seed: int
    N: int
    decoder: str = "multistage"
    runs: int = 0
    failures: dict = field(default_factory=dict)
    max_tests: int = 0
    total_tests: int = 0
    stage_max: list = field(default_factory=lambda: [0] * MAX_STAGES)
    max_stages_used: int = 0
    audit: dict = field(default_factory=dict)
    regenerations: list = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def n_failures(self) -> int:
        return sum(self.failures.values())

    @property
    def successes(self) -> int:
        return self.runs - self.n_failures

    @property
    def mean_tests(self) -> float:
        return self.total_tests / self.runs if self.runs else 0.0

    @property
    def ratio(self) -> float:
        """max total tests over the information-theoretic s log2 t."""
        return self.max_tests / (self.s * math.log2(self.t))

    def record(self, result, hidden) -> None:
        self.runs += 1
        if not result.ok:
            self.failures[result.failure] = self.failures.get(result.failure, 0) + 1
        elif result.defectives != tuple(sorted(hidden)):
            self.failures["WrongAnswer"] = self.failures.get("WrongAnswer", 0) + 1
        counts = result.transcript.stage_counts
        total = sum(counts)
        self.total_tests += total
        self.max_tests = max(self.max_tests, total)
        self.max_stages_used = max(self.max_stages_used, result.transcript.n_stages)
        for i, c in enumerate(counts[:MAX_STAGES]):
            self.stage_max[i] = max(self.stage_max[i], c)

    def csv_row(self) -> dict:
        row = {"t": self.t, "s": self.s, "seed": self.seed, "N": self.N, "runs": self.runs,
               "failures": self.n_failures, "max_tests": self.max_tests,
               "mean_tests": f"{self.mean_tests:.6f}"}
        row.update({f"stage_max_{i + 1}": c for i, c in enumerate(self.stage_max)})
        row["ratio"] = f"{self.ratio:.6f}"
        return row


def hidden_sets(mode: str, t: int, s: int, seed: int, trials: int | None,
                budget: int = EXHAUSTIVE_BUDGET):
    """Iterator over the hidden sets of a campaign, as sorted tuples."""
    if mode == "exhaustive":
        total = math.comb(t, s)
        if total > budget:
            raise CampaignError(f"C({t},{s}) = {total} hidden sets exceed the exhaustive budget {budget}")
        return combinations(range(t), s)
    if mode == "random":
        if not trials or trials <= 0:
            raise CampaignError("random mode needs a positive trial count")
        rng = np.random.default_rng(seed)
        return (tuple(sorted(rng.choice(t, size=s, replace=False).tolist())) for _ in range(trials))
    raise CampaignError(f"unknown campaign mode {mode!r}")


def audit_matrix(X: PoolMatrix, sample) -> AuditReport:
    """Audit over the outcomes of ``sample`` hidden sets.

    s=2: the 2-good properties. s=3: the structure bounds for every sampled outcome
    plus the 3-good properties on the first GOODNESS_SAMPLE of them.
    """
    sample = list(sample)
    if X.params.s == 2:
        return audit_2good(X, scope=sample)
    report = AuditReport()
    seen = set()
    for S in sample:
        y = outcome(X, S)
        if y.bits in seen:
            continue
        seen.add(y.bits)
        report.extend(structural_audit(build_structure(candidates(X, 3, y), X.params.L1)))
    report.extend(audit_3good(X, scope=sample[:GOODNESS_SAMPLE]))
    return report


def prepare_matrix(params, sample, audit: bool = True, retry_budget: int = RETRY_BUDGET,
                   auditor=audit_matrix) -> tuple[PoolMatrix, AuditReport | None, list]:
    """Generate a matrix; on audit failure regenerate with seed+1, seed+2, ...

    Returns (matrix, its audit report, [(rejected seed, violation summary), ...]).
    """
    regenerations = []
    for attempt in range(retry_budget + 1):
        X = generate_matrix(params.with_seed(params.seed + attempt))
        if not audit:
            return X, None, regenerations
        report = auditor(X, sample)
        if report.passed:
            return X, report, regenerations
        summary = report.summary()["violations"]
        log.warning("matrix seed %d failed audit %s; regenerating with seed %d",
                    X.params.seed, summary, X.params.seed + 1)
        regenerations.append((X.params.seed, summary))
    raise CampaignError(f"no matrix passed the audit within {retry_budget} regenerations")


def run_campaign(mode: str, t: int, s: int, seed: int = 0, trials: int | None = None, *,
                 N: int | None = None, p=None, L1: int | None = None, decoder: str = "multistage",
                 audit: bool = True, audit_sample: int = AUDIT_SAMPLE,
                 retry_budget: int = RETRY_BUDGET, budget: int = EXHAUSTIVE_BUDGET,
                 auditor=audit_matrix) -> CampaignReport:
    """Decode every (exhaustive) or ``trials`` random hidden s-sets. Deterministic in ``seed``."""
    start = time.perf_counter()
    sets = list(hidden_sets(mode, t, s, seed, trials, budget))
    if decoder == "baseline":
        report = CampaignReport(t, s, seed, seed, N=0, decoder=decoder)
        for S in sets:
            report.record(baseline_binary_splitting(t, s, make_oracle(S, t)), S)
        report.wall_clock = time.perf_counter() - start
        return report
    if decoder != "multistage":
        raise CampaignError(f"unknown decoder {decoder!r}")

    params = compute_params(t, s, N=N, p=p, L1=L1, seed=seed)
    sample = list(islice(hidden_sets("random", t, s, seed, audit_sample), audit_sample))
    X, audit_report, regenerations = prepare_matrix(params, sample, audit, retry_budget, auditor)
    decode = decode_s2 if s == 2 else decode_s3
    limit = 3 if s == 2 else 5

    report = CampaignReport(t, s, seed, X.params.seed, X.N, decoder=decoder,
                            regenerations=regenerations,
                            audit=audit_report.summary() if audit_report else {})
    for S in sets:
        report.record(decode(X, make_oracle(S, t, limit)), S)
    report.wall_clock = time.perf_counter() - start
    return report
