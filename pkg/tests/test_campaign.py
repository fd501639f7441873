import logging
import math

import pytest

from multistage_gt import AuditReport, CampaignError, baseline_binary_splitting, make_oracle, run_campaign
from multistage_gt.campaign import hidden_sets
from multistage_gt.io import CSV_FIELDS


def test_baseline_examples():
    r = baseline_binary_splitting(8, 1, make_oracle({5}, 8))
    assert r.defectives == (5,) and r.transcript.total_tests == 3
    assert r.transcript.n_stages == 3


def test_baseline_random_s3():
    report = run_campaign("random", 2**10, 3, seed=4, trials=1000, decoder="baseline")
    assert report.n_failures == 0
    assert report.max_tests <= 3 * 10 + 9


def test_campaign_report_invariants():
    report = run_campaign("exhaustive", 24, 2, N=10, audit=False)
    assert report.runs == math.comb(24, 2)
    assert report.successes + report.n_failures == report.runs
    row = report.csv_row()
    assert tuple(row) == CSV_FIELDS
    assert report.ratio == pytest.approx(report.max_tests / (2 * math.log2(24)))
    assert report.max_stages_used <= 3


def test_campaign_deterministic():
    a = run_campaign("random", 128, 3, seed=11, trials=200, N=24)
    b = run_campaign("random", 128, 3, seed=11, trials=200, N=24)
    assert a.csv_row() == b.csv_row() and a.failures == b.failures and a.audit == b.audit
    assert list(hidden_sets("random", 50, 3, 2, 5)) == list(hidden_sets("random", 50, 3, 2, 5))


def test_regeneration_on_audit_failure(caplog):
    # at N = 20 matrix seeds 0, 1 and 2 violate the 3-good properties on the seed-0 audit sample
    with caplog.at_level(logging.WARNING, logger="multistage_gt.campaign"):
        report = run_campaign("random", 64, 3, seed=0, trials=100, N=20)
    assert [seed for seed, _ in report.regenerations] == [0, 1, 2]
    assert report.matrix_seed == 3 and report.audit["passed"]
    assert sum("regenerating" in rec.message for rec in caplog.records) == 3
    assert report.n_failures == 0


def test_retry_budget_exhausted():
    def always_fail(X, sample):
        report = AuditReport(1)
        report.add("forced", None)
        return report

    with pytest.raises(CampaignError, match="regenerations"):
        run_campaign("random", 64, 2, trials=5, retry_budget=2, auditor=always_fail)


def test_campaign_argument_errors():
    with pytest.raises(CampaignError):
        run_campaign("exhaustive", 200, 3, budget=1000)
    with pytest.raises(CampaignError):
        run_campaign("random", 64, 2)
    with pytest.raises(CampaignError):
        run_campaign("sampled", 64, 2, trials=3)
    with pytest.raises(CampaignError):
        run_campaign("random", 64, 2, trials=3, decoder="oracle")


def test_audit_can_be_skipped():
    report = run_campaign("random", 64, 3, trials=20, audit=False)
    assert report.audit == {} and report.regenerations == []
