"""Multistage group testing: 3-stage search for two defectives, 5-stage search for three."""

from .audit import AuditReport, Violation, audit_2good, audit_3good
from .baseline import baseline_binary_splitting
from .campaign import CampaignReport, run_campaign
from .decode_three import StructuredHypergraph, build_structure, decode_s3, structural_audit
from .decode_two import decode_s2, partition_edges_s2
from .design import compute_params, generate_matrix, outcome
from .errors import (
    AmbiguousCandidates,
    CampaignError,
    ConvergenceError,
    DecodeFailure,
    GroupTestingError,
    InvalidParams,
    StageProtocolError,
    StructuralViolation,
)
from .hypergraph import (
    ConflictGraph,
    Configuration,
    bitmask_identify,
    candidates,
    find_configuration,
    greedy_partition,
    maximal_matching,
)
from .io import emit, read_matrix, write_matrix
from .model import (
    CandidateHypergraph,
    DecodeResult,
    DesignParams,
    OutcomeVector,
    PoolMatrix,
    Transcript,
)
from .oracle import StagedOracle, make_oracle
from .probability import b_threshold, pr1, pr2, q_value
from .rates import RateReport, optimize_constants

__all__ = [name for name in dir() if not name.startswith("_")]
