"""Noiseless test oracle with a stage firewall.

Tests are submitted into an open stage and answered only when the stage is
committed, so a decoder cannot let one test of a stage depend on another's
outcome. Stage and query counts are tracked by the oracle itself, independent
of whatever the decoder records.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import StageProtocolError
from .model import Transcript


class PendingOutcome:
    """Handle to a submitted test; readable only after its stage is committed."""

    __slots__ = ("_oracle", "_stage", "_index")

    def __init__(self, oracle: StagedOracle, stage: int, index: int):
        self._oracle = oracle
        self._stage = stage
        self._index = index

    @property
    def value(self) -> bool:
        if self._oracle.committed_stages < self._stage:
            raise StageProtocolError(
                f"outcome of test {self._index} read before stage {self._stage} was committed"
            )
        return self._oracle._results[self._stage - 1][self._index]

    def __bool__(self):
        return self.value


class StagedOracle:
    def __init__(self, hidden: Iterable[int], t: int | None = None, max_stages: int | None = None):
        self.hidden = frozenset(hidden)
        if not self.hidden:
            raise ValueError("hidden set must be nonempty")
        if t is not None and not all(0 <= v < t for v in self.hidden):
            raise ValueError(f"hidden set {sorted(self.hidden)} not inside [0, {t})")
        self.t = t
        self.max_stages = max_stages
        self.queries = 0
        self.committed_stages = 0
        self._open: list[frozenset] | None = None
        self._results: list[list[bool]] = []

    def begin_stage(self) -> None:
        if self._open is not None:
            raise StageProtocolError("previous stage is still open")
        if self.max_stages is not None and self.committed_stages >= self.max_stages:
            raise StageProtocolError(f"stage budget of {self.max_stages} exhausted")
        self._open = []

    def submit(self, test: Iterable[int]) -> PendingOutcome:
        if self._open is None:
            raise StageProtocolError("submit outside an open stage")
        self._open.append(frozenset(test))
        return PendingOutcome(self, self.committed_stages + 1, len(self._open) - 1)

    def commit(self) -> list[bool]:
        if self._open is None:
            raise StageProtocolError("commit without an open stage")
        hidden = self.hidden
        results = [not hidden.isdisjoint(test) for test in self._open]
        self.queries += len(results)
        self._results.append(results)
        self.committed_stages += 1
        self._open = None
        return list(results)

    def run_stage(self, tests: Iterable[Iterable[int]]) -> list[bool]:
        self.begin_stage()
        for test in tests:
            self.submit(test)
        return self.commit()


class _CallableOracle(StagedOracle):
    """Adapter for a bare ``vertex set -> bool`` function; stages are still batched."""

    def __init__(self, query: Callable, max_stages: int | None = None):
        self._query = query
        self.hidden = frozenset()
        self.t = None
        self.max_stages = max_stages
        self.queries = 0
        self.committed_stages = 0
        self._open = None
        self._results = []

    def commit(self) -> list[bool]:
        if self._open is None:
            raise StageProtocolError("commit without an open stage")
        results = [bool(self._query(test)) for test in self._open]
        self.queries += len(results)
        self._results.append(results)
        self.committed_stages += 1
        self._open = None
        return list(results)


def make_oracle(hidden: Iterable[int], t: int | None = None, max_stages: int | None = None) -> StagedOracle:
    """Oracle answering T -> [T intersects hidden]; ``.queries`` counts answered tests."""
    return StagedOracle(hidden, t, max_stages)


def as_staged(oracle, max_stages: int | None = None) -> StagedOracle:
    if isinstance(oracle, StagedOracle):
        return oracle
    if callable(oracle):
        return _CallableOracle(oracle, max_stages)
    raise TypeError(f"not an oracle: {oracle!r}")


def run_recorded_stage(oracle: StagedOracle, transcript: Transcript, number: int, tests) -> list[bool]:
    """Run one stage and record it; an empty stage costs nothing and is kept as a placeholder."""
    tests = [frozenset(t) for t in tests]
    if not tests:
        return []
    outcomes = oracle.run_stage(tests)
    transcript.record(number, tests, outcomes)
    return outcomes
