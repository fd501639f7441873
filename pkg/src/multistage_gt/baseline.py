"""Fully adaptive reference decoder: binary splitting with one test per stage."""

from __future__ import annotations

from .model import DecodeResult, Transcript
from .oracle import as_staged, run_recorded_stage


def baseline_binary_splitting(t: int, s: int, oracle) -> DecodeResult:
    """Find ``s`` defectives among ``range(t)`` by repeated halving.

    The live pool always holds a defective, so each search needs no test of the
    pool itself: test one half, keep the half that must be positive, and discard
    items proven negative. At most s * ceil(log2 t) tests.
    """
    oracle = as_staged(oracle)
    transcript = Transcript(max_stages=None)
    pool = list(range(t))
    found: list[int] = []
    for _ in range(s):
        part = pool
        while len(part) > 1:
            half = part[: len(part) // 2]
            positive = run_recorded_stage(oracle, transcript, len(transcript.stages) + 1, [half])[0]
            if positive:
                part = half
            else:
                cleared = set(half)
                pool = [v for v in pool if v not in cleared]
                part = part[len(half):]
        found.append(part[0])
        pool = [v for v in pool if v != part[0]]
    return DecodeResult(tuple(found), transcript, info={"queries": transcript.total_tests})
