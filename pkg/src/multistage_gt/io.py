"""Flat-file formats: matrix text files, transcript JSON, campaign CSV, rate JSON."""

from __future__ import annotations

import csv
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import InvalidParams
from .model import DesignParams, PoolMatrix, Transcript, sparsity_threshold

MATRIX_MAGIC = "GTMATRIX v1"
_HEADER = re.compile(r"GTMATRIX v1 N=(\d+) t=(\d+) s=(\d+) k=(\d+) seed=(\d+)")
CSV_FIELDS = ("t", "s", "seed", "N", "runs", "failures", "max_tests", "mean_tests",
              *(f"stage_max_{i}" for i in range(1, 6)), "ratio")


def format_matrix(X: PoolMatrix) -> str:
    p = X.params
    lines = [f"{MATRIX_MAGIC} N={X.N} t={X.t} s={p.s} k={X.k} seed={p.seed}"]
    lines.extend("".join("1" if b else "0" for b in row) for row in X.dense)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> PoolMatrix:
    """Inverse of format_matrix. p is taken as k/N and L1 from t; every column must weigh k."""
    lines = text.strip().splitlines()
    if not lines:
        raise InvalidParams("empty matrix file")
    m = _HEADER.fullmatch(lines[0].strip())
    if m is None:
        raise InvalidParams(f"bad matrix header {lines[0]!r}")
    N, t, s, k, seed = map(int, m.groups())
    rows = [ln.strip() for ln in lines[1:]]
    if len(rows) != N:
        raise InvalidParams(f"header says N={N} but file has {len(rows)} rows")
    for i, row in enumerate(rows):
        if len(row) != t or set(row) - {"0", "1"}:
            raise InvalidParams(f"row {i} is not a length-{t} 0/1 string")
    if not 0 < k < N:
        raise InvalidParams(f"column weight k={k} must satisfy 0 < k < N={N}")
    dense = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool).reshape(N, t)
    params = DesignParams(t=t, s=s, p=Fraction(k, N), N=N,
                          d_or_L1=sparsity_threshold(t) if t >= 4 else 1, seed=seed,
                          overrides=frozenset({"p"}))
    return PoolMatrix(params, dense)


def write_matrix(X: PoolMatrix, path) -> None:
    Path(path).write_text(format_matrix(X))


def read_matrix(path) -> PoolMatrix:
    return parse_matrix(Path(path).read_text())


def transcript_to_json(transcript: Transcript) -> str:
    return json.dumps(transcript.to_json_obj())


def transcript_from_json(text: str) -> Transcript:
    return Transcript.from_json_obj(json.loads(text))


def write_campaign_csv(reports: Iterable, out: TextIO | str | Path) -> None:
    """One row per CampaignReport under the fixed CSV header."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_campaign_csv(reports, fh)
        return
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())


def rates_to_json(report) -> str:
    return json.dumps(report.to_json_obj(), indent=2)


def emit(report, fmt: str, path) -> None:
    """Serialise a CampaignReport (csv), RateReport (json) or PoolMatrix (matrix)."""
    if fmt == "csv":
        write_campaign_csv([report], path)
    elif fmt == "json":
        Path(path).write_text(rates_to_json(report))
    elif fmt == "matrix":
        write_matrix(report, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
