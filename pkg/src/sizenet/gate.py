"""Size gate: re-rank a scorer's output, keeping only size-compatible labels.

Labels are walked from the highest probability down; the first one whose
size range covers the image's real size is the prediction. Equal
probabilities are broken by label-set order, both here and for the ungated
baseline, so a correct baseline answer that survives the size filter is never
overturned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fileio import csv_rows, csv_text
from .errors import GateError
from .labels import LabelSet, filter_by_size
from .rsize_io import Manifest
from .scoring import ScoreTable, ScoreVector

PREDICTIONS_HEADER = (
    "image_id",
    "predicted",
    "baseline_top1",
    "fallback_used",
    "selected_rank",
    "filtered_set",
)


@dataclass(frozen=True)
class GatedPrediction:
    image_id: str
    predicted: str
    baseline_top1: str
    filtered_set: tuple[str, ...]
    fallback_used: bool
    selected_rank: int


def ranking(probs) -> np.ndarray:
    """Label indices by descending probability, ties in ascending index order."""
    p = np.asarray(probs, dtype=float)
    return np.lexsort((np.arange(p.size), -p))


def gate(ls: LabelSet, size_m: float, scores: ScoreVector) -> GatedPrediction:
    if scores.labels != ls.labels:
        raise GateError(
            f"{scores.image_id}: score labels {scores.labels} do not match label set {ls.labels}"
        )
    if size_m is None:
        raise GateError(f"{scores.image_id}: no real-size annotation")
    allowed = filter_by_size(ls, size_m)
    order = ranking(scores.probs)
    labels = ls.labels
    top1 = labels[order[0]]
    if not allowed:
        return GatedPrediction(scores.image_id, top1, top1, (), True, 1)
    keep = set(allowed)
    for rank, k in enumerate(order, start=1):
        if labels[k] in keep:
            return GatedPrediction(scores.image_id, labels[k], top1, allowed, False, rank)
    raise AssertionError("unreachable: a non-empty filtered set always intersects the ranking")


def gate_batch(ls: LabelSet, manifest: Manifest, scores: ScoreTable) -> list[GatedPrediction]:
    """Gate every manifest row, in manifest order. Fails on the first missing score row."""
    for row in manifest:
        if row.image_id not in scores:
            raise GateError(f"no score row for image_id {row.image_id!r}")
    return [gate(ls, row.size_m, scores.vector(row.image_id)) for row in manifest]


def write_predictions(preds) -> str:
    return csv_text(
        PREDICTIONS_HEADER,
        (
            (
                p.image_id,
                p.predicted,
                p.baseline_top1,
                "true" if p.fallback_used else "false",
                str(p.selected_rank),
                "|".join(p.filtered_set),
            )
            for p in preds
        ),
    )


def read_predictions(text: str) -> list[GatedPrediction]:
    out = []
    header_seen = False
    for line, fields in csv_rows(text):
        if not header_seen:
            if tuple(fields) != PREDICTIONS_HEADER:
                raise GateError(f"predictions header must be {','.join(PREDICTIONS_HEADER)}")
            header_seen = True
            continue
        if len(fields) != len(PREDICTIONS_HEADER):
            raise GateError(f"line {line}: expected {len(PREDICTIONS_HEADER)} fields")
        iid, pred, top1, fb, rank, fset = fields
        if fb not in ("true", "false"):
            raise GateError(f"line {line}: fallback_used must be true or false")
        try:
            rank = int(rank)
        except ValueError:
            raise GateError(f"line {line}: selected_rank must be an integer") from None
        if rank < 1:
            raise GateError(f"line {line}: selected_rank must be >= 1")
        out.append(
            GatedPrediction(iid, pred, top1, tuple(fset.split("|")) if fset else (), fb == "true", rank)
        )
    if not header_seen:
        raise GateError("predictions file is missing its header")
    return out
