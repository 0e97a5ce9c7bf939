"""Confusion matrices and accuracy reports for baseline vs. gated predictions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ._fileio import csv_text
from .errors import EvalError
from .labels import LabelSet
from .rsize_io import Manifest

VARIANTS = ("baseline", "gated")


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts with rows indexed by true label and columns by predicted label."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.shape != (len(self.labels), len(self.labels)):
            raise EvalError(f"counts shape {c.shape} does not match {len(self.labels)} labels")
        if (c < 0).any():
            raise EvalError("counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cell(self, true_label: str, predicted: str) -> int:
        return int(self.counts[self.labels.index(true_label), self.labels.index(predicted)])

    def to_csv(self) -> str:
        return csv_text(
            ("true\\predicted",) + self.labels,
            ([lab] + [str(int(v)) for v in self.counts[i]] for i, lab in enumerate(self.labels)),
        )


@dataclass(frozen=True)
class AccuracyReport:
    variant: str
    labels: tuple[str, ...]
    per_class_accuracy: dict
    macro_accuracy: float
    micro_accuracy: float
    fallback_rate: float = 0.0


def predicted_labels(predictions, variant: str = "gated") -> dict[str, str]:
    """Map image_id to the label chosen by one variant of a gated prediction list."""
    if variant not in VARIANTS:
        raise EvalError(f"variant must be one of {VARIANTS}, got {variant!r}")
    field = "predicted" if variant == "gated" else "baseline_top1"
    return {p.image_id: getattr(p, field) for p in predictions}


def fallback_rate(predictions) -> float:
    preds = list(predictions)
    if not preds:
        return 0.0
    return sum(p.fallback_used for p in preds) / len(preds)


def confusion(manifest: Manifest, predictions: Mapping[str, str], ls: LabelSet) -> ConfusionMatrix:
    """Tally ``predictions`` (image_id -> label) against the manifest's true labels."""
    index = {lab: i for i, lab in enumerate(ls.labels)}
    ids = set(manifest.image_ids)
    for iid in predictions:
        if iid not in ids:
            raise EvalError(f"prediction for unknown image_id {iid!r}")
    counts = np.zeros((len(ls), len(ls)), dtype=np.int64)
    for row in manifest:
        if row.image_id not in predictions:
            raise EvalError(f"missing prediction for image_id {row.image_id!r}")
        pred = predictions[row.image_id]
        if row.true_label not in index:
            raise EvalError(f"{row.image_id}: true label {row.true_label!r} not in label set")
        if pred not in index:
            raise EvalError(f"{row.image_id}: predicted label {pred!r} not in label set")
        counts[index[row.true_label], index[pred]] += 1
    return ConfusionMatrix(ls.labels, counts)


def accuracies(cm: ConfusionMatrix, variant: str = "gated", fallback: float = 0.0) -> AccuracyReport:
    """Per-class, macro (mean over classes present) and micro (trace / total) accuracy."""
    total = cm.total
    if total == 0:
        raise EvalError("empty confusion matrix")
    support = cm.counts.sum(axis=1)
    diag = np.diag(cm.counts)
    per_class = {}
    present = []
    for i, lab in enumerate(cm.labels):
        if support[i] > 0:
            acc = int(diag[i]) / int(support[i])
            per_class[lab] = acc
            present.append(acc)
        else:
            per_class[lab] = float("nan")
    return AccuracyReport(
        variant=variant,
        labels=cm.labels,
        per_class_accuracy=per_class,
        macro_accuracy=sum(present) / len(present),
        micro_accuracy=int(diag.sum()) / total,
        fallback_rate=float(fallback),
    )


def evaluate_predictions(manifest: Manifest, predictions, ls: LabelSet):
    """Confusion matrices and reports for both variants of a gated prediction list."""
    preds = list(predictions)
    if not len(manifest):
        raise EvalError("empty manifest")
    out = {}
    for variant in VARIANTS:
        cm = confusion(manifest, predicted_labels(preds, variant), ls)
        fb = fallback_rate(preds) if variant == "gated" else 0.0
        out[variant] = (cm, accuracies(cm, variant, fb))
    return out


@dataclass(frozen=True)
class Comparison:
    labels: tuple[str, ...]
    baseline: AccuracyReport
    gated: AccuracyReport

    def _values(self, rep: AccuracyReport):
        return [rep.per_class_accuracy[lab] for lab in self.labels] + [
            rep.macro_accuracy,
            rep.micro_accuracy,
            rep.fallback_rate,
        ]

    @property
    def delta(self) -> list[float]:
        return [g - b for g, b in zip(self._values(self.gated), self._values(self.baseline))]

    @property
    def micro_delta(self) -> float:
        return self.gated.micro_accuracy - self.baseline.micro_accuracy

    @property
    def regressed(self) -> bool:
        """Gating lowered micro-accuracy, which implies some true label failed its size filter."""
        return self.micro_delta < 0

    @property
    def columns(self) -> list[str]:
        return ["Variant", *self.labels, "Macro", "Micro", "FallbackRate"]

    def rows(self) -> list[list[str]]:
        rows = [
            ["baseline"] + [_fmt(v) for v in self._values(self.baseline)],
            ["gated"] + [_fmt(v) for v in self._values(self.gated)],
            ["delta"] + [_fmt(v, signed=True) for v in self.delta],
        ]
        return rows

    def to_csv(self) -> str:
        return csv_text(self.columns, self.rows())

    def to_table(self) -> str:
        """Pipe table; a trailing note flags a negative micro-accuracy delta."""
        cols = self.columns
        body = self.rows()
        widths = [max(len(r[j]) for r in [cols] + body) for j in range(len(cols))]

        def line(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

        out = [line(cols), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        out += [line(r) for r in body]
        if self.regressed:
            out.append(
                f"REGRESSION: gated micro-accuracy is below baseline by {_fmt(-self.micro_delta)}"
            )
        return "\n".join(out) + "\n"


def _fmt(v: float, signed: bool = False) -> str:
    if v != v:
        return "nan"
    return f"{v:+.4f}" if signed else f"{v:.4f}"


def compare_report(baseline: AccuracyReport, gated: AccuracyReport) -> Comparison:
    if baseline.labels != gated.labels:
        raise EvalError("baseline and gated reports use different label sets")
    return Comparison(baseline.labels, baseline, gated)
