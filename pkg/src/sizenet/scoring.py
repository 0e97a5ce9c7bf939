"""Class-probability scorers.

A scorer turns one image into a probability vector over the active label
set. Two scorers ship with the package:

* :class:`FileScorer` replays probabilities produced elsewhere (for example a
  CNN's softmax layer exported to a score file).
* :class:`CentroidScorer` is a nearest-centroid model with a softmax over
  negative squared distances, trained by :func:`train_centroids`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ._fileio import csv_rows, csv_text, fmt_float
from .errors import ScoreError
from .labels import LabelSet
from .rsize_io import FeatureTable, Manifest

SUM_TOL = 1e-6
INGEST_SUM_TOL = 1e-3


def check_probs(probs, labels, image_id="") -> None:
    """Enforce the score-vector contract: finite, within [0, 1], summing to one."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (len(labels),):
        raise ScoreError(f"{image_id}: expected {len(labels)} probabilities, got shape {p.shape}")
    if not np.isfinite(p).all() or (p < 0).any() or (p > 1).any():
        raise ScoreError(f"{image_id}: probabilities must be finite and within [0, 1]")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise ScoreError(f"{image_id}: probabilities sum to {p.sum()!r}, not 1")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    image_id: str
    labels: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        check_probs(p, self.labels, self.image_id)
        p.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", p)

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.labels, self.probs)}


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Probability rows for many images over one label order."""

    labels: tuple[str, ...]
    image_ids: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(len(self.image_ids), len(self.labels))
        for i, iid in enumerate(self.image_ids):
            check_probs(p[i], self.labels, iid)
        if len(set(self.image_ids)) != len(self.image_ids):
            raise ScoreError("duplicate image_id in score table")
        p.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "image_ids", tuple(self.image_ids))
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "_index", {iid: i for i, iid in enumerate(self.image_ids)})

    def __len__(self):
        return len(self.image_ids)

    def __contains__(self, image_id):
        return image_id in self._index

    def vector(self, image_id: str) -> ScoreVector:
        try:
            i = self._index[image_id]
        except KeyError:
            raise ScoreError(f"no score row for image_id {image_id!r}") from None
        return ScoreVector(image_id, self.labels, self.probs[i])

    @classmethod
    def from_vectors(cls, vectors) -> ScoreTable:
        vectors = list(vectors)
        if not vectors:
            raise ScoreError("cannot build a score table from zero vectors")
        labels = vectors[0].labels
        for v in vectors:
            if v.labels != labels:
                raise ScoreError(f"{v.image_id}: label order differs from the first vector")
        return cls(labels, tuple(v.image_id for v in vectors), np.stack([v.probs for v in vectors]))


class Scorer(Protocol):
    labels: tuple[str, ...]

    def score(self, image_id: str, payload=None) -> ScoreVector: ...


class FileScorer:
    """Looks scores up in a table read from a score file."""

    def __init__(self, table: ScoreTable):
        self.table = table
        self.labels = table.labels

    def score(self, image_id, payload=None):
        return self.table.vector(image_id)


@dataclass(frozen=True, eq=False)
class CentroidModel:
    labels: tuple[str, ...]
    centroids: np.ndarray
    tau: float = 1.0

    def __post_init__(self):
        c = np.array(self.centroids, dtype=float)
        if c.ndim != 2 or c.shape[0] != len(self.labels) or c.shape[1] < 1:
            raise ScoreError(f"need one centroid per label; got shape {c.shape} for {len(self.labels)} labels")
        if not np.isfinite(c).all():
            raise ScoreError("centroids must be finite")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ScoreError(f"temperature must be positive, got {self.tau}")
        c.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def to_json(self) -> str:
        obj = {
            "labels": list(self.labels),
            "tau": self.tau,
            "dim": self.dim,
            "centroids": self.centroids.tolist(),
        }
        return json.dumps(obj) + "\n"

    @classmethod
    def from_json(cls, text: str) -> CentroidModel:
        try:
            obj = json.loads(text)
            model = cls(tuple(obj["labels"]), obj["centroids"], obj["tau"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ScoreError(f"malformed centroid model file: {exc}") from None
        if obj.get("dim") != model.dim:
            raise ScoreError(f"model 'dim' is {obj.get('dim')} but centroids have {model.dim} columns")
        return model


def train_centroids(features: FeatureTable, manifest: Manifest, ls: LabelSet, tau: float = 1.0) -> CentroidModel:
    """Per-class arithmetic mean of the feature vectors.

    Means are accumulated with ``math.fsum`` so the result is exactly
    independent of sample order.
    """
    truth = manifest.labels_of()
    by_class = {lab: [] for lab in ls.labels}
    for i, fid in enumerate(features.image_ids):
        if fid not in truth:
            raise ScoreError(f"feature row {fid!r} has no label in the manifest")
        lab = truth[fid]
        if lab not in by_class:
            raise ScoreError(f"{fid}: label {lab!r} is not in label set {ls.name!r}")
        by_class[lab].append(i)
    centroids = np.empty((len(ls), features.dim))
    for k, lab in enumerate(ls.labels):
        idx = by_class[lab]
        if not idx:
            raise ScoreError(f"class {lab!r} has no training samples")
        block = features.matrix[idx]
        centroids[k] = [math.fsum(col) / len(idx) for col in block.T]
    return CentroidModel(ls.labels, centroids, tau)


def _softmax_neg_sqdist(sqdist: np.ndarray, tau: float) -> np.ndarray:
    logits = -sqdist / tau
    logits = logits - logits.max(axis=-1, keepdims=True)
    w = np.exp(logits)
    return w / w.sum(axis=-1, keepdims=True)


def centroid_score(model: CentroidModel, x, image_id: str = "") -> ScoreVector:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ScoreError(f"{image_id}: feature dimension {x.shape} does not match model dimension {model.dim}")
    sqdist = ((model.centroids - x) ** 2).sum(axis=1)
    return ScoreVector(image_id, model.labels, _softmax_neg_sqdist(sqdist, model.tau))


def score_features(model: CentroidModel, features: FeatureTable) -> ScoreTable:
    """Score every row of a feature table with the centroid model."""
    if features.dim != model.dim:
        raise ScoreError(f"feature dimension {features.dim} does not match model dimension {model.dim}")
    diff = features.matrix[:, None, :] - model.centroids[None, :, :]
    sqdist = (diff**2).sum(axis=2)
    return ScoreTable(model.labels, features.image_ids, _softmax_neg_sqdist(sqdist, model.tau))


class CentroidScorer:
    def __init__(self, model: CentroidModel):
        self.model = model
        self.labels = model.labels

    def score(self, image_id, payload=None):
        return centroid_score(self.model, payload, image_id)


def read_scores(text: str, ls: LabelSet) -> ScoreTable:
    """Parse a score file whose columns follow ``ls`` order.

    Rows summing to within 1e-3 of one are renormalized; anything further off
    is rejected.
    """
    labels = ls.labels
    ids, rows = [], []
    header_seen = False
    for line, fields in csv_rows(text):
        if not header_seen:
            got = tuple(fields[1:])
            if not fields or fields[0] != "image_id":
                raise ScoreError("score header must start with image_id")
            if got != labels:
                for pos, (want, have) in enumerate(zip(labels, got)):
                    if want != have:
                        raise ScoreError(f"score header column {pos + 1} is {have!r}, expected {want!r}")
                raise ScoreError(f"score header has {len(got)} label columns, expected {len(labels)}")
            header_seen = True
            continue
        if len(fields) != len(labels) + 1:
            raise ScoreError(f"line {line}: expected {len(labels) + 1} columns, got {len(fields)}")
        try:
            p = np.array([float(v) for v in fields[1:]])
        except ValueError:
            raise ScoreError(f"line {line}: non-numeric probability") from None
        if not np.isfinite(p).all() or (p < 0).any() or (p > 1).any():
            raise ScoreError(f"line {line} ({fields[0]}): probability outside [0, 1]")
        total = math.fsum(p)
        if abs(total - 1.0) > INGEST_SUM_TOL:
            raise ScoreError(f"line {line} ({fields[0]}): probabilities sum to {total!r}")
        ids.append(fields[0])
        rows.append(p / total)
    if not header_seen:
        raise ScoreError("score file is missing its header")
    return ScoreTable(labels, tuple(ids), np.array(rows).reshape(len(ids), len(labels)))


def write_scores(table: ScoreTable) -> str:
    return csv_text(
        ("image_id",) + table.labels,
        ([iid] + [fmt_float(v) for v in table.probs[i]] for i, iid in enumerate(table.image_ids)),
    )
