"""Dataset ingestion: filename-encoded distances, directory scans, manifests, feature tables.

Test images carry their real size in the file name, after the last underscore::

    police_car_042_6.5.jpg  ->  6.5 m

Manifests and feature tables are plain comma-separated files with a fixed
header; see :func:`write_manifest` and :func:`write_features`.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path, PurePath
from typing import Iterator, Optional

import numpy as np

from ._fileio import csv_rows, csv_text, fmt_float
from .errors import (
    FeatureError,
    ManifestError,
    MissingUnderscoreError,
    NonNumericDistanceError,
    NonPositiveDistanceError,
    UnknownExtensionError,
)
from .labels import LabelSet

IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png")
MANIFEST_HEADER = ("image_id", "true_label", "size_m")

_NUMBER_RE = re.compile(r"^(?=.*[0-9])[0-9]*\.?[0-9]*$")


def _split_extension(name: str) -> tuple[str, str]:
    dot = name.rfind(".")
    ext = name[dot:].lower() if dot > 0 else ""
    if ext not in IMAGE_EXTENSIONS:
        raise UnknownExtensionError(
            f"{name!r}: expected one of {', '.join(IMAGE_EXTENSIONS)} (case-insensitive)"
        )
    return name[:dot], ext


def parse_distance_from_name(filename: str) -> float:
    """Return the shooting distance (meters) encoded in an image file name.

    The distance is the token between the last underscore and the extension.
    Accepted extensions are .jpg, .jpeg and .png in any case; the token must be
    ASCII digits with at most one decimal point, and strictly positive.

    Raises:
        UnknownExtensionError, MissingUnderscoreError, NonNumericDistanceError,
        NonPositiveDistanceError: one kind per way the convention can be broken.
    """
    name = PurePath(filename).name
    if not name:
        raise MissingUnderscoreError("empty filename")
    stem, _ = _split_extension(name)
    cut = stem.rfind("_")
    if cut < 0:
        raise MissingUnderscoreError(f"{name!r}: no underscore before the distance token")
    token = stem[cut + 1 :]
    if not _NUMBER_RE.match(token):
        raise NonNumericDistanceError(f"{name!r}: distance token {token!r} is not a decimal number")
    value = float(token)
    if value <= 0:
        raise NonPositiveDistanceError(f"{name!r}: distance {token!r} must be positive")
    return value


@dataclass(frozen=True)
class ManifestRow:
    image_id: str
    true_label: str
    size_m: Optional[float]  # None for unannotated (training) images

    def __post_init__(self):
        if not self.image_id:
            raise ManifestError("image_id must be non-empty")
        if self.size_m is not None:
            s = float(self.size_m)
            if not math.isfinite(s) or s <= 0:
                raise ManifestError(f"{self.image_id}: size_m must be positive and finite, got {s}")
            object.__setattr__(self, "size_m", s)


@dataclass(frozen=True)
class Manifest:
    rows: tuple[ManifestRow, ...]
    label_set_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for r in self.rows:
            if r.image_id in seen:
                raise ManifestError(f"duplicate image_id {r.image_id!r}")
            seen.add(r.image_id)

    def __len__(self):
        return len(self.rows)

    def __iter__(self) -> Iterator[ManifestRow]:
        return iter(self.rows)

    @property
    def image_ids(self) -> tuple[str, ...]:
        return tuple(r.image_id for r in self.rows)

    def labels_of(self) -> dict[str, str]:
        return {r.image_id: r.true_label for r in self.rows}

    def check_labels(self, ls: LabelSet) -> None:
        known = set(ls.labels)
        for r in self.rows:
            if r.true_label not in known:
                raise ManifestError(
                    f"{r.image_id}: label {r.true_label!r} is not in label set {ls.name!r}"
                )


def scan_directory(root, ls: LabelSet, mode: str = "test") -> Manifest:
    """Build a manifest from a ``root/<label>/<image>`` tree.

    In ``"test"`` mode every image name must carry a distance token. In
    ``"train"`` mode names without a valid token are accepted and their size
    is recorded as absent. Non-image files are skipped with a warning; a
    subdirectory whose name is not a label in ``ls`` is an error.
    """
    if mode not in ("test", "train"):
        raise ValueError(f"mode must be 'test' or 'train', got {mode!r}")
    root = Path(root)
    if not root.is_dir():
        raise ManifestError(f"{root}: not a directory")
    known = set(ls.labels)
    rows = []
    ids = {}
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        if sub.name not in known:
            raise ManifestError(f"{sub}: subdirectory {sub.name!r} is not a label in {ls.name!r}")
        n_before = len(rows)
        for path in sorted(p for p in sub.iterdir() if p.is_file()):
            if path.suffix.lower() not in IMAGE_EXTENSIONS:
                warnings.warn(f"skipping non-image file {path}", stacklevel=2)
                continue
            image_id = path.stem
            if image_id in ids:
                raise ManifestError(f"duplicate image_id {image_id!r}: {ids[image_id]} and {path}")
            ids[image_id] = path
            try:
                size = parse_distance_from_name(path.name)
            except (MissingUnderscoreError, NonNumericDistanceError, NonPositiveDistanceError) as exc:
                if mode == "test":
                    raise type(exc)(f"{path}: {exc}") from None
                size = None
            rows.append(ManifestRow(image_id, sub.name, size))
        if len(rows) == n_before:
            warnings.warn(f"class directory {sub} contains no images", stacklevel=2)
    rows.sort(key=lambda r: (r.true_label, r.image_id))
    return Manifest(tuple(rows), ls.name)


def read_manifest(text: str, label_set_name: str = "") -> Manifest:
    rows = []
    seen = set()
    header_ok = False
    for line, fields in csv_rows(text):
        if not header_ok:
            if tuple(fields) != MANIFEST_HEADER:
                raise ManifestError(
                    f"manifest header must be {','.join(MANIFEST_HEADER)}, got {','.join(fields)}"
                )
            header_ok = True
            continue
        if len(fields) != 3:
            raise ManifestError(f"line {line}: expected 3 fields, got {len(fields)}")
        image_id, label, raw_size = fields
        if image_id in seen:
            raise ManifestError(f"line {line}: duplicate image_id {image_id!r}")
        seen.add(image_id)
        size = None
        if raw_size != "":
            try:
                size = float(raw_size)
            except ValueError:
                raise ManifestError(f"line {line}: bad size_m {raw_size!r}") from None
        try:
            rows.append(ManifestRow(image_id, label, size))
        except ManifestError as exc:
            raise ManifestError(f"line {line}: {exc}") from None
    if not header_ok:
        raise ManifestError("manifest is missing its header")
    return Manifest(tuple(rows), label_set_name)


def write_manifest(m: Manifest) -> str:
    return csv_text(
        MANIFEST_HEADER,
        (
            (r.image_id, r.true_label, "" if r.size_m is None else fmt_float(r.size_m))
            for r in m.rows
        ),
    )


@dataclass(frozen=True)
class FeatureRecord:
    image_id: str
    features: np.ndarray


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Feature vectors stacked row-wise; ``matrix[i]`` belongs to ``image_ids[i]``."""

    image_ids: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[1] < 1:
            raise FeatureError("feature matrix must be 2-D with at least one column")
        if mat.shape[0] != len(self.image_ids):
            raise FeatureError("feature matrix row count does not match image_ids")
        if not np.isfinite(mat).all():
            raise FeatureError("feature values must be finite")
        if len(set(self.image_ids)) != len(self.image_ids):
            raise FeatureError("duplicate image_id in feature table")
        mat.setflags(write=False)
        object.__setattr__(self, "image_ids", tuple(self.image_ids))
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.image_ids)

    def records(self) -> Iterator[FeatureRecord]:
        for i, fid in enumerate(self.image_ids):
            yield FeatureRecord(fid, self.matrix[i])

    def row_index(self) -> dict[str, int]:
        return {fid: i for i, fid in enumerate(self.image_ids)}


def read_features(text: str) -> FeatureTable:
    ids = []
    values = []
    dim = None
    for line, fields in csv_rows(text):
        if dim is None:
            expected = ["image_id"] + [f"f{j}" for j in range(len(fields) - 1)]
            if fields != expected or len(fields) < 2:
                raise FeatureError(f"feature header must be image_id,f0,...,f{{d-1}}; got {','.join(fields)}")
            dim = len(fields) - 1
            continue
        row_no = len(ids) + 1
        if len(fields) != dim + 1:
            raise FeatureError(
                f"row {row_no} (line {line}): expected {dim + 1} columns, got {len(fields)}"
            )
        try:
            vec = [float(v) for v in fields[1:]]
        except ValueError:
            raise FeatureError(f"row {row_no} (line {line}): non-numeric feature value") from None
        if not all(math.isfinite(v) for v in vec):
            raise FeatureError(f"row {row_no} (line {line}): non-finite feature value")
        ids.append(fields[0])
        values.append(vec)
    if dim is None:
        raise FeatureError("feature file is missing its header")
    return FeatureTable(tuple(ids), np.array(values, dtype=float).reshape(len(ids), dim))


def write_features(table: FeatureTable) -> str:
    header = ["image_id"] + [f"f{j}" for j in range(table.dim)]
    return csv_text(
        header,
        ([fid] + [fmt_float(v) for v in table.matrix[i]] for i, fid in enumerate(table.image_ids)),
    )
