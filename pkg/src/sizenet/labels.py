"""Size-annotated label sets and interval-membership filtering."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib import resources

from .errors import LabelSetError

_LABEL_RE = re.compile(r"^[a-z0-9_]+$")


def canonical_label(raw: str) -> str:
    """Lower-case, trim, and map spaces/hyphens to underscores."""
    return re.sub(r"[\s\-]+", "_", raw.strip().lower())


@dataclass(frozen=True)
class SizeRange:
    """Closed interval ``[min_m, max_m]`` of admissible real sizes, in meters."""

    min_m: float
    max_m: float

    def __post_init__(self):
        lo, hi = float(self.min_m), float(self.max_m)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise LabelSetError(f"size range bounds must be finite, got ({lo}, {hi})")
        if lo <= 0:
            raise LabelSetError(f"size range minimum must be positive, got {lo}")
        if lo > hi:
            raise LabelSetError(f"size range minimum {lo} exceeds maximum {hi}")
        object.__setattr__(self, "min_m", lo)
        object.__setattr__(self, "max_m", hi)

    def covers(self, size_m: float) -> bool:
        return self.min_m <= size_m <= self.max_m

    def contains_range(self, other: SizeRange) -> bool:
        return self.min_m <= other.min_m and other.max_m <= self.max_m


@dataclass(frozen=True)
class CategoryEntry:
    label: str
    range: SizeRange

    def __post_init__(self):
        if not _LABEL_RE.match(self.label):
            raise LabelSetError(f"label {self.label!r} must match [a-z0-9_]+")


@dataclass(frozen=True)
class LabelSet:
    """Ordered, immutable collection of categories with their size ranges.

    Category order is significant: it fixes tie-breaking in the gate and the
    axis order of every confusion matrix.
    """

    name: str
    categories: tuple[CategoryEntry, ...]
    unit: str = "meters"

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if self.unit != "meters":
            raise LabelSetError(f"unit must be 'meters', got {self.unit!r}")
        if len(self.categories) < 2:
            raise LabelSetError(
                f"label set {self.name!r} has fewer than 2 categories ({len(self.categories)})"
            )
        seen = {}
        for pos, entry in enumerate(self.categories):
            if entry.label in seen:
                raise LabelSetError(
                    f"duplicate label {entry.label!r} at positions {seen[entry.label]} and {pos}"
                )
            seen[entry.label] = pos

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.categories)

    def __len__(self):
        return len(self.categories)

    def index(self, label: str) -> int:
        for i, c in enumerate(self.categories):
            if c.label == label:
                return i
        raise KeyError(label)

    def range_of(self, label: str) -> SizeRange:
        return self.categories[self.index(label)].range

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "unit": self.unit,
            "categories": [
                {"label": c.label, "min_m": c.range.min_m, "max_m": c.range.max_m}
                for c in self.categories
            ],
        }


def parse_label_set(text: str) -> LabelSet:
    """Parse a label-set JSON document.

    Errors name the offending category and its position in the file.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LabelSetError(f"malformed label-set file: {exc}") from None
    if not isinstance(obj, dict):
        raise LabelSetError("label-set file must hold a JSON object")
    missing = {"name", "unit", "categories"} - obj.keys()
    if missing:
        raise LabelSetError(f"label-set file missing field(s): {', '.join(sorted(missing))}")
    cats = obj["categories"]
    if not isinstance(cats, list):
        raise LabelSetError("'categories' must be a list")

    entries = []
    for pos, raw in enumerate(cats):
        if not isinstance(raw, dict) or not {"label", "min_m", "max_m"} <= raw.keys():
            raise LabelSetError(f"category at position {pos} needs label, min_m and max_m")
        label = canonical_label(str(raw["label"]))
        lo, hi = raw["min_m"], raw["max_m"]
        if isinstance(lo, bool) or isinstance(hi, bool) or not all(
            isinstance(v, (int, float)) for v in (lo, hi)
        ):
            raise LabelSetError(f"category {label!r} (position {pos}): bounds must be numbers")
        try:
            entries.append(CategoryEntry(label, SizeRange(lo, hi)))
        except LabelSetError as exc:
            raise LabelSetError(f"category {label!r} (position {pos}): {exc}") from None
    return LabelSet(name=str(obj["name"]), unit=obj["unit"], categories=tuple(entries))


def dump_label_set(ls: LabelSet) -> str:
    """Canonical JSON rendering; ``parse_label_set`` inverts it byte-for-byte."""
    return json.dumps(ls.to_dict(), indent=2) + "\n"


def load_label_set(path) -> LabelSet:
    with open(path, encoding="utf-8") as fh:
        return parse_label_set(fh.read())


def filter_by_size(ls: LabelSet, size_m: float) -> tuple[str, ...]:
    """Labels whose closed size range covers ``size_m``, in label-set order."""
    size_m = float(size_m)
    if not math.isfinite(size_m) or size_m <= 0:
        raise LabelSetError(f"size must be positive and finite, got {size_m}")
    return tuple(c.label for c in ls.categories if c.range.covers(size_m))


def canonical_table_fixtures() -> tuple[LabelSet, LabelSet]:
    """The two bundled label sets: six vehicle/model categories and five street/bedroom ones."""
    pkg = resources.files("sizenet") / "data"
    return (
        parse_label_set((pkg / "rsize1.json").read_text(encoding="utf-8")),
        parse_label_set((pkg / "rsize2.json").read_text(encoding="utf-8")),
    )
