"""Synthetic benchmarks for size gating.

Two generators:

``generate_pairs``
    ``G`` groups, each an *object* and its *model* (a miniature replica).
    Both members of a group draw features from Gaussians centred on the same
    group axis (identical when ``pair_sep == 0``), but their size ranges are
    disjoint. A feature-only classifier can do no better than a coin flip
    inside a pair; the size gate separates them.

``generate_interference``
    ``K`` classes with pairwise-disjoint size ranges. Training features are
    pure class draws; each test feature blends the target draw with a draw
    from a randomly chosen other class, weighted by ``alpha``.

Random streams
--------------
Every generated row owns its own PCG64 stream, seeded with
``numpy.random.SeedSequence(seed, spawn_key=(split, class_index, row))``
where ``split`` is 0 for train and 1 for test. Within a row, draws happen in
a fixed order (pairs: ``d`` standard normals, then the size uniform;
interference test rows: interferer index, ``d`` target normals, ``d``
interferer normals, then the size uniform). Output therefore does not depend
on generation order or on how many rows other classes have.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ._fileio import atomic_write_text
from .errors import LabelSetError, SynthConfigError
from .labels import CategoryEntry, LabelSet, SizeRange, dump_label_set
from .rsize_io import FeatureTable, Manifest, ManifestRow, write_features, write_manifest

SPLITS = {"train": 0, "test": 1}

_PAIR_DEFAULTS = [
    ("police_car", 4.0, 8.0),
    ("police_car_model", 0.1, 1.0),
    ("fire_truck", 5.0, 12.0),
    ("fire_truck_model", 0.2, 1.0),
    ("bullet_train", 30.0, 90.0),
    ("bullet_train_model", 0.3, 2.0),
]

# street/bedroom classes, with pillow and bed narrowed so all five are disjoint
_INTERFERENCE_DEFAULTS = [
    ("pedestrian", 1.0, 3.1),
    ("car", 5.0, 8.0),
    ("crosswalk", 10.0, 20.0),
    ("pillow", 0.2, 0.9),
    ("bed", 3.2, 4.8),
]


@dataclass(frozen=True)
class SynthConfig:
    kind: str = "pairs"
    pair_groups: int = 3
    n_classes: int = 5
    n_train: int = 350
    n_test: int = 100
    dim: int = 16
    group_sep: float = 6.0
    pair_sep: float = 0.0
    noise: float = 1.0
    alpha: float = 0.5
    seed: int = 0
    ranges: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(
            self, "ranges", tuple((str(l), float(a), float(b)) for l, a, b in self.ranges)
        )
        self.validate()

    @classmethod
    def from_dict(cls, obj: dict) -> SynthConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise SynthConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        obj = dict(obj)
        if "ranges" in obj:
            try:
                obj["ranges"] = tuple((r["label"], r["min_m"], r["max_m"]) for r in obj["ranges"])
            except (KeyError, TypeError):
                raise SynthConfigError("each range needs label, min_m and max_m") from None
        try:
            return cls(**obj)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SynthConfigError):
                raise
            raise SynthConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranges"] = [{"label": l, "min_m": a, "max_m": b} for l, a, b in self.class_ranges()]
        return d

    @property
    def n_labels(self) -> int:
        return 2 * self.pair_groups if self.kind == "pairs" else self.n_classes

    def class_ranges(self) -> tuple:
        if self.ranges:
            return self.ranges
        if self.kind == "pairs":
            out = list(_PAIR_DEFAULTS[: 2 * self.pair_groups])
            for g in range(3, self.pair_groups):
                out += [(f"object_{g}", 10.0 * g, 10.0 * g + 8.0), (f"object_{g}_model", 0.1, 1.0)]
            return tuple(out)
        if self.n_classes == len(_INTERFERENCE_DEFAULTS):
            return tuple(_INTERFERENCE_DEFAULTS)
        return tuple((f"class_{k}", 2.0**k, 1.9 * 2.0**k) for k in range(self.n_classes))

    def validate(self) -> None:
        if self.kind not in ("pairs", "interference"):
            raise SynthConfigError(f"kind must be 'pairs' or 'interference', got {self.kind!r}")
        ints = ("pair_groups", "n_classes", "n_train", "n_test", "dim", "seed")
        for name in ints:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise SynthConfigError(f"{name} must be an integer, got {v!r}")
        if self.pair_groups < 1:
            raise SynthConfigError("pair_groups must be >= 1")
        if self.n_train < 1 or self.n_test < 1:
            raise SynthConfigError("n_train and n_test must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise SynthConfigError("seed must be a 64-bit unsigned integer")
        if not self.noise > 0:
            raise SynthConfigError("noise must be > 0")
        if not (self.group_sep >= 0 and self.pair_sep >= 0):
            raise SynthConfigError("group_sep and pair_sep must be >= 0")
        if not 0 <= self.alpha <= 1:
            raise SynthConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.kind == "interference" and self.n_classes < 2:
            raise SynthConfigError("interference needs at least 2 classes")
        axes = self.pair_groups if self.kind == "pairs" else self.n_classes
        if self.dim < axes:
            raise SynthConfigError(f"dim must be >= {axes} so every group has its own axis")

        ranges = self.class_ranges()
        if len(ranges) != self.n_labels:
            raise SynthConfigError(f"expected {self.n_labels} ranges, got {len(ranges)}")
        try:
            srs = [SizeRange(a, b) for _, a, b in ranges]
        except LabelSetError as exc:
            raise SynthConfigError(str(exc)) from None
        if self.kind == "pairs":
            for g in range(self.pair_groups):
                a, b = srs[2 * g], srs[2 * g + 1]
                if _overlap(a, b):
                    raise SynthConfigError(
                        f"size ranges of pair {ranges[2 * g][0]!r}/{ranges[2 * g + 1][0]!r} overlap"
                    )
        else:
            for i in range(len(srs)):
                for j in range(i + 1, len(srs)):
                    if _overlap(srs[i], srs[j]):
                        raise SynthConfigError(
                            f"size ranges of {ranges[i][0]!r} and {ranges[j][0]!r} overlap"
                        )

    def label_set(self) -> LabelSet:
        name = "synth-pairs" if self.kind == "pairs" else "synth-interference"
        try:
            return LabelSet(name, tuple(CategoryEntry(l, SizeRange(a, b)) for l, a, b in self.class_ranges()))
        except LabelSetError as exc:
            raise SynthConfigError(str(exc)) from None


def _overlap(a: SizeRange, b: SizeRange) -> bool:
    return a.min_m <= b.max_m and b.min_m <= a.max_m


def load_config(path) -> SynthConfig:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SynthConfigError(f"{path}: malformed config: {exc}") from None
    if not isinstance(obj, dict):
        raise SynthConfigError(f"{path}: config must be a JSON object")
    return SynthConfig.from_dict(obj)


def row_rng(seed: int, split: str, class_index: int, row: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(SPLITS[split], class_index, row))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class Split:
    manifest: Manifest
    features: FeatureTable


@dataclass(frozen=True)
class SynthDataset:
    config: SynthConfig
    label_set: LabelSet
    train: Split
    test: Split


def _class_means(cfg: SynthConfig) -> np.ndarray:
    means = np.zeros((cfg.n_labels, cfg.dim))
    if cfg.kind == "pairs":
        for g in range(cfg.pair_groups):
            means[2 * g, g] = cfg.group_sep
            means[2 * g + 1, g] = cfg.group_sep
            means[2 * g + 1, (cfg.pair_groups + g) % cfg.dim] += cfg.pair_sep
    else:
        means[np.arange(cfg.n_classes), np.arange(cfg.n_classes)] = cfg.group_sep
    return means


def _build_split(cfg, ls, split, n, draw_row) -> Split:
    rows, ids, feats = [], [], []
    for k, entry in enumerate(ls.categories):
        for i in range(n):
            iid = f"{split}_{entry.label}_{i:04d}"
            x, size = draw_row(row_rng(cfg.seed, split, k, i), k, entry.range)
            rows.append(ManifestRow(iid, entry.label, size))
            ids.append(iid)
            feats.append(x)
    return Split(Manifest(tuple(rows), ls.name), FeatureTable(tuple(ids), np.array(feats)))


def _pure_draw(cfg, means):
    def draw(rng, k, rng_range):
        x = means[k] + cfg.noise * rng.standard_normal(cfg.dim)
        return x, float(rng.uniform(rng_range.min_m, rng_range.max_m))

    return draw


def generate_pairs(cfg: SynthConfig) -> SynthDataset:
    """Object/model pairs with shared feature statistics and disjoint sizes."""
    if cfg.kind != "pairs":
        raise SynthConfigError("generate_pairs needs kind='pairs'")
    ls = cfg.label_set()
    means = _class_means(cfg)
    draw = _pure_draw(cfg, means)
    return SynthDataset(
        cfg,
        ls,
        _build_split(cfg, ls, "train", cfg.n_train, draw),
        _build_split(cfg, ls, "test", cfg.n_test, draw),
    )


def generate_interference(cfg: SynthConfig) -> SynthDataset:
    """Pure training classes; test features mixed with an interfering class."""
    if cfg.kind != "interference":
        raise SynthConfigError("generate_interference needs kind='interference'")
    ls = cfg.label_set()
    means = _class_means(cfg)
    k_total = cfg.n_classes

    def mixed(rng, k, rng_range):
        j = int(rng.integers(k_total - 1))
        other = j + (j >= k)
        target = means[k] + cfg.noise * rng.standard_normal(cfg.dim)
        noise = means[other] + cfg.noise * rng.standard_normal(cfg.dim)
        x = (1.0 - cfg.alpha) * target + cfg.alpha * noise
        return x, float(rng.uniform(rng_range.min_m, rng_range.max_m))

    return SynthDataset(
        cfg,
        ls,
        _build_split(cfg, ls, "train", cfg.n_train, _pure_draw(cfg, means)),
        _build_split(cfg, ls, "test", cfg.n_test, mixed),
    )


def generate(cfg: SynthConfig) -> SynthDataset:
    return generate_pairs(cfg) if cfg.kind == "pairs" else generate_interference(cfg)


DATASET_FILES = {
    "label_set": "label_set.json",
    "train_manifest": "train_manifest.csv",
    "train_features": "train_features.csv",
    "test_manifest": "test_manifest.csv",
    "test_features": "test_features.csv",
    "provenance": "provenance.json",
}


def provenance(cfg: SynthConfig) -> str:
    obj = {
        "generator": "sizenet.synth",
        "prng": "numpy PCG64; SeedSequence(seed, spawn_key=(split, class_index, row)); split train=0 test=1",
        "config": cfg.to_dict(),
    }
    return json.dumps(obj, indent=2) + "\n"


def write_dataset(ds: SynthDataset, out_dir) -> dict[str, Path]:
    """Write all dataset files into an existing directory; returns name -> path."""
    out = Path(out_dir)
    texts = {
        "label_set": dump_label_set(ds.label_set),
        "train_manifest": write_manifest(ds.train.manifest),
        "train_features": write_features(ds.train.features),
        "test_manifest": write_manifest(ds.test.manifest),
        "test_features": write_features(ds.test.features),
        "provenance": provenance(ds.config),
    }
    paths = {}
    for key, text in texts.items():
        paths[key] = out / DATASET_FILES[key]
        atomic_write_text(paths[key], text)
    return paths
