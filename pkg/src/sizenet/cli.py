"""Command-line pipeline: ``sizenet <subcommand>``.

Subcommands map onto pipeline stages so any stage can be replaced by an
external tool (typically a CNN exporting a score file)::

    gen-synth  CONFIG --out DIR        synthetic dataset + provenance
    train      --features --manifest --label-set --out MODEL.json
    score      --model --features --out SCORES.csv
    gate       --label-set --manifest --scores --out PREDICTIONS.csv
    eval       --label-set --manifest --predictions --out DIR
    run        CONFIG --out DIR        all of the above in one go
    parse-name FILENAME

Exit status: 0 success, 2 invalid input or usage, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import synth
from ._fileio import atomic_write_text, staged_directory
from .errors import SizeNetError
from .evaluate import accuracies, compare_report, confusion, evaluate_predictions
from .gate import gate_batch, ranking, read_predictions, write_predictions
from .labels import LabelSet, load_label_set
from .rsize_io import parse_distance_from_name, read_features, read_manifest
from .scoring import (
    CentroidModel,
    ScoreTable,
    read_scores,
    score_features,
    train_centroids,
    write_scores,
)

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID = 0, 1, 2


class UsageError(SizeNetError):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file") from None


def _check_file_target(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    if not path.parent.is_dir():
        raise UsageError(f"{path.parent}: output directory does not exist")


def _check_dir_target(path: Path, force: bool) -> None:
    if path.exists():
        if not path.is_dir():
            raise UsageError(f"{path} exists and is not a directory")
        if any(path.iterdir()) and not force:
            raise UsageError(f"{path} is not empty; pass --force to overwrite")


def _load_synth_config(spec: str, seed: Optional[int]) -> synth.SynthConfig:
    obj = _load_json_config(spec)
    if seed is not None:
        obj["seed"] = seed
    return synth.SynthConfig.from_dict(obj)


def _load_json_config(spec: str) -> dict:
    """Read a JSON config from a path, or ``bundled:<name>`` for a shipped one."""
    if spec.startswith("bundled:"):
        res = resources.files("sizenet") / "data" / f"{spec.split(':', 1)[1]}.json"
        if not res.is_file():
            raise UsageError(f"no bundled config named {spec!r}")
        text = res.read_text(encoding="utf-8")
    else:
        text = _read(spec)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{spec}: malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError(f"{spec}: config must be a JSON object")
    return obj


def _emit(report_text: str) -> None:
    sys.stdout.write(report_text)


# -- stages -----------------------------------------------------------------


def stage_train(ls: LabelSet, manifest_text: str, features_text: str, tau: float) -> CentroidModel:
    manifest = read_manifest(manifest_text, ls.name)
    manifest.check_labels(ls)
    return train_centroids(read_features(features_text), manifest, ls, tau)


def stage_eval(ls: LabelSet, manifest, preds, prefix: str = "") -> dict[str, str]:
    """Render confusion matrices and comparison report; returns file name -> text."""
    results = evaluate_predictions(manifest, preds, ls)
    comp = compare_report(results["baseline"][1], results["gated"][1])
    return {
        f"{prefix}confusion_baseline.csv": results["baseline"][0].to_csv(),
        f"{prefix}confusion_gated.csv": results["gated"][0].to_csv(),
        f"{prefix}report.csv": comp.to_csv(),
        f"{prefix}report.txt": comp.to_table(),
    }


def cmd_parse_name(args) -> int:
    print(repr(parse_distance_from_name(args.filename)))
    return EXIT_OK


def cmd_gen_synth(args) -> int:
    cfg = _load_synth_config(args.config, args.seed)
    out = Path(args.out)
    _check_dir_target(out, args.force)
    ds = synth.generate(cfg)
    with staged_directory(out) as stage:
        synth.write_dataset(ds, stage)
    return EXIT_OK


def cmd_train(args) -> int:
    out = Path(args.out)
    _check_file_target(out, args.force)
    ls = load_label_set(args.label_set)
    model = stage_train(ls, _read(args.manifest), _read(args.features), args.tau)
    atomic_write_text(out, model.to_json())
    return EXIT_OK


def cmd_score(args) -> int:
    out = Path(args.out)
    _check_file_target(out, args.force)
    model = CentroidModel.from_json(_read(args.model))
    if args.label_set:
        ls = load_label_set(args.label_set)
        if ls.labels != model.labels:
            raise UsageError("model labels do not match the label set order")
    table = score_features(model, read_features(_read(args.features)))
    atomic_write_text(out, write_scores(table))
    return EXIT_OK


def cmd_gate(args) -> int:
    out = Path(args.out)
    _check_file_target(out, args.force)
    ls = load_label_set(args.label_set)
    manifest = read_manifest(_read(args.manifest), ls.name)
    manifest.check_labels(ls)
    scores = read_scores(_read(args.scores), ls)
    preds = gate_batch(ls, manifest, scores)
    atomic_write_text(out, write_predictions(preds))
    return EXIT_OK


def cmd_eval(args) -> int:
    out = Path(args.out)
    ls = load_label_set(args.label_set)
    manifest = read_manifest(_read(args.manifest), ls.name)
    if not len(manifest):
        raise UsageError("empty manifest")
    manifest.check_labels(ls)
    preds = read_predictions(_read(args.predictions))
    texts = stage_eval(ls, manifest, preds)
    if out.exists() and not out.is_dir():
        raise UsageError(f"{out} exists and is not a directory")
    for name in texts:
        if (out / name).exists() and not args.force:
            raise UsageError(f"{out / name} exists; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    for name, text in texts.items():
        atomic_write_text(out / name, text)
    _emit(texts["report.csv" if args.format == "csv" else "report.txt"])
    return EXIT_OK


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs for an end-to-end run.

    Either ``synth`` (a synthetic dataset is generated first and fills in the
    dataset paths) or explicit paths. ``scorer`` is ``"centroid"`` (train a
    model on the train split), ``"centroid:<model.json>"`` or
    ``"file:<scores.csv>"``.
    """

    synth: Optional[synth.SynthConfig] = None
    label_set: Optional[Path] = None
    train_manifest: Optional[Path] = None
    train_features: Optional[Path] = None
    val_manifest: Optional[Path] = None
    val_features: Optional[Path] = None
    test_manifest: Optional[Path] = None
    test_features: Optional[Path] = None
    scorer: str = "centroid"
    tau: float = 1.0

    @classmethod
    def from_dict(cls, obj: dict, base: Path, seed=None, tau=None) -> ExperimentConfig:
        if "synth" not in obj and "label_set" not in obj:
            # a bare synthetic config is shorthand for {"synth": config}
            obj = {"synth": obj}
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise UsageError(f"unknown experiment field(s): {', '.join(sorted(unknown))}")
        kwargs = {}
        for key, val in obj.items():
            if key == "synth":
                sobj = dict(val)
                if seed is not None:
                    sobj["seed"] = seed
                kwargs[key] = synth.SynthConfig.from_dict(sobj)
            elif key == "scorer":
                kind, _, target = str(val).partition(":")
                kwargs[key] = f"{kind}:{(base / target).resolve()}" if target else str(val)
            elif key == "tau":
                kwargs[key] = float(val)
            elif val is not None:
                kwargs[key] = (base / val).resolve()
        if tau is not None:
            kwargs["tau"] = tau
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        kind, _, target = self.scorer.partition(":")
        if kind not in ("centroid", "file") or (kind == "file" and not target):
            raise UsageError(f"scorer must be centroid, centroid:<model> or file:<scores>; got {self.scorer!r}")
        if not self.tau > 0:
            raise UsageError("tau must be > 0")
        if self.synth is None:
            need = ["label_set", "test_manifest"]
            if kind == "centroid":
                need.append("test_features")
                if not target:
                    need += ["train_manifest", "train_features"]
            for name in need:
                path = getattr(self, name)
                if path is None:
                    raise UsageError(f"experiment config needs {name!r}")
        for name in ("label_set", "train_manifest", "train_features", "val_manifest", "val_features", "test_manifest", "test_features"):
            path = getattr(self, name)
            if path is not None and not path.exists():
                raise UsageError(f"{name}: {path} does not exist")
        if target and not Path(target).exists():
            raise UsageError(f"scorer target {target} does not exist")


def _val_outputs(ls, manifest, scores: ScoreTable) -> dict[str, str]:
    """Validation is gated only when every row carries a size."""
    if all(r.size_m is not None for r in manifest):
        preds = gate_batch(ls, manifest, scores)
        return stage_eval(ls, manifest, preds, prefix="val_")
    for r in manifest:
        if r.image_id not in scores:
            raise UsageError(f"no score row for validation image_id {r.image_id!r}")
    top1 = {r.image_id: ls.labels[ranking(scores.vector(r.image_id).probs)[0]] for r in manifest}
    cm = confusion(manifest, top1, ls)
    rep = accuracies(cm, "baseline")
    rows = ["variant," + ",".join(ls.labels) + ",Macro,Micro"]
    rows.append(
        "baseline,"
        + ",".join(f"{rep.per_class_accuracy[lab]:.4f}" for lab in ls.labels)
        + f",{rep.macro_accuracy:.4f},{rep.micro_accuracy:.4f}"
    )
    return {"val_confusion_baseline.csv": cm.to_csv(), "val_report.csv": "\n".join(rows) + "\n"}


def run_experiment(cfg: ExperimentConfig, stage: Path) -> dict[str, str]:
    """Execute every stage, writing into ``stage``. Returns the rendered reports."""
    files = {}
    paths = {
        name: getattr(cfg, name)
        for name in ("label_set", "train_manifest", "train_features", "val_manifest", "val_features", "test_manifest", "test_features")
    }
    if cfg.synth is not None:
        ds = synth.generate(cfg.synth)
        data_dir = stage / "dataset"
        data_dir.mkdir()
        written = synth.write_dataset(ds, data_dir)
        for name in ("label_set", "train_manifest", "train_features", "test_manifest", "test_features"):
            paths[name] = written[name]

    ls = load_label_set(paths["label_set"])
    test_manifest = read_manifest(_read(paths["test_manifest"]), ls.name)
    if not len(test_manifest):
        raise UsageError("empty manifest")
    test_manifest.check_labels(ls)

    kind, _, target = cfg.scorer.partition(":")
    model = None
    if kind == "file":
        test_scores = read_scores(_read(target), ls)
    else:
        if target:
            model = CentroidModel.from_json(_read(target))
            if model.labels != ls.labels:
                raise UsageError("model labels do not match the label set order")
        else:
            model = stage_train(ls, _read(paths["train_manifest"]), _read(paths["train_features"]), cfg.tau)
            atomic_write_text(stage / "model.json", model.to_json())
        test_scores = score_features(model, read_features(_read(paths["test_features"])))
        atomic_write_text(stage / "scores_test.csv", write_scores(test_scores))

    preds = gate_batch(ls, test_manifest, test_scores)
    atomic_write_text(stage / "predictions_test.csv", write_predictions(preds))
    files.update(stage_eval(ls, test_manifest, preds))

    if paths["val_manifest"] is not None:
        val_manifest = read_manifest(_read(paths["val_manifest"]), ls.name)
        val_manifest.check_labels(ls)
        if model is not None:
            if paths["val_features"] is None:
                raise UsageError("val_manifest given without val_features")
            val_scores = score_features(model, read_features(_read(paths["val_features"])))
        else:
            val_scores = test_scores
        files.update(_val_outputs(ls, val_manifest, val_scores))

    for name, text in files.items():
        atomic_write_text(stage / name, text)
    return files


def cmd_run(args) -> int:
    config_path = Path(args.config)
    base = Path.cwd() if args.config.startswith("bundled:") else config_path.resolve().parent
    cfg = ExperimentConfig.from_dict(_load_json_config(args.config), base, args.seed, args.tau)
    out = Path(args.out)
    _check_dir_target(out, args.force)
    with staged_directory(out) as stage:
        files = run_experiment(cfg, stage)
    _emit(files["report.csv" if args.format == "csv" else "report.txt"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sizenet", description="Size-gated object recognition pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    p = add("parse-name", cmd_parse_name, "print the distance encoded in an image file name")
    p.add_argument("filename")

    p = add("gen-synth", cmd_gen_synth, "generate a synthetic dataset")
    p.add_argument("config", help="synthetic config JSON, or bundled:<name>")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--force", action="store_true")

    p = add("train", cmd_train, "fit a nearest-centroid scorer")
    p.add_argument("--label-set", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--force", action="store_true")

    p = add("score", cmd_score, "score a feature table with a centroid model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--label-set")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")

    p = add("gate", cmd_gate, "apply the size gate to a score file")
    p.add_argument("--label-set", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")

    p = add("eval", cmd_eval, "confusion matrices and baseline-vs-gated report")
    p.add_argument("--label-set", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--force", action="store_true")

    p = add("run", cmd_run, "generate/train/score/gate/eval end to end")
    p.add_argument("config", help="experiment or synthetic config JSON, or bundled:<name>")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--force", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SizeNetError, OSError) as exc:
        print(f"sizenet: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"sizenet: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
