"""
Gating an external model's scores
=================================

Any classifier can be gated: export its softmax rows to a score file whose
columns follow the label set, then run ``sizenet gate`` and ``sizenet eval``
(or the equivalent library calls below). Rows that sum to within 1e-3 of one,
as float32 softmax output usually does, are renormalized on read.
"""

from pathlib import Path

from sizenet import compare_report, evaluate_predictions, gate_batch, load_label_set, read_manifest, read_scores

data = Path(__file__).resolve().parents[1] / "tests" / "data"
ls = load_label_set(data / "rsize1_label_set.json")
manifest = read_manifest((data / "external_manifest.csv").read_text())
scores = read_scores((data / "external_scores.csv").read_text(), ls)

preds = gate_batch(ls, manifest, scores)
for p in preds:
    print(f"{p.image_id:10s} baseline={p.baseline_top1:20s} gated={p.predicted:20s} rank={p.selected_rank}")

# %%
res = evaluate_predictions(manifest, preds, ls)
print(compare_report(res["baseline"][1], res["gated"][1]).to_table())

# %%
# The same from a shell:
#
#   sizenet gate --label-set tests/data/rsize1_label_set.json \
#       --manifest tests/data/external_manifest.csv \
#       --scores tests/data/external_scores.csv --out predictions.csv
#   sizenet eval --label-set tests/data/rsize1_label_set.json \
#       --manifest tests/data/external_manifest.csv \
#       --predictions predictions.csv --out eval/
