"""
Objects versus their miniature models
=====================================

Each object shares its feature distribution with its model, so a
feature-only nearest-centroid classifier guesses within a pair. Real size
separates them.
"""

from sizenet import (
    SynthConfig,
    compare_report,
    evaluate_predictions,
    gate_batch,
    generate,
    score_features,
    train_centroids,
)

cfg = SynthConfig(kind="pairs", pair_groups=3, n_train=350, n_test=100, seed=7)
ds = generate(cfg)
model = train_centroids(ds.train.features, ds.train.manifest, ds.label_set)
scores = score_features(model, ds.test.features)
preds = gate_batch(ds.label_set, ds.test.manifest, scores)
results = evaluate_predictions(ds.test.manifest, preds, ds.label_set)

print(compare_report(results["baseline"][1], results["gated"][1]).to_table())

# %%
# The baseline confusion matrix shows the within-pair mixing.
print(results["baseline"][0].to_csv())

# %%
# Pulling the pair members apart in feature space (``pair_sep``) helps the
# baseline; the gated result is already perfect.
for sep in (0.0, 1.0, 2.0, 4.0):
    ds = generate(SynthConfig(pair_sep=sep, seed=7))
    model = train_centroids(ds.train.features, ds.train.manifest, ds.label_set)
    preds = gate_batch(ds.label_set, ds.test.manifest, score_features(model, ds.test.features))
    res = evaluate_predictions(ds.test.manifest, preds, ds.label_set)
    print(f"pair_sep={sep:.1f}  baseline={res['baseline'][1].micro_accuracy:.3f}  gated={res['gated'][1].micro_accuracy:.3f}")
