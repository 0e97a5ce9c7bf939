"""
The size gate, step by step
===========================

A feature scorer thinks this 5 m object is most likely a police car *model*.
The gate walks the labels from most to least probable and returns the first
one whose size range admits 5 m.
"""

from sizenet import ScoreVector, canonical_table_fixtures, gate
from sizenet.gate import ranking

vehicles, _ = canonical_table_fixtures()
probs = {
    "police_car": 0.30,
    "police_car_model": 0.60,
    "fire_truck": 0.08,
    "fire_truck_model": 0.01,
    "bullet_train": 0.005,
    "bullet_train_model": 0.005,
}
scores = ScoreVector("img", vehicles.labels, [probs[l] for l in vehicles.labels])

for rank, k in enumerate(ranking(scores.probs), start=1):
    label = vehicles.labels[k]
    ok = vehicles.range_of(label).covers(5.0)
    print(f"{rank}. {label:20s} p={scores.probs[k]:.3f}  {'accept' if ok else 'reject'}")

# %%
pred = gate(vehicles, 5.0, scores)
print(pred)

# %%
# No category covers 5 cm, so the gate falls back to the scorer's top label
# and says so.
print(gate(vehicles, 0.05, scores))
