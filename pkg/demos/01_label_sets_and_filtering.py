"""
Label sets and size filtering
=============================

Every category carries a closed range of real sizes (shooting distance, in
meters). Filtering keeps the categories whose range covers an object's size.
"""

from sizenet import canonical_table_fixtures, dump_label_set, filter_by_size

vehicles, scenes = canonical_table_fixtures()

for c in vehicles.categories:
    print(f"{c.label:20s} {c.range.min_m:6.1f} - {c.range.max_m:6.1f} m")

# %%
# A 5 m object could be a police car or a fire truck, never a model.
print(filter_by_size(vehicles, 5.0))

# %%
# Ranges may overlap: at 2 m a pedestrian, a pillow and a bed all fit.
print(filter_by_size(scenes, 2.0))

# %%
# Nothing in the vehicle set is as small as 5 cm.
print(filter_by_size(vehicles, 0.05))

# %%
# Label sets serialize to a small JSON document.
print(dump_label_set(scenes)[:200], "...")
