"""
Filename-encoded sizes and manifests
====================================

Annotated images carry their size in the file name, after the last
underscore. ``scan_directory`` turns a ``<root>/<label>/<image>`` tree into a
manifest.
"""

import tempfile
from pathlib import Path

from sizenet import canonical_table_fixtures, parse_distance_from_name, scan_directory, write_manifest

for name in ["police_car_042_6.5.jpg", "bed_2.8.JPG", "bt_12_45.0.jpg"]:
    print(name, "->", parse_distance_from_name(name))

# %%
# Build a throwaway tree with two classes and scan it.
vehicles, _ = canonical_table_fixtures()
with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    for label, names in {
        "police_car": ["pc_001_5.5.jpg", "pc_002_7.jpg"],
        "police_car_model": ["pcm_001_0.4.png"],
    }.items():
        (root / label).mkdir()
        for n in names:
            (root / label / n).touch()
    manifest = scan_directory(root, vehicles)

print(write_manifest(manifest))
