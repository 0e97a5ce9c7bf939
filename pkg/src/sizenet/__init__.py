"""Size-gated object recognition.

A feature scorer ranks labels by probability; the size gate then keeps only
labels whose real-size range covers the object's annotated size and returns
the best-ranked survivor.
"""

from .errors import SizeNetError
from .evaluate import (
    AccuracyReport,
    Comparison,
    ConfusionMatrix,
    accuracies,
    compare_report,
    confusion,
    evaluate_predictions,
    predicted_labels,
)
from .gate import GatedPrediction, gate, gate_batch, read_predictions, write_predictions
from .labels import (
    CategoryEntry,
    LabelSet,
    SizeRange,
    canonical_table_fixtures,
    dump_label_set,
    filter_by_size,
    load_label_set,
    parse_label_set,
)
from .rsize_io import (
    FeatureRecord,
    FeatureTable,
    Manifest,
    ManifestRow,
    parse_distance_from_name,
    read_features,
    read_manifest,
    scan_directory,
    write_features,
    write_manifest,
)
from .scoring import (
    CentroidModel,
    CentroidScorer,
    FileScorer,
    ScoreTable,
    ScoreVector,
    centroid_score,
    read_scores,
    score_features,
    train_centroids,
    write_scores,
)
from .synth import SynthConfig, generate, generate_interference, generate_pairs, write_dataset

__version__ = "0.1.0"
