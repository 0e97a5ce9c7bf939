import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sizenet import (
    CentroidModel,
    CentroidScorer,
    FeatureTable,
    FileScorer,
    LabelSet,
    Manifest,
    ManifestRow,
    ScoreTable,
    ScoreVector,
    centroid_score,
    read_scores,
    score_features,
    train_centroids,
    write_scores,
)
from sizenet.labels import CategoryEntry, SizeRange
from sizenet.errors import ScoreError

AB = LabelSet("ab", (CategoryEntry("a", SizeRange(1, 2)), CategoryEntry("b", SizeRange(3, 4))))


def _labelled(ids_labels, matrix):
    man = Manifest(tuple(ManifestRow(i, l, None) for i, l in ids_labels))
    return FeatureTable(tuple(i for i, _ in ids_labels), np.asarray(matrix, float)), man


def test_score_vector_validation():
    ScoreVector("x", ("a", "b"), [0.25, 0.75])
    with pytest.raises(ScoreError):
        ScoreVector("x", ("a", "b"), [0.5, 0.6])
    with pytest.raises(ScoreError):
        ScoreVector("x", ("a", "b"), [1.5, -0.5])
    with pytest.raises(ScoreError):
        ScoreVector("x", ("a", "b"), [1.0])


def test_train_centroid_mean():
    feats, man = _labelled([("p", "a"), ("q", "a"), ("r", "b")], [[0, 0], [2, 2], [5, -1]])
    m = train_centroids(feats, man, AB)
    np.testing.assert_array_equal(m.centroids, [[1, 1], [5, -1]])
    assert m.labels == ("a", "b") and m.tau == 1.0


def test_train_requires_every_class():
    feats, man = _labelled([("p", "a")], [[0, 0]])
    with pytest.raises(ScoreError, match="'b' has no training samples"):
        train_centroids(feats, man, AB)


def test_train_requires_labels_for_features():
    feats = FeatureTable(("p", "zz"), np.zeros((2, 2)))
    man = Manifest((ManifestRow("p", "a", None),))
    with pytest.raises(ScoreError, match="zz"):
        train_centroids(feats, man, AB)


def test_train_is_order_invariant():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(60, 5)) * 1e3
    ids = [f"s{i}" for i in range(60)]
    labs = ["a" if i % 3 else "b" for i in range(60)]
    perm = rng.permutation(60)
    f1, m1 = _labelled(list(zip(ids, labs)), x)
    f2, m2 = _labelled([(ids[i], labs[i]) for i in perm], x[perm])
    np.testing.assert_array_equal(train_centroids(f1, m1, AB).centroids, train_centroids(f2, m2, AB).centroids)


def _phi(z):
    return 0.5 * math.erfc(-z / math.sqrt(2))


def test_train_accuracy_on_separated_gaussians():
    # Oracle: with means 0 and 6*1 in d=2, sigma=1 and a midpoint boundary the
    # per-sample error is Phi(-3*sqrt(2)) ~ 1.1e-5, so >= 0.99 holds with margin.
    assert _phi(-3 * math.sqrt(2)) < 1e-4
    rng = np.random.default_rng(12345)
    x = np.concatenate([rng.normal(0, 1, (200, 2)), rng.normal(6, 1, (200, 2))])
    ids = [f"s{i}" for i in range(400)]
    labs = ["a"] * 200 + ["b"] * 200
    feats, man = _labelled(list(zip(ids, labs)), x)
    table = score_features(train_centroids(feats, man, AB), feats)
    pred = np.array(AB.labels)[table.probs.argmax(1)]
    assert (pred == np.array(labs)).mean() >= 0.99


def test_centroid_score_dominance_and_symmetry():
    m = CentroidModel(("a", "b", "c"), [[0, 0], [10, 0], [0, 10]], 1.0)
    sv = centroid_score(m, [0, 0])
    assert sv.probs[0] >= 0.999
    two = CentroidModel(("a", "b"), [[-1, 0], [1, 0]], 1.0)
    np.testing.assert_allclose(centroid_score(two, [0, 3]).probs, [0.5, 0.5], atol=1e-12)
    hot = CentroidModel(("a", "b"), [[-1, 0], [3, 0]], 1e9)
    np.testing.assert_allclose(centroid_score(hot, [0.3, 0]).probs, [0.5, 0.5], atol=1e-6)


def test_centroid_score_extreme_distances_do_not_overflow():
    m = CentroidModel(("a", "b"), [[0.0], [1e6]], 1e-3)
    sv = centroid_score(m, [1e6 - 1])
    assert np.isfinite(sv.probs).all() and sv.probs[1] == pytest.approx(1.0)


def test_centroid_score_dimension_mismatch():
    m = CentroidModel(("a", "b"), [[0, 0], [1, 1]])
    with pytest.raises(ScoreError, match="dimension"):
        centroid_score(m, [1, 2, 3])
    with pytest.raises(ScoreError, match="dimension"):
        score_features(m, FeatureTable(("x",), np.zeros((1, 3))))


@settings(max_examples=200)
@given(
    k=st.integers(2, 6),
    dim=st.integers(1, 5),
    seed=st.integers(0, 2**32 - 1),
    tau=st.floats(0.05, 50),
)
def test_centroid_score_equivariant_under_class_permutation(k, dim, seed, tau):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(k, dim)) * 3
    x = rng.normal(size=dim) * 3
    labels = tuple(f"c{i}" for i in range(k))
    perm = rng.permutation(k)
    p = centroid_score(CentroidModel(labels, c, tau), x).probs
    q = centroid_score(CentroidModel(tuple(labels[i] for i in perm), c[perm], tau), x).probs
    np.testing.assert_allclose(q, p[perm], rtol=0, atol=1e-12)
    assert abs(p.sum() - 1) <= 1e-6


def test_softmax_shift_invariance():
    from sizenet.scoring import _softmax_neg_sqdist

    rng = np.random.default_rng(0)
    for _ in range(100):
        d2 = rng.uniform(0, 40, size=6)
        shift = rng.uniform(-100, 100)
        np.testing.assert_allclose(
            _softmax_neg_sqdist(d2 + shift, 2.0), _softmax_neg_sqdist(d2, 2.0), rtol=0, atol=1e-12
        )


def test_batch_scores_match_single():
    m = CentroidModel(("a", "b", "c"), [[0, 0], [1, 2], [3, -1]], 0.7)
    feats = FeatureTable(("p", "q"), [[0.5, 0.5], [2, 2]])
    table = score_features(m, feats)
    scorer = CentroidScorer(m)
    for i, fid in enumerate(feats.image_ids):
        np.testing.assert_allclose(table.probs[i], scorer.score(fid, feats.matrix[i]).probs, atol=1e-15)


def test_model_json_round_trip():
    m = CentroidModel(("a", "b"), [[0.1, 0.2], [1 / 3, 2.5]], 0.5)
    again = CentroidModel.from_json(m.to_json())
    assert again.labels == m.labels and again.tau == 0.5
    np.testing.assert_array_equal(again.centroids, m.centroids)
    with pytest.raises(ScoreError, match="dim"):
        CentroidModel.from_json('{"labels":["a","b"],"tau":1.0,"dim":3,"centroids":[[0,0],[1,1]]}')


SCORES = "image_id,a,b\nx,0.25,0.75\ny,1,0\n"


def test_file_scorer_passthrough():
    table = read_scores(SCORES, AB)
    sv = FileScorer(table).score("x")
    assert sv.as_dict() == {"a": 0.25, "b": 0.75}
    with pytest.raises(ScoreError, match="'nope'"):
        FileScorer(table).score("nope")
    assert write_scores(table) == "image_id,a,b\nx,0.25,0.75\ny,1.0,0.0\n"


def test_read_scores_renormalizes_within_tolerance():
    t = read_scores("image_id,a,b\nx,0.5005,0.5\n", AB)
    assert abs(t.probs[0].sum() - 1) <= 1e-9


@pytest.mark.parametrize(
    "text, match",
    [
        ("image_id,a,b\nx,0.4,0.4\n", "sum"),
        ("image_id,b,a\nx,0.5,0.5\n", "column 1 is 'b', expected 'a'"),
        ("image_id,a\nx,1\n", "label columns"),
        ("image_id,a,b\nx,1.2,-0.2\n", "outside"),
        ("image_id,a,b\nx,0.5\n", "columns"),
        ("image_id,a,b\nx,0.5,0.5\nx,0.5,0.5\n", "duplicate"),
    ],
)
def test_read_scores_errors(text, match):
    with pytest.raises(ScoreError, match=match):
        read_scores(text, AB)


def test_score_table_from_vectors():
    t = ScoreTable.from_vectors([ScoreVector("x", ("a", "b"), [0.1, 0.9]), ScoreVector("y", ("a", "b"), [1, 0])])
    assert "y" in t and len(t) == 2
