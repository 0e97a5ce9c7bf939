import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from sizenet import (
    CategoryEntry,
    LabelSet,
    SizeRange,
    dump_label_set,
    filter_by_size,
    parse_label_set,
)
from sizenet.errors import LabelSetError

TABLE1 = {
    "police_car": (4, 8),
    "police_car_model": (0.1, 1),
    "fire_truck": (5, 12),
    "fire_truck_model": (0.2, 1),
    "bullet_train": (30, 90),
    "bullet_train_model": (0.3, 2),
    "pedestrian": (1, 3.1),
    "car": (5, 8),
    "crosswalk": (10, 20),
    "pillow": (0.2, 3),
    "bed": (1.5, 3.5),
}


def _doc(cats, name="t"):
    return json.dumps(
        {"name": name, "unit": "meters", "categories": [{"label": l, "min_m": a, "max_m": b} for l, a, b in cats]}
    )


def test_fixture_ranges(rsize1, rsize2):
    assert len(rsize1) == 6
    assert len(rsize2) == 5
    for ls in (rsize1, rsize2):
        for c in ls.categories:
            assert (c.range.min_m, c.range.max_m) == TABLE1[c.label]
    assert rsize1.range_of("police_car") == SizeRange(4, 8)
    assert rsize1.range_of("bullet_train") == SizeRange(30, 90)
    assert rsize2.range_of("crosswalk") == SizeRange(10, 20)


def test_round_trip(rsize1):
    text = dump_label_set(rsize1)
    again = parse_label_set(text)
    assert again == rsize1
    assert dump_label_set(again) == text


def test_labels_canonicalized():
    ls = parse_label_set(_doc([("Police Car", 4, 8), ("fire-truck", 5, 12)]))
    assert ls.labels == ("police_car", "fire_truck")


@pytest.mark.parametrize(
    "cats, match",
    [
        ([("a", 1, 2)], "fewer than 2 categories"),
        ([("a", 1, 2), ("bad", 5, 4)], "'bad' \\(position 1\\).*exceeds"),
        ([("a", 1, 2), ("a", 3, 4)], "duplicate label 'a'"),
        ([("a", 0, 2), ("b", 3, 4)], "'a' \\(position 0\\).*positive"),
        ([("a", -1, 2), ("b", 3, 4)], "positive"),
        ([("a", 1, "x"), ("b", 3, 4)], "must be numbers"),
        ([("a!", 1, 2), ("b", 3, 4)], "must match"),
    ],
)
def test_parse_errors(cats, match):
    with pytest.raises(LabelSetError, match=match):
        parse_label_set(_doc(cats))


@pytest.mark.parametrize("text", ["{", "[]", '{"name": "x", "unit": "meters"}', '{"name":"x","unit":"feet","categories":[]}'])
def test_malformed_documents(text):
    with pytest.raises(LabelSetError):
        parse_label_set(text)


def test_non_finite_bound():
    with pytest.raises(LabelSetError, match="finite"):
        SizeRange(1.0, math.inf)


@pytest.mark.parametrize(
    "which, size, expected",
    [
        (1, 5.0, ("police_car", "fire_truck")),
        (1, 0.05, ()),
        (2, 2.0, ("pedestrian", "pillow", "bed")),
        (1, 4.0, ("police_car",)),
        (1, 1.0, ("police_car_model", "fire_truck_model", "bullet_train_model")),
    ],
)
def test_filter_examples(rsize1, rsize2, which, size, expected):
    ls = rsize1 if which == 1 else rsize2
    assert filter_by_size(ls, size) == expected


@pytest.mark.parametrize("size", [0.0, -1.0, math.nan, math.inf])
def test_filter_rejects_bad_size(rsize1, size):
    with pytest.raises(LabelSetError):
        filter_by_size(rsize1, size)


@st.composite
def label_sets(draw, min_size=2, max_size=8):
    n = draw(st.integers(min_size, max_size))
    cats = []
    for i in range(n):
        lo = draw(st.floats(0.01, 100, allow_nan=False))
        width = draw(st.floats(0, 100, allow_nan=False))
        cats.append(CategoryEntry(f"c{i}", SizeRange(lo, lo + width)))
    return LabelSet("random", tuple(cats))


@settings(max_examples=300)
@given(ls=label_sets(), size=st.floats(0.001, 250, allow_nan=False))
def test_filter_is_exact_membership(ls, size):
    got = filter_by_size(ls, size)
    for c in ls.categories:
        assert (c.label in got) == (c.range.min_m <= size <= c.range.max_m)
    positions = [ls.index(l) for l in got]
    assert positions == sorted(positions)


@settings(max_examples=200)
@given(ls=label_sets(), pad=st.lists(st.floats(0, 5), min_size=16, max_size=16), size=st.floats(0.001, 250))
def test_filter_monotone_under_widening(ls, pad, size):
    wide = LabelSet(
        "wide",
        tuple(
            CategoryEntry(c.label, SizeRange(max(c.range.min_m - pad[i], 1e-3), c.range.max_m + pad[-1 - i]))
            for i, c in enumerate(ls.categories)
        ),
    )
    assert all(w.range.contains_range(c.range) for w, c in zip(wide.categories, ls.categories))
    assert set(filter_by_size(ls, size)) <= set(filter_by_size(wide, size))
