import numpy as np
import pytest

from conftest import make_dataset, make_sample
from imgaudit.aggregate import cooccurrence, distribution, npmi, nutrition_label
from imgaudit.errors import QueryError
from imgaudit.privacy import floor_summary_rows, privacy_floor


def small_cell_dataset():
    samples = []
    for i in range(20):
        samples.append(make_sample(f"a{i:02d}", {"scene_class": "common"}))
    for i in range(3):
        samples.append(make_sample(f"b{i:02d}", {"scene_class": "rare"}))
    return make_dataset(samples)


def test_small_cell_suppressed(schema):
    dist = distribution(small_cell_dataset(), schema, "scene_class")
    doc = privacy_floor(dist, 5)
    counts = dict(zip(doc["labels"], doc["cells"][0]["counts"]))
    assert counts["common"] == 20
    assert counts["rare"] is None
    assert doc["privacy"]["suppressed_cells"] >= 1


def test_zero_cells_reported_as_zero(schema):
    ds = make_dataset([make_sample(f"x{i}", {"scene_class": "only"})
                       for i in range(8)])
    dist = distribution(ds, schema, "colormode")
    doc = privacy_floor(dist, 5)
    # nothing carries colormode: population 8, missing 8, no counts hidden
    assert doc["cells"][0]["missing"] == 8


def test_k_one_disables_suppression(schema):
    dist = distribution(small_cell_dataset(), schema, "scene_class")
    doc = privacy_floor(dist, 1)
    assert None not in doc["cells"][0]["counts"]
    assert doc["privacy"]["suppressed_cells"] == 0


def test_invalid_k_rejected(schema):
    dist = distribution(small_cell_dataset(), schema, "scene_class")
    with pytest.raises(QueryError):
        privacy_floor(dist, 0)


def test_cooccurrence_masks_derived_cells(schema):
    samples = [make_sample(f"x{i:02d}", {"scene_class": "s0", "colormode": "m0"})
               for i in range(30)]
    samples += [make_sample(f"y{i:02d}", {"scene_class": "s1", "colormode": "m1"})
                for i in range(3)]
    ds = make_dataset(samples)
    matrix = cooccurrence(ds, schema, "scene_class", "colormode")
    doc = privacy_floor(matrix, 5)
    i = doc["x"]["labels"].index("s1")
    j = doc["y"]["labels"].index("m1")
    assert doc["counts"][i][j] is None
    assert doc["suppressed"][i][j] is True
    assert doc["ratio"][i][j] is None
    assert doc["normalized"][i][j] is None
    assert doc["significant"][i][j] is False


def test_npmi_suppression_and_no_joint_counts(schema):
    samples = [make_sample(f"x{i:02d}", {"scene_class": "s0", "colormode": "m0"})
               for i in range(30)]
    samples += [make_sample(f"y{i:02d}", {"scene_class": "s1", "colormode": "m1"})
                for i in range(3)]
    ds = make_dataset(samples)
    matrix = npmi(ds, schema, "scene_class", "colormode")
    doc = privacy_floor(matrix, 5)
    assert "joint_counts" not in doc
    i = doc["x"]["labels"].index("s1")
    j = doc["y"]["labels"].index("m1")
    assert doc["values"][i][j] is None
    assert doc["defined"][i][j] is False
    assert doc["suppressed"][i][j] is True


def test_summary_rows_floored(schema):
    ds = small_cell_dataset()
    rows = nutrition_label(ds, schema)
    doc = floor_summary_rows(rows, 5)
    by_attr = {row["attribute"]: row for row in doc["rows"]}
    scene = by_attr["scene_class"]
    top = {entry["label"]: entry["count"] for entry in scene["top_classes"]}
    assert top["common"] == 20
    assert top["rare"] is None


def test_distribution_missing_count_floored(schema):
    ds = make_dataset(
        [make_sample(f"x{i}", {"nsfw": 0.5}) for i in range(20)]
        + [make_sample(f"m{i}") for i in range(2)])
    doc = privacy_floor(distribution(ds, schema, "nsfw"), 5)
    assert doc["cells"][0]["missing"] is None


def test_no_small_counts_anywhere_after_floor(schema):
    rng = np.random.default_rng(71)
    for trial in range(25):
        n = int(rng.integers(6, 40))
        samples = [
            make_sample(f"x{i:03d}", {
                "scene_class": f"s{rng.integers(4)}",
                "nsfw": float(rng.random()),
            }) for i in range(n)]
        ds = make_dataset(samples)
        for agg in (distribution(ds, schema, "scene_class"),
                    distribution(ds, schema, "nsfw", facets=["scene_class"]),
                    cooccurrence(ds, schema, "scene_class", "nsfw_class")):
            doc = privacy_floor(agg, 5)
            _assert_no_small_counts(doc)


def _assert_no_small_counts(node, k=5):
    count_keys = {"counts", "missing", "population", "total", "carrier_count",
                  "count", "outlier_count"}
    if isinstance(node, dict):
        for key, value in node.items():
            if key in count_keys:
                _assert_counts_ok(value, k)
            elif key == "top_classes" and value:
                for entry in value:
                    _assert_counts_ok(entry["count"], k)
            else:
                _assert_no_small_counts(value, k)
    elif isinstance(node, list):
        for item in node:
            _assert_no_small_counts(item, k)


def _assert_counts_ok(value, k):
    if isinstance(value, list):
        for v in value:
            _assert_counts_ok(v, k)
    elif isinstance(value, int):
        assert not (0 < value < k), f"leaked small count {value}"
