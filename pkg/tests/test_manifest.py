import json
import random

import pytest

from imgaudit.errors import ManifestError
from imgaudit.manifest import dump_manifest, ingest_manifest, parse_entry


def entry(sample_id, attribute, scope, value, idx=None):
    doc = {"sample_id": sample_id, "attribute": attribute, "scope": scope,
           "value": value}
    if idx is not None:
        doc["individual_index"] = idx
    return json.dumps(doc)


def size(sample_id, dims=(640, 480)):
    return entry(sample_id, "image_size", "per_sample", list(dims))


def test_grouping_by_sample_and_individual(schema):
    lines = [
        size("a"),
        entry("a", "nsfw", "per_sample", 0.7),
        entry("a", "luminance", "per_sample", 55.0),
        entry("a", "child_probability", "per_individual", 0.9, idx=0),
    ]
    ds = ingest_manifest(lines, schema).dataset
    assert len(ds) == 1
    rec = ds.get("a")
    assert rec.signal_values["nsfw"] == 0.7
    assert len(rec.individuals) == 1
    assert rec.individuals[0].signal_values["child_probability"] == 0.9


def test_probability_out_of_range_names_sample_and_attribute(schema):
    lines = [size("a"), entry("a", "nsfw", "per_sample", 1.3)]
    with pytest.raises(ManifestError) as err:
        ingest_manifest(lines, schema)
    assert "'a'" in str(err.value) and "nsfw" in str(err.value)
    assert "line 2" in str(err.value)


def test_vector_length_mismatch(schema):
    lines = [size("a"),
             entry("a", "porn_probabilities", "per_sample", [0.25, 0.25, 0.25, 0.25])]
    with pytest.raises(ManifestError, match="length 4"):
        ingest_manifest(lines, schema)


def test_vector_must_sum_to_one(schema):
    lines = [size("a"),
             entry("a", "porn_probabilities", "per_sample", [0.5, 0.2, 0.1, 0.1, 0.2])]
    with pytest.raises(ManifestError, match="sums to"):
        ingest_manifest(lines, schema)


def test_duplicate_signal_rejected(schema):
    lines = [size("a"), entry("a", "nsfw", "per_sample", 0.5),
             entry("a", "nsfw", "per_sample", 0.6)]
    with pytest.raises(ManifestError, match="duplicate"):
        ingest_manifest(lines, schema)


def test_scope_mismatch_rejected(schema):
    lines = [size("a"), entry("a", "nsfw", "per_individual", 0.5, idx=0)]
    with pytest.raises(ManifestError, match="scope mismatch"):
        ingest_manifest(lines, schema)


def test_per_individual_requires_index(schema):
    lines = [size("a"), entry("a", "child_probability", "per_individual", 0.5)]
    with pytest.raises(ManifestError, match="individual_index"):
        ingest_manifest(lines, schema)


def test_unknown_attribute_rejected(schema):
    lines = [size("a"), entry("a", "mystery", "per_sample", 1.0)]
    with pytest.raises(ManifestError, match="not in schema"):
        ingest_manifest(lines, schema)


def test_derived_attribute_rejected_in_manifest(schema):
    lines = [size("a"), entry("a", "nsfw_class", "per_sample", "positive")]
    with pytest.raises(ManifestError, match="derived"):
        ingest_manifest(lines, schema)


def test_missing_image_size_names_sample(schema):
    lines = [entry("a", "nsfw", "per_sample", 0.5)]
    with pytest.raises(ManifestError, match="image_size"):
        ingest_manifest(lines, schema)


def test_face_box_out_of_bounds(schema):
    lines = [size("a", (100, 100)),
             entry("a", "face_box", "per_individual", [50, 50, 60, 60], idx=0)]
    with pytest.raises(ManifestError, match="bounds"):
        ingest_manifest(lines, schema)


def test_face_box_areas_computed(schema):
    lines = [size("a", (100, 100)),
             entry("a", "face_box", "per_individual", [10, 10, 50, 50], idx=0)]
    rec = ingest_manifest(lines, schema).dataset.get("a")
    ind = rec.individuals[0]
    assert ind.absolute_area == 2500.0
    assert ind.relative_area == 0.25
    assert 0.0 <= ind.relative_area <= 1.0


def test_categorical_label_validated(schema):
    lines = [size("a"), entry("a", "object_class", "per_individual", "dragon", idx=0)]
    with pytest.raises(ManifestError, match="declared classes"):
        ingest_manifest(lines, schema)


def test_bad_json_line_reported_with_number(schema):
    lines = [size("a"), "{not json"]
    with pytest.raises(ManifestError, match="line 2"):
        ingest_manifest(lines, schema)


def test_lenient_mode_skips_and_reports(schema):
    lines = [
        size("a"),
        entry("a", "nsfw", "per_sample", 1.3),      # bad: out of range
        entry("a", "nsfw", "per_sample", 0.4),
        "not json at all",
    ]
    result = ingest_manifest(lines, schema, strict=False)
    assert result.dataset.get("a").signal_values["nsfw"] == 0.4
    assert sorted(issue.line for issue in result.issues) == [2, 4]


def test_lenient_mode_drops_sample_without_size(schema):
    lines = [entry("a", "nsfw", "per_sample", 0.4), size("b"),
             entry("b", "nsfw", "per_sample", 0.2)]
    result = ingest_manifest(lines, schema, strict=False)
    assert [rec.sample_id for rec in result.dataset] == ["b"]
    assert any("image_size" in issue.message for issue in result.issues)


def _example_lines():
    lines = []
    for i in range(12):
        sid = f"img{i:02d}"
        lines.append(size(sid, (320, 240)))
        lines.append(entry(sid, "nsfw", "per_sample", round(i / 12, 3)))
        lines.append(entry(sid, "scene_class", "per_sample", f"scene{i % 3}"))
        for j in range(i % 3):
            lines.append(entry(sid, "face_box", "per_individual",
                               [4 * j, 0, 30, 40], idx=j))
            lines.append(entry(sid, "face_probability", "per_individual",
                               0.5 + 0.1 * j, idx=j))
            lines.append(entry(sid, "age_probabilities", "per_individual",
                               [0.0, 0.1, 0.6, 0.2, 0.1, 0.0, 0.0, 0.0], idx=j))
    return lines


def test_round_trip_identity(schema):
    ds = ingest_manifest(_example_lines(), schema).dataset
    again = ingest_manifest(list(dump_manifest(ds)), schema).dataset
    assert again == ds


def test_order_independence(schema):
    lines = _example_lines()
    ds = ingest_manifest(lines, schema).dataset
    rng = random.Random(7)
    for _ in range(3):
        shuffled = list(lines)
        rng.shuffle(shuffled)
        assert ingest_manifest(shuffled, schema).dataset == ds


def test_parse_entry_requires_core_fields():
    with pytest.raises(ManifestError, match="sample_id"):
        parse_entry(json.dumps({"attribute": "x", "scope": "per_sample", "value": 1}))
    with pytest.raises(ManifestError, match="value"):
        parse_entry(json.dumps({"sample_id": "a", "attribute": "x",
                                "scope": "per_sample"}))


def test_image_path_round_trip(schema):
    lines = [size("a"), entry("a", "image_path", "per_sample", "/data/a.jpg")]
    ds = ingest_manifest(lines, schema).dataset
    assert ds.get("a").image_path == "/data/a.jpg"
    again = ingest_manifest(list(dump_manifest(ds)), schema).dataset
    assert again == ds


def test_digest_stable_and_content_sensitive(schema):
    ds = ingest_manifest(_example_lines(), schema).dataset
    assert ds.digest() == ds.digest()
    other = ingest_manifest(_example_lines()[:-1], schema).dataset
    assert ds.digest() != other.digest()
