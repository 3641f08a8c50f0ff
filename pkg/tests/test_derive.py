import math
import random

import numpy as np
import pytest

from conftest import make_dataset, make_sample
from imgaudit.derive import (
    apply_filters,
    classify_argmax,
    classify_binary,
    count_instances,
    map_macro,
    per_sample_std,
    relative_area,
    resolve_values,
)
from imgaudit.errors import DerivationError, QueryError
from imgaudit.schema import MacroMapping, object_macro_mapping


class TestClassifyBinary:
    def test_low_threshold_example(self):
        assert classify_binary(0.35, 0.3) == "positive"

    def test_boundary_is_positive(self):
        assert classify_binary(0.3, 0.3) == "positive"
        assert classify_binary(0.0, 0.0) == "positive"

    def test_below_threshold_negative(self):
        assert classify_binary(0.29, 0.3) == "negative"

    def test_out_of_range_rejected(self):
        with pytest.raises(DerivationError):
            classify_binary(1.2, 0.5)
        with pytest.raises(DerivationError):
            classify_binary(0.5, -0.1)

    def test_monotonic_in_threshold(self):
        rng = random.Random(11)
        for _ in range(20):
            probs = [rng.random() for _ in range(60)]
            previous = None
            for step in range(101):
                t = step / 100
                positives = sum(classify_binary(p, t) == "positive" for p in probs)
                if previous is not None:
                    assert positives <= previous
                previous = positives


class TestClassifyArgmax:
    def test_plain_maximum(self):
        assert classify_argmax((0.1, 0.7, 0.2)) == (1, False)

    def test_tie_breaks_low_with_flag(self):
        assert classify_argmax((0.5, 0.5)) == (0, True)

    def test_empty_vector_rejected(self):
        with pytest.raises(DerivationError):
            classify_argmax(())

    def test_matches_linear_scan_oracle(self):
        rng = random.Random(3)
        for _ in range(200):
            vec = [rng.random() for _ in range(rng.randint(1, 9))]
            # independent oracle: explicit scan
            best, best_v = 0, vec[0]
            for i, v in enumerate(vec):
                if v > best_v:
                    best, best_v = i, v
            assert classify_argmax(vec)[0] == best

    def test_invariant_under_positive_scaling(self):
        rng = random.Random(5)
        for _ in range(100):
            vec = [rng.random() for _ in range(5)]
            scale = rng.uniform(0.1, 50)
            assert classify_argmax(vec)[0] == classify_argmax([v * scale for v in vec])[0]


class TestPerSampleStd:
    def test_symmetric_pair(self):
        assert per_sample_std([8, 12]) == 2.0

    def test_single_value_is_zero(self):
        assert per_sample_std([42.0]) == 0.0

    def test_hand_computed_four_values(self):
        # oracle: mean 14, squared deviations 36 + 1 + 1 + 36 = 74, /4
        assert per_sample_std([8, 13, 15, 20]) == pytest.approx(math.sqrt(18.5), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(DerivationError):
            per_sample_std([])

    def test_translation_invariant_and_scales_linearly(self):
        rng = random.Random(9)
        for _ in range(50):
            values = [rng.uniform(-10, 10) for _ in range(rng.randint(2, 12))]
            base = per_sample_std(values)
            shift = rng.uniform(-100, 100)
            assert per_sample_std([v + shift for v in values]) == pytest.approx(base, abs=1e-9)
            scale = rng.uniform(0.1, 7)
            assert per_sample_std([v * scale for v in values]) == pytest.approx(
                base * scale, rel=1e-9)


class TestRelativeArea:
    def test_quarter(self):
        assert relative_area((0, 0, 50, 50), (100, 100)) == 0.25

    def test_full_image(self):
        assert relative_area((0, 0, 100, 100), (100, 100)) == 1.0

    def test_degenerate_rejected(self):
        with pytest.raises(DerivationError):
            relative_area((0, 0, 0, 10), (100, 100))

    def test_out_of_bounds_rejected(self):
        with pytest.raises(DerivationError):
            relative_area((60, 60, 50, 50), (100, 100))

    def test_matches_arithmetic_oracle(self):
        rng = random.Random(13)
        for _ in range(100):
            width, height = rng.randint(10, 500), rng.randint(10, 500)
            w = rng.randint(1, width)
            h = rng.randint(1, height)
            x = rng.randint(0, width - w)
            y = rng.randint(0, height - h)
            expected = (w * h) / (width * height)
            assert relative_area((x, y, w, h), (width, height)) == pytest.approx(
                expected, rel=1e-12)


class TestMapMacro:
    def test_teddy_bear_is_indoor(self):
        assert map_macro("teddy bear", object_macro_mapping()) == "indoor"

    def test_identity_mapping(self):
        mapping = MacroMapping("id", {"a": "a", "b": "b"})
        assert map_macro("a", mapping) == "a"

    def test_unmapped_label_named_in_error(self):
        with pytest.raises(DerivationError, match="unicorn"):
            map_macro("unicorn", MacroMapping("m", {"a": "b"}))


class TestCountInstances:
    def test_three_detected_persons(self, schema):
        sample = make_sample("a", individuals=[
            {"face_probability": 0.9}, {"face_probability": 0.8},
            {"face_probability": 0.7}])
        assert count_instances(sample, "face_probability", schema=schema) == 3

    def test_no_individuals_counts_zero(self, schema):
        sample = make_sample("a")
        counts = count_instances(sample, "child_class", per_class=True, schema=schema)
        assert counts == {"overall": 0, "child": 0, "adult": 0}

    def test_per_class_counts_sum_to_overall(self, schema):
        rng = random.Random(21)
        for _ in range(30):
            individuals = [{"child_probability": rng.random()}
                           for _ in range(rng.randint(0, 8))]
            sample = make_sample("a", individuals=individuals)
            counts = count_instances(sample, "child_class", per_class=True, schema=schema)
            assert counts["child"] + counts["adult"] == counts["overall"]
            # oracle: direct tally at the default threshold 0.5
            expected_child = sum(1 for ind in individuals
                                 if ind["child_probability"] >= 0.5)
            assert counts["child"] == expected_child

    def test_randomized_object_tallies(self, schema):
        rng = random.Random(22)
        labels = ["person", "chair", "teddy bear"]
        for _ in range(20):
            individuals = [{"object_class": rng.choice(labels)}
                           for _ in range(rng.randint(0, 10))]
            sample = make_sample("a", individuals=individuals)
            counts = count_instances(sample, "object_class", per_class=True,
                                     schema=schema)
            for label in labels:
                assert counts[label] == sum(
                    1 for ind in individuals if ind["object_class"] == label)

    def test_per_sample_attribute_rejected(self, schema):
        with pytest.raises(DerivationError):
            count_instances(make_sample("a"), "nsfw", schema=schema)


class TestResolveChains:
    def test_threshold_override_propagates_to_counts(self, schema):
        ds = make_dataset([make_sample("a", individuals=[
            {"child_probability": 0.4}, {"child_probability": 0.6},
            {"child_probability": 0.9}])])
        default = resolve_values(ds, schema, "child_count")
        assert default.values["a"] == 2.0
        lowered = resolve_values(ds, schema, "child_count", thresholds={"child_probability": 0.3})
        assert lowered.values["a"] == 3.0

    def test_nsfw_class_default_threshold_is_030(self, schema):
        ds = make_dataset([make_sample("a", {"nsfw": 0.35}),
                           make_sample("b", {"nsfw": 0.25})])
        resolved = resolve_values(ds, schema, "nsfw_class")
        assert resolved.values == {"a": "positive", "b": "negative"}

    def test_argmax_class_with_tie_counts(self, schema):
        vec_tied = (0.3, 0.3, 0.1, 0.1, 0.2)
        ds = make_dataset([make_sample("a", {"porn_probabilities": vec_tied})])
        resolved = resolve_values(ds, schema, "porn_class")
        assert resolved.values["a"] == "drawing"
        assert resolved.tie_count == 1

    def test_macro_chain(self, schema):
        ds = make_dataset([make_sample("a", individuals=[
            {"object_class": "teddy bear"}, {"object_class": "car"}])])
        resolved = resolve_values(ds, schema, "object_macro_class")
        assert resolved.values[("a", 0)] == "indoor"
        assert resolved.values[("a", 1)] == "vehicle"

    def test_ita_std_from_individuals(self, schema):
        ds = make_dataset([make_sample("a", individuals=[
            {"ita": 8.0}, {"ita": 12.0}])])
        resolved = resolve_values(ds, schema, "ita_std")
        assert resolved.values["a"] == 2.0

    def test_age_std_uses_class_indices(self, schema):
        vec_a = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]   # class index 0
        vec_b = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]   # class index 2
        ds = make_dataset([make_sample("a", individuals=[
            {"age_probabilities": vec_a}, {"age_probabilities": vec_b}])])
        resolved = resolve_values(ds, schema, "age_std")
        assert resolved.values["a"] == 1.0

    def test_face_class_any_positive(self, schema):
        ds = make_dataset([
            make_sample("a", individuals=[{"face_probability": 0.8}]),
            make_sample("b", individuals=[{"face_probability": 0.2}]),
            make_sample("c"),
        ])
        resolved = resolve_values(ds, schema, "face_class")
        assert resolved.values == {"a": "positive", "b": "negative", "c": "negative"}

    def test_vector_component_access(self, schema):
        vec = (0.1, 0.2, 0.3, 0.25, 0.15)
        ds = make_dataset([make_sample("a", {"porn_probabilities": vec})])
        resolved = resolve_values(ds, schema, "porn_probabilities[3]")
        assert resolved.kind == "probability"
        assert resolved.values["a"] == pytest.approx(0.25)

    def test_component_index_out_of_range(self, schema):
        ds = make_dataset([make_sample("a", {"porn_probabilities": (0.2,) * 5})])
        with pytest.raises(QueryError, match="out of range"):
            resolve_values(ds, schema, "porn_probabilities[9]")


class TestFilters:
    def test_conjunctive_filters(self, schema):
        ds = make_dataset([
            make_sample("a", {"nsfw": 0.9, "scene_class": "bedroom"}),
            make_sample("b", {"nsfw": 0.9, "scene_class": "beach"}),
            make_sample("c", {"nsfw": 0.1, "scene_class": "bedroom"}),
        ])
        kept = apply_filters(ds, schema, [
            {"attribute": "nsfw", "op": "ge", "value": 0.5},
            {"attribute": "scene_class", "op": "eq", "value": "bedroom"},
        ])
        assert [rec.sample_id for rec in kept] == ["a"]

    def test_missing_value_fails_filter(self, schema):
        ds = make_dataset([make_sample("a", {"nsfw": 0.9}), make_sample("b")])
        kept = apply_filters(ds, schema, [{"attribute": "nsfw", "op": "ge", "value": 0.0}])
        assert [rec.sample_id for rec in kept] == ["a"]

    def test_per_individual_filter_any_semantics(self, schema):
        ds = make_dataset([
            make_sample("a", individuals=[{"child_probability": 0.9},
                                          {"child_probability": 0.1}]),
            make_sample("b", individuals=[{"child_probability": 0.1}]),
        ])
        kept = apply_filters(ds, schema, [
            {"attribute": "child_class", "op": "eq", "value": "child"}])
        assert [rec.sample_id for rec in kept] == ["a"]

    def test_filter_on_derived_respects_thresholds(self, schema):
        ds = make_dataset([make_sample("a", {"nsfw": 0.4})])
        kept = apply_filters(ds, schema,
                             [{"attribute": "nsfw_class", "op": "eq", "value": "positive"}],
                             thresholds={"nsfw": 0.6})
        assert len(kept) == 0

    def test_unknown_op_rejected(self, schema):
        ds = make_dataset([make_sample("a")])
        with pytest.raises(QueryError, match="op"):
            apply_filters(ds, schema, [{"attribute": "nsfw", "op": "like", "value": 1}])

    def test_incomparable_types_reported(self, schema):
        ds = make_dataset([make_sample("a", {"scene_class": "bedroom"})])
        with pytest.raises(QueryError, match="compare"):
            apply_filters(ds, schema, [{"attribute": "scene_class", "op": "lt", "value": 3}])
