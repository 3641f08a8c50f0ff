import numpy as np
import pytest

from imgaudit.aggregate import npmi
from imgaudit.errors import SchemaError
from imgaudit.schema import load_schema
from imgaudit.synth import (
    PlantedDependency,
    SynthAttribute,
    SynthSpec,
    generate_synthetic,
    parse_synth_spec,
    synth_schema_config,
)


def binary(name, p):
    return SynthAttribute(name=name, kind="categorical",
                          classes=("no", "yes"), marginal=(1 - p, p))


def test_seed_repetition_identical():
    spec = SynthSpec(n_samples=500, seed=11, attributes=(binary("a", 0.4),))
    assert generate_synthetic(spec) == generate_synthetic(spec)


def test_different_seed_differs():
    base = dict(n_samples=500, attributes=(binary("a", 0.4),))
    ds1 = generate_synthetic(SynthSpec(seed=1, **base))
    ds2 = generate_synthetic(SynthSpec(seed=2, **base))
    assert ds1 != ds2


def test_independent_pair_joint_matches_product():
    spec = SynthSpec(
        n_samples=100_000, seed=5,
        attributes=(binary("a", 0.3), binary("b", 0.6)))
    ds = generate_synthetic(spec)
    joint = np.zeros((2, 2))
    for rec in ds:
        i = ("no", "yes").index(rec.signal_values["a"])
        j = ("no", "yes").index(rec.signal_values["b"])
        joint[i, j] += 1
    joint /= len(ds)
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    assert np.abs(joint - np.outer(pa, pb)).max() < 0.01


def test_planted_joint_reproduced_and_sign_recovered(schema):
    # lift the (yes, yes) cell well above independence:
    # P(a=yes) = 0.4, P(b=yes) = 0.45, product 0.18, planted 0.30
    joint = ((0.45, 0.15), (0.10, 0.30))
    spec = SynthSpec(
        n_samples=50_000, seed=9,
        attributes=(binary("a", 0.4), binary("b", 0.45)),
        dependencies=(PlantedDependency("a", "b", joint),))
    ds = generate_synthetic(spec)
    config = synth_schema_config(spec)
    full_schema = load_schema(config)
    matrix = npmi(ds, full_schema, "a", "b")
    iy = matrix.x_axis.labels.index("yes")
    jy = matrix.y_axis.labels.index("yes")
    assert matrix.values[iy, jy] > 0.05      # positive dependence planted
    assert matrix.values[0, jy] < 0.0        # complementary cell depressed


def test_joint_must_match_marginals():
    bad = ((0.7, 0.0), (0.0, 0.3))   # row sums (0.7, 0.3) != marginal (0.6, 0.4)
    with pytest.raises(SchemaError, match="marginal"):
        SynthSpec(n_samples=10, seed=1,
                  attributes=(binary("a", 0.4), binary("b", 0.3)),
                  dependencies=(PlantedDependency("a", "b", bad),))


def test_marginal_must_sum_to_one():
    with pytest.raises(SchemaError, match="sums to"):
        SynthAttribute(name="a", kind="categorical", classes=("x", "y"),
                       marginal=(0.5, 0.4))


def test_attribute_in_two_dependencies_rejected():
    joint = ((0.25, 0.25), (0.25, 0.25))
    with pytest.raises(SchemaError, match="two dependencies"):
        SynthSpec(n_samples=10, seed=1,
                  attributes=(binary("a", 0.5), binary("b", 0.5), binary("c", 0.5)),
                  dependencies=(PlantedDependency("a", "b", joint),
                                PlantedDependency("a", "c", joint)))


def test_individuals_generated_with_counts():
    spec = SynthSpec(
        n_samples=2000, seed=3,
        individual_count_marginal=(0.5, 0.3, 0.2),
        individual_attributes=(
            SynthAttribute(name="child_probability", kind="probability",
                           scope="per_individual", law="beta", params=(2, 2)),))
    ds = generate_synthetic(spec)
    counts = [len(rec.individuals) for rec in ds]
    assert max(counts) <= 2
    share_zero = counts.count(0) / len(counts)
    assert abs(share_zero - 0.5) < 0.05
    carriers = [ind for rec in ds for ind in rec.individuals]
    assert all(0 <= ind.signal_values["child_probability"] <= 1 for ind in carriers)


def test_missing_rate_produces_absent_values():
    spec = SynthSpec(
        n_samples=5000, seed=7,
        attributes=(SynthAttribute(name="lum", kind="continuous",
                                   law="uniform", params=(0, 100),
                                   missing_rate=0.25),))
    ds = generate_synthetic(spec)
    missing = sum(1 for rec in ds if "lum" not in rec.signal_values)
    assert abs(missing / len(ds) - 0.25) < 0.03


def test_vector_attributes_sum_to_one():
    spec = SynthSpec(
        n_samples=50, seed=13,
        attributes=(SynthAttribute(name="age_probabilities",
                                   kind="probability_vector",
                                   alpha=(1,) * 8),))
    ds = generate_synthetic(spec)
    for rec in ds:
        vec = rec.signal_values["age_probabilities"]
        assert len(vec) == 8
        assert abs(sum(vec) - 1.0) < 1e-6


def test_parse_round_trip():
    doc = {
        "n_samples": 20, "seed": 4, "name": "toy",
        "attributes": [
            {"name": "a", "kind": "categorical", "classes": ["x", "y"],
             "marginal": [0.5, 0.5]},
            {"name": "nsfw", "kind": "probability", "group": "pornography",
             "law": "beta", "params": [2, 5]},
        ],
        "individuals": {
            "count_marginal": [0.4, 0.6],
            "attributes": [
                {"name": "ita", "kind": "continuous", "scope": "per_individual",
                 "law": "normal", "params": [40, 15]}],
        },
    }
    spec = parse_synth_spec(doc)
    ds = generate_synthetic(spec)
    assert len(ds) == 20
    config = synth_schema_config(spec)
    names = [a["name"] for a in config["attributes"]]
    assert "a" in names          # label attribute declared
    assert "nsfw" not in names   # built-in, not redeclared
    assert "ita" not in names    # built-in, not redeclared


def test_generated_dataset_ingestable_round_trip(schema):
    from imgaudit.manifest import dump_manifest, ingest_manifest

    spec = SynthSpec(
        n_samples=40, seed=21,
        attributes=(
            binary("label_ok", 0.5),
            SynthAttribute(name="nsfw", kind="probability", group="pornography"),
        ),
        individual_count_marginal=(0.3, 0.4, 0.3),
        individual_attributes=(
            SynthAttribute(name="face_probability", kind="probability",
                           scope="per_individual"),
            SynthAttribute(name="ita", kind="continuous", scope="per_individual",
                           law="normal", params=(40, 12)),
        ))
    ds = generate_synthetic(spec)
    full_schema = load_schema(synth_schema_config(spec))
    again = ingest_manifest(list(dump_manifest(ds)), full_schema).dataset
    assert again == ds
