#!/usr/bin/env python3
"""Record wire fixtures for the explorer tests.

Builds two deterministic datasets, runs the real query service in-process,
and freezes selected responses into test/fixtures/*.json. Keys match the
normalized form the test FakeFetch computes: pathname + the JSON-encoded,
sorted [key, value] pairs of the query string. Re-run after changing the
service or the fixture dataset:

    python3 scripts/record_fixtures.py
"""

import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient
from PIL import Image

from imgaudit.records import Dataset, IndividualRecord, SampleRecord
from imgaudit.schema import load_schema
from imgaudit.service import create_app
from imgaudit.synth import (
    PlantedDependency,
    SynthAttribute,
    SynthSpec,
    generate_synthetic,
    synth_schema_config,
)

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "test" / "fixtures"


def fixture_key(path: str, params: dict) -> str:
    pairs = sorted([k, str(v)] for k, v in params.items())
    return path + json.dumps(pairs, separators=(",", ":"))


def record(client: TestClient, requests: list) -> dict:
    out = {}
    for path, params in requests:
        response = client.get(path, params=params)
        out[fixture_key(path, params)] = {
            "status": response.status_code,
            "body": response.json(),
        }
    return out


def main_dataset():
    scene_marginal = np.array([0.5, 0.3, 0.2])
    label_marginal = np.array([0.6, 0.4])
    joint = np.outer(scene_marginal, label_marginal)
    joint[0, 1] *= 2.0          # over-represent (bedroom, positive)
    joint /= joint.sum()
    spec = SynthSpec(
        n_samples=600, seed=4242, name="fixture-main",
        attributes=(
            SynthAttribute(name="scene_class", kind="categorical", group="context",
                           classes=("bedroom", "beach", "street"),
                           marginal=tuple(joint.sum(axis=1))),
            SynthAttribute(name="label_csam", kind="categorical",
                           classes=("negative", "positive"),
                           marginal=tuple(joint.sum(axis=0))),
            SynthAttribute(name="nsfw", kind="probability", group="pornography",
                           law="beta", params=(2, 3)),
            SynthAttribute(name="colormode", kind="categorical", group="metadata",
                           classes=("RGB", "grayscale", "sixteen_bit"),
                           marginal=(0.85, 0.145, 0.005)),
        ),
        dependencies=(PlantedDependency(
            "scene_class", "label_csam",
            tuple(tuple(row) for row in joint)),))
    dataset = generate_synthetic(spec)
    schema = load_schema(synth_schema_config(spec))

    rare = sum(1 for rec in dataset
               if rec.signal_values.get("colormode") == "sixteen_bit")
    assert 0 < rare < 5, f"rare colormode count {rare} will not exercise suppression"
    return dataset, schema


def trusted_dataset(image_dir: Path):
    image_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    # bimodal skin-tone values leave the middle bins empty
    ita_values = [10.0, 11.0, 12.0, 13.0, 80.0, 81.0, 82.0, 83.0]
    samples = []
    for i, ita in enumerate(ita_values):
        path = image_dir / f"fx{i}.png"
        arr = rng.integers(100, 220, size=(60, 60, 3), dtype=np.uint8)
        Image.fromarray(arr).save(path)
        ind = IndividualRecord(
            individual_index=0, face_box=(5, 5, 40, 40),
            absolute_area=1600.0, relative_area=1600.0 / 3600.0,
            signal_values={"ita": ita})
        samples.append(SampleRecord(
            sample_id=f"fx{i}", image_dims=(60, 60), signal_values={},
            individuals=(ind,), image_path=str(path)))
    return Dataset(name="fixture-trusted", samples=tuple(samples))


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)

    dataset, schema = main_dataset()
    client = TestClient(create_app(dataset, schema, k=5))
    main_requests = [
        ("/attributes", {}),
        ("/distribution", {"attribute": "nsfw_class"}),
        ("/distribution", {"attribute": "nsfw_class",
                           "thresholds": '{"nsfw":0.5}'}),
        ("/distribution", {"attribute": "nsfw_class",
                           "thresholds": '{"nsfw":0.8}'}),
        ("/distribution", {"attribute": "scene_class"}),
        ("/distribution", {"attribute": "scene_class", "facets": "label_csam"}),
        ("/distribution", {"attribute": "colormode"}),
        ("/distribution", {"attribute": "ghost"}),
        ("/cooccurrence", {"normalization": "raw", "x": "scene_class",
                           "y": "label_csam"}),
        ("/npmi", {"x": "scene_class", "y": "label_csam"}),
        ("/summary", {}),
        ("/boxplot", {"attribute": "nsfw"}),
        ("/patches", {"bin": "0"}),   # untrusted: must be 404
    ]
    (FIXTURES / "fixtures_main.json").write_text(
        json.dumps(record(client, main_requests), indent=2, sort_keys=True) + "\n")

    images = FIXTURES / "images"
    trusted = trusted_dataset(images)
    trusted_client = TestClient(create_app(trusted, load_schema({}), k=1,
                                           trusted_mode=True))
    trusted_requests = [
        ("/attributes", {}),
        ("/patches", {"bin": "0"}),
        ("/patches", {"bin": "5"}),   # empty middle bin
    ]
    (FIXTURES / "fixtures_trusted.json").write_text(
        json.dumps(record(trusted_client, trusted_requests),
                   indent=2, sort_keys=True) + "\n")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
