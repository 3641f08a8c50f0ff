"""Seeded synthetic dataset generator.

Used to validate the estimators end to end: known marginals, optional planted
joint distributions between attribute pairs, and per-individual signals, all
drawn deterministically from one seed. The generated records flow through the
same ingestion, derivation, and aggregation paths as real data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import SchemaError
from .records import Dataset, IndividualRecord, SampleRecord

MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class SynthAttribute:
    """One synthetic attribute: a categorical marginal or a numeric law."""

    name: str
    kind: str                    # categorical | probability | continuous | probability_vector
    scope: str = "per_sample"
    group: str = "labels"
    classes: tuple[str, ...] | None = None
    marginal: tuple[float, ...] | None = None
    law: str | None = None       # uniform | normal | beta
    params: tuple[float, ...] = ()
    alpha: tuple[float, ...] | None = None   # dirichlet parameters for vectors
    missing_rate: float = 0.0

    def __post_init__(self):
        if self.kind == "categorical":
            if not self.classes or self.marginal is None:
                raise SchemaError(f"{self.name}: categorical needs classes and marginal")
            if len(self.classes) != len(self.marginal):
                raise SchemaError(f"{self.name}: marginal length != class count")
            _check_marginal(self.name, self.marginal)
        elif self.kind == "probability_vector":
            if not self.alpha or len(self.alpha) < 2:
                raise SchemaError(f"{self.name}: probability_vector needs alpha (>= 2 entries)")
        elif self.kind in ("probability", "continuous"):
            if self.law not in (None, "uniform", "normal", "beta"):
                raise SchemaError(f"{self.name}: unknown law {self.law!r}")
        else:
            raise SchemaError(f"{self.name}: unknown kind {self.kind!r}")
        if not 0.0 <= self.missing_rate < 1.0:
            raise SchemaError(f"{self.name}: missing_rate outside [0, 1)")


def _check_marginal(name: str, marginal: Sequence[float]) -> None:
    if any(p < 0 for p in marginal):
        raise SchemaError(f"{name}: negative marginal probability")
    if abs(sum(marginal) - 1.0) > MARGINAL_TOL:
        raise SchemaError(f"{name}: marginal sums to {sum(marginal)}, not 1")


@dataclass(frozen=True)
class PlantedDependency:
    """A target joint distribution for one attribute pair (rows follow x)."""

    x: str
    y: str
    joint: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class SynthSpec:
    n_samples: int
    seed: int
    name: str = "synthetic"
    attributes: tuple[SynthAttribute, ...] = ()
    dependencies: tuple[PlantedDependency, ...] = ()
    individual_count_marginal: tuple[float, ...] | None = None
    individual_attributes: tuple[SynthAttribute, ...] = ()
    image_dims: tuple[int, int] = (640, 480)

    def __post_init__(self):
        if self.n_samples <= 0:
            raise SchemaError("n_samples must be positive")
        by_name = {a.name: a for a in self.attributes}
        if len(by_name) != len(self.attributes):
            raise SchemaError("duplicate synthetic attribute names")
        used: set[str] = set()
        for dep in self.dependencies:
            for name in (dep.x, dep.y):
                if name not in by_name:
                    raise SchemaError(f"dependency references unknown attribute {name!r}")
                if by_name[name].kind != "categorical" or by_name[name].scope != "per_sample":
                    raise SchemaError(
                        f"dependency attribute {name!r} must be per_sample categorical")
                if name in used:
                    raise SchemaError(f"attribute {name!r} appears in two dependencies")
                used.add(name)
            _validate_joint(dep, by_name[dep.x], by_name[dep.y])
        if self.individual_count_marginal is not None:
            _check_marginal("individual_count", self.individual_count_marginal)
        for attr in self.individual_attributes:
            if attr.scope != "per_individual":
                raise SchemaError(f"{attr.name}: individual attributes must be per_individual")


def _validate_joint(dep: PlantedDependency, ax: SynthAttribute, ay: SynthAttribute) -> None:
    joint = np.asarray(dep.joint, dtype=float)
    if joint.shape != (len(ax.classes), len(ay.classes)):  # type: ignore[arg-type]
        raise SchemaError(
            f"dependency {dep.x}/{dep.y}: joint shape {joint.shape} does not match "
            f"({len(ax.classes)}, {len(ay.classes)})")  # type: ignore[arg-type]
    if (joint < 0).any():
        raise SchemaError(f"dependency {dep.x}/{dep.y}: negative joint probability")
    if abs(joint.sum() - 1.0) > MARGINAL_TOL:
        raise SchemaError(f"dependency {dep.x}/{dep.y}: joint sums to {joint.sum()}, not 1")
    if np.abs(joint.sum(axis=1) - np.asarray(ax.marginal)).max() > 1e-4:
        raise SchemaError(f"dependency {dep.x}/{dep.y}: row sums disagree with "
                          f"{dep.x} marginal")
    if np.abs(joint.sum(axis=0) - np.asarray(ay.marginal)).max() > 1e-4:
        raise SchemaError(f"dependency {dep.x}/{dep.y}: column sums disagree with "
                          f"{dep.y} marginal")


def _sample_numeric(attr: SynthAttribute, rng: np.random.Generator, n: int) -> np.ndarray:
    law = attr.law or ("uniform" if attr.kind == "probability" else "normal")
    if law == "uniform":
        lo, hi = attr.params or ((0.0, 1.0) if attr.kind == "probability" else (0.0, 100.0))
        return rng.uniform(lo, hi, size=n)
    if law == "normal":
        mu, sigma = attr.params or (0.0, 1.0)
        values = rng.normal(mu, sigma, size=n)
        return np.clip(values, 0.0, 1.0) if attr.kind == "probability" else values
    a, b = attr.params or (2.0, 2.0)
    return rng.beta(a, b, size=n)


def _sample_attribute(attr: SynthAttribute, rng: np.random.Generator, n: int) -> list:
    if attr.kind == "categorical":
        idx = rng.choice(len(attr.classes), size=n, p=attr.marginal)  # type: ignore[arg-type]
        return [attr.classes[i] for i in idx]  # type: ignore[index]
    if attr.kind == "probability_vector":
        vecs = rng.dirichlet(attr.alpha, size=n)  # type: ignore[arg-type]
        return [tuple(float(v) for v in vec) for vec in vecs]
    return [float(v) for v in _sample_numeric(attr, rng, n)]


def generate_synthetic(spec: SynthSpec) -> Dataset:
    """Draw a dataset per the spec; the same seed always yields the same data."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    columns: dict[str, list] = {}

    for dep in spec.dependencies:
        ax = next(a for a in spec.attributes if a.name == dep.x)
        ay = next(a for a in spec.attributes if a.name == dep.y)
        joint = np.asarray(dep.joint, dtype=float)
        flat = joint.ravel() / joint.sum()
        cells = rng.choice(flat.size, size=n, p=flat)
        xi, yi = np.unravel_index(cells, joint.shape)
        columns[dep.x] = [ax.classes[i] for i in xi]          # type: ignore[index]
        columns[dep.y] = [ay.classes[i] for i in yi]          # type: ignore[index]

    for attr in spec.attributes:
        if attr.name in columns:
            continue
        columns[attr.name] = _sample_attribute(attr, rng, n)

    missing_masks = {
        attr.name: rng.random(n) < attr.missing_rate
        for attr in spec.attributes if attr.missing_rate > 0
    }

    individual_counts = np.zeros(n, dtype=int)
    if spec.individual_count_marginal is not None:
        individual_counts = rng.choice(len(spec.individual_count_marginal), size=n,
                                       p=spec.individual_count_marginal)
    total_individuals = int(individual_counts.sum())
    individual_columns: dict[str, list] = {}
    individual_missing: dict[str, np.ndarray] = {}
    for attr in spec.individual_attributes:
        individual_columns[attr.name] = _sample_attribute(attr, rng, total_individuals)
        if attr.missing_rate > 0:
            individual_missing[attr.name] = rng.random(total_individuals) < attr.missing_rate

    samples = []
    cursor = 0
    width = len(str(max(n - 1, 1)))
    for i in range(n):
        values: dict[str, Any] = {}
        for attr in spec.attributes:
            mask = missing_masks.get(attr.name)
            if mask is not None and mask[i]:
                continue
            values[attr.name] = columns[attr.name][i]
        individuals = []
        for j in range(individual_counts[i]):
            sig: dict[str, Any] = {}
            face_p = None
            for attr in spec.individual_attributes:
                mask = individual_missing.get(attr.name)
                if mask is not None and mask[cursor]:
                    continue
                value = individual_columns[attr.name][cursor]
                if attr.name == "face_probability":
                    face_p = value
                else:
                    sig[attr.name] = value
            individuals.append(IndividualRecord(
                individual_index=j, face_probability=face_p, signal_values=sig))
            cursor += 1
        samples.append(SampleRecord(
            sample_id=f"s{i:0{width}d}",
            image_dims=spec.image_dims,
            signal_values=values,
            individuals=tuple(individuals),
        ))
    return Dataset(name=spec.name, samples=tuple(samples))


def _parse_attribute(raw: Mapping[str, Any]) -> SynthAttribute:
    return SynthAttribute(
        name=raw["name"],
        kind=raw["kind"],
        scope=raw.get("scope", "per_sample"),
        group=raw.get("group", "labels"),
        classes=tuple(raw["classes"]) if "classes" in raw else None,
        marginal=tuple(raw["marginal"]) if "marginal" in raw else None,
        law=raw.get("law"),
        params=tuple(raw.get("params", ())),
        alpha=tuple(raw["alpha"]) if "alpha" in raw else None,
        missing_rate=float(raw.get("missing_rate", 0.0)),
    )


def parse_synth_spec(doc: Mapping[str, Any]) -> SynthSpec:
    individuals = doc.get("individuals") or {}
    return SynthSpec(
        n_samples=int(doc["n_samples"]),
        seed=int(doc.get("seed", 0)),
        name=str(doc.get("name", "synthetic")),
        attributes=tuple(_parse_attribute(a) for a in doc.get("attributes", ())),
        dependencies=tuple(
            PlantedDependency(d["x"], d["y"], tuple(tuple(row) for row in d["joint"]))
            for d in doc.get("dependencies", ())),
        individual_count_marginal=(tuple(individuals["count_marginal"])
                                   if "count_marginal" in individuals else None),
        individual_attributes=tuple(_parse_attribute(a)
                                    for a in individuals.get("attributes", ())),
        image_dims=tuple(doc.get("image_dims", (640, 480))),  # type: ignore[arg-type]
    )


def read_synth_spec(path) -> SynthSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_synth_spec(json.load(fh))


def synth_schema_config(spec: SynthSpec) -> dict:
    """Schema config declaring the generated attributes that are not built in."""
    from .schema import load_schema

    builtin = set(load_schema({}).names())
    entries = []
    for attr in spec.attributes + spec.individual_attributes:
        if attr.name in builtin or attr.name == "face_probability":
            continue
        entry: dict[str, Any] = {
            "name": attr.name, "group": attr.group, "scope": attr.scope,
            "source": "external",
        }
        if attr.kind == "categorical":
            entry["kind"] = "categorical"
            entry["classes"] = list(attr.classes or ())
        elif attr.kind == "probability_vector":
            entry["kind"] = "probability_vector"
            entry["n_classes"] = len(attr.alpha or ())
        else:
            entry["kind"] = attr.kind
        entries.append(entry)
    return {"dataset_name": spec.name, "attributes": entries}
