"""Derivation rules and the attribute resolver.

Derived attributes (thresholded classes, argmax classes, macro classes,
instance counts, per-sample standard deviations) are computed on demand from
their source signals rather than materialized at ingest, so a query-time
threshold override re-derives every class attribute that depends on the
overridden probability — class counts follow the slider.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import DerivationError, QueryError
from .records import Dataset, SampleRecord
from .schema import AttributeDescriptor, MacroMapping, Schema

# Fallback classification threshold for binary signals that have no
# configured value; NSFW-style pornography classes carry their own 0.3
# default on the built-in rule.
DEFAULT_THRESHOLD = 0.5

_COMPONENT_RE = re.compile(r"^(\w+)\[(\d+)\]$")


def classify_binary(p: float, t: float) -> str:
    """Threshold a probability: positive iff p >= t.

    The boundary counts as positive so that t = 0 means "everything positive"
    and raising t can only shrink the positive class.
    """
    if not 0.0 <= p <= 1.0:
        raise DerivationError(f"probability {p} outside [0, 1]")
    if not 0.0 <= t <= 1.0:
        raise DerivationError(f"threshold {t} outside [0, 1]")
    return "positive" if p >= t else "negative"


def classify_argmax(vector: Sequence[float]) -> tuple[int, bool]:
    """Index of the maximum entry; ties break to the lowest index.

    Returns (index, tied). Scaling the vector by any positive constant does
    not change the result, so callers need not renormalize.
    """
    if len(vector) == 0:
        raise DerivationError("argmax of an empty vector")
    best = 0
    for i in range(1, len(vector)):
        if vector[i] > vector[best]:
            best = i
    tied = any(vector[i] == vector[best] for i in range(len(vector)) if i != best)
    return best, tied


def per_sample_std(values: Sequence[float]) -> float:
    """Population standard deviation; a single value yields 0."""
    if len(values) == 0:
        raise DerivationError("standard deviation of zero values")
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def relative_area(box: Sequence[int], image_dims: Sequence[int]) -> float:
    """Fraction of the image covered by a (x, y, w, h) box."""
    x, y, w, h = box
    width, height = image_dims
    if w <= 0 or h <= 0:
        raise DerivationError(f"degenerate box {tuple(box)}")
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise DerivationError(f"box {tuple(box)} outside image {width}x{height}")
    return (w * h) / float(width * height)


def map_macro(label: str, mapping: MacroMapping) -> str:
    try:
        return mapping.mapping[label]
    except KeyError:
        raise DerivationError(
            f"label {label!r} has no macro class in mapping {mapping.name!r}") from None


def resolve_threshold(rule, schema: Schema,
                      overrides: Mapping[str, float] | None = None) -> float:
    """Threshold for a class derived from ``rule.source``: query override,
    then schema config, then the rule's own default, then 0.5."""
    for candidate in (
        None if overrides is None else overrides.get(rule.source),
        schema.thresholds.get(rule.source),
        rule.threshold,
    ):
        if candidate is not None:
            t = float(candidate)
            if not 0.0 <= t <= 1.0:
                raise DerivationError(f"threshold {t} for {rule.source!r} outside [0, 1]")
            return t
    return DEFAULT_THRESHOLD


@dataclass(frozen=True)
class Resolved:
    """All values of one attribute across a dataset.

    ``values`` maps sample_id -> value for per_sample scope and
    (sample_id, individual_index) -> value for per_individual scope. Units
    without a value are simply absent. ``tie_count`` reports how many argmax
    classifications were ambiguous, for provenance in aggregate views.
    """

    name: str
    scope: str
    kind: str
    classes: tuple[str, ...] | None
    values: Mapping[Any, Any]
    tie_count: int = 0

    def sample_value_lists(self, dataset: Dataset) -> dict[str, list]:
        """Group values by sample (one-element lists for per_sample scope)."""
        out: dict[str, list] = {}
        if self.scope == "per_sample":
            for sid, v in self.values.items():
                out[sid] = [v]
        else:
            for (sid, _idx), v in self.values.items():
                out.setdefault(sid, []).append(v)
        return out


def _stored_values(dataset: Dataset, desc: AttributeDescriptor) -> dict:
    values: dict[Any, Any] = {}
    if desc.scope == "per_sample":
        for rec in dataset:
            v = rec.signal_values.get(desc.name)
            if v is not None:
                values[rec.sample_id] = v
        return values
    for rec in dataset:
        for ind in rec.individuals:
            if desc.name == "face_probability":
                v = ind.face_probability
            elif desc.name == "face_absolute_area":
                v = ind.absolute_area
            elif desc.name == "face_relative_area":
                v = ind.relative_area
            else:
                v = ind.signal_values.get(desc.name)
            if v is not None:
                values[(rec.sample_id, ind.individual_index)] = v
    return values


def numeric_value(value: Any, kind: str, classes: tuple[str, ...] | None,
                  name: str) -> float:
    """Numeric view of a value, using the class index for categoricals."""
    if kind in ("continuous", "probability"):
        return float(value)
    if kind == "categorical":
        if classes is None:
            raise DerivationError(
                f"{name}: cannot take numeric view of an open categorical attribute")
        return float(classes.index(value))
    raise DerivationError(f"{name}: kind {kind!r} has no numeric view")


def resolve_values(dataset: Dataset, schema: Schema, name: str,
                   thresholds: Mapping[str, float] | None = None) -> Resolved:
    """Resolve an attribute (following derivation chains) over a dataset.

    ``name`` may use the component form ``vector_attr[i]`` to address one
    entry of a probability-vector attribute as a plain probability.
    """
    return _resolve(dataset, schema, name, thresholds, {})


def _resolve(dataset: Dataset, schema: Schema, name: str,
             thresholds: Mapping[str, float] | None, memo: dict) -> Resolved:
    if name in memo:
        return memo[name]
    component = _COMPONENT_RE.match(name)
    if component:
        resolved = _resolve_component(dataset, schema, component, thresholds, memo)
    else:
        desc = schema.get(name)
        if desc.source in ("native", "external"):
            resolved = Resolved(name, desc.scope, desc.kind, desc.classes,
                                _stored_values(dataset, desc))
        else:
            resolved = _apply_rule(dataset, schema, desc, thresholds, memo)
    memo[name] = resolved
    return resolved


def _resolve_component(dataset: Dataset, schema: Schema, match,
                       thresholds, memo) -> Resolved:
    base_name, index = match.group(1), int(match.group(2))
    base = _resolve(dataset, schema, base_name, thresholds, memo)
    if base.kind != "probability_vector":
        raise QueryError(f"{base_name!r} is not a probability vector; "
                         f"component access needs one")
    n = schema.get(base_name).n_classes or 0
    if index >= n:
        raise QueryError(f"component index {index} out of range for {base_name!r} "
                         f"({n} classes)")
    values = {k: float(v[index]) for k, v in base.values.items()}
    return Resolved(f"{base_name}[{index}]", base.scope, "probability", None, values)


def _apply_rule(dataset: Dataset, schema: Schema, desc: AttributeDescriptor,
                thresholds, memo) -> Resolved:
    rule = desc.rule
    assert rule is not None
    source = _resolve(dataset, schema, rule.source, thresholds, memo)

    if rule.rule_id == "threshold_class":
        t = resolve_threshold(rule, schema, thresholds)
        values = {}
        for key, p in source.values.items():
            cls = classify_binary(float(p), t)
            values[key] = rule.positive if cls == "positive" else rule.negative
        return Resolved(desc.name, desc.scope, "categorical",
                        (rule.positive, rule.negative), values)

    if rule.rule_id == "argmax_class":
        classes = desc.classes
        if classes is None:
            raise DerivationError(f"{desc.name}: argmax_class needs declared classes")
        values = {}
        ties = 0
        for key, vec in source.values.items():
            idx, tied = classify_argmax(vec)
            if idx >= len(classes):
                raise DerivationError(
                    f"{desc.name}: argmax index {idx} exceeds {len(classes)} classes")
            values[key] = classes[idx]
            ties += int(tied)
        return Resolved(desc.name, desc.scope, "categorical", classes, values, tie_count=ties)

    if rule.rule_id == "macro_class":
        mapping = schema.mappings[rule.mapping]  # type: ignore[index]
        values = {key: map_macro(v, mapping) for key, v in source.values.items()}
        return Resolved(desc.name, desc.scope, "categorical",
                        mapping.macro_classes, values)

    if rule.rule_id == "instance_count":
        if source.scope != "per_individual":
            raise DerivationError(f"{desc.name}: instance_count needs a per_individual source")
        counts = {rec.sample_id: 0 for rec in dataset}
        for (sid, _idx), v in source.values.items():
            if rule.class_value is None or v == rule.class_value:
                counts[sid] += 1
        return Resolved(desc.name, "per_sample", "continuous", None,
                        {sid: float(c) for sid, c in counts.items()})

    if rule.rule_id == "per_sample_std":
        if source.scope != "per_individual":
            raise DerivationError(f"{desc.name}: per_sample_std needs a per_individual source")
        grouped: dict[str, list[float]] = {}
        for (sid, _idx), v in source.values.items():
            grouped.setdefault(sid, []).append(
                numeric_value(v, source.kind, source.classes, source.name))
        values = {sid: per_sample_std(vs) for sid, vs in grouped.items()}
        return Resolved(desc.name, "per_sample", "continuous", None, values)

    if rule.rule_id == "any_positive":
        if source.scope != "per_individual":
            raise DerivationError(f"{desc.name}: any_positive needs a per_individual source")
        t = resolve_threshold(rule, schema, thresholds)
        positive_ids = {sid for (sid, _idx), p in source.values.items() if float(p) >= t}
        values = {rec.sample_id: (rule.positive if rec.sample_id in positive_ids
                                  else rule.negative)
                  for rec in dataset}
        return Resolved(desc.name, "per_sample", "categorical",
                        (rule.positive, rule.negative), values)

    raise DerivationError(f"{desc.name}: unhandled rule {rule.rule_id!r}")


def count_instances(sample: SampleRecord, attribute: str, per_class: bool = False, *,
                    schema: Schema, thresholds: Mapping[str, float] | None = None):
    """Instance counts of a per-individual attribute within one sample.

    Returns the overall carrier count, or with ``per_class`` a dict of the
    overall count plus one count per class (n_c + 1 values).
    """
    tiny = Dataset(name="_one", samples=(sample,))
    resolved = resolve_values(tiny, schema, attribute, thresholds)
    if resolved.scope != "per_individual":
        raise DerivationError(f"{attribute!r} is not a per_individual attribute")
    values = list(resolved.values.values())
    if not per_class:
        return len(values)
    if resolved.kind != "categorical":
        raise DerivationError(f"per-class counts need a categorical attribute, "
                              f"got kind {resolved.kind!r}")
    classes = resolved.classes or tuple(sorted(set(values)))
    out: dict[str, int] = {"overall": len(values)}
    for cls in classes:
        out[cls] = sum(1 for v in values if v == cls)
    return out


_FILTER_OPS = ("eq", "ne", "lt", "le", "gt", "ge", "in")


@dataclass(frozen=True)
class Filter:
    """One conjunctive predicate on an attribute's value."""

    attribute: str
    op: str
    value: Any

    def __post_init__(self):
        if self.op not in _FILTER_OPS:
            raise QueryError(f"unknown filter op {self.op!r}")

    @staticmethod
    def from_dict(raw: Mapping[str, Any]) -> "Filter":
        missing = {"attribute", "op", "value"} - set(raw)
        if missing:
            raise QueryError(f"filter missing fields: {sorted(missing)}")
        return Filter(raw["attribute"], raw["op"], raw["value"])

    def matches(self, value: Any) -> bool:
        try:
            if self.op == "eq":
                return value == self.value
            if self.op == "ne":
                return value != self.value
            if self.op == "in":
                return value in self.value
            if self.op == "lt":
                return value < self.value
            if self.op == "le":
                return value <= self.value
            if self.op == "gt":
                return value > self.value
            return value >= self.value
        except TypeError:
            raise QueryError(
                f"filter on {self.attribute!r}: cannot compare {value!r} "
                f"with {self.value!r}") from None


def apply_filters(dataset: Dataset, schema: Schema,
                  filters: Sequence[Filter | Mapping[str, Any]],
                  thresholds: Mapping[str, float] | None = None) -> Dataset:
    """Subset of samples satisfying every filter (missing values fail).

    A filter on a per-individual attribute keeps the sample when any
    individual matches.
    """
    parsed = [f if isinstance(f, Filter) else Filter.from_dict(f) for f in filters]
    if not parsed:
        return dataset
    keep_ids: set[str] | None = None
    for f in parsed:
        resolved = resolve_values(dataset, schema, f.attribute, thresholds)
        if resolved.scope == "per_sample":
            ids = {sid for sid, v in resolved.values.items() if f.matches(v)}
        else:
            ids = {sid for (sid, _idx), v in resolved.values.items() if f.matches(v)}
        keep_ids = ids if keep_ids is None else keep_ids & ids
    return Dataset(name=dataset.name,
                   samples=tuple(r for r in dataset if r.sample_id in keep_ids))
