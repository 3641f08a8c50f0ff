"""Attribute schema: descriptors, derivation rules, and config loading.

A dataset configuration names every attribute the engine will see: its group,
scope (once per sample vs. once per detected individual), value kind, and how
it is produced (computed natively from pixels, supplied by an external model
manifest, or derived from another attribute through a rule). A built-in set
covering face/skin-tone/age/gender demographics, pornography scores, object
and scene context, quality, and file metadata is always registered; config
entries extend or override it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Mapping

from .errors import SchemaError

GROUPS = ("labels", "demographics", "pornography", "context", "quality", "metadata")
SCOPES = ("per_sample", "per_individual")
KINDS = ("categorical", "continuous", "probability", "probability_vector")
SOURCES = ("native", "external", "derived")

# Derivation rule identifiers understood by the derive module.
RULE_IDS = (
    "threshold_class",   # probability -> {positive, negative} class at threshold t
    "argmax_class",      # probability vector -> class of the maximum entry
    "macro_class",       # base class -> macro class through a mapping table
    "instance_count",    # per-individual attribute -> per-sample carrier count
    "per_sample_std",    # per-individual numeric -> per-sample population std
    "any_positive",      # per-individual probability -> per-sample class
)

AGE_CLASSES = ("0-2", "4-6", "8-13", "15-20", "25-32", "38-43", "48-53", "60+")
PORN_CLASSES = ("drawing", "hentai", "neutral", "porn", "sexy")

# Attributes carried structurally on records rather than in signal maps.
RESERVED_SAMPLE_ATTRS = ("image_size", "image_path")
RESERVED_INDIVIDUAL_ATTRS = ("face_box",)


@dataclass(frozen=True)
class DerivationRule:
    """How a derived attribute is computed from its source attribute."""

    rule_id: str
    source: str
    threshold: float | None = None      # default t for threshold_class / any_positive
    positive: str = "positive"
    negative: str = "negative"
    class_value: str | None = None      # instance_count: count only this class
    mapping: str | None = None          # macro_class: mapping table name

    def __post_init__(self):
        if self.rule_id not in RULE_IDS:
            raise SchemaError(f"unknown derivation rule {self.rule_id!r}")
        if self.rule_id == "macro_class" and not self.mapping:
            raise SchemaError(f"macro_class rule on {self.source!r} needs a mapping name")
        if self.threshold is not None and not 0.0 <= self.threshold <= 1.0:
            raise SchemaError(f"rule threshold {self.threshold} outside [0, 1]")


@dataclass(frozen=True)
class AttributeDescriptor:
    """Schema entry for one attribute.

    ``classes`` may be None for open categorical sets (for example scene
    labels) whose domain is collected from the data. ``n_classes`` is required
    for probability vectors and must be at least 2.
    """

    name: str
    group: str
    scope: str
    kind: str
    classes: tuple[str, ...] | None = None
    n_classes: int | None = None
    unit: str | None = None
    source: str = "external"
    rule: DerivationRule | None = None

    def __post_init__(self):
        if not self.name or not all(c.isalnum() or c == "_" for c in self.name):
            raise SchemaError(f"attribute name {self.name!r} is not an identifier")
        if self.group not in GROUPS:
            raise SchemaError(f"{self.name}: unknown group {self.group!r}")
        if self.scope not in SCOPES:
            raise SchemaError(f"{self.name}: unknown scope {self.scope!r}")
        if self.kind not in KINDS:
            raise SchemaError(f"{self.name}: unknown kind {self.kind!r}")
        if self.source not in SOURCES:
            raise SchemaError(f"{self.name}: unknown source {self.source!r}")
        if self.kind == "probability_vector":
            if self.n_classes is None or self.n_classes < 2:
                raise SchemaError(f"{self.name}: probability_vector needs n_classes >= 2")
        if self.kind == "categorical" and self.classes is not None:
            if len(set(self.classes)) != len(self.classes):
                raise SchemaError(f"{self.name}: duplicate class labels")
        if self.source == "derived" and self.rule is None:
            raise SchemaError(f"{self.name}: derived attribute without a rule")
        if self.source != "derived" and self.rule is not None:
            raise SchemaError(f"{self.name}: rule given but source is {self.source}")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "name": self.name,
            "group": self.group,
            "scope": self.scope,
            "kind": self.kind,
            "source": self.source,
        }
        if self.classes is not None:
            out["classes"] = list(self.classes)
        if self.n_classes is not None:
            out["n_classes"] = self.n_classes
        if self.unit is not None:
            out["unit"] = self.unit
        if self.rule is not None:
            out["rule"] = {k: v for k, v in {
                "rule_id": self.rule.rule_id,
                "source": self.rule.source,
                "threshold": self.rule.threshold,
                "class_value": self.rule.class_value,
                "mapping": self.rule.mapping,
            }.items() if v is not None}
        return out


@dataclass(frozen=True)
class MacroMapping:
    """Total mapping from base classes to macro classes (one hierarchy level)."""

    name: str
    mapping: Mapping[str, str]
    levels: int = 2

    def __post_init__(self):
        if not self.mapping:
            raise SchemaError(f"macro mapping {self.name!r} is empty")
        if self.levels < 2:
            raise SchemaError(f"macro mapping {self.name!r}: levels must be >= 2")

    @property
    def macro_classes(self) -> tuple[str, ...]:
        seen: list[str] = []
        for macro in self.mapping.values():
            if macro not in seen:
                seen.append(macro)
        return tuple(seen)

    @property
    def base_classes(self) -> tuple[str, ...]:
        return tuple(self.mapping.keys())


@dataclass(frozen=True)
class ThresholdConfig:
    """Per-attribute classification thresholds, keyed by the probability
    attribute a class is derived from."""

    values: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, t in self.values.items():
            if not isinstance(t, (int, float)) or not 0.0 <= float(t) <= 1.0:
                raise SchemaError(f"threshold for {name!r} must lie in [0, 1], got {t!r}")

    def get(self, source: str) -> float | None:
        v = self.values.get(source)
        return None if v is None else float(v)


def _load_packaged_mapping(filename: str, name: str) -> MacroMapping:
    raw = json.loads(resources.files("imgaudit.data").joinpath(filename).read_text())
    return MacroMapping(name=name, mapping=raw["mapping"], levels=int(raw.get("levels", 2)))


def object_macro_mapping() -> MacroMapping:
    """The 80-class object detector labels grouped into 12 macro classes."""
    return _load_packaged_mapping("object_macro.json", "object_macro")


def builtin_descriptors(mappings: Mapping[str, MacroMapping]) -> list[AttributeDescriptor]:
    """The always-available attribute set.

    Scene hierarchy levels are only registered when the config supplies the
    corresponding mapping tables; there is no universal scene taxonomy to ship.
    """
    object_classes = mappings["object_macro"].base_classes
    object_macros = mappings["object_macro"].macro_classes
    d: list[AttributeDescriptor] = [
        # demographics, per individual
        AttributeDescriptor("face_probability", "demographics", "per_individual", "probability"),
        AttributeDescriptor("face_absolute_area", "demographics", "per_individual",
                            "continuous", unit="px^2", source="native"),
        AttributeDescriptor("face_relative_area", "demographics", "per_individual",
                            "continuous", unit="fraction", source="native"),
        AttributeDescriptor("ita", "demographics", "per_individual",
                            "continuous", unit="degrees", source="native"),
        AttributeDescriptor("child_probability", "demographics", "per_individual", "probability"),
        AttributeDescriptor("child_class", "demographics", "per_individual", "categorical",
                            classes=("child", "adult"), source="derived",
                            rule=DerivationRule("threshold_class", "child_probability",
                                                positive="child", negative="adult")),
        AttributeDescriptor("age_probabilities", "demographics", "per_individual",
                            "probability_vector", n_classes=len(AGE_CLASSES)),
        AttributeDescriptor("age_class", "demographics", "per_individual", "categorical",
                            classes=AGE_CLASSES, source="derived",
                            rule=DerivationRule("argmax_class", "age_probabilities")),
        AttributeDescriptor("gender_probability", "demographics", "per_individual", "probability"),
        AttributeDescriptor("gender_class", "demographics", "per_individual", "categorical",
                            classes=("female", "male"), source="derived",
                            rule=DerivationRule("threshold_class", "gender_probability",
                                                positive="female", negative="male")),
        # demographics, per sample
        AttributeDescriptor("face_class", "demographics", "per_sample", "categorical",
                            classes=("positive", "negative"), source="derived",
                            rule=DerivationRule("any_positive", "face_probability")),
        AttributeDescriptor("face_count", "demographics", "per_sample", "continuous",
                            unit="count", source="derived",
                            rule=DerivationRule("instance_count", "face_probability")),
        AttributeDescriptor("ita_std", "demographics", "per_sample", "continuous",
                            unit="degrees", source="derived",
                            rule=DerivationRule("per_sample_std", "ita")),
        AttributeDescriptor("child_count", "demographics", "per_sample", "continuous",
                            unit="count", source="derived",
                            rule=DerivationRule("instance_count", "child_class",
                                                class_value="child")),
        AttributeDescriptor("child_std", "demographics", "per_sample", "continuous",
                            source="derived",
                            rule=DerivationRule("per_sample_std", "child_probability")),
        AttributeDescriptor("age_count", "demographics", "per_sample", "continuous",
                            unit="count", source="derived",
                            rule=DerivationRule("instance_count", "age_class")),
        AttributeDescriptor("age_std", "demographics", "per_sample", "continuous",
                            source="derived",
                            rule=DerivationRule("per_sample_std", "age_class")),
        AttributeDescriptor("gender_count", "demographics", "per_sample", "continuous",
                            unit="count", source="derived",
                            rule=DerivationRule("instance_count", "gender_class")),
        AttributeDescriptor("gender_std", "demographics", "per_sample", "continuous",
                            source="derived",
                            rule=DerivationRule("per_sample_std", "gender_probability")),
        # pornography
        AttributeDescriptor("nsfw", "pornography", "per_sample", "probability"),
        AttributeDescriptor("nsfw_class", "pornography", "per_sample", "categorical",
                            classes=("positive", "negative"), source="derived",
                            rule=DerivationRule("threshold_class", "nsfw", threshold=0.3)),
        AttributeDescriptor("porn_probabilities", "pornography", "per_sample",
                            "probability_vector", n_classes=len(PORN_CLASSES)),
        AttributeDescriptor("porn_class", "pornography", "per_sample", "categorical",
                            classes=PORN_CLASSES, source="derived",
                            rule=DerivationRule("argmax_class", "porn_probabilities")),
        # context
        AttributeDescriptor("object_class", "context", "per_individual", "categorical",
                            classes=object_classes),
        AttributeDescriptor("object_macro_class", "context", "per_individual", "categorical",
                            classes=object_macros, source="derived",
                            rule=DerivationRule("macro_class", "object_class",
                                                mapping="object_macro")),
        AttributeDescriptor("object_absolute_area", "context", "per_individual",
                            "continuous", unit="px^2"),
        AttributeDescriptor("object_relative_area", "context", "per_individual",
                            "continuous", unit="fraction"),
        AttributeDescriptor("object_count", "context", "per_sample", "continuous",
                            unit="count", source="derived",
                            rule=DerivationRule("instance_count", "object_class")),
        AttributeDescriptor("scene_class", "context", "per_sample", "categorical"),
        # quality
        AttributeDescriptor("luminance", "quality", "per_sample", "continuous",
                            unit="L", source="native"),
        AttributeDescriptor("brisque", "quality", "per_sample", "continuous", unit="score"),
        # metadata
        AttributeDescriptor("file_extension", "metadata", "per_sample", "categorical",
                            source="native"),
        AttributeDescriptor("colormode", "metadata", "per_sample", "categorical",
                            source="native"),
        AttributeDescriptor("aspect_ratio", "metadata", "per_sample", "continuous",
                            unit="ratio", source="native"),
        AttributeDescriptor("resolution", "metadata", "per_sample", "continuous",
                            unit="px", source="native"),
    ]
    for level in (2, 3):
        name = f"scene_level{level}"
        if name in mappings:
            d.append(AttributeDescriptor(
                name, "context", "per_sample", "categorical",
                classes=mappings[name].macro_classes, source="derived",
                rule=DerivationRule("macro_class", "scene_class", mapping=name)))
    return d


@dataclass(frozen=True)
class Schema:
    """Validated attribute schema plus thresholds and macro mapping tables."""

    descriptors: tuple[AttributeDescriptor, ...]
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    mappings: Mapping[str, MacroMapping] = field(default_factory=dict)
    dataset_name: str = "dataset"

    def __post_init__(self):
        by_name: dict[str, AttributeDescriptor] = {}
        for desc in self.descriptors:
            if desc.name in by_name:
                raise SchemaError(f"duplicate attribute name {desc.name!r}")
            if desc.name in RESERVED_SAMPLE_ATTRS + RESERVED_INDIVIDUAL_ATTRS:
                raise SchemaError(f"{desc.name!r} is a reserved structural attribute")
            by_name[desc.name] = desc
        object.__setattr__(self, "_by_name", by_name)
        for desc in self.descriptors:
            rule = desc.rule
            if rule is None:
                continue
            src = by_name.get(rule.source)
            if src is None:
                raise SchemaError(f"{desc.name}: derivation source {rule.source!r} not in schema")
            if rule.mapping is not None and rule.mapping not in self.mappings:
                raise SchemaError(f"{desc.name}: macro mapping {rule.mapping!r} not configured")
            if (rule.rule_id == "argmax_class" and desc.classes is not None
                    and src.n_classes is not None and len(desc.classes) != src.n_classes):
                raise SchemaError(
                    f"{desc.name}: {len(desc.classes)} classes declared but source "
                    f"{src.name!r} has {src.n_classes} vector entries")

    def __contains__(self, name: str) -> bool:
        return name in self._by_name  # type: ignore[attr-defined]

    def get(self, name: str) -> AttributeDescriptor:
        try:
            return self._by_name[name]  # type: ignore[attr-defined]
        except KeyError:
            raise SchemaError(f"unknown attribute {name!r}") from None

    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.descriptors)

    def digest_payload(self) -> str:
        return json.dumps([d.to_dict() for d in self.descriptors],
                          sort_keys=True, separators=(",", ":"))


def _parse_rule(raw: Mapping[str, Any], attr_name: str) -> DerivationRule:
    try:
        return DerivationRule(
            rule_id=raw["rule_id"],
            source=raw["source"],
            threshold=raw.get("threshold"),
            positive=raw.get("positive", "positive"),
            negative=raw.get("negative", "negative"),
            class_value=raw.get("class_value"),
            mapping=raw.get("mapping"),
        )
    except KeyError as exc:
        raise SchemaError(f"{attr_name}: rule missing field {exc}") from None


def _parse_descriptor(raw: Mapping[str, Any]) -> AttributeDescriptor:
    unknown = set(raw) - {"name", "group", "scope", "kind", "classes", "n_classes",
                          "unit", "source", "rule"}
    if unknown:
        raise SchemaError(f"attribute entry has unknown fields: {sorted(unknown)}")
    name = raw.get("name")
    if not name:
        raise SchemaError("attribute entry without a name")
    source = raw.get("source", "external")
    rule = _parse_rule(raw["rule"], name) if "rule" in raw else None
    classes = raw.get("classes")
    return AttributeDescriptor(
        name=name,
        group=raw.get("group", "labels"),
        scope=raw.get("scope", "per_sample"),
        kind=raw.get("kind", "categorical"),
        classes=tuple(classes) if classes is not None else None,
        n_classes=raw.get("n_classes"),
        unit=raw.get("unit"),
        source=source,
        rule=rule,
    )


def load_schema(config: Mapping[str, Any] | None = None) -> Schema:
    """Build the full schema from a configuration document.

    The built-in attribute set is always present; config attributes are added
    to it, and a config attribute with a built-in name replaces the built-in
    definition. Two config attributes sharing a name is an error.
    """
    config = config or {}
    unknown = set(config) - {"dataset_name", "attributes", "thresholds", "macro_mappings",
                             "_comment"}
    if unknown:
        raise SchemaError(f"config has unknown fields: {sorted(unknown)}")

    mappings: dict[str, MacroMapping] = {"object_macro": object_macro_mapping()}
    for name, raw in (config.get("macro_mappings") or {}).items():
        mappings[name] = MacroMapping(name=name, mapping=dict(raw["mapping"]),
                                      levels=int(raw.get("levels", 2)))

    declared: dict[str, AttributeDescriptor] = {}
    for raw in config.get("attributes") or []:
        desc = _parse_descriptor(raw)
        if desc.name in declared:
            raise SchemaError(f"duplicate attribute name {desc.name!r}")
        declared[desc.name] = desc

    descriptors = [declared.pop(d.name, d) for d in builtin_descriptors(mappings)]
    descriptors.extend(declared.values())

    thresholds = ThresholdConfig(dict(config.get("thresholds") or {}))
    return Schema(
        descriptors=tuple(descriptors),
        thresholds=thresholds,
        mappings=mappings,
        dataset_name=str(config.get("dataset_name", "dataset")),
    )


def read_config(path) -> Schema:
    """Load a schema from a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config {path}: {exc}") from None
    return load_schema(doc)


def iter_builtin_names(schema: Schema) -> Iterable[str]:
    builtin = {d.name for d in builtin_descriptors(schema.mappings)}
    return (n for n in schema.names() if n in builtin)
