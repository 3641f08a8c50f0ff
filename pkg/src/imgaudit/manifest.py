"""Signal manifest ingestion and serialization.

A manifest is a line-delimited JSON file, one self-describing record per line:

    {"sample_id": "a.jpg", "attribute": "nsfw", "scope": "per_sample", "value": 0.91}
    {"sample_id": "a.jpg", "attribute": "age_probabilities", "scope": "per_individual",
     "individual_index": 0, "value": [0.0, 0.1, 0.6, 0.2, 0.1, 0.0, 0.0, 0.0]}
    {"sample_id": "a.jpg", "attribute": "image_size", "scope": "per_sample", "value": [640, 480]}
    {"sample_id": "a.jpg", "attribute": "face_box", "scope": "per_individual",
     "individual_index": 0, "value": [12, 30, 100, 120]}

External extractors run in separate processes and append entries
incrementally, so lines may arrive in any order and from several files; the
assembled dataset is canonical (samples sorted by id, individuals by index)
and therefore independent of line order. ``image_size`` is required for every
sample. ``individual_index`` is a per-sample namespace shared by all
per-individual signals: entries with the same index describe the same
detection, so extractors emitting unrelated detection sets should use
disjoint index ranges.

Duplicate entries for the same (sample, attribute[, index]) are rejected
rather than resolved: conflicting model outputs are an upstream bug an audit
must not paper over.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator

from .errors import ManifestError
from .records import Dataset, IndividualRecord, SampleRecord
from .schema import (
    RESERVED_INDIVIDUAL_ATTRS,
    RESERVED_SAMPLE_ATTRS,
    AttributeDescriptor,
    Schema,
)

VECTOR_SUM_TOL = 1e-6


@dataclass(frozen=True)
class SignalManifestEntry:
    sample_id: str
    attribute: str
    scope: str
    value: Any
    individual_index: int | None = None

    def to_json(self) -> str:
        doc: dict[str, Any] = {
            "sample_id": self.sample_id,
            "attribute": self.attribute,
            "scope": self.scope,
        }
        if self.individual_index is not None:
            doc["individual_index"] = self.individual_index
        doc["value"] = self.value
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class IngestIssue:
    """One skipped manifest line, with its position and reason."""

    line: int
    message: str
    source: str | None = None

    def __str__(self) -> str:
        where = f"{self.source}:" if self.source else ""
        return f"{where}line {self.line}: {self.message}"


@dataclass(frozen=True)
class IngestResult:
    dataset: Dataset
    issues: tuple[IngestIssue, ...]


def parse_entry(text: str) -> SignalManifestEntry:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"not valid JSON: {exc.msg}")
    if not isinstance(doc, dict):
        raise ManifestError("entry is not a JSON object")
    for key in ("sample_id", "attribute", "scope"):
        if key not in doc:
            raise ManifestError(f"entry missing {key!r}")
    if "value" not in doc:
        raise ManifestError("entry missing 'value'")
    idx = doc.get("individual_index")
    if idx is not None and (not isinstance(idx, int) or idx < 0):
        raise ManifestError(f"individual_index must be a non-negative integer, got {idx!r}")
    return SignalManifestEntry(
        sample_id=str(doc["sample_id"]),
        attribute=str(doc["attribute"]),
        scope=str(doc["scope"]),
        value=doc["value"],
        individual_index=idx,
    )


def _check_number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ManifestError(f"{what}: expected a number, got {value!r}")
    v = float(value)
    if math.isnan(v) or math.isinf(v):
        raise ManifestError(f"{what}: non-finite value")
    return v


def _validate_value(entry: SignalManifestEntry, desc: AttributeDescriptor) -> Any:
    where = f"sample {entry.sample_id!r}, attribute {entry.attribute!r}"
    kind = desc.kind
    value = entry.value
    if kind == "probability":
        v = _check_number(value, where)
        if not 0.0 <= v <= 1.0:
            raise ManifestError(f"{where}: probability {v} outside [0, 1]")
        return v
    if kind == "continuous":
        return _check_number(value, where)
    if kind == "categorical":
        if not isinstance(value, str):
            raise ManifestError(f"{where}: expected a class label, got {value!r}")
        if desc.classes is not None and value not in desc.classes:
            raise ManifestError(f"{where}: label {value!r} not among declared classes")
        return value
    if kind == "probability_vector":
        if not isinstance(value, (list, tuple)):
            raise ManifestError(f"{where}: expected a probability vector")
        if len(value) != desc.n_classes:
            raise ManifestError(
                f"{where}: vector length {len(value)} != n_classes {desc.n_classes}")
        vec = tuple(_check_number(v, where) for v in value)
        if any(not 0.0 <= v <= 1.0 for v in vec):
            raise ManifestError(f"{where}: vector entries outside [0, 1]")
        if abs(sum(vec) - 1.0) > VECTOR_SUM_TOL:
            raise ManifestError(f"{where}: vector sums to {sum(vec)}, not 1")
        return vec
    raise ManifestError(f"{where}: unhandled kind {kind!r}")


def _validate_reserved(entry: SignalManifestEntry) -> Any:
    where = f"sample {entry.sample_id!r}, attribute {entry.attribute!r}"
    value = entry.value
    if entry.attribute == "image_size":
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or not all(isinstance(v, int) and v > 0 for v in value)):
            raise ManifestError(f"{where}: image_size must be [width, height] of positive ints")
        return (value[0], value[1])
    if entry.attribute == "image_path":
        if not isinstance(value, str) or not value:
            raise ManifestError(f"{where}: image_path must be a non-empty string")
        return value
    if entry.attribute == "face_box":
        if (not isinstance(value, (list, tuple)) or len(value) != 4
                or not all(isinstance(v, int) for v in value)):
            raise ManifestError(f"{where}: face_box must be [x, y, w, h] ints")
        x, y, w, h = value
        if x < 0 or y < 0 or w <= 0 or h <= 0:
            raise ManifestError(f"{where}: degenerate or negative face_box {value!r}")
        return (x, y, w, h)
    raise ManifestError(f"{where}: unhandled reserved attribute")


class _Builder:
    """Accumulates validated entries, then assembles canonical records."""

    def __init__(self, schema: Schema, dataset_name: str):
        self.schema = schema
        self.dataset_name = dataset_name
        self.sample_values: dict[str, dict[str, Any]] = {}
        self.individual_values: dict[str, dict[int, dict[str, Any]]] = {}
        self.seen: set[tuple] = set()

    def add(self, entry: SignalManifestEntry) -> None:
        attr = entry.attribute
        reserved_sample = attr in RESERVED_SAMPLE_ATTRS
        reserved_individual = attr in RESERVED_INDIVIDUAL_ATTRS
        if reserved_sample or reserved_individual:
            scope = "per_sample" if reserved_sample else "per_individual"
            desc = None
        else:
            if attr not in self.schema:
                raise ManifestError(
                    f"sample {entry.sample_id!r}: attribute {attr!r} not in schema")
            desc = self.schema.get(attr)
            if desc.source == "derived":
                raise ManifestError(
                    f"sample {entry.sample_id!r}: attribute {attr!r} is derived and "
                    "cannot be supplied by a manifest")
            scope = desc.scope
        if entry.scope != scope:
            raise ManifestError(
                f"sample {entry.sample_id!r}, attribute {attr!r}: scope mismatch "
                f"(entry says {entry.scope!r}, schema says {scope!r})")
        if scope == "per_individual":
            if entry.individual_index is None:
                raise ManifestError(
                    f"sample {entry.sample_id!r}, attribute {attr!r}: "
                    "per_individual entry without individual_index")
            key = (entry.sample_id, attr, entry.individual_index)
        else:
            if entry.individual_index is not None:
                raise ManifestError(
                    f"sample {entry.sample_id!r}, attribute {attr!r}: "
                    "per_sample entry carries an individual_index")
            key = (entry.sample_id, attr)
        if key in self.seen:
            raise ManifestError(
                f"duplicate signal for sample {entry.sample_id!r}, attribute {attr!r}"
                + (f", individual {entry.individual_index}" if scope == "per_individual" else ""))

        value = _validate_reserved(entry) if desc is None else _validate_value(entry, desc)
        self.seen.add(key)
        if scope == "per_sample":
            self.sample_values.setdefault(entry.sample_id, {})[attr] = value
        else:
            per_sample = self.individual_values.setdefault(entry.sample_id, {})
            per_sample.setdefault(entry.individual_index, {})[attr] = value

    def build(self) -> Dataset:
        sample_ids = sorted(set(self.sample_values) | set(self.individual_values))
        samples = []
        for sid in sample_ids:
            values = dict(self.sample_values.get(sid, {}))
            dims = values.pop("image_size", None)
            path = values.pop("image_path", None)
            if dims is None:
                raise ManifestError(f"sample {sid!r} has no image_size entry")
            width, height = dims
            individuals = []
            for idx in sorted(self.individual_values.get(sid, {})):
                sig = dict(self.individual_values[sid][idx])
                box = sig.pop("face_box", None)
                face_p = sig.pop("face_probability", None)
                abs_area = rel_area = None
                if box is not None:
                    x, y, w, h = box
                    if x + w > width or y + h > height:
                        raise ManifestError(
                            f"sample {sid!r}, individual {idx}: face_box {box} "
                            f"exceeds image bounds {width}x{height}")
                    abs_area = float(w * h)
                    rel_area = abs_area / float(width * height)
                individuals.append(IndividualRecord(
                    individual_index=idx,
                    face_box=box,
                    face_probability=face_p,
                    absolute_area=abs_area,
                    relative_area=rel_area,
                    signal_values=sig,
                ))
            samples.append(SampleRecord(
                sample_id=sid,
                image_dims=(width, height),
                signal_values=values,
                individuals=tuple(individuals),
                image_path=path,
            ))
        return Dataset(name=self.dataset_name, samples=tuple(samples))


def ingest_manifest(lines: Iterable[str], schema: Schema, *, strict: bool = True,
                    dataset_name: str | None = None,
                    source: str | None = None) -> IngestResult:
    """Assemble a dataset from manifest lines.

    With ``strict`` (the default) any malformed entry aborts ingestion: an
    audit pipeline must not silently drop data. With ``strict=False``, bad
    lines are skipped and reported in the result's issues, each with its line
    number.
    """
    builder = _Builder(schema, dataset_name or schema.dataset_name)
    issues: list[IngestIssue] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            builder.add(parse_entry(text))
        except ManifestError as exc:
            if strict:
                raise ManifestError(str(exc), line=lineno, source=source) from None
            issues.append(IngestIssue(line=lineno, message=str(exc), source=source))
    try:
        dataset = builder.build()
    except ManifestError:
        if strict:
            raise
        # Assembly problems (e.g. a sample missing image_size) cannot be
        # attributed to one line; drop the offending samples one by one.
        dataset = _build_lenient(builder, issues)
    return IngestResult(dataset=dataset, issues=tuple(issues))


def _build_lenient(builder: _Builder, issues: list[IngestIssue]) -> Dataset:
    while True:
        try:
            return builder.build()
        except ManifestError as exc:
            msg = str(exc)
            sid = msg.split("'")[1] if "'" in msg else None
            if sid is None:
                raise
            issues.append(IngestIssue(line=0, message=msg + " (sample dropped)"))
            builder.sample_values.pop(sid, None)
            builder.individual_values.pop(sid, None)


def ingest_files(paths: Iterable, schema: Schema, *, strict: bool = True,
                 dataset_name: str | None = None) -> IngestResult:
    """Ingest one dataset from several manifest files."""
    builder = _Builder(schema, dataset_name or schema.dataset_name)
    issues: list[IngestIssue] = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text:
                    continue
                try:
                    builder.add(parse_entry(text))
                except ManifestError as exc:
                    if strict:
                        raise ManifestError(str(exc), line=lineno, source=str(path)) from None
                    issues.append(IngestIssue(line=lineno, message=str(exc), source=str(path)))
    try:
        dataset = builder.build()
    except ManifestError:
        if strict:
            raise
        dataset = _build_lenient(builder, issues)
    return IngestResult(dataset=dataset, issues=tuple(issues))


def iter_entries(dataset: Dataset) -> Iterator[SignalManifestEntry]:
    """Canonical entry stream for a dataset (round-trips through ingestion)."""
    for rec in dataset:
        yield SignalManifestEntry(rec.sample_id, "image_size", "per_sample",
                                  list(rec.image_dims))
        if rec.image_path is not None:
            yield SignalManifestEntry(rec.sample_id, "image_path", "per_sample",
                                      rec.image_path)
        for attr in sorted(rec.signal_values):
            value = rec.signal_values[attr]
            if isinstance(value, tuple):
                value = list(value)
            yield SignalManifestEntry(rec.sample_id, attr, "per_sample", value)
        for ind in rec.individuals:
            if ind.face_box is not None:
                yield SignalManifestEntry(rec.sample_id, "face_box", "per_individual",
                                          list(ind.face_box), ind.individual_index)
            if ind.face_probability is not None:
                yield SignalManifestEntry(rec.sample_id, "face_probability", "per_individual",
                                          ind.face_probability, ind.individual_index)
            for attr in sorted(ind.signal_values):
                value = ind.signal_values[attr]
                if isinstance(value, tuple):
                    value = list(value)
                yield SignalManifestEntry(rec.sample_id, attr, "per_individual",
                                          value, ind.individual_index)


def dump_manifest(dataset: Dataset) -> Iterator[str]:
    for entry in iter_entries(dataset):
        yield entry.to_json()


def write_manifest(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in dump_manifest(dataset):
            fh.write(line + "\n")
