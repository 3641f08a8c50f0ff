"""Report bundles: build, serialize, and validate.

A bundle is a tree of JSON documents (one aggregate per file) plus a manifest
recording the dataset identity and every generation parameter, so a reader
can reproduce it exactly. Serialization is canonical (sorted keys, fixed
indentation); regenerating with identical parameters yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import jsonschema

from .aggregate import cooccurrence, distribution, npmi, nutrition_label
from .errors import QueryError
from .privacy import DEFAULT_K, floor_summary_rows, privacy_floor
from .records import Dataset
from .schema import Schema

REPORT_VERSION = "1"


@dataclass(frozen=True)
class ReportParams:
    """Everything that shapes a bundle, echoed into its manifest."""

    k: int = DEFAULT_K
    thresholds: Mapping[str, float] = field(default_factory=dict)
    filters: tuple = ()
    pairs: tuple[tuple[str, str], ...] = ()
    faceted: tuple[Mapping, ...] = ()       # {"attribute": ..., "facets": [...]}
    normalization: str = "raw"

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "thresholds": dict(self.thresholds),
            "filters": [dict(f) for f in self.filters],
            "pairs": [list(p) for p in self.pairs],
            "faceted": [dict(f) for f in self.faceted],
            "normalization": self.normalization,
        }


def _safe_name(attribute: str) -> str:
    return attribute.replace("[", "_").replace("]", "")


def build_report(dataset: Dataset, schema: Schema,
                 params: ReportParams | None = None) -> dict[str, dict]:
    """Assemble a bundle: path -> JSON-ready document.

    Includes the nutrition-label summary and a general distribution for every
    schema attribute (probability vectors are skipped; address a component to
    plot one), plus the requested relations and faceted views. Every document
    has already passed the privacy floor.
    """
    params = params or ReportParams()
    bundle: dict[str, dict] = {}

    rows = nutrition_label(dataset, schema, params.thresholds)
    bundle["summary.json"] = floor_summary_rows(rows, params.k)

    for name in schema.names():
        desc = schema.get(name)
        if desc.kind == "probability_vector":
            continue
        dist = distribution(dataset, schema, name, filters=params.filters,
                            thresholds=params.thresholds)
        bundle[f"distributions/{_safe_name(name)}.json"] = privacy_floor(dist, params.k)

    for request in params.faceted:
        attribute = request["attribute"]
        facets = tuple(request.get("facets", ()))
        dist = distribution(dataset, schema, attribute, facets=facets,
                            filters=params.filters, thresholds=params.thresholds)
        stem = _safe_name(attribute) + "__by__" + "_".join(_safe_name(f) for f in facets)
        bundle[f"faceted/{stem}.json"] = privacy_floor(dist, params.k)

    for x, y in params.pairs:
        stem = f"{_safe_name(x)}__{_safe_name(y)}"
        matrix = cooccurrence(dataset, schema, x, y,
                              normalization=params.normalization,
                              filters=params.filters, thresholds=params.thresholds)
        bundle[f"relations/{stem}.cooccurrence.json"] = privacy_floor(matrix, params.k)
        corr = npmi(dataset, schema, x, y, filters=params.filters,
                    thresholds=params.thresholds)
        bundle[f"relations/{stem}.npmi.json"] = privacy_floor(corr, params.k)

    sample_count = len(dataset)
    manifest = {
        "type": "report_manifest",
        "version": REPORT_VERSION,
        "dataset": {
            "name": dataset.name,
            "sample_count": None if 0 < sample_count < params.k else sample_count,
            "schema_digest": hashlib.sha256(
                schema.digest_payload().encode("utf-8")).hexdigest(),
            "dataset_digest": dataset.digest(),
        },
        "parameters": params.to_dict(),
        "files": sorted(bundle),
    }
    bundle["manifest.json"] = manifest
    return bundle


def serialize_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(bundle: Mapping[str, dict], outdir) -> None:
    out = Path(outdir)
    for rel, doc in sorted(bundle.items()):
        path = out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_document(doc), encoding="utf-8")


def report_document_schema() -> dict:
    return json.loads(
        resources.files("imgaudit.schemas").joinpath("report.schema.json").read_text())


def validate_document(doc: dict) -> None:
    """Raise jsonschema.ValidationError when a document breaks the contract."""
    jsonschema.validate(doc, report_document_schema())


def validate_bundle(bundle: Mapping[str, dict]) -> None:
    schema_doc = report_document_schema()
    for rel, doc in bundle.items():
        try:
            jsonschema.validate(doc, schema_doc)
        except jsonschema.ValidationError as exc:
            raise QueryError(f"{rel}: {exc.message}") from exc


def read_bundle(directory) -> dict[str, dict]:
    root = Path(directory)
    bundle: dict[str, dict] = {}
    for path in sorted(root.rglob("*.json")):
        rel = path.relative_to(root).as_posix()
        bundle[rel] = json.loads(path.read_text(encoding="utf-8"))
    return bundle


def scan_for_identifiers(bundle: Mapping[str, dict], dataset: Dataset) -> list[str]:
    """Defense-in-depth scan: no exported string may equal a sample id and no
    key may look like a record-level field."""
    sample_ids = {rec.sample_id for rec in dataset}
    forbidden_keys = {"sample_id", "sample_ids", "image_path", "individuals"}
    problems: list[str] = []

    def walk(node, path, rel):
        if isinstance(node, dict):
            for key, value in node.items():
                if key in forbidden_keys:
                    problems.append(f"{rel}:{path}.{key}: forbidden key")
                walk(value, f"{path}.{key}", rel)
        elif isinstance(node, (list, tuple)):
            for i, value in enumerate(node):
                walk(value, f"{path}[{i}]", rel)
        elif isinstance(node, str) and node in sample_ids:
            problems.append(f"{rel}:{path}: value equals a sample id")

    for rel, doc in bundle.items():
        walk(doc, "$", rel)
    return problems
