"""Small-cell suppression: the gate every exported aggregate passes through.

Count cells between 0 and k (exclusive) are replaced by null plus a parallel
suppression mask, so that no published number describes fewer than k units.
Zero cells stay zero: an empty cell reveals nothing about any individual.
Values derived from a suppressed joint count (ratio, normalized share, nPMI,
significance) are suppressed alongside it, since publishing them would let a
reader reconstruct the hidden count.
"""

from __future__ import annotations

from typing import Sequence

from .aggregate import (
    BoxplotSummary,
    CooccurrenceMatrix,
    Distribution,
    NPMIMatrix,
    SummaryRow,
)
from .errors import QueryError

DEFAULT_K = 5


def _floor(value, k: int, meta: dict):
    if value is not None and 0 < value < k:
        meta["suppressed_cells"] += 1
        return None
    return value


def _floor_list(values: list, k: int, meta: dict) -> list:
    return [_floor(v, k, meta) for v in values]


def privacy_floor(aggregate, k: int = DEFAULT_K) -> dict:
    """Serialize an aggregate with every small count cell suppressed.

    Returns the JSON-ready dict with a ``privacy`` block recording k and the
    number of suppressed cells. k = 1 disables suppression.
    """
    if not isinstance(k, int) or k < 1:
        raise QueryError(f"privacy floor k must be an integer >= 1, got {k!r}")
    if isinstance(aggregate, Distribution):
        return _floor_distribution(aggregate, k)
    if isinstance(aggregate, BoxplotSummary):
        return _floor_boxplot(aggregate, k)
    if isinstance(aggregate, CooccurrenceMatrix):
        return _floor_cooccurrence(aggregate, k)
    if isinstance(aggregate, NPMIMatrix):
        return _floor_npmi(aggregate, k)
    if isinstance(aggregate, Sequence) and all(isinstance(r, SummaryRow) for r in aggregate):
        return floor_summary_rows(aggregate, k)
    raise QueryError(f"cannot apply privacy floor to {type(aggregate).__name__}")


def _floor_distribution(dist: Distribution, k: int) -> dict:
    doc = dist.to_dict()
    meta = {"k": k, "suppressed_cells": 0}
    for cell in doc["cells"]:
        counts = _floor_list(cell["counts"], k, meta)
        cell["counts"] = counts
        cell["suppressed"] = [c is None for c in counts]
        cell["missing"] = _floor(cell["missing"], k, meta)
    doc["population"] = _floor(doc["population"], k, meta)
    doc["privacy"] = meta
    return doc


def _floor_boxplot(box: BoxplotSummary, k: int) -> dict:
    doc = box.to_dict()
    meta = {"k": k, "suppressed_cells": 0}
    for field in ("count", "missing", "outlier_count"):
        doc[field] = _floor(doc[field], k, meta)
    doc["privacy"] = meta
    return doc


def floor_summary_rows(rows: Sequence[SummaryRow], k: int) -> dict:
    meta = {"k": k, "suppressed_cells": 0}
    out = []
    for row in rows:
        doc = row.to_dict()
        doc["count"] = _floor(doc["count"], k, meta)
        doc["missing"] = _floor(doc["missing"], k, meta)
        if "top_classes" in doc:
            kept = []
            for entry in doc["top_classes"]:
                n = _floor(entry["count"], k, meta)
                kept.append({"label": entry["label"], "count": n})
            doc["top_classes"] = kept
        out.append(doc)
    return {"type": "summary_table", "rows": out, "privacy": meta}


def _floor_cooccurrence(matrix: CooccurrenceMatrix, k: int) -> dict:
    doc = matrix.to_dict()
    meta = {"k": k, "suppressed_cells": 0}
    suppressed = []
    for i, row in enumerate(doc["counts"]):
        mask_row = []
        for j, value in enumerate(row):
            new = _floor(value, k, meta)
            hidden = new is None
            mask_row.append(hidden)
            row[j] = new
            if hidden:
                doc["ratio"][i][j] = None
                doc["normalized"][i][j] = None
                doc["significant"][i][j] = False
        suppressed.append(mask_row)
    doc["suppressed"] = suppressed
    doc["total"] = _floor(doc["total"], k, meta)
    doc["carrier_count"] = _floor(doc["carrier_count"], k, meta)
    doc["privacy"] = meta
    return doc


def _floor_npmi(matrix: NPMIMatrix, k: int) -> dict:
    doc = matrix.to_dict()
    meta = {"k": k, "suppressed_cells": 0}
    joint = matrix.joint_counts
    suppressed = []
    for i in range(joint.shape[0]):
        mask_row = []
        for j in range(joint.shape[1]):
            hidden = 0 < int(joint[i, j]) < k
            mask_row.append(hidden)
            if hidden:
                meta["suppressed_cells"] += 1
                doc["values"][i][j] = None
                doc["defined"][i][j] = False
        suppressed.append(mask_row)
    doc["suppressed"] = suppressed
    doc["carrier_count"] = _floor(doc["carrier_count"], k, meta)
    doc["privacy"] = meta
    return doc
