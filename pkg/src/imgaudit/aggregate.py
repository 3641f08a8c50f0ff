"""The statistics core.

Quantization into ten bounded bins, general and disaggregated distributions,
boxplot and nutrition-label summaries, co-occurrence with expected counts
under independence, normalized-PMI correlation, and confidence flagging.
Every function here is a deterministic, side-effect-free read of an immutable
dataset, so queries can run concurrently and identical parameters always
reproduce identical aggregates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .derive import Filter, apply_filters, resolve_values
from .errors import QueryError
from .records import Dataset
from .schema import Schema

Z_95 = 1.96
LOW_EXPECTATION = 5.0
N_BINS = 10
MAX_FACETS = 3
MISSING_LABEL = "(missing)"
TOP_CLASSES = 5


def _finite_or_none(v) -> float | None:
    f = float(v)
    return f if math.isfinite(f) else None


def _matrix_to_json(arr: np.ndarray) -> list[list]:
    return [[_finite_or_none(v) for v in row] for row in np.asarray(arr, dtype=float)]


# ---------------------------------------------------------------------------
# Quantization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantizationSpec:
    """Ten uniform bins with outlier-absorbing extremes.

    Probability values always use the fixed 0.1-wide edges over [0, 1]. Other
    continuous values span max(min, mean - 1.96 std) to min(max, mean + 1.96
    std) with population std; everything below the lower bound lands in bin 0
    and everything above the upper bound in bin 9.
    """

    kind: str
    edges: tuple[float, ...]
    lower_bound: float
    upper_bound: float
    mean: float
    std: float
    min_value: float
    max_value: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "edges": [float(e) for e in self.edges],
            "lower_bound": float(self.lower_bound),
            "upper_bound": float(self.upper_bound),
            "mean": float(self.mean),
            "std": float(self.std),
            "min": float(self.min_value),
            "max": float(self.max_value),
        }


def quantize(values: Sequence[float], kind: str) -> tuple[QuantizationSpec, np.ndarray]:
    """Bin a value set; returns the spec and one bin index per value."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise QueryError("cannot quantize an empty value set")
    if not np.isfinite(arr).all():
        raise QueryError("cannot quantize non-finite values")
    vmin, vmax = float(arr.min()), float(arr.max())
    mean, std = float(arr.mean()), float(arr.std())

    if kind == "probability":
        if vmin < 0.0 or vmax > 1.0:
            raise QueryError(f"probability values outside [0, 1]: [{vmin}, {vmax}]")
        edges = tuple(i / 10 for i in range(N_BINS + 1))
        bins = np.clip(np.floor(arr * N_BINS).astype(int), 0, N_BINS - 1)
        spec = QuantizationSpec(kind, edges, 0.0, 1.0, mean, std, vmin, vmax)
        return spec, bins

    if kind != "continuous":
        raise QueryError(f"cannot quantize kind {kind!r}")
    lower = max(vmin, mean - Z_95 * std)
    upper = min(vmax, mean + Z_95 * std)
    if upper <= lower:
        edges = tuple(lower for _ in range(N_BINS + 1))
        bins = np.zeros(arr.size, dtype=int)
    else:
        width = (upper - lower) / N_BINS
        edge_list = [lower + i * width for i in range(N_BINS + 1)]
        edge_list[-1] = upper
        edges = tuple(edge_list)
        bins = np.clip(np.floor((arr - lower) / width).astype(int), 0, N_BINS - 1)
    spec = QuantizationSpec(kind, edges, lower, upper, mean, std, vmin, vmax)
    return spec, bins


def bin_labels(spec: QuantizationSpec) -> tuple[str, ...]:
    labels = []
    for i in range(N_BINS):
        lo, hi = spec.edges[i], spec.edges[i + 1]
        close = "]" if i == N_BINS - 1 else ")"
        labels.append(f"[{lo:.4g}, {hi:.4g}{close}")
    return tuple(labels)


# ---------------------------------------------------------------------------
# Units: one row per sample or per detected individual
# ---------------------------------------------------------------------------

def _units(dataset: Dataset, scope: str) -> list:
    if scope == "per_sample":
        return [rec.sample_id for rec in dataset]
    return [(rec.sample_id, ind.individual_index)
            for rec in dataset for ind in rec.individuals]


def _unit_key_for(scope_of_attr: str, unit, unit_scope: str):
    """Key to look an attribute up for a counting unit.

    Per-individual units inherit per-sample attribute values from their
    sample.
    """
    if scope_of_attr == unit_scope:
        return unit
    if scope_of_attr == "per_sample" and unit_scope == "per_individual":
        return unit[0]
    raise QueryError("a per_sample unit cannot take a per_individual value")


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FacetDomain:
    attribute: str
    labels: tuple[str, ...]
    quantization: QuantizationSpec | None = None

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "labels": list(self.labels),
            "quantization": self.quantization.to_dict() if self.quantization else None,
        }


@dataclass(frozen=True)
class DistributionCell:
    coords: tuple[str, ...]
    counts: tuple[int, ...]
    missing: int


@dataclass(frozen=True)
class Distribution:
    attribute: str
    scope: str
    kind: str
    labels: tuple[str, ...]
    quantization: QuantizationSpec | None
    facets: tuple[FacetDomain, ...]
    cells: tuple[DistributionCell, ...]
    population: int
    tie_count: int
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "distribution",
            "attribute": self.attribute,
            "scope": self.scope,
            "kind": self.kind,
            "labels": list(self.labels),
            "quantization": self.quantization.to_dict() if self.quantization else None,
            "facets": [f.to_dict() for f in self.facets],
            "cells": [{"coords": list(c.coords), "counts": list(c.counts),
                       "missing": c.missing} for c in self.cells],
            "population": self.population,
            "tie_count": self.tie_count,
            "parameters": dict(self.parameters),
        }


def _facet_assignment(dataset: Dataset, schema: Schema, facet: str, units: list,
                      unit_scope: str, thresholds) -> tuple[FacetDomain, list[str]]:
    resolved = resolve_values(dataset, schema, facet, thresholds)
    if resolved.scope == "per_individual" and unit_scope == "per_sample":
        raise QueryError(
            f"cannot facet the per_sample view by per_individual attribute {facet!r}")
    raw = [resolved.values.get(_unit_key_for(resolved.scope, u, unit_scope))
           for u in units]
    if resolved.kind == "categorical":
        declared = resolved.classes
        observed = sorted({v for v in raw if v is not None})
        labels = tuple(declared) if declared is not None else tuple(observed)
        coords = [v if v is not None else MISSING_LABEL for v in raw]
        quant = None
    elif resolved.kind in ("continuous", "probability"):
        carriers = [v for v in raw if v is not None]
        if not carriers:
            return (FacetDomain(facet, (MISSING_LABEL,)),
                    [MISSING_LABEL for _ in raw])
        quant, bins = quantize(carriers, resolved.kind)
        labels = bin_labels(quant)
        by_value = iter(bins)
        coords = [labels[next(by_value)] if v is not None else MISSING_LABEL
                  for v in raw]
    else:
        raise QueryError(f"facet attribute {facet!r} is not categorical or quantizable")
    if MISSING_LABEL in coords:
        labels = labels + (MISSING_LABEL,)
    return FacetDomain(facet, labels, quant), coords


def distribution(dataset: Dataset, schema: Schema, attribute: str, *,
                 filters: Sequence = (), facets: Sequence[str] = (),
                 thresholds: Mapping[str, float] | None = None) -> Distribution:
    """Histogram of an attribute, optionally disaggregated by up to three
    facet attributes, after conjunctive filtering and threshold overrides."""
    facets = tuple(facets)
    if len(facets) > MAX_FACETS:
        raise QueryError(f"at most {MAX_FACETS} facet attributes allowed, got {len(facets)}")
    if len(set(facets)) != len(facets):
        raise QueryError("facet attributes must be distinct")

    filtered = apply_filters(dataset, schema, filters, thresholds)
    resolved = resolve_values(filtered, schema, attribute, thresholds)
    if resolved.kind == "probability_vector":
        raise QueryError(
            f"{attribute!r} is a probability vector; plot one component "
            f"({attribute}[i]) or a derived class instead")
    units = _units(filtered, resolved.scope)
    raw = [resolved.values.get(_unit_key_for(resolved.scope, u, resolved.scope))
           for u in units]

    quant: QuantizationSpec | None = None
    if resolved.kind == "categorical":
        declared = resolved.classes
        observed = sorted({v for v in raw if v is not None})
        labels = tuple(declared) if declared is not None else tuple(observed)
        index = {label: i for i, label in enumerate(labels)}
        assigned = [index.get(v, -1) if v is not None else -1 for v in raw]
    else:
        carriers = [v for v in raw if v is not None]
        if carriers:
            quant, bins = quantize(carriers, resolved.kind)
            labels = bin_labels(quant)
            by_value = iter(bins)
            assigned = [int(next(by_value)) if v is not None else -1 for v in raw]
        else:
            labels = ()
            assigned = [-1 for _ in raw]

    facet_domains: list[FacetDomain] = []
    facet_coords: list[list[str]] = []
    for facet in facets:
        domain, coords = _facet_assignment(filtered, schema, facet, units,
                                           resolved.scope, thresholds)
        facet_domains.append(domain)
        facet_coords.append(coords)

    cells: dict[tuple[str, ...], dict] = {}
    for i in range(len(units)):
        coords = tuple(fc[i] for fc in facet_coords)
        cell = cells.setdefault(coords, {"counts": [0] * len(labels), "missing": 0})
        if assigned[i] < 0:
            cell["missing"] += 1
        else:
            cell["counts"][assigned[i]] += 1

    cell_rows = tuple(
        DistributionCell(coords=coords, counts=tuple(data["counts"]),
                         missing=data["missing"])
        for coords, data in sorted(cells.items()))
    params = {
        "attribute": attribute,
        "facets": list(facets),
        "filters": [{"attribute": f.attribute, "op": f.op, "value": f.value}
                    if isinstance(f, Filter) else dict(f) for f in filters],
        "thresholds": dict(thresholds or {}),
    }
    return Distribution(
        attribute=attribute,
        scope=resolved.scope,
        kind=resolved.kind,
        labels=labels,
        quantization=quant,
        facets=tuple(facet_domains),
        cells=cell_rows,
        population=len(units),
        tie_count=resolved.tie_count,
        parameters=params,
    )


# ---------------------------------------------------------------------------
# Boxplot and nutrition-label summaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxplotSummary:
    attribute: str
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outlier_count: int
    count: int
    missing: int
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "boxplot",
            "attribute": self.attribute,
            "min": self.minimum, "q1": self.q1, "median": self.median,
            "q3": self.q3, "max": self.maximum,
            "whisker_low": self.whisker_low, "whisker_high": self.whisker_high,
            "outlier_count": self.outlier_count,
            "count": self.count, "missing": self.missing,
            "parameters": dict(self.parameters),
        }


def boxplot_from_values(attribute: str, values: Sequence[float], missing: int = 0,
                        parameters: dict | None = None) -> BoxplotSummary:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise QueryError(f"no values for boxplot of {attribute!r}")
    q1, med, q3 = (float(q) for q in np.percentile(arr, [25, 50, 75]))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = arr[(arr >= lo_fence) & (arr <= hi_fence)]
    whisker_low = float(inside.min())
    whisker_high = float(inside.max())
    outliers = int(((arr < whisker_low) | (arr > whisker_high)).sum())
    return BoxplotSummary(
        attribute=attribute,
        minimum=float(arr.min()), q1=q1, median=med, q3=q3, maximum=float(arr.max()),
        whisker_low=whisker_low, whisker_high=whisker_high,
        outlier_count=outliers, count=int(arr.size), missing=missing,
        parameters=parameters or {},
    )


def boxplot_summary(dataset: Dataset, schema: Schema, attribute: str, *,
                    filters: Sequence = (),
                    thresholds: Mapping[str, float] | None = None) -> BoxplotSummary:
    """Five-number summary with 1.5 IQR whiskers clipped to the data."""
    filtered = apply_filters(dataset, schema, filters, thresholds)
    resolved = resolve_values(filtered, schema, attribute, thresholds)
    if resolved.kind not in ("continuous", "probability"):
        raise QueryError(f"boxplot needs a numeric attribute, {attribute!r} is "
                         f"{resolved.kind}")
    units = _units(filtered, resolved.scope)
    values = [resolved.values[u] for u in units if u in resolved.values]
    params = {
        "attribute": attribute,
        "filters": [{"attribute": f.attribute, "op": f.op, "value": f.value}
                    if isinstance(f, Filter) else dict(f) for f in filters],
        "thresholds": dict(thresholds or {}),
    }
    return boxplot_from_values(attribute, values, missing=len(units) - len(values),
                               parameters=params)


@dataclass(frozen=True)
class SummaryRow:
    """One nutrition-label line for an attribute."""

    attribute: str
    group: str
    scope: str
    kind: str
    count: int
    missing: int
    minimum: float | None = None
    maximum: float | None = None
    mean: float | None = None
    std: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    cardinality: int | None = None
    top_classes: tuple[tuple[str, int], ...] | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "attribute": self.attribute, "group": self.group,
            "scope": self.scope, "kind": self.kind,
            "count": self.count, "missing": self.missing,
        }
        for name in ("minimum", "maximum", "mean", "std", "q1", "median", "q3"):
            v = getattr(self, name)
            if v is not None:
                out[name] = _finite_or_none(v)
        if self.cardinality is not None:
            out["cardinality"] = self.cardinality
        if self.top_classes is not None:
            out["top_classes"] = [{"label": c, "count": n} for c, n in self.top_classes]
        return out


def summary_stats(dataset: Dataset, schema: Schema, attribute: str,
                  thresholds: Mapping[str, float] | None = None) -> SummaryRow:
    resolved = resolve_values(dataset, schema, attribute, thresholds)
    desc = schema.get(attribute) if attribute in schema else None
    group = desc.group if desc else "labels"
    units = _units(dataset, resolved.scope)
    values = [resolved.values[u] for u in units if u in resolved.values]
    count, missing = len(values), len(units) - len(values)

    base = dict(attribute=attribute, group=group, scope=resolved.scope,
                kind=resolved.kind, count=count, missing=missing)
    if resolved.kind in ("continuous", "probability") and values:
        arr = np.asarray(values, dtype=float)
        q1, med, q3 = (float(q) for q in np.percentile(arr, [25, 50, 75]))
        return SummaryRow(**base, minimum=float(arr.min()), maximum=float(arr.max()),
                          mean=float(arr.mean()), std=float(arr.std()),
                          q1=q1, median=med, q3=q3)
    if resolved.kind == "categorical":
        freq: dict[str, int] = {}
        for v in values:
            freq[v] = freq.get(v, 0) + 1
        top = tuple(sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_CLASSES])
        return SummaryRow(**base, cardinality=len(freq), top_classes=top)
    return SummaryRow(**base)


def nutrition_label(dataset: Dataset, schema: Schema,
                    thresholds: Mapping[str, float] | None = None) -> list[SummaryRow]:
    """Summary rows for every schema attribute, missing counted explicitly."""
    return [summary_stats(dataset, schema, name, thresholds) for name in schema.names()]


# ---------------------------------------------------------------------------
# Co-occurrence, expected counts, significance, and nPMI
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxisDomain:
    attribute: str
    labels: tuple[str, ...]
    quantization: QuantizationSpec | None = None

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "labels": list(self.labels),
            "quantization": self.quantization.to_dict() if self.quantization else None,
        }


@dataclass(frozen=True)
class JointTable:
    x_axis: AxisDomain
    y_axis: AxisDomain
    counts: np.ndarray        # C[x, y], integer
    carrier_count: int        # units carrying both attributes

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _axis_values(resolved, dataset: Dataset) -> dict[str, list]:
    by_sample: dict[str, list] = {}
    if resolved.scope == "per_sample":
        for sid, v in resolved.values.items():
            by_sample[sid] = [(sid, v)]
    else:
        for (sid, idx), v in resolved.values.items():
            by_sample.setdefault(sid, []).append(((sid, idx), v))
    return by_sample


def joint_table(dataset: Dataset, schema: Schema, x: str, y: str, *,
                filters: Sequence = (),
                thresholds: Mapping[str, float] | None = None) -> JointTable:
    """Joint counts of two attributes over units carrying both.

    Two per-individual attributes pair on the same individual; a per-sample
    attribute pairs with every individual value in the sample. Continuous
    attributes are quantized over the paired values.
    """
    filtered = apply_filters(dataset, schema, filters, thresholds)
    rx = resolve_values(filtered, schema, x, thresholds)
    ry = resolve_values(filtered, schema, y, thresholds)
    for name, r in ((x, rx), (y, ry)):
        if r.kind == "probability_vector":
            raise QueryError(f"{name!r} is a probability vector and not quantizable; "
                             f"use a component ({name}[i]) or a derived class")

    pairs: list[tuple[Any, Any]] = []
    carriers = 0
    if rx.scope == ry.scope == "per_individual":
        keys = set(rx.values) & set(ry.values)
        carriers = len(keys)
        pairs = [(rx.values[k], ry.values[k]) for k in sorted(keys)]
    else:
        vx = _axis_values(rx, filtered)
        vy = _axis_values(ry, filtered)
        shared = sorted(set(vx) & set(vy))
        carriers = len(shared)
        for sid in shared:
            for _kx, a in vx[sid]:
                for _ky, b in vy[sid]:
                    pairs.append((a, b))
    if not pairs:
        raise QueryError(f"no samples carry both {x!r} and {y!r}")

    def axis(resolved, name, values):
        if resolved.kind == "categorical":
            declared = resolved.classes
            labels = tuple(declared) if declared is not None \
                else tuple(sorted(set(values)))
            index = {label: i for i, label in enumerate(labels)}
            return AxisDomain(name, labels), [index[v] for v in values]
        quant, bins = quantize(values, resolved.kind)
        return AxisDomain(name, bin_labels(quant), quant), [int(b) for b in bins]

    x_axis, xi = axis(rx, x, [p[0] for p in pairs])
    y_axis, yi = axis(ry, y, [p[1] for p in pairs])
    counts = np.zeros((len(x_axis.labels), len(y_axis.labels)), dtype=np.int64)
    np.add.at(counts, (xi, yi), 1)
    return JointTable(x_axis=x_axis, y_axis=y_axis, counts=counts,
                      carrier_count=carriers)


def expected_counts(counts: np.ndarray) -> np.ndarray:
    """Counts expected under independence: total * P(x) * P(y) per cell."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise QueryError("expected counts need a non-empty table")
    return np.outer(counts.sum(axis=1), counts.sum(axis=0)) / total


def significance_mask(counts: np.ndarray, expected: np.ndarray, *,
                      z: float = Z_95,
                      low_expectation: float = LOW_EXPECTATION
                      ) -> tuple[np.ndarray, np.ndarray]:
    """95 percent confidence flags under a Poisson approximation.

    A cell is significant iff |C - E| > z * sqrt(E). Cells with E below the
    low-expectation guard are never flagged and reported separately, because
    the normal approximation is meaningless there.
    """
    c = np.asarray(counts, dtype=float)
    e = np.asarray(expected, dtype=float)
    low = e < low_expectation
    sig = np.abs(c - e) > z * np.sqrt(np.maximum(e, 0.0))
    return sig & ~low, low


NORMALIZATIONS = ("raw", "row", "column", "total")


def _normalize_counts(counts: np.ndarray, normalization: str) -> np.ndarray:
    c = np.asarray(counts, dtype=float)
    if normalization == "raw":
        return c
    if normalization == "row":
        denom = c.sum(axis=1, keepdims=True)
    elif normalization == "column":
        denom = c.sum(axis=0, keepdims=True)
    elif normalization == "total":
        denom = np.array([[c.sum()]])
    else:
        raise QueryError(f"unknown normalization {normalization!r}; "
                         f"expected one of {NORMALIZATIONS}")
    return np.divide(c, denom, out=np.zeros_like(c), where=denom > 0)


@dataclass(frozen=True)
class CooccurrenceMatrix:
    x_axis: AxisDomain
    y_axis: AxisDomain
    counts: np.ndarray
    total: int
    expected: np.ndarray
    ratio: np.ndarray            # NaN where expected is 0
    significant: np.ndarray
    low_expectation: np.ndarray
    normalization: str
    normalized: np.ndarray
    carrier_count: int
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "cooccurrence",
            "x": self.x_axis.to_dict(),
            "y": self.y_axis.to_dict(),
            "counts": [[int(v) for v in row] for row in self.counts],
            "total": self.total,
            "expected": _matrix_to_json(self.expected),
            "ratio": _matrix_to_json(self.ratio),
            "significant": [[bool(v) for v in row] for row in self.significant],
            "low_expectation": [[bool(v) for v in row] for row in self.low_expectation],
            "normalization": self.normalization,
            "normalized": _matrix_to_json(self.normalized),
            "carrier_count": self.carrier_count,
            "parameters": dict(self.parameters),
        }


def cooccurrence(dataset: Dataset, schema: Schema, x: str, y: str, *,
                 normalization: str = "raw", filters: Sequence = (),
                 thresholds: Mapping[str, float] | None = None) -> CooccurrenceMatrix:
    """Joint counts with expectation under independence, the real/expected
    ratio, and the 95 percent confidence significance mask."""
    if normalization not in NORMALIZATIONS:
        raise QueryError(f"unknown normalization {normalization!r}; "
                         f"expected one of {NORMALIZATIONS}")
    table = joint_table(dataset, schema, x, y, filters=filters, thresholds=thresholds)
    counts = table.counts
    expected = expected_counts(counts)
    ratio = np.divide(counts.astype(float), expected,
                      out=np.full(counts.shape, np.nan), where=expected > 0)
    significant, low = significance_mask(counts, expected)
    params = {
        "x": x, "y": y, "normalization": normalization,
        "filters": [{"attribute": f.attribute, "op": f.op, "value": f.value}
                    if isinstance(f, Filter) else dict(f) for f in filters],
        "thresholds": dict(thresholds or {}),
    }
    return CooccurrenceMatrix(
        x_axis=table.x_axis, y_axis=table.y_axis,
        counts=counts, total=table.total,
        expected=expected, ratio=ratio,
        significant=significant, low_expectation=low,
        normalization=normalization,
        normalized=_normalize_counts(counts, normalization),
        carrier_count=table.carrier_count,
        parameters=params,
    )


@dataclass(frozen=True)
class NPMIMatrix:
    """Pointwise mutual information normalized by -ln P(y), per cell pair.

    A cell is 1 exactly when x determines y with P(x) = P(y). Cells with a
    zero joint count, and cells where P(y) = 1 makes the normalizer zero, are
    undefined and reported as null rather than infinities.
    """

    x_axis: AxisDomain
    y_axis: AxisDomain
    values: np.ndarray           # NaN where undefined
    defined: np.ndarray
    px: np.ndarray
    py: np.ndarray
    joint_counts: np.ndarray     # kept for privacy flooring, never exported
    carrier_count: int
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "npmi",
            "x": self.x_axis.to_dict(),
            "y": self.y_axis.to_dict(),
            "values": _matrix_to_json(self.values),
            "defined": [[bool(v) for v in row] for row in self.defined],
            "px": [_finite_or_none(v) for v in self.px],
            "py": [_finite_or_none(v) for v in self.py],
            "carrier_count": self.carrier_count,
            "parameters": dict(self.parameters),
        }


def npmi(dataset: Dataset, schema: Schema, x: str, y: str, *,
         filters: Sequence = (),
         thresholds: Mapping[str, float] | None = None) -> NPMIMatrix:
    """nPMI_y = ln(P(x,y) / (P(x) P(y))) / -ln P(y) from empirical joint
    frequencies over co-carrying units, with no smoothing."""
    table = joint_table(dataset, schema, x, y, filters=filters, thresholds=thresholds)
    counts = table.counts.astype(float)
    total = counts.sum()
    if total <= 0:
        raise QueryError(f"no co-occurrences of {x!r} and {y!r}")
    px = counts.sum(axis=1) / total
    py = counts.sum(axis=0) / total
    pxy = counts / total

    defined = (pxy > 0) & (py[None, :] < 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_pxy = np.log(pxy)
        log_px = np.log(px)
        log_py = np.log(py)
        denom = -log_py
        values = (log_pxy - log_px[:, None] - log_py[None, :]) / denom[None, :]
    values = np.where(defined, values, np.nan)

    params = {
        "x": x, "y": y,
        "filters": [{"attribute": f.attribute, "op": f.op, "value": f.value}
                    if isinstance(f, Filter) else dict(f) for f in filters],
        "thresholds": dict(thresholds or {}),
    }
    return NPMIMatrix(
        x_axis=table.x_axis, y_axis=table.y_axis,
        values=values, defined=defined, px=px, py=py,
        joint_counts=table.counts, carrier_count=table.carrier_count,
        parameters=params,
    )
