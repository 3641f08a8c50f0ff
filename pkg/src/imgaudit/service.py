"""Read-only query service over an ingested dataset.

Every endpoint is a thin wrapper around the corresponding library call with
the privacy floor applied, so a service response always equals the offline
computation for the same parameters. Query parameters are echoed back in each
response for chart provenance.

The pixel-patch endpoint exists only when the service is launched in trusted
mode: outside a controlled perimeter the route is not registered at all, so
probing it yields 404 rather than 403.
"""

from __future__ import annotations

import base64
import io
import json
import threading
from collections import OrderedDict
from typing import Callable

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import aggregate as agg
from .errors import QueryError
from .privacy import DEFAULT_K, floor_summary_rows, privacy_floor
from .records import Dataset
from .schema import Schema, SchemaError

PATCH_SIZE = 48
DEFAULT_PAGE_SIZE = 36   # a 6x6 patch grid


def _parse_json_param(raw: str | None, name: str, expected_type):
    if raw is None or raw == "":
        return expected_type()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise QueryError(f"query parameter {name!r} is not valid JSON: {exc.msg}")
    if not isinstance(value, expected_type):
        raise QueryError(f"query parameter {name!r} must be a JSON "
                         f"{expected_type.__name__}")
    return value


def _parse_facets(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return ()
    return tuple(part.strip() for part in raw.split(",") if part.strip())


class AggregateCache:
    """LRU cache for finished responses, keyed by (dataset digest, endpoint,
    parameter digest).

    Purely an optimization: every entry is the value a fresh computation
    would return, so correctness never depends on it. Single writer under a
    lock; cached documents are never mutated after insertion.
    """

    def __init__(self, digest_fn: Callable[[], str], maxsize: int = 128):
        self._digest_fn = digest_fn
        self._digest: str | None = None
        self._maxsize = maxsize
        self._entries: OrderedDict[tuple, dict] = OrderedDict()
        self._lock = threading.Lock()

    def _key(self, endpoint: str, params: dict) -> tuple:
        if self._digest is None:
            self._digest = self._digest_fn()
        return (self._digest, endpoint,
                json.dumps(params, sort_keys=True, separators=(",", ":")))

    def get_or_compute(self, endpoint: str, params: dict,
                       compute: Callable[[], dict]) -> dict:
        with self._lock:
            key = self._key(endpoint, params)
            cached = self._entries.get(key)
            if cached is not None:
                self._entries.move_to_end(key)
                return cached
        value = compute()
        with self._lock:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self._maxsize:
                self._entries.popitem(last=False)
        return value


def create_app(dataset: Dataset, schema: Schema, *, k: int = DEFAULT_K,
               trusted_mode: bool = False,
               page_size: int = DEFAULT_PAGE_SIZE) -> FastAPI:
    app = FastAPI(title="imgaudit", docs_url=None, redoc_url=None)
    cache = AggregateCache(dataset.digest)

    def _echo(doc: dict, **extra) -> dict:
        params = doc.setdefault("parameters", {})
        params["k"] = k
        params.update(extra)
        return doc

    @app.exception_handler(QueryError)
    async def _query_error(_request: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"error": {"message": str(exc)}})

    @app.exception_handler(SchemaError)
    async def _schema_error(_request: Request, exc: SchemaError):
        return JSONResponse(status_code=404, content={
            "error": {"message": str(exc), "valid_attributes": list(schema.names())},
        })

    @app.get("/attributes")
    def attributes():
        return {
            "type": "attribute_list",
            "attributes": [d.to_dict() for d in schema.descriptors],
            "parameters": {"k": k, "trusted_mode": trusted_mode},
        }

    @app.get("/distribution")
    def get_distribution(attribute: str,
                         facets: str | None = None,
                         thresholds: str | None = None,
                         filters: str | None = None):
        def compute() -> dict:
            dist = agg.distribution(
                dataset, schema, attribute,
                facets=_parse_facets(facets),
                thresholds=_parse_json_param(thresholds, "thresholds", dict),
                filters=_parse_json_param(filters, "filters", list),
            )
            return _echo(privacy_floor(dist, k))
        return cache.get_or_compute(
            "distribution",
            {"attribute": attribute, "facets": facets,
             "thresholds": thresholds, "filters": filters, "k": k},
            compute)

    @app.get("/boxplot")
    def get_boxplot(attribute: str,
                    thresholds: str | None = None,
                    filters: str | None = None):
        def compute() -> dict:
            box = agg.boxplot_summary(
                dataset, schema, attribute,
                thresholds=_parse_json_param(thresholds, "thresholds", dict),
                filters=_parse_json_param(filters, "filters", list),
            )
            return _echo(privacy_floor(box, k))
        return cache.get_or_compute(
            "boxplot",
            {"attribute": attribute, "thresholds": thresholds,
             "filters": filters, "k": k},
            compute)

    @app.get("/cooccurrence")
    def get_cooccurrence(x: str, y: str, normalization: str = "raw",
                         thresholds: str | None = None,
                         filters: str | None = None):
        def compute() -> dict:
            matrix = agg.cooccurrence(
                dataset, schema, x, y, normalization=normalization,
                thresholds=_parse_json_param(thresholds, "thresholds", dict),
                filters=_parse_json_param(filters, "filters", list),
            )
            return _echo(privacy_floor(matrix, k))
        return cache.get_or_compute(
            "cooccurrence",
            {"x": x, "y": y, "normalization": normalization,
             "thresholds": thresholds, "filters": filters, "k": k},
            compute)

    @app.get("/npmi")
    def get_npmi(x: str, y: str,
                 thresholds: str | None = None,
                 filters: str | None = None):
        def compute() -> dict:
            matrix = agg.npmi(
                dataset, schema, x, y,
                thresholds=_parse_json_param(thresholds, "thresholds", dict),
                filters=_parse_json_param(filters, "filters", list),
            )
            return _echo(privacy_floor(matrix, k))
        return cache.get_or_compute(
            "npmi",
            {"x": x, "y": y, "thresholds": thresholds,
             "filters": filters, "k": k},
            compute)

    @app.get("/summary")
    def get_summary(thresholds: str | None = None):
        def compute() -> dict:
            rows = agg.nutrition_label(
                dataset, schema,
                _parse_json_param(thresholds, "thresholds", dict))
            return _echo(floor_summary_rows(rows, k))
        return cache.get_or_compute(
            "summary", {"thresholds": thresholds, "k": k}, compute)

    if trusted_mode:
        @app.get("/patches")
        def get_patches(bin: int = Query(..., ge=0),  # noqa: A002
                        attribute: str = "ita",
                        limit: int = Query(DEFAULT_PAGE_SIZE, ge=1)):
            return _patch_grid(dataset, schema, attribute, bin,
                               min(limit, page_size), k)

    return app


def _patch_grid(dataset: Dataset, schema: Schema, attribute: str,
                bin_index: int, limit: int, k: int) -> dict:
    """Small face crops whose attribute value falls in the requested bin."""
    from PIL import Image

    from .derive import resolve_values

    resolved = resolve_values(dataset, schema, attribute)
    if resolved.scope != "per_individual" or resolved.kind not in (
            "continuous", "probability"):
        raise QueryError(f"patches need a numeric per_individual attribute, "
                         f"{attribute!r} is {resolved.scope}/{resolved.kind}")
    keys = sorted(resolved.values)
    if not keys:
        raise QueryError(f"no values for {attribute!r}")
    spec, bins = agg.quantize([resolved.values[key] for key in keys], resolved.kind)
    if bin_index >= agg.N_BINS:
        raise QueryError(f"bin {bin_index} out of range (0..{agg.N_BINS - 1})")
    chosen = [key for key, b in zip(keys, bins) if int(b) == bin_index]

    patches: list[dict] = []
    for sid, idx in chosen:
        if len(patches) >= limit:
            break
        rec = dataset.get(sid)
        if rec is None or rec.image_path is None:
            continue
        individual = next((i for i in rec.individuals if i.individual_index == idx), None)
        if individual is None or individual.face_box is None:
            continue
        x, y, w, h = individual.face_box
        try:
            with Image.open(rec.image_path) as img:
                crop = img.convert("RGB").crop((x, y, x + w, y + h))
                crop = crop.resize((PATCH_SIZE, PATCH_SIZE))
        except OSError:
            continue
        buf = io.BytesIO()
        crop.save(buf, format="PNG")
        patches.append({"image_base64": base64.b64encode(buf.getvalue()).decode("ascii")})

    return {
        "type": "patch_grid",
        "attribute": attribute,
        "bin": bin_index,
        "bin_label": agg.bin_labels(spec)[bin_index],
        "patch_size": PATCH_SIZE,
        "patches": patches,
        "parameters": {"attribute": attribute, "bin": bin_index,
                       "limit": limit, "k": k},
    }


def serve(dataset: Dataset, schema: Schema, *, host: str = "127.0.0.1",
          port: int = 8702, k: int = DEFAULT_K, trusted_mode: bool = False) -> None:
    """Run the query service until interrupted (loopback bind by default)."""
    import uvicorn

    app = create_app(dataset, schema, k=k, trusted_mode=trusted_mode)
    uvicorn.run(app, host=host, port=port, log_level="warning")
