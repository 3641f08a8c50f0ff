"""Command-line entry points: extract, ingest, report, render, serve, synth."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ExtractionError, ManifestError, QueryError, SchemaError


def _load_schema(path: str | None):
    from .schema import load_schema, read_config

    return read_config(path) if path else load_schema({})


def _ingest(args, schema):
    from .manifest import ingest_files

    return ingest_files(args.manifest, schema, strict=not args.lenient)


def _parse_thresholds(pairs: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise QueryError(f"--threshold expects attr=value, got {pair!r}")
        name, _, raw = pair.partition("=")
        out[name.strip()] = float(raw)
    return out


def cmd_extract(args) -> int:
    from .extract import extract_directory, load_face_boxes

    face_boxes = load_face_boxes(args.faces) if args.faces else None
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for entry in extract_directory(args.images, face_boxes=face_boxes,
                                       include_paths=args.include_paths):
            fh.write(entry.to_json() + "\n")
            count += 1
    print(f"wrote {count} manifest entries to {args.out}")
    return 0


def cmd_ingest(args) -> int:
    schema = _load_schema(args.schema)
    result = _ingest(args, schema)
    ds = result.dataset
    for issue in result.issues:
        print(f"skipped {issue}", file=sys.stderr)
    individuals = sum(len(rec.individuals) for rec in ds)
    print(f"dataset {ds.name!r}: {len(ds)} samples, {individuals} individuals, "
          f"{len(result.issues)} skipped entries")
    if args.out:
        from .manifest import write_manifest

        write_manifest(ds, args.out)
        print(f"wrote normalized manifest to {args.out}")
    return 0


def cmd_report(args) -> int:
    from .report import ReportParams, build_report, validate_bundle, write_report

    schema = _load_schema(args.schema)
    dataset = _ingest(args, schema).dataset
    params = ReportParams(
        k=args.k,
        thresholds=_parse_thresholds(args.threshold),
        pairs=tuple(tuple(p.split(",", 1)) for p in args.pair),
        faceted=tuple(
            {"attribute": spec.split(":", 1)[0],
             "facets": spec.split(":", 1)[1].split(",")}
            for spec in args.facet),
        normalization=args.normalization,
    )
    bundle = build_report(dataset, schema, params)
    validate_bundle(bundle)
    write_report(bundle, args.out)
    print(f"wrote report bundle ({len(bundle)} documents) to {args.out}")
    return 0


def cmd_render(args) -> int:
    from .render import render_chart

    doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
    Path(args.out).write_text(render_chart(doc), encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    schema = _load_schema(args.schema)
    dataset = _ingest(args, schema).dataset
    print(f"serving {dataset.name!r} ({len(dataset)} samples) on "
          f"{args.host}:{args.port}"
          + (" [trusted mode]" if args.trusted else ""))
    serve(dataset, schema, host=args.host, port=args.port, k=args.k,
          trusted_mode=args.trusted)
    return 0


def cmd_synth(args) -> int:
    from .manifest import write_manifest
    from .synth import generate_synthetic, read_synth_spec, synth_schema_config

    spec = read_synth_spec(args.spec)
    dataset = generate_synthetic(spec)
    write_manifest(dataset, args.out)
    print(f"wrote {len(dataset)} synthetic samples to {args.out}")
    if args.schema_out:
        config = synth_schema_config(spec)
        Path(args.schema_out).write_text(
            json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote schema config to {args.schema_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imgaudit",
        description="Privacy-safe aggregate documentation for image datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute native signals from an image directory")
    p.add_argument("--images", required=True, help="image directory")
    p.add_argument("--out", required=True, help="output manifest (JSONL)")
    p.add_argument("--faces", help="manifest providing face_box entries")
    p.add_argument("--include-paths", action="store_true",
                   help="emit image_path entries (needed for trusted-mode patches)")
    p.set_defaults(func=cmd_extract)

    def manifest_args(p):
        p.add_argument("--schema", help="schema config JSON (defaults to built-ins)")
        p.add_argument("--manifest", required=True, nargs="+", help="manifest file(s)")
        p.add_argument("--lenient", action="store_true",
                       help="skip malformed entries instead of aborting")

    p = sub.add_parser("ingest", help="validate manifests and summarize the dataset")
    manifest_args(p)
    p.add_argument("--out", help="write the normalized manifest here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("report", help="build an aggregate report bundle")
    manifest_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--k", type=int, default=5, help="privacy floor (default 5)")
    p.add_argument("--threshold", action="append", default=[], metavar="ATTR=T",
                   help="classification threshold override (repeatable)")
    p.add_argument("--pair", action="append", default=[], metavar="X,Y",
                   help="emit co-occurrence and nPMI for this pair (repeatable)")
    p.add_argument("--facet", action="append", default=[], metavar="ATTR:F1,F2",
                   help="emit a disaggregated distribution (repeatable)")
    p.add_argument("--normalization", default="raw",
                   choices=("raw", "row", "column", "total"))
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("render", help="render an aggregate JSON document to SVG")
    p.add_argument("--in", dest="input", required=True, help="aggregate JSON file")
    p.add_argument("--out", required=True, help="output SVG file")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the explorer query API")
    manifest_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8702)
    p.add_argument("--k", type=int, default=5, help="privacy floor (default 5)")
    p.add_argument("--trusted", action="store_true",
                   help="enable the pixel-patch endpoint (controlled perimeters only)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--spec", required=True, help="synthetic spec JSON")
    p.add_argument("--out", required=True, help="output manifest (JSONL)")
    p.add_argument("--schema-out", help="write a matching schema config here")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ManifestError, QueryError, ExtractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
