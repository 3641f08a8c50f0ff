"""imgaudit: privacy-safe aggregate documentation for image datasets.

Converts a directory of images plus externally produced model signals into
aggregate-only documentation (distributions, disaggregations, co-occurrence,
normalized-PMI correlation, nutrition-label summaries) and serves those
aggregates to an interactive explorer. Record-level data never leaves the
engine.
"""

from .aggregate import (
    BoxplotSummary,
    CooccurrenceMatrix,
    Distribution,
    NPMIMatrix,
    QuantizationSpec,
    SummaryRow,
    boxplot_summary,
    cooccurrence,
    distribution,
    npmi,
    nutrition_label,
    quantize,
    significance_mask,
    summary_stats,
)
from .derive import (
    Filter,
    apply_filters,
    classify_argmax,
    classify_binary,
    count_instances,
    map_macro,
    per_sample_std,
    relative_area,
    resolve_values,
)
from .errors import (
    DerivationError,
    ExtractionError,
    ManifestError,
    QueryError,
    SchemaError,
)
from .extract import (
    FileMetadata,
    ItaResult,
    average_luminance,
    compute_ita,
    extract_metadata,
)
from .colorspace import to_cielab
from .manifest import (
    IngestResult,
    SignalManifestEntry,
    dump_manifest,
    ingest_files,
    ingest_manifest,
    write_manifest,
)
from .privacy import DEFAULT_K, privacy_floor
from .records import Dataset, IndividualRecord, SampleRecord
from .render import render_chart
from .report import ReportParams, build_report, validate_bundle, write_report
from .schema import (
    AttributeDescriptor,
    DerivationRule,
    MacroMapping,
    Schema,
    ThresholdConfig,
    load_schema,
    read_config,
)
from .segment import SkinMask, segment_skin
from .service import create_app
from .synth import SynthSpec, generate_synthetic, parse_synth_spec

__version__ = "0.1.0"
