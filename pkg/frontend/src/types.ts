// Wire types for the aggregate query service. Every number shown in the UI
// comes out of one of these documents; the client never computes statistics.

export interface QuantizationSpec {
  kind: string;
  edges: number[];
  lower_bound: number;
  upper_bound: number;
  mean: number;
  std: number;
  min: number;
  max: number;
}

export interface AxisDoc {
  attribute: string;
  labels: string[];
  quantization: QuantizationSpec | null;
}

export interface PrivacyBlock {
  k: number;
  suppressed_cells: number;
}

export interface DistributionCellDoc {
  coords: string[];
  counts: (number | null)[];
  missing: number | null;
  suppressed?: boolean[];
}

export interface DistributionDoc {
  type: "distribution";
  attribute: string;
  scope: string;
  kind: string;
  labels: string[];
  quantization: QuantizationSpec | null;
  facets: AxisDoc[];
  cells: DistributionCellDoc[];
  population: number | null;
  tie_count: number;
  parameters: Record<string, unknown>;
  privacy: PrivacyBlock;
}

export interface BoxplotDoc {
  type: "boxplot";
  attribute: string;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  whisker_low: number;
  whisker_high: number;
  outlier_count: number | null;
  count: number | null;
  missing: number | null;
  parameters: Record<string, unknown>;
  privacy: PrivacyBlock;
}

export interface CooccurrenceDoc {
  type: "cooccurrence";
  x: AxisDoc;
  y: AxisDoc;
  counts: (number | null)[][];
  total: number | null;
  expected: (number | null)[][];
  ratio: (number | null)[][];
  significant: boolean[][];
  low_expectation: boolean[][];
  normalization: string;
  normalized: (number | null)[][];
  carrier_count: number | null;
  suppressed?: boolean[][];
  parameters: Record<string, unknown>;
  privacy: PrivacyBlock;
}

export interface NpmiDoc {
  type: "npmi";
  x: AxisDoc;
  y: AxisDoc;
  values: (number | null)[][];
  defined: boolean[][];
  px: (number | null)[];
  py: (number | null)[];
  carrier_count: number | null;
  suppressed?: boolean[][];
  parameters: Record<string, unknown>;
  privacy: PrivacyBlock;
}

export interface SummaryRowDoc {
  attribute: string;
  group: string;
  scope: string;
  kind: string;
  count: number | null;
  missing: number | null;
  minimum?: number | null;
  maximum?: number | null;
  mean?: number | null;
  std?: number | null;
  q1?: number | null;
  median?: number | null;
  q3?: number | null;
  cardinality?: number;
  top_classes?: { label: string; count: number | null }[];
}

export interface SummaryDoc {
  type: "summary_table";
  rows: SummaryRowDoc[];
  privacy: PrivacyBlock;
  parameters?: Record<string, unknown>;
}

export interface AttributeDoc {
  name: string;
  group: string;
  scope: string;
  kind: string;
  source: string;
  classes?: string[];
  n_classes?: number;
  unit?: string;
  rule?: Record<string, unknown>;
}

export interface AttributeListDoc {
  type: "attribute_list";
  attributes: AttributeDoc[];
  parameters: { k: number; trusted_mode?: boolean };
}

export interface PatchGridDoc {
  type: "patch_grid";
  attribute: string;
  bin: number;
  bin_label: string;
  patch_size: number;
  patches: { image_base64: string }[];
  parameters: Record<string, unknown>;
}

export interface FilterSpec {
  attribute: string;
  op: "eq" | "ne" | "lt" | "le" | "gt" | "ge" | "in";
  value: unknown;
}

export interface ErrorBody {
  error: { message: string; valid_attributes?: string[] };
}
