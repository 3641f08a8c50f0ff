// View-model builders: server documents in, renderable structures out.
// Layout math only; every displayed number is carried verbatim from the
// response. Suppressed cells get a glyph, never a number.

import {
  AttributeListDoc,
  CooccurrenceDoc,
  DistributionDoc,
  NpmiDoc,
  PatchGridDoc,
  SummaryDoc,
} from "./types.js";

export const SUPPRESSED_GLYPH = "∗";   // asterisk operator
export const NEUTRAL_COLOR = "#e0e0e0";

export interface BarView {
  label: string;
  count: number | null;
  suppressed: boolean;
  countLabel: string;      // "" only when the bar list itself is empty
  heightFrac: number;      // 0..1 of the tallest bar in the panel
}

export interface PanelView {
  title: string;
  coords: string[];
  bars: BarView[];
  missing: number | null;
  missingSuppressed: boolean;
}

export interface HistogramView {
  kind: "histogram";
  attribute: string;
  caption: string;
  panels: PanelView[];
  tieCount: number;
  suppressedCells: number;
}

function thresholdCaption(parameters: Record<string, unknown>): string {
  const thresholds = (parameters?.thresholds ?? {}) as Record<string, number>;
  const parts = Object.keys(thresholds).sort()
    .map((name) => `t(${name})=${thresholds[name]}`);
  return parts.join(", ");
}

export function buildHistogram(doc: DistributionDoc): HistogramView {
  const panels: PanelView[] = doc.cells.map((cell) => {
    const known = cell.counts.filter((c): c is number => c !== null);
    const peak = Math.max(1, ...known);
    const bars: BarView[] = doc.labels.map((label, i) => {
      const count = cell.counts[i] ?? null;
      const suppressed = count === null;
      return {
        label,
        count,
        suppressed,
        countLabel: suppressed ? SUPPRESSED_GLYPH : String(count),
        heightFrac: suppressed ? 0 : (count as number) / peak,
      };
    });
    return {
      title: cell.coords.join(" / "),
      coords: cell.coords,
      bars,
      missing: cell.missing,
      missingSuppressed: cell.missing === null,
    };
  });
  const threshold = thresholdCaption(doc.parameters);
  return {
    kind: "histogram",
    attribute: doc.attribute,
    caption: doc.attribute + (threshold ? ` [${threshold}]` : ""),
    panels,
    tieCount: doc.tie_count,
    suppressedCells: doc.privacy.suppressed_cells,
  };
}

/** Sum panel bars over every facet cell; used to sanity-check views against
 * the unfaceted server answer. Null (suppressed) counts poison the sum. */
export function marginalizeHistogram(view: HistogramView): (number | null)[] {
  const labels = view.panels[0]?.bars.map((b) => b.label) ?? [];
  return labels.map((_label, i) => {
    let total = 0;
    for (const panel of view.panels) {
      const count = panel.bars[i].count;
      if (count === null) return null;
      total += count;
    }
    return total;
  });
}

export interface HeatCellView {
  xLabel: string;
  yLabel: string;
  text: string;            // count (cooccurrence) or value (npmi), glyph if hidden
  color: string;
  neutral: boolean;
  hatched: boolean;
  hover: string;           // C, expected, ratio, nPMI as served
}

export interface HeatmapView {
  kind: "heatmap";
  mode: "cooccurrence" | "npmi";
  xAttribute: string;
  yAttribute: string;
  xLabels: string[];
  yLabels: string[];
  cells: HeatCellView[][];
}

function ratioColor(ratio: number): string {
  if (ratio <= 0) return NEUTRAL_COLOR;
  const t = Math.max(-2, Math.min(2, Math.log2(ratio))) / 2;
  return divergingRgb(t);
}

function npmiColor(value: number): string {
  return divergingRgb(Math.max(-1, Math.min(1, value)));
}

function divergingRgb(t: number): string {
  let r: number, g: number, b: number;
  if (t >= 0) {
    r = 230; g = Math.round(150 - 110 * t); b = Math.round(110 - 80 * t);
  } else {
    r = Math.round(110 + 80 * t); g = Math.round(150 + 110 * t); b = 230;
  }
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

const fmt = (v: number | null | undefined): string =>
  v === null || v === undefined ? "?" : (Number.isInteger(v) ? String(v) : v.toFixed(3));

export function buildHeatmap(co: CooccurrenceDoc, pm: NpmiDoc | null,
                             mode: "cooccurrence" | "npmi"): HeatmapView {
  const cells: HeatCellView[][] = co.x.labels.map((xLabel, i) =>
    co.y.labels.map((yLabel, j) => {
      const count = co.counts[i][j];
      const expected = co.expected[i][j];
      const ratio = co.ratio[i][j];
      const significant = co.significant[i][j];
      const suppressed = co.suppressed?.[i]?.[j] ?? count === null;
      const npmiValue = pm ? pm.values[i][j] : null;
      const npmiDefined = pm ? pm.defined[i][j] : false;

      const hover = `C=${fmt(count)} expected=${fmt(expected)} `
        + `ratio=${fmt(ratio)} nPMI=${npmiDefined ? fmt(npmiValue) : "undefined"}`;

      let hatched: boolean;
      let text: string;
      let color: string;
      let neutral: boolean;
      if (mode === "cooccurrence") {
        hatched = suppressed;
        text = suppressed ? SUPPRESSED_GLYPH : String(count);
        neutral = !significant;
        color = hatched ? NEUTRAL_COLOR
          : significant && ratio !== null ? ratioColor(ratio) : NEUTRAL_COLOR;
      } else {
        hatched = suppressed || !npmiDefined;
        text = hatched ? SUPPRESSED_GLYPH : fmt(npmiValue);
        neutral = !significant;
        color = hatched || !significant || npmiValue === null
          ? NEUTRAL_COLOR : npmiColor(npmiValue);
      }
      return { xLabel, yLabel, text, color, neutral, hatched, hover };
    }));
  return {
    kind: "heatmap",
    mode,
    xAttribute: co.x.attribute,
    yAttribute: co.y.attribute,
    xLabels: co.x.labels,
    yLabels: co.y.labels,
    cells,
  };
}

export interface PatchGridView {
  kind: "patches";
  binLabel: string;
  images: string[];        // data: URLs
  empty: boolean;
  message: string;
}

export function buildPatchGrid(doc: PatchGridDoc): PatchGridView {
  const images = doc.patches.map(
    (p) => `data:image/png;base64,${p.image_base64}`);
  return {
    kind: "patches",
    binLabel: doc.bin_label,
    images,
    empty: images.length === 0,
    message: images.length === 0 ? "no patches in this bin" : "",
  };
}

export interface ControlsView {
  attributeNames: string[];
  probabilityAttributes: string[];
  patchControlVisible: boolean;
  k: number;
}

/** The patch control exists only when the service was launched in trusted
 * mode; otherwise it is absent from the view tree entirely. */
export function buildControls(doc: AttributeListDoc): ControlsView {
  return {
    attributeNames: doc.attributes.map((a) => a.name),
    probabilityAttributes: doc.attributes
      .filter((a) => a.kind === "probability")
      .map((a) => a.name),
    patchControlVisible: doc.parameters.trusted_mode === true,
    k: doc.parameters.k,
  };
}

export interface SummaryRowView {
  attribute: string;
  cells: string[];
}

export interface SummaryView {
  kind: "summary";
  header: string[];
  rows: SummaryRowView[];
}

const SUMMARY_COLUMNS = ["group", "scope", "kind", "count", "missing",
                         "mean", "std", "median", "cardinality"] as const;

export function buildSummaryTable(doc: SummaryDoc): SummaryView {
  const rows = doc.rows.map((row) => ({
    attribute: row.attribute,
    cells: SUMMARY_COLUMNS.map((col) => {
      const value = (row as unknown as Record<string, unknown>)[col];
      if (value === null) return SUPPRESSED_GLYPH;
      if (value === undefined) return "";
      if (typeof value === "number" && !Number.isInteger(value)) {
        return value.toFixed(3);
      }
      return String(value);
    }),
  }));
  return { kind: "summary", header: [...SUMMARY_COLUMNS], rows };
}
