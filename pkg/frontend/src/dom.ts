// HTML renderers for the view models. Pure string builders so the same code
// runs in tests (node) and in the browser via innerHTML.

import {
  HeatmapView,
  HistogramView,
  PatchGridView,
  SummaryView,
  NEUTRAL_COLOR,
} from "./views.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderHistogram(view: HistogramView): string {
  const panels = view.panels.map((panel) => {
    const bars = panel.bars.map((bar) => {
      const height = Math.round(bar.heightFrac * 120);
      const cls = bar.suppressed ? "bar suppressed" : "bar";
      return `<div class="bar-slot">`
        + `<span class="bar-count">${esc(bar.countLabel)}</span>`
        + `<div class="${cls}" style="height:${height}px"></div>`
        + `<span class="bar-label">${esc(bar.label)}</span>`
        + `</div>`;
    }).join("");
    const missing = panel.missingSuppressed ? "∗" : String(panel.missing);
    const title = panel.title ? `<h3>${esc(panel.title)}</h3>` : "";
    return `<div class="panel">${title}<div class="bars">${bars}</div>`
      + `<div class="missing">missing: ${esc(missing)}</div></div>`;
  }).join("");
  return `<div class="histogram"><h2>${esc(view.caption)}</h2>${panels}</div>`;
}

export function renderHeatmap(view: HeatmapView): string {
  const header = `<tr><th></th>${view.yLabels.map(
    (l) => `<th>${esc(l)}</th>`).join("")}</tr>`;
  const rows = view.cells.map((row, i) => {
    const cells = row.map((cell) => {
      const cls = cell.hatched ? "cell hatched" : cell.neutral ? "cell neutral" : "cell";
      const style = cell.hatched ? "" : ` style="background:${cell.color}"`;
      return `<td class="${cls}"${style} title="${esc(cell.hover)}">`
        + `${esc(cell.text)}</td>`;
    }).join("");
    return `<tr><th>${esc(view.xLabels[i])}</th>${cells}</tr>`;
  }).join("");
  return `<table class="heatmap" data-mode="${view.mode}">${header}${rows}</table>`;
}

export function renderPatches(view: PatchGridView): string {
  if (view.empty) {
    return `<div class="patches empty">${esc(view.message)}</div>`;
  }
  const imgs = view.images.map((src) => `<img src="${src}" alt="skin patch">`).join("");
  return `<div class="patches"><h3>${esc(view.binLabel)}</h3>${imgs}</div>`;
}

export function renderSummary(view: SummaryView): string {
  const head = `<tr><th>attribute</th>${view.header.map(
    (h) => `<th>${esc(h)}</th>`).join("")}</tr>`;
  const rows = view.rows.map((row) =>
    `<tr><th>${esc(row.attribute)}</th>${row.cells.map(
      (c) => `<td>${esc(c)}</td>`).join("")}</tr>`).join("");
  return `<table class="summary">${head}${rows}</table>`;
}

export const BASE_STYLE = `
.histogram .bars { display: flex; align-items: flex-end; gap: 6px; }
.bar-slot { display: flex; flex-direction: column; align-items: center; }
.bar { width: 26px; background: #4878a8; }
.bar.suppressed { background: repeating-linear-gradient(45deg, #f4f4f4,
  #f4f4f4 4px, #999 4px, #999 6px); height: 14px !important; }
.heatmap td.cell { width: 46px; height: 38px; text-align: center; }
.heatmap td.neutral { background: ${NEUTRAL_COLOR}; }
.heatmap td.hatched { background: repeating-linear-gradient(45deg, #f4f4f4,
  #f4f4f4 4px, #999 4px, #999 6px); color: transparent; }
.patches img { width: 48px; height: 48px; margin: 2px; }
`;
