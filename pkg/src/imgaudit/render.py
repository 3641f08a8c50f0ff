"""Static SVG rendering of aggregates.

The renderer is a pure string builder with fixed-precision coordinates, so a
given aggregate document always produces byte-identical output. Heatmap cells
are colored by the real/expected ratio only where the discrepancy clears the
confidence mask; everything else stays neutral. Suppressed and undefined
cells are hatched and never carry a number.
"""

from __future__ import annotations

import math

from .errors import QueryError

FONT = "font-family=\"Helvetica, Arial, sans-serif\""
NEUTRAL = "#e0e0e0"
BAR_FILL = "#4878a8"
BOX_FILL = "#9ecae1"
HATCH_ID = "suppressed-hatch"


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _hatch_def() -> str:
    return (
        f'<defs><pattern id="{HATCH_ID}" width="6" height="6" '
        'patternUnits="userSpaceOnUse" patternTransform="rotate(45)">'
        '<rect width="6" height="6" fill="#f4f4f4"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#999999" stroke-width="2"/>'
        "</pattern></defs>"
    )


def _ratio_color(ratio: float) -> str:
    """Diverging scale on log2(ratio), clamped to [-2, 2]; >1 warm, <1 cool."""
    if ratio <= 0:
        return NEUTRAL
    t = max(-2.0, min(2.0, math.log2(ratio))) / 2.0
    if t >= 0:
        r, g, b = 230, int(150 - 110 * t), int(110 - 80 * t)
    else:
        r, g, b = int(110 + 80 * t), int(150 + 110 * t), 230
    return f"#{r:02x}{g:02x}{b:02x}"


def _diverging_color(value: float) -> str:
    """Scale for values in [-1, 1]."""
    t = max(-1.0, min(1.0, value))
    if t >= 0:
        r, g, b = 230, int(150 - 110 * t), int(110 - 80 * t)
    else:
        r, g, b = int(110 + 80 * t), int(150 + 110 * t), 230
    return f"#{r:02x}{g:02x}{b:02x}"


def render_chart(aggregate: dict) -> str:
    """SVG for a distribution, boxplot, co-occurrence, or nPMI document."""
    kind = aggregate.get("type")
    if kind == "distribution":
        return _render_distribution(aggregate)
    if kind == "boxplot":
        return _render_boxplot(aggregate)
    if kind == "cooccurrence":
        return _render_heatmap(aggregate, mode="cooccurrence")
    if kind == "npmi":
        return _render_heatmap(aggregate, mode="npmi")
    raise QueryError(f"cannot render aggregate type {kind!r}")


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">')
    return "\n".join([head, _hatch_def(), *body, "</svg>"]) + "\n"


def _panel_bars(parts: list[str], x0: float, y0: float, w: float, h: float,
                labels: list[str], counts: list, title: str) -> None:
    known = [c for c in counts if c is not None]
    peak = max(known) if known else 1
    peak = max(peak, 1)
    n = max(len(labels), 1)
    slot = w / n
    bar_w = slot * 0.8
    if title:
        parts.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 - 6)}" '
                     f'text-anchor="middle" font-size="11" {FONT}>{_esc(title)}</text>')
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0 + h)}" x2="{_fmt(x0 + w)}" '
                 f'y2="{_fmt(y0 + h)}" stroke="#333333"/>')
    for i, label in enumerate(labels):
        cx = x0 + slot * i + slot * 0.1
        count = counts[i] if i < len(counts) else 0
        if count is None:
            bh = h * 0.12
            parts.append(f'<rect x="{_fmt(cx)}" y="{_fmt(y0 + h - bh)}" '
                         f'width="{_fmt(bar_w)}" height="{_fmt(bh)}" '
                         f'fill="url(#{HATCH_ID})" stroke="#999999"/>')
        else:
            bh = h * (count / peak)
            parts.append(f'<rect x="{_fmt(cx)}" y="{_fmt(y0 + h - bh)}" '
                         f'width="{_fmt(bar_w)}" height="{_fmt(bh)}" '
                         f'fill="{BAR_FILL}"/>')
            parts.append(f'<text x="{_fmt(cx + bar_w / 2)}" y="{_fmt(y0 + h - bh - 3)}" '
                         f'text-anchor="middle" font-size="9" {FONT}>{count}</text>')
        parts.append(f'<text x="{_fmt(cx + bar_w / 2)}" y="{_fmt(y0 + h + 12)}" '
                     f'text-anchor="middle" font-size="8" {FONT}>{_esc(label)}</text>')


def _render_distribution(doc: dict) -> str:
    labels = list(doc.get("labels", ()))
    cells = doc.get("cells", [])
    panel_w = max(280, 34 * max(len(labels), 1))
    panel_h = 160
    pad = 40
    n_panels = max(len(cells), 1)
    per_row = max(1, min(3, n_panels))
    rows = (n_panels + per_row - 1) // per_row
    width = pad * 2 + per_row * (panel_w + pad)
    height = pad * 2 + rows * (panel_h + pad + 20)

    parts: list[str] = []
    parts.append(f'<text x="{pad}" y="20" font-size="13" {FONT}>'
                 f'{_esc(doc.get("attribute", ""))}</text>')
    for i, cell in enumerate(cells):
        col, row = i % per_row, i // per_row
        x0 = pad + col * (panel_w + pad)
        y0 = pad + 20 + row * (panel_h + pad + 20)
        coords = cell.get("coords", [])
        title = " / ".join(coords) if coords else ""
        _panel_bars(parts, x0, y0, panel_w, panel_h, labels,
                    list(cell.get("counts", [])), title)
    return _svg(width, height, parts)


def _render_boxplot(doc: dict) -> str:
    width, height = 420, 130
    lo, hi = doc["whisker_low"], doc["whisker_high"]
    span = (doc["max"] - doc["min"]) or 1.0
    x = lambda v: 40 + 340 * (v - doc["min"]) / span  # noqa: E731
    mid_y, half = 65, 18
    parts = [
        f'<text x="40" y="20" font-size="13" {FONT}>{_esc(doc.get("attribute", ""))}</text>',
        f'<line x1="{_fmt(x(lo))}" y1="{mid_y}" x2="{_fmt(x(doc["q1"]))}" '
        f'y2="{mid_y}" stroke="#333333"/>',
        f'<line x1="{_fmt(x(doc["q3"]))}" y1="{mid_y}" x2="{_fmt(x(hi))}" '
        f'y2="{mid_y}" stroke="#333333"/>',
        f'<rect x="{_fmt(x(doc["q1"]))}" y="{mid_y - half}" '
        f'width="{_fmt(max(x(doc["q3"]) - x(doc["q1"]), 1.0))}" height="{half * 2}" '
        f'fill="{BOX_FILL}" stroke="#333333"/>',
        f'<line x1="{_fmt(x(doc["median"]))}" y1="{mid_y - half}" '
        f'x2="{_fmt(x(doc["median"]))}" y2="{mid_y + half}" stroke="#333333" '
        'stroke-width="2"/>',
    ]
    for v in (lo, hi):
        parts.append(f'<line x1="{_fmt(x(v))}" y1="{mid_y - 10}" x2="{_fmt(x(v))}" '
                     f'y2="{mid_y + 10}" stroke="#333333"/>')
    outliers = doc.get("outlier_count")
    note = "suppressed" if outliers is None else str(outliers)
    parts.append(f'<text x="40" y="115" font-size="10" {FONT}>'
                 f'min {_fmt(doc["min"])}  q1 {_fmt(doc["q1"])}  median '
                 f'{_fmt(doc["median"])}  q3 {_fmt(doc["q3"])}  max {_fmt(doc["max"])}  '
                 f'outliers {note}</text>')
    return _svg(width, height, parts)


def _render_heatmap(doc: dict, mode: str) -> str:
    x_labels = doc["x"]["labels"]
    y_labels = doc["y"]["labels"]
    cell = 46
    left, top = 130, 110
    width = left + cell * len(y_labels) + 20
    height = top + cell * len(x_labels) + 20
    parts: list[str] = []
    title = f'{doc["x"]["attribute"]} x {doc["y"]["attribute"]} ({mode})'
    parts.append(f'<text x="20" y="24" font-size="13" {FONT}>{_esc(title)}</text>')

    for j, label in enumerate(y_labels):
        cx = left + cell * j + cell / 2
        parts.append(f'<text x="{_fmt(cx)}" y="{top - 8}" text-anchor="end" '
                     f'font-size="8" {FONT} transform="rotate(-45 {_fmt(cx)} '
                     f'{top - 8})">{_esc(label)}</text>')
    for i, label in enumerate(x_labels):
        cy = top + cell * i + cell / 2 + 3
        parts.append(f'<text x="{left - 6}" y="{_fmt(cy)}" text-anchor="end" '
                     f'font-size="8" {FONT}>{_esc(label)}</text>')

    suppressed = doc.get("suppressed")
    for i in range(len(x_labels)):
        for j in range(len(y_labels)):
            x0, y0 = left + cell * j, top + cell * i
            hidden = bool(suppressed[i][j]) if suppressed else False
            if mode == "cooccurrence":
                count = doc["counts"][i][j]
                ratio = doc["ratio"][i][j]
                significant = doc["significant"][i][j]
                if hidden or count is None:
                    fill, text = f"url(#{HATCH_ID})", ""
                elif significant and ratio is not None:
                    fill, text = _ratio_color(ratio), str(count)
                else:
                    fill, text = NEUTRAL, str(count)
            else:
                value = doc["values"][i][j]
                defined = doc["defined"][i][j]
                if hidden or not defined or value is None:
                    fill, text = f"url(#{HATCH_ID})", ""
                else:
                    fill, text = _diverging_color(value), f"{value:.2f}"
            parts.append(f'<rect x="{x0}" y="{y0}" width="{cell}" height="{cell}" '
                         f'fill="{fill}" stroke="#ffffff"/>')
            if text:
                parts.append(f'<text x="{_fmt(x0 + cell / 2)}" y="{_fmt(y0 + cell / 2 + 3)}" '
                             f'text-anchor="middle" font-size="9" {FONT}>{text}</text>')
    return _svg(width, height, parts)
