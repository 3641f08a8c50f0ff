import re
from pathlib import Path

import pytest

from conftest import make_dataset, make_sample
from imgaudit.aggregate import boxplot_from_values, cooccurrence, distribution, npmi
from imgaudit.errors import QueryError
from imgaudit.privacy import privacy_floor
from imgaudit.render import render_chart

GOLDEN = Path(__file__).parent / "golden"


def fixed_distribution(schema):
    ds = make_dataset([
        make_sample(f"x{i:02d}", {"scene_class": ["bedroom", "beach", "street"][i % 3]})
        for i in range(30)])
    return privacy_floor(distribution(ds, schema, "scene_class"), 5)


def test_histogram_has_one_bar_and_label_per_class(schema):
    doc = fixed_distribution(schema)
    svg = render_chart(doc)
    bars = re.findall(r'<rect[^>]*fill="#4878a8"', svg)
    assert len(bars) == len(doc["labels"])
    for count in doc["cells"][0]["counts"]:
        assert f">{count}</text>" in svg


def test_suppressed_bar_is_hatched_without_number(schema):
    ds = make_dataset(
        [make_sample(f"x{i:02d}", {"scene_class": "common"}) for i in range(20)]
        + [make_sample(f"y{i}", {"scene_class": "rare"}) for i in range(2)])
    doc = privacy_floor(distribution(ds, schema, "scene_class"), 5)
    svg = render_chart(doc)
    assert "url(#suppressed-hatch)" in svg
    assert ">2</text>" not in svg


def test_all_nonsignificant_heatmap_is_neutral(schema):
    # a perfectly balanced table has zero discrepancy everywhere
    samples = []
    i = 0
    for sx in ("s0", "s1"):
        for sy in ("m0", "m1"):
            for _ in range(25):
                samples.append(make_sample(f"x{i:03d}",
                                           {"scene_class": sx, "colormode": sy}))
                i += 1
    ds = make_dataset(samples)
    matrix = cooccurrence(ds, schema, "scene_class", "colormode")
    assert not matrix.significant.any()
    svg = render_chart(privacy_floor(matrix, 5))
    cell_fills = re.findall(r'<rect x="\d+" y="\d+" width="46" height="46" '
                            r'fill="([^"]+)"', svg)
    assert cell_fills and set(cell_fills) == {"#e0e0e0"}


def test_significant_cells_get_ratio_color(schema):
    samples = []
    i = 0
    for sx, sy, n in (("s0", "m0", 60), ("s0", "m1", 10),
                      ("s1", "m0", 10), ("s1", "m1", 60)):
        for _ in range(n):
            samples.append(make_sample(f"x{i:03d}",
                                       {"scene_class": sx, "colormode": sy}))
            i += 1
    ds = make_dataset(samples)
    matrix = cooccurrence(ds, schema, "scene_class", "colormode")
    assert matrix.significant.any()
    svg = render_chart(privacy_floor(matrix, 5))
    cell_fills = re.findall(r'<rect x="\d+" y="\d+" width="46" height="46" '
                            r'fill="([^"]+)"', svg)
    assert any(f != "#e0e0e0" for f in cell_fills)


def test_npmi_undefined_cells_hatched_without_label(schema):
    ds = make_dataset([
        make_sample(f"a{i}", {"scene_class": "s0", "colormode": "m0"})
        for i in range(6)
    ] + [
        make_sample(f"b{i}", {"scene_class": "s1", "colormode": "m1"})
        for i in range(6)
    ])
    matrix = npmi(ds, schema, "scene_class", "colormode")
    svg = render_chart(privacy_floor(matrix, 5))
    assert "url(#suppressed-hatch)" in svg


def test_boxplot_renders_summary_line():
    box = boxplot_from_values("luminance", [float(v) for v in range(1, 101)])
    svg = render_chart(privacy_floor(box, 5))
    assert "median 50.5" in svg


def test_unsupported_type_rejected():
    with pytest.raises(QueryError):
        render_chart({"type": "mystery"})


def test_rendering_is_deterministic(schema):
    doc = fixed_distribution(schema)
    assert render_chart(doc) == render_chart(doc)


def test_golden_distribution(schema):
    svg = render_chart(fixed_distribution(schema))
    golden = (GOLDEN / "distribution.svg").read_text()
    assert svg == golden


def test_golden_heatmap(schema):
    samples = []
    i = 0
    for sx, sy, n in (("s0", "m0", 60), ("s0", "m1", 10),
                      ("s1", "m0", 10), ("s1", "m1", 60)):
        for _ in range(n):
            samples.append(make_sample(f"x{i:03d}",
                                       {"scene_class": sx, "colormode": sy}))
            i += 1
    ds = make_dataset(samples)
    doc = privacy_floor(cooccurrence(ds, schema, "scene_class", "colormode"), 5)
    golden = (GOLDEN / "heatmap.svg").read_text()
    assert render_chart(doc) == golden
