import math
import xml.etree.ElementTree as ET

from ruledform.svg import Panel, Series, _nice_ticks, _range, render

NS = {"s": "http://www.w3.org/2000/svg"}


def test_render_is_valid_svg():
    doc = render([Panel("t", "x", "y", [Series("a", [0, 1, 2], [1, 4, 9])])], title="demo")
    root = ET.fromstring(doc)
    assert root.get("version") == "1.1"
    assert len(root.findall(".//s:polyline", NS)) == 1
    assert doc.endswith("</svg>\n")


def test_nan_breaks_polyline():
    s = Series("a", [0, 1, 2, 3, 4], [0, 1, math.nan, 3, 4])
    root = ET.fromstring(render([Panel("t", "x", "y", [s])]))
    lines = root.findall(".//s:polyline", NS)
    assert [len(ln.get("points").split()) for ln in lines] == [2, 2]


def test_all_nan_series_renders():
    s = Series("a", [0, 1], [math.nan, math.nan])
    ET.fromstring(render([Panel("t", "x", "y", [s])]))


def test_labels_escaped():
    doc = render([Panel("a < b & c", "x", "y", [])], title="<&>")
    ET.fromstring(doc)
    assert "&lt;&amp;&gt;" in doc


def test_two_panels_side_by_side():
    p = Panel("t", "x", "y", [Series("a", [0, 1], [0, 1])])
    root = ET.fromstring(render([p, p], panel_width=300))
    assert float(root.get("width")) == 600


def test_ticks_and_range():
    ticks = _nice_ticks(0, 1)
    assert len(ticks) == 6 and ticks[0] == 0 and abs(ticks[-1] - 1) < 1e-12
    assert _nice_ticks(2, 2) == [2]
    lo, hi = _range([3.0, 3.0])
    assert lo < 3 < hi
    assert _range([math.nan]) == (-1.0, 1.0)


def test_deterministic():
    p = Panel("t", "x", "y", [Series("a", [0.1, 0.2], [1 / 3, 2 / 3], dashed=True)])
    assert render([p]) == render([p])
