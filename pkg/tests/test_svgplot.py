import xml.etree.ElementTree as ET

import numpy as np

from subspace_dr.svgplot import Series, heatmap, line_plot, scatter_plot, write_svg

NS = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg.encode())


def test_line_plot_is_valid_and_deterministic():
    s = [Series("a", [1, 2, 3], [1.0, 0.1, 0.01]), Series("b & c", [1, 2, 3], [2, 1, 0.5])]
    a = line_plot(s, "title <x>", "n", "err", logy=True)
    b = line_plot([Series("a", [1, 2, 3], [1.0, 0.1, 0.01]), Series("b & c", [1, 2, 3], [2, 1, 0.5])],
                  "title <x>", "n", "err", logy=True)
    assert a == b
    root = parse(a)
    assert len(root.findall(f"{NS}polyline")) == 2


def test_log_axis_skips_nonpositive_values():
    svg = line_plot([Series("z", [0, 1, 2], [0.0, 1.0, 0.1])], logy=True)
    pts = parse(svg).find(f"{NS}polyline").get("points").split()
    assert len(pts) == 2


def test_scatter_counts_points():
    svg = scatter_plot([Series("p", np.arange(5), np.arange(1, 6))], xlim=(0, 10))
    assert len(parse(svg).findall(f"{NS}circle")) == 5


def test_heatmap_cells(tmp_path):
    vals = np.arange(6, dtype=float).reshape(2, 3)
    svg = heatmap(vals, [1, 2, 3], [0.0, 1.0], "h")
    # background, frame, 6 cells and an 11-step colour bar
    assert len(parse(svg).findall(f"{NS}rect")) == 2 + 6 + 11
    p = write_svg(tmp_path / "h.svg", svg)
    assert p.read_text() == svg


def test_empty_series_renders():
    parse(line_plot([], "empty"))
