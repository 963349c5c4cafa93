import math

import pytest

from selfrepel.svgplot import line_plot


def test_line_plot_writes_valid_svg(tmp_path):
    out = tmp_path / "plot.svg"
    xs = [0.0, 1.0, 2.0, 3.0]
    ys = [0.0, 1.0, 0.5, 2.0]
    line_plot(out, [(xs, ys, "series")], title="demo", x_label="t", y_label="y")
    text = out.read_text()
    assert text.startswith("<svg")
    assert "polyline" in text and "demo" in text and "series" in text


def test_line_plot_skips_nonfinite_points(tmp_path):
    out = tmp_path / "plot.svg"
    line_plot(out, [([0, 1, 2], [1.0, math.inf, 2.0], "")])
    assert "inf" not in out.read_text().lower()


def test_line_plot_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        line_plot(tmp_path / "x.svg", [([], [], "")])


def test_line_plot_degenerate_ranges(tmp_path):
    out = tmp_path / "flat.svg"
    line_plot(out, [([1.0, 1.0], [2.0, 2.0], "")])
    assert out.exists()
