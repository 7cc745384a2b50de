"""
Standalone SVG line plots of trajectory columns
Output bytes depend only on the input series and style.
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

from .exceptions import EmptySeries, InvalidParameterError, OutputError
from .utils import ensure_directory

logger = logging.getLogger(__name__)

Series = Tuple[str, Sequence[float], Sequence[float]]

PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf')


@dataclass(frozen=True)
class PlotStyle:
    """Size, margins and labels of a plot"""
    width: int = 640
    height: int = 400
    margin_left: int = 70
    margin_right: int = 20
    margin_top: int = 40
    margin_bottom: int = 50
    title: str = ''
    x_label: str = 't'
    y_label: str = ''
    max_points: int = 4000
    tick_count: int = 6
    stroke_width: float = 1.5

    @property
    def plot_width(self) -> int:
        return self.width - self.margin_left - self.margin_right

    @property
    def plot_height(self) -> int:
        return self.height - self.margin_top - self.margin_bottom


class SvgCanvas:
    """Accumulates SVG elements into a string"""

    def __init__(self, width: int, height: int):
        self.svg = ""
        self.width = width
        self.height = height
        self.header()

    def header(self):
        self.svg += (
            '<?xml version="1.0" standalone="no"?>\n'
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
            '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke='black', extra=""):
        self.svg += (f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                     f'stroke="{stroke}" {extra}/>\n')

    def polyline(self, points: np.ndarray, stroke: str, width: float):
        coords = ' '.join(f'{x:.2f},{y:.2f}' for x, y in points)
        self.svg += (f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                     f'stroke-width="{width:g}"/>\n')

    def text(self, x, y, string, anchor='middle', extra=""):
        self.svg += (f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" '
                     f'font-family="sans-serif" font-size="12" {extra}>{escape(string)}</text>\n')

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"


def nice_ticks(low: float, high: float, count: int = 6) -> List[float]:
    """Round tick positions (steps of 1, 2 or 5 times a power of ten) covering [low, high]."""
    span = high - low
    if span <= 0:
        return [low]
    raw = span / max(count - 1, 1)
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = next(m * magnitude for m in (1, 2, 5, 10) if m * magnitude >= raw)
    first = math.ceil(low / step - 1e-9)
    last = math.floor(high / step + 1e-9)
    ticks = []
    for k in range(first, last + 1):
        value = round(k * step, 12)
        ticks.append(0.0 if value == 0 else value)
    return ticks


def _decimate(t: np.ndarray, values: np.ndarray, max_points: int) -> Tuple[np.ndarray, np.ndarray]:
    if len(t) <= max_points:
        return t, values
    stride = math.ceil(len(t) / max_points)
    index = np.arange(0, len(t), stride)
    if index[-1] != len(t) - 1:
        index = np.append(index, len(t) - 1)
    return t[index], values[index]


def _checked(series: Sequence[Series]) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    if not series:
        raise EmptySeries("plot series")
    checked = []
    for label, t, values in series:
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.size == 0 or t.shape != values.shape:
            raise EmptySeries(f"series '{label}'")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(values))):
            raise InvalidParameterError('series', label, "Plot values must be finite")
        checked.append((str(label), t, values))
    return checked


def render_svg_plot(series: Sequence[Series], style: Optional[PlotStyle] = None) -> str:
    """
    Draw one polyline per series with axes, ticks and a legend

    Args:
        series: (label, t, values) triples
        style: Plot styling

    Returns:
        The SVG document

    Raises:
        EmptySeries: If there is nothing to draw
    """
    style = style or PlotStyle()
    data = _checked(series)

    x_low = min(float(t.min()) for _, t, _ in data)
    x_high = max(float(t.max()) for _, t, _ in data)
    y_low = min(float(v.min()) for _, _, v in data)
    y_high = max(float(v.max()) for _, _, v in data)
    if x_high == x_low:
        x_low, x_high = x_low - 1.0, x_high + 1.0
    if y_high == y_low:
        y_low, y_high = y_low - 1.0, y_high + 1.0
    pad = 0.05 * (y_high - y_low)
    y_low, y_high = y_low - pad, y_high + pad

    left, top = style.margin_left, style.margin_top
    right, bottom = left + style.plot_width, top + style.plot_height

    def x_pos(x):
        return left + (x - x_low) / (x_high - x_low) * style.plot_width

    def y_pos(y):
        return bottom - (y - y_low) / (y_high - y_low) * style.plot_height

    canvas = SvgCanvas(style.width, style.height)

    for tick in nice_ticks(x_low, x_high, style.tick_count):
        x = x_pos(tick)
        canvas.line(x, bottom, x, bottom + 5)
        canvas.text(x, bottom + 18, f"{tick:g}")
    for tick in nice_ticks(y_low, y_high, style.tick_count):
        y = y_pos(tick)
        canvas.line(left - 5, y, left, y)
        canvas.text(left - 8, y + 4, f"{tick:g}", anchor='end')

    if y_low < 0.0 < y_high:
        zero = y_pos(0.0)
        canvas.line(left, zero, right, zero, stroke='#999999', extra='stroke-dasharray="4,3"')

    canvas.line(left, bottom, right, bottom)
    canvas.line(left, top, left, bottom)

    for index, (label, t, values) in enumerate(data):
        t, values = _decimate(t, values, style.max_points)
        points = np.column_stack([x_pos(t), y_pos(values)])
        canvas.polyline(points, PALETTE[index % len(PALETTE)], style.stroke_width)

    for index, (label, _, _) in enumerate(data):
        y = top + 14 + 16 * index
        color = PALETTE[index % len(PALETTE)]
        canvas.line(right - 150, y - 4, right - 125, y - 4, stroke=color, extra='stroke-width="2"')
        canvas.text(right - 120, y, label, anchor='start')

    if style.title:
        canvas.text(style.width / 2.0, top - 15, style.title)
    canvas.text((left + right) / 2.0, style.height - 10, style.x_label)
    if style.y_label:
        y_mid = (top + bottom) / 2.0
        canvas.text(16, y_mid, style.y_label, extra=f'transform="rotate(-90 16 {y_mid:.2f})"')

    return canvas.get_svg()


def write_svg_plot(series: Sequence[Series], destination: Union[str, Path],
                   style: Optional[PlotStyle] = None) -> Path:
    """
    Render and write a plot, overwriting any existing file

    Raises:
        EmptySeries: If there is nothing to draw
        OutputError: If the file cannot be written
    """
    document = render_svg_plot(series, style)
    path = Path(destination)
    try:
        ensure_directory(path.parent)
        path.write_text(document, encoding='utf-8')
    except OSError as e:
        raise OutputError(str(path), e) from e
    logger.info(f"Wrote plot {path}")
    return path
