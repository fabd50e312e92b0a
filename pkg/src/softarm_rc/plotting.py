"""Plain SVG figures: input/response traces, target overlays, grid heatmaps, memory profiles."""

from html import escape

import numpy as np

# 12-step blue-white-red scale, low values blue
DIVERGING_12 = (
    "#053061", "#2166ac", "#4393c3", "#92c5de", "#d1e5f0", "#f0f4f7",
    "#f9efe9", "#fddbc7", "#f4a582", "#d6604d", "#b2182b", "#67001f",
)
LINE_COLORS = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
    "#a6761d", "#666666", "#1f78b4",
)


def _num(x):
    return f"{x:.2f}"


class Svg:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.items = []

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.items.append(
            f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>')

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0):
        self.items.append(
            f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
            f'stroke="{stroke}" stroke-width="{width}"/>')

    def polyline(self, xs, ys, stroke="#000", width=1.0):
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in zip(xs, ys))
        self.items.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def text(self, x, y, s, size=11, anchor="start", fill="#000"):
        self.items.append(
            f'<text x="{_num(x)}" y="{_num(y)}" font-size="{size}" text-anchor="{anchor}" '
            f'font-family="sans-serif" fill="{fill}">{escape(str(s))}</text>')

    def tostring(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = "\n".join(self.items)
        return f'{head}\n<rect width="100%" height="100%" fill="#fff"/>\n{body}\n</svg>\n'

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.tostring())


class _Panel:
    """Maps data coordinates into a rectangle of the canvas."""

    def __init__(self, svg, x, y, w, h, xlim, ylim):
        self.svg, self.x, self.y, self.w, self.h = svg, x, y, w, h
        lo, hi = ylim
        if hi - lo <= 0:
            lo, hi = lo - 0.5, hi + 0.5
        self.xlim, self.ylim = xlim, (lo, hi)
        svg.rect(x, y, w, h, "none", stroke="#444")

    def px(self, xv):
        lo, hi = self.xlim
        return self.x + (np.asarray(xv, dtype=float) - lo) / (hi - lo) * self.w

    def py(self, yv):
        lo, hi = self.ylim
        return self.y + self.h - (np.asarray(yv, dtype=float) - lo) / (hi - lo) * self.h

    def plot(self, xv, yv, color, width=1.0):
        self.svg.polyline(self.px(xv), self.py(yv), color, width)

    def label(self, text):
        self.svg.text(self.x + 4, self.y - 4, text)

    def yticks(self):
        lo, hi = self.ylim
        for v in (lo, hi):
            self.svg.text(self.x - 4, self.py(v) + 4, f"{v:.3g}", size=9, anchor="end")

    def xlabel(self, text):
        self.svg.text(self.x + self.w / 2, self.y + self.h + 28, text, anchor="middle")
        for v in self.xlim:
            self.svg.text(self.px(v), self.y + self.h + 13, f"{v:.3g}", size=9, anchor="middle")


def _limits(values):
    values = np.asarray(values, dtype=float)
    return float(values.min()), float(values.max())


def trace_svg(inputs, trace, path, max_steps=40, normalize=True):
    """Two panels: held input steps above, sensor series (z-scored) below."""
    u = np.asarray(getattr(inputs, "values", inputs), dtype=float)
    data = np.asarray(trace.data)
    steps = min(max_steps, data.shape[0])
    tau = trace.tau
    n_frag = data.shape[1]
    svg = Svg(720, 460)
    t_end = steps * tau
    top = _Panel(svg, 70, 30, 620, 140, (0.0, t_end), (0.0, 1.0))
    top.label("input u")
    top.yticks()
    xs = np.repeat(np.arange(steps + 1) * tau, 2)[1:-1]
    top.plot(xs, np.repeat(u[:steps], 2), "#000")

    series = data[:steps].reshape(steps * n_frag, data.shape[2])
    if normalize:
        std = series.std(axis=0)
        series = (series - series.mean(axis=0)) / np.where(std > 0, std, 1.0)
    times = trace.sample_times()[:steps].ravel()
    bottom = _Panel(svg, 70, 220, 620, 190, (0.0, t_end), _limits(series))
    bottom.label("normalized sensor values" if normalize else "sensor values [m]")
    bottom.yticks()
    bottom.xlabel("time [s]")
    for j in range(series.shape[1]):
        bottom.plot(times, series[:, j], LINE_COLORS[j % len(LINE_COLORS)])
    svg.write(path)


def overlay_svg(panels, path, title=""):
    """One row per entry of ``panels``: ``(label, target, output)`` over the same steps."""
    n = max(len(panels), 1)
    svg = Svg(720, 40 + 130 * n)
    if title:
        svg.text(360, 18, title, size=13, anchor="middle")
    for i, (label, target, output) in enumerate(panels):
        target = np.asarray(target, dtype=float)
        output = np.asarray(output, dtype=float)
        k = np.arange(target.size)
        lo, hi = _limits(np.concatenate([target, output]))
        panel = _Panel(svg, 70, 40 + 130 * i, 620, 95, (0.0, max(target.size - 1, 1)), (lo, hi))
        panel.label(f"{label}: target (black), output (red)")
        panel.yticks()
        panel.plot(k, target, "#000")
        panel.plot(k, output, "#c0392b")
    svg.write(path)


def color_for(value, lo, hi, palette=DIVERGING_12):
    if hi <= lo:
        return palette[len(palette) // 2]
    frac = (value - lo) / (hi - lo)
    return palette[min(int(frac * len(palette)), len(palette) - 1)]


def heatmap_svg(values, amplitudes, taus, path, title="", fmt="{:.3g}"):
    """Amplitude-by-timescale grid; ``values[(A, tau)]`` colours each cell (missing cells grey)."""
    amplitudes = list(amplitudes)
    taus = list(taus)
    cw, ch = 70, 40
    x0, y0 = 80, 50
    svg = Svg(x0 + cw * len(taus) + 150, y0 + ch * len(amplitudes) + 70)
    if title:
        svg.text(x0, 20, title, size=13)
    present = [v for v in values.values() if v is not None and np.isfinite(v)]
    lo, hi = (min(present), max(present)) if present else (0.0, 0.0)
    # largest amplitude on top
    for r, A in enumerate(reversed(amplitudes)):
        svg.text(x0 - 8, y0 + r * ch + ch / 2 + 4, f"A={A:g}", anchor="end")
        for c, tau in enumerate(taus):
            v = values.get((A, tau))
            ok = v is not None and np.isfinite(v)
            fill = color_for(v, lo, hi) if ok else "#bbbbbb"
            svg.rect(x0 + c * cw, y0 + r * ch, cw, ch, fill, stroke="#fff")
            dark = ok and hi > lo and abs((v - lo) / (hi - lo) - 0.5) > 0.3
            svg.text(x0 + c * cw + cw / 2, y0 + r * ch + ch / 2 + 4,
                     fmt.format(v) if ok else "n/a", size=10, anchor="middle",
                     fill="#fff" if dark else "#000")
    for c, tau in enumerate(taus):
        svg.text(x0 + c * cw + cw / 2, y0 + len(amplitudes) * ch + 16, f"{tau:g}", anchor="middle")
    svg.text(x0 + cw * len(taus) / 2, y0 + len(amplitudes) * ch + 36, "tau [s]", anchor="middle")

    lx = x0 + cw * len(taus) + 30
    if hi > lo:
        step = (len(amplitudes) * ch) / len(DIVERGING_12)
        for i, color in enumerate(reversed(DIVERGING_12)):
            svg.rect(lx, y0 + i * step, 18, step, color)
        svg.text(lx + 24, y0 + 10, f"max {fmt.format(hi)}", size=10)
        svg.text(lx + 24, y0 + len(amplitudes) * ch, f"min {fmt.format(lo)}", size=10)
    else:
        svg.rect(lx, y0, 18, 18, color_for(lo, lo, hi))
        svg.text(lx + 24, y0 + 14, fmt.format(lo) if present else "no data", size=10)
    svg.write(path)


def mf_profile_svg(mean, std, path, title=""):
    """Memory function against delay, with standard-deviation error bars."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    d = np.arange(mean.size)
    svg = Svg(720, 320)
    if title:
        svg.text(360, 18, title, size=13, anchor="middle")
    panel = _Panel(svg, 70, 40, 620, 220, (-0.5, max(mean.size - 0.5, 0.5)), (0.0, 1.0))
    panel.yticks()
    panel.xlabel("delay d [steps]")
    for di, m, s in zip(d, mean, std):
        x = float(panel.px(di))
        svg.line(x, float(panel.py(max(m - s, 0.0))), x, float(panel.py(min(m + s, 1.0))), "#888")
        svg.rect(x - 2, float(panel.py(m)) - 2, 4, 4, "#1f78b4")
    panel.plot(d, mean, "#1f78b4", 0.8)
    svg.write(path)
