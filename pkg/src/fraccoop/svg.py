"""Minimal native SVG plots: time series panels, phase portraits, envelopes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
PANEL_W = 420
PANEL_H = 280
PAD = dict(left=62, right=16, top=30, bottom=42)
MAX_POINTS = 1500


def _decimate(x, y, limit=MAX_POINTS):
    """Thin a curve for plotting; log-spaced indices keep early-time detail."""
    n = len(x)
    if n <= limit:
        return x, y
    idx = np.unique(np.concatenate([np.linspace(0, n - 1, limit // 2), np.geomspace(1, n, limit // 2) - 1]).astype(int))
    return x[idx], y[idx]


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = np.arange(start, hi + 0.5 * step, step)
    return [float(t) for t in ticks if lo - 1e-12 <= t <= hi + 1e-12]


def _fmt_tick(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:g}"


@dataclass
class Curve:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str = COLORS[0]
    dashed: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    curves: list = field(default_factory=list)
    loglog: bool = False

    def _transform(self, v):
        v = np.asarray(v, dtype=float)
        if self.loglog:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log10(v)
        return v

    def render(self, ox: float, oy: float) -> str:
        xs, ys = [], []
        for c in self.curves:
            x, y = self._transform(c.x), self._transform(c.y)
            ok = np.isfinite(x) & np.isfinite(y)
            xs.append(x[ok])
            ys.append(y[ok])
        allx = np.concatenate(xs) if xs else np.zeros(1)
        ally = np.concatenate(ys) if ys else np.zeros(1)
        if allx.size == 0:
            allx = ally = np.zeros(1)
        x0, x1 = float(allx.min()), float(allx.max())
        y0, y1 = float(ally.min()), float(ally.max())
        if x1 <= x0:
            x1 = x0 + 1.0
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y0 + 0.5
        ypad = 0.05 * (y1 - y0)
        y0, y1 = y0 - ypad, y1 + ypad

        left, top = ox + PAD["left"], oy + PAD["top"]
        w = PANEL_W - PAD["left"] - PAD["right"]
        h = PANEL_H - PAD["top"] - PAD["bottom"]

        def sx(v):
            return left + (v - x0) / (x1 - x0) * w

        def sy(v):
            return top + h - (v - y0) / (y1 - y0) * h

        out = [f'<rect x="{left:.1f}" y="{top:.1f}" width="{w:.1f}" height="{h:.1f}" fill="none" stroke="#444"/>']
        out.append(f'<text x="{ox + PANEL_W / 2:.1f}" y="{oy + 18:.1f}" text-anchor="middle" font-size="13">{_esc(self.title)}</text>')
        for t in _nice_ticks(x0, x1):
            px = sx(t)
            label = _fmt_tick(10**t) if self.loglog else _fmt_tick(t)
            out.append(f'<line x1="{px:.1f}" y1="{top + h:.1f}" x2="{px:.1f}" y2="{top + h + 4:.1f}" stroke="#444"/>')
            out.append(f'<text x="{px:.1f}" y="{top + h + 16:.1f}" text-anchor="middle" font-size="10">{label}</text>')
        for t in _nice_ticks(y0, y1):
            py = sy(t)
            label = _fmt_tick(10**t) if self.loglog else _fmt_tick(t)
            out.append(f'<line x1="{left - 4:.1f}" y1="{py:.1f}" x2="{left:.1f}" y2="{py:.1f}" stroke="#444"/>')
            out.append(f'<text x="{left - 6:.1f}" y="{py + 3:.1f}" text-anchor="end" font-size="10">{label}</text>')
        out.append(f'<text x="{left + w / 2:.1f}" y="{oy + PANEL_H - 8:.1f}" text-anchor="middle" font-size="11">{_esc(self.xlabel)}</text>')
        out.append(
            f'<text x="{ox + 14:.1f}" y="{top + h / 2:.1f}" text-anchor="middle" font-size="11" '
            f'transform="rotate(-90 {ox + 14:.1f} {top + h / 2:.1f})">{_esc(self.ylabel)}</text>'
        )

        for c, x, y in zip(self.curves, xs, ys):
            x, y = _decimate(x, y)
            if x.size == 0:
                continue
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            dash = ' stroke-dasharray="6,4"' if c.dashed else ""
            out.append(f'<polyline points="{pts}" fill="none" stroke="{c.color}" stroke-width="1.5"{dash}/>')

        labelled = [c for c in self.curves if c.label]
        for k, c in enumerate(labelled):
            ly = top + 12 + 14 * k
            dash = ' stroke-dasharray="6,4"' if c.dashed else ""
            out.append(f'<line x1="{left + w - 90:.1f}" y1="{ly:.1f}" x2="{left + w - 70:.1f}" y2="{ly:.1f}" stroke="{c.color}" stroke-width="1.5"{dash}/>')
            out.append(f'<text x="{left + w - 66:.1f}" y="{ly + 3:.1f}" font-size="10">{_esc(c.label)}</text>')
        return "\n".join(out)


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render(panels: list[Panel], columns: int = 2) -> str:
    columns = max(1, min(columns, len(panels)))
    rows = math.ceil(len(panels) / columns)
    width, height = columns * PANEL_W, rows * PANEL_H
    body = []
    for k, panel in enumerate(panels):
        r, c = divmod(k, columns)
        body.append(panel.render(c * PANEL_W, r * PANEL_H))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n"
    )


def trajectory_panels(times, states, envelope: Optional[np.ndarray] = None, title: str = "", loglog: bool = False) -> list[Panel]:
    """One time-series panel per component; d = 2 adds a phase portrait.

    ``envelope`` (same shape as ``states``) is overlaid dashed.
    """
    times = np.asarray(times, dtype=float)
    states = np.atleast_2d(np.asarray(states, dtype=float))
    d = states.shape[1]
    prefix = f"{title}: " if title else ""
    panels = []
    for i in range(d):
        color = COLORS[i % len(COLORS)]
        curves = [Curve(times, states[:, i], f"w{i + 1}", color)]
        if envelope is not None:
            curves.append(Curve(times, envelope[:, i], "envelope", "#555555", dashed=True))
        panels.append(Panel(f"{prefix}w{i + 1}(t)", "t", f"w{i + 1}", curves, loglog))
    if d == 2:
        panels.append(Panel(f"{prefix}phase portrait", "w1", "w2", [Curve(states[:, 0], states[:, 1], color=COLORS[0])]))
    return panels


def write_svg(path, panels: list[Panel], columns: int = 2) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(render(panels, columns))
