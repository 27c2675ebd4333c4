"""Minimal deterministic SVG emission: line plots and heat maps.

Output depends only on the input data (fixed float formatting, no
timestamps), so identical inputs give byte-identical files.
"""

from __future__ import annotations

import numpy as np

__all__ = ["line_plot", "heat_map"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 20, 45
_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 5):
    if not np.isfinite(lo) or not np.isfinite(hi) or lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    raw = np.linspace(lo, hi, n)
    return [float(t) for t in raw]


def _axes(x_lo, x_hi, y_lo, y_hi, x_label, y_label):
    px = lambda x: _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)
    py = lambda y: _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)
    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{_W-_ML-_MR}" height="{_H-_MT-_MB}" '
        'fill="none" stroke="#333" stroke-width="1"/>'
    ]
    for t in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{_fmt(px(t))}" y1="{_H-_MB}" x2="{_fmt(px(t))}" y2="{_H-_MB+4}" stroke="#333"/>'
            f'<text x="{_fmt(px(t))}" y="{_H-_MB+16}" font-size="10" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{_ML-4}" y1="{_fmt(py(t))}" x2="{_ML}" y2="{_fmt(py(t))}" stroke="#333"/>'
            f'<text x="{_ML-7}" y="{_fmt(py(t))}" font-size="10" text-anchor="end" dominant-baseline="middle">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{(_ML+_W-_MR)/2}" y="{_H-8}" font-size="12" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{(_MT+_H-_MB)/2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {(_MT+_H-_MB)/2})">{y_label}</text>'
    )
    return parts, px, py


def line_plot(series: dict, x_label: str = "", y_label: str = "") -> str:
    """Render named (x, y) series as polylines. Empty series give axes only."""
    xs = [np.asarray(x, dtype=float) for x, _ in series.values()]
    ys = [np.asarray(y, dtype=float) for _, y in series.values()]
    finite_x = np.concatenate([x[np.isfinite(x)] for x in xs]) if xs else np.array([])
    finite_y = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([])
    x_lo, x_hi = (finite_x.min(), finite_x.max()) if finite_x.size else (0.0, 1.0)
    y_lo, y_hi = (finite_y.min(), finite_y.max()) if finite_y.size else (0.0, 1.0)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    parts, px, py = _axes(x_lo, x_hi, y_lo, y_hi, x_label, y_label)
    for i, (name, (x, y)) in enumerate(series.items()):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        good = np.isfinite(x) & np.isfinite(y)
        if not good.any():
            continue
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x[good], y[good]))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{_W-_MR-6}" y="{_MT+14+13*i}" font-size="11" text-anchor="end" '
            f'fill="{color}">{name}</text>'
        )
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n{body}\n</svg>\n'
    )


def _diverging_color(v: float) -> str:
    """Blue (−1) → white (0) → red (+1)."""
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        r, g, b = 255, int(round(255 * (1 - v))), int(round(255 * (1 - v)))
    else:
        r, g, b = int(round(255 * (1 + v))), int(round(255 * (1 + v))), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heat_map(
    field: np.ndarray,
    extent: tuple,
    x_label: str = "",
    y_label: str = "",
    max_cells: int = 120,
) -> str:
    """Render a 2D field (axis 0 = x) as colored cells, downsampled to max_cells.

    Color is symmetric around zero so Wigner negativity shows in blue.
    """
    field = np.asarray(field, dtype=float)
    nx, ny = field.shape
    sx = max(1, int(np.ceil(nx / max_cells)))
    sy = max(1, int(np.ceil(ny / max_cells)))
    fx = nx // sx * sx
    fy = ny // sy * sy
    coarse = field[:fx, :fy].reshape(fx // sx, sx, fy // sy, sy).mean(axis=(1, 3))
    scale = np.max(np.abs(coarse)) or 1.0
    x_lo, x_hi, y_lo, y_hi = extent
    parts, px, py = _axes(x_lo, x_hi, y_lo, y_hi, x_label, y_label)
    cw = (px(x_hi) - px(x_lo)) / coarse.shape[0]
    ch = (py(y_lo) - py(y_hi)) / coarse.shape[1]
    for i in range(coarse.shape[0]):
        x0 = px(x_lo) + i * cw
        for j in range(coarse.shape[1]):
            y0 = py(y_lo) - (j + 1) * ch
            color = _diverging_color(coarse[i, j] / scale)
            parts.insert(
                1,
                f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(cw + 0.5)}" '
                f'height="{_fmt(ch + 0.5)}" fill="{color}"/>',
            )
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n{body}\n</svg>\n'
    )
