"""Minimal deterministic SVG 1.1 line charts.

Byte-identical output for identical input: no timestamps, no randomness,
fixed float formatting.  One polyline per series; per-point min/max
whiskers when the seed spread is nonzero.
"""

from __future__ import annotations

from typing import Sequence

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 46, 54

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render_line_chart(
    series: Sequence[tuple[str, Sequence[tuple[float, float, float, float]]]],
    x_label: str,
    y_label: str,
    title: str = "",
) -> str:
    """Render series of (x, mean, lo, hi) points to a standalone SVG string."""
    xs = [p[0] for _, pts in series for p in pts]
    ys = [v for _, pts in series for p in pts for v in (p[1], p[2], p[3])]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out: list[str] = []
    out.append(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{_esc(title)}</text>'
        )

    for yt in _ticks(y_lo + pad, y_hi - pad):
        yy = _fmt(sy(yt))
        out.append(
            f'<line x1="{MARGIN_L}" y1="{yy}" x2="{WIDTH - MARGIN_R}" y2="{yy}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{yy}" text-anchor="end" dy="4" '
            f'font-family="sans-serif" font-size="11">{_esc(f"{yt:g}")}</text>'
        )
    x_tick_vals = sorted({p[0] for _, pts in series for p in pts}) or [x_lo, x_hi]
    for xt in x_tick_vals:
        xx = _fmt(sx(xt))
        out.append(
            f'<line x1="{xx}" y1="{MARGIN_T + plot_h}" x2="{xx}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{xx}" y="{MARGIN_T + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_esc(f"{xt:g}")}</text>'
        )
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.2f})">{_esc(y_label)}</text>'
    )

    for i, (name, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = sorted(pts)
        if len(pts) > 1:
            path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(m))}" for x, m, _, _ in pts)
            out.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
        for x, mean, lo, hi in pts:
            cx, cy = _fmt(sx(x)), _fmt(sy(mean))
            if hi > lo:
                y1, y2 = _fmt(sy(hi)), _fmt(sy(lo))
                xx = sx(x)
                out.append(
                    f'<line x1="{_fmt(xx)}" y1="{y1}" x2="{_fmt(xx)}" y2="{y2}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
                for yy in (y1, y2):
                    out.append(
                        f'<line x1="{_fmt(xx - 4)}" y1="{yy}" x2="{_fmt(xx + 4)}" y2="{yy}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>')
        ly = MARGIN_T + 14 + i * 18
        lx = WIDTH - MARGIN_R + 12
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{_esc(name)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
