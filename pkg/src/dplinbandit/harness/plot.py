"""Self-contained SVG plot of final regret against the privacy budget."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from ..errors import IoError
from .sweep import SummaryRow

WIDTH, HEIGHT = 760, 480
LEFT, RIGHT, TOP, BOTTOM = 90, 170, 40, 60
COLORS = {
    "central": "#1f77b4",
    "local": "#d62728",
    "shuffled": "#2ca02c",
    "nonprivate": "#555555",
}
LABELS = {
    "central": "central (epsilon)",
    "local": "local (epsilon0)",
    "shuffled": "shuffled (epsilon)",
    "nonprivate": "non-private",
}


def _nice_ticks(hi: float, count: int = 5) -> list[float]:
    if hi <= 0:
        return [0.0]
    raw = hi / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    return [k * step for k in range(int(hi / step) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(summaries: Sequence[SummaryRow], title: str = "Final regret vs privacy budget") -> str:
    if not summaries:
        raise ValueError("need at least one summary row")
    private = [s for s in summaries if s.epsilon is not None]
    baseline = [s for s in summaries if s.epsilon is None]

    eps = [s.epsilon for s in private] or [1.0]
    lo_x, hi_x = math.floor(math.log10(min(eps))), math.ceil(math.log10(max(eps)))
    if hi_x - lo_x < 1:
        lo_x, hi_x = lo_x - 0.5, hi_x + 0.5
    top_y = max([s.mean_regret + s.std_regret for s in summaries] + [1.0]) * 1.1

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(e: float) -> float:
        return LEFT + (math.log10(e) - lo_x) / (hi_x - lo_x) * pw

    def sy(r: float) -> float:
        return TOP + ph - max(r, 0.0) / top_y * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}"/>'
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}"/></g>',
    ]
    for k in range(math.ceil(lo_x), math.floor(hi_x) + 1):
        x = sx(10.0 ** k)
        out.append(f'<line class="tick" x1="{_fmt(x)}" y1="{TOP + ph}" x2="{_fmt(x)}" '
                   f'y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{TOP + ph + 20}" text-anchor="middle">1e{k}</text>')
    for v in _nice_ticks(top_y / 1.1):
        y = sy(v)
        out.append(f'<line class="grid" x1="{LEFT}" y1="{_fmt(y)}" x2="{LEFT + pw}" y2="{_fmt(y)}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">'
               f'privacy budget (log scale)</text>')
    out.append(f'<text x="20" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {TOP + ph / 2:.2f})">mean final regret</text>')

    legend = []
    for b in baseline:
        y = sy(b.mean_regret)
        out.append(f'<line class="reference" x1="{LEFT}" y1="{_fmt(y)}" x2="{LEFT + pw}" y2="{_fmt(y)}" '
                   f'stroke="{COLORS["nonprivate"]}" stroke-dasharray="6 4"/>')
        legend.append(("nonprivate", True))

    models = []
    for s in private:
        if s.model not in models:
            models.append(s.model)
    for model in models:
        rows = sorted((s for s in private if s.model == model), key=lambda s: s.epsilon)
        color = COLORS.get(model, "black")
        pts = " ".join(f"{_fmt(sx(s.epsilon))},{_fmt(sy(s.mean_regret))}" for s in rows)
        out.append(f'<g class="series" data-model="{escape(model)}">')
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for s in rows:
            x = sx(s.epsilon)
            out.append(f'<line class="whisker" x1="{_fmt(x)}" y1="{_fmt(sy(s.mean_regret - s.std_regret))}" '
                       f'x2="{_fmt(x)}" y2="{_fmt(sy(s.mean_regret + s.std_regret))}" stroke="{color}"/>')
            out.append(f'<circle class="marker" cx="{_fmt(x)}" cy="{_fmt(sy(s.mean_regret))}" r="4" '
                       f'fill="{color}"/>')
        out.append("</g>")
        legend.append((model, False))

    for k, (model, dashed) in enumerate(legend):
        y = TOP + 10 + 20 * k
        x = LEFT + pw + 15
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 25}" y2="{y}" stroke="{COLORS.get(model, "black")}" '
                   f'stroke-width="2"{dash}/>')
        out.append(f'<text x="{x + 32}" y="{y + 4}">{escape(LABELS.get(model, model))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(summaries: Sequence[SummaryRow], output_path) -> Path:
    path = Path(output_path)
    text = render_svg(summaries)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return path
