"""Static SVG rendering of a traced root locus.

Pure string assembly, no drawing dependencies: trajectories become
polylines, plant poles/zeros and branch points become markers, and the
region boundary is a dashed vertical line. Output bytes are deterministic
for a fixed result.
"""

from __future__ import annotations

import math

from .tracer import RootLocusResult, Trajectory

_WIDTH = 800.0
_HEIGHT = 600.0
_MARGIN_LEFT = 62.0
_MARGIN_RIGHT = 18.0
_MARGIN_TOP = 18.0
_MARGIN_BOTTOM = 46.0

_STYLE = (
    "text{font:11px sans-serif;fill:#444}"
    ".axis{stroke:#444;stroke-width:1}"
    ".grid{stroke:#ddd;stroke-width:0.5}"
    ".boundary{stroke:#999;stroke-width:1.2;stroke-dasharray:6 4}"
    ".trajectory{fill:none;stroke:#1668b4;stroke-width:1.4}"
    ".trajectory.negative{stroke:#c43b3b}"
    ".pole{stroke:#111;stroke-width:1.6}"
    ".zero{stroke:#111;stroke-width:1.6;fill:none}"
    ".branch{fill:#7b2d8b;stroke:none}"
)


def _fmt(v: float) -> str:
    s = format(v, ".2f")
    return "0.00" if s == "-0.00" else s


def _label(v: float) -> str:
    s = format(v, ".6g")
    return "0" if s == "-0" else s


def _nice_step(span: float, target: int) -> float:
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 5.0, 10.0):
        if raw <= m * mag * (1.0 + 1e-12):
            return m * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    step = _nice_step(hi - lo, target)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    v = first
    while v <= hi + 1e-9 * (hi - lo):
        out.append(0.0 if abs(v) < 0.5 * step * 1e-9 else v)
        v += step
    return out


def _gather_points(result: RootLocusResult):
    pts = []
    for res in (result, result.negative):
        if res is None:
            continue
        for t in res.trajectories:
            if t.start_marker is not None:
                pts.append((t.start_marker.real, t.start_marker.imag))
            for p in t.points:
                pts.append((p.sigma, p.omega))
    return pts


def render_svg(result: RootLocusResult) -> str:
    pts = _gather_points(result)
    sigma0 = result.region.sigma0
    if pts:
        xmin = min(min(x for x, _ in pts), sigma0)
        xmax = max(max(x for x, _ in pts), sigma0)
        ymin = min(y for _, y in pts)
        ymax = max(y for _, y in pts)
    else:
        xmin, xmax, ymin, ymax = sigma0 - 1.0, sigma0 + 1.0, -1.0, 1.0
    # 10% margin, never a zero-thickness box
    dx = (xmax - xmin) or 1.0
    dy = (ymax - ymin) or 1.0
    xmin -= 0.1 * dx
    xmax += 0.1 * dx
    ymin -= 0.1 * dy
    ymax += 0.1 * dy

    px0, px1 = _MARGIN_LEFT, _WIDTH - _MARGIN_RIGHT
    py0, py1 = _HEIGHT - _MARGIN_BOTTOM, _MARGIN_TOP

    def X(x):
        return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0)

    def Y(y):
        return py0 + (y - ymin) / (ymax - ymin) * (py1 - py0)

    parts = [
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_WIDTH)}" '
            f'height="{int(_HEIGHT)}" viewBox="0 0 {int(_WIDTH)} {int(_HEIGHT)}" '
            f'data-sigma0="{format(sigma0, ".17g")}">'
        ),
        f"<style>{_STYLE}</style>",
        f'<rect x="{_fmt(px0)}" y="{_fmt(py1)}" width="{_fmt(px1 - px0)}" '
        f'height="{_fmt(py0 - py1)}" fill="#fff" stroke="none"/>',
    ]

    for v in _ticks(xmin, xmax):
        x = _fmt(X(v))
        parts.append(f'<line class="grid" x1="{x}" y1="{_fmt(py1)}" x2="{x}" y2="{_fmt(py0)}"/>')
        parts.append(
            f'<text x="{x}" y="{_fmt(py0 + 16)}" text-anchor="middle">{_label(v)}</text>'
        )
    for v in _ticks(ymin, ymax):
        y = _fmt(Y(v))
        parts.append(f'<line class="grid" x1="{_fmt(px0)}" y1="{y}" x2="{_fmt(px1)}" y2="{y}"/>')
        parts.append(
            f'<text x="{_fmt(px0 - 6)}" y="{y}" text-anchor="end" dy="4">{_label(v)}</text>'
        )
    parts.append(
        f'<rect class="axis" x="{_fmt(px0)}" y="{_fmt(py1)}" width="{_fmt(px1 - px0)}" '
        f'height="{_fmt(py0 - py1)}" fill="none"/>'
    )
    parts.append(
        f'<text x="{_fmt(0.5 * (px0 + px1))}" y="{_fmt(_HEIGHT - 10)}" '
        f'text-anchor="middle">Re(s)</text>'
    )
    parts.append(
        f'<text x="14" y="{_fmt(0.5 * (py0 + py1))}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_fmt(0.5 * (py0 + py1))})">Im(s)</text>'
    )

    bx = _fmt(X(sigma0))
    parts.append(
        f'<line class="boundary" x1="{bx}" y1="{_fmt(py1)}" x2="{bx}" y2="{_fmt(py0)}"/>'
    )

    def polyline(t: Trajectory, extra_class: str) -> str:
        coords = []
        if t.start_marker is not None:
            coords.append((t.start_marker.real, t.start_marker.imag))
        coords.extend((p.sigma, p.omega) for p in t.points)
        d = " ".join(f"{_fmt(X(x))},{_fmt(Y(y))}" for x, y in coords)
        cls = f"trajectory{extra_class}"
        return f'<polyline class="{cls}" points="{d}" data-mirrored="{str(t.mirrored).lower()}"/>'

    for t in result.trajectories:
        parts.append(polyline(t, ""))
    if result.negative is not None:
        for t in result.negative.trajectories:
            parts.append(polyline(t, " negative"))

    for p in result.plant.poles:
        x, y = X(p.real), Y(p.imag)
        parts.append(
            f'<path class="pole" d="M{_fmt(x - 4.5)} {_fmt(y - 4.5)}L{_fmt(x + 4.5)} '
            f'{_fmt(y + 4.5)}M{_fmt(x - 4.5)} {_fmt(y + 4.5)}L{_fmt(x + 4.5)} {_fmt(y - 4.5)}"/>'
        )
    for z in result.plant.zeros:
        parts.append(
            f'<circle class="zero" cx="{_fmt(X(z.real))}" cy="{_fmt(Y(z.imag))}" r="4.5"/>'
        )
    for b in result.branch_points:
        x, y = X(b.s.real), Y(b.s.imag)
        parts.append(
            f'<path class="branch" d="M{_fmt(x)} {_fmt(y - 5.5)}L{_fmt(x + 5.5)} {_fmt(y)}'
            f'L{_fmt(x)} {_fmt(y + 5.5)}L{_fmt(x - 5.5)} {_fmt(y)}Z"/>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
