"""Deterministic SVG heatmaps of sweep region maps.

Cells with a cycle are drawn on a red ramp (darker means a shorter
minimal cycle), cells with none stay neutral, inconclusive cells are
grey and out-of-region cells white.  Analytic stability boundaries are
overlaid as dashed curves.  No timestamps or random ids: identical maps
render to identical bytes.
"""

from __future__ import annotations

import numpy as np

from .sweep import (
    STATUS_CYCLE,
    STATUS_FAILED,
    STATUS_INCONCLUSIVE,
    STATUS_NO_CYCLE,
    RegionMap,
)

__all__ = ["emit_heatmap", "analytic_boundary"]

_COLOR_NO_CYCLE = "#f4f2ec"
_COLOR_INCONCLUSIVE = "#b5b5b5"
_COLOR_FAILED = "#7d7d7d"
_COLOR_SKIPPED = "#ffffff"
_RAMP_DARK = (0x67, 0x00, 0x0D)
_RAMP_LIGHT = (0xFC, 0xBB, 0xA1)


def _ramp(k: int, k_lo: int, k_hi: int) -> str:
    t = 0.0 if k_hi <= k_lo else (k - k_lo) / (k_hi - k_lo)
    rgb = tuple(
        round(d + t * (l - d)) for d, l in zip(_RAMP_DARK, _RAMP_LIGHT)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def analytic_boundary(method: str, L: float, n_pts: int = 200) -> list[tuple[str, np.ndarray]]:
    """Known stability/convergence boundary curves in (param1, param2)."""
    if method == "hb":
        beta = np.linspace(0.0, 1.0, n_pts)
        return [("gamma = 2(1+beta)/L", np.column_stack([2.0 * (1.0 + beta) / L, beta]))]
    if method == "nag":
        beta = np.linspace(0.0, 1.0, n_pts)
        gamma = 2.0 * (1.0 + beta) / (L * (1.0 + 2.0 * beta))
        return [("gamma = 2(1+beta)/(L(1+2beta))", np.column_stack([gamma, beta]))]
    if method == "igd":
        eps = np.linspace(0.0, 1.0, n_pts)
        gamma = 2.0 / (L * (1.0 + eps))
        return [("gamma = 2/(L(1+eps))", np.column_stack([gamma, eps]))]
    if method == "tos":
        return []
    raise ValueError(f"unknown method {method!r}")


def _axis_label(name: str, L: float) -> str:
    if name == "gamma" and L != 1.0:
        return "gamma * L"
    return name


def emit_heatmap(
    region: RegionMap,
    path,
    overlays: list[tuple[str, np.ndarray]] | None = None,
    cell_px: int = 12,
) -> None:
    """Render the region map to an SVG file."""
    ax1, ax2 = region.axis1, region.axis2
    L = region.config.L
    n1, n2 = ax1.count, ax2.count
    margin_l, margin_b, margin_t, margin_r = 64, 46, 30, 14
    plot_w, plot_h = n1 * cell_px, n2 * cell_px
    width, height = margin_l + plot_w + margin_r, margin_t + plot_h + margin_b

    # Axis 1 runs along x, axis 2 along y (origin bottom-left).
    span1 = ax1.hi - ax1.lo or 1.0
    span2 = ax2.hi - ax2.lo or 1.0

    def to_px(p1: float, p2: float) -> tuple[float, float]:
        x = margin_l + (p1 - ax1.lo) / span1 * plot_w
        y = margin_t + plot_h - (p2 - ax2.lo) / span2 * plot_h
        return x, y

    if overlays is None:
        overlays = analytic_boundary(region.config.method, L)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    title = (
        f"{region.config.method} cycles: darker red = shorter minimal cycle "
        f"(K in [{region.config.k_min}, {region.config.k_max}])"
    )
    out.append(
        f'<text x="{margin_l}" y="18" font-family="monospace" font-size="11">{title}</text>'
    )

    w1 = plot_w / n1
    h2 = plot_h / n2
    for i, p1 in enumerate(ax1.values()):
        for j, p2 in enumerate(ax2.values()):
            cell = region.cell(i, j)
            if cell.status == STATUS_CYCLE and cell.k_min is not None:
                fill = _ramp(cell.k_min, region.config.k_min, region.config.k_max)
            elif cell.status == STATUS_NO_CYCLE:
                fill = _COLOR_NO_CYCLE
            elif cell.status == STATUS_INCONCLUSIVE:
                fill = _COLOR_INCONCLUSIVE
            elif cell.status == STATUS_FAILED:
                fill = _COLOR_FAILED
            else:
                fill = _COLOR_SKIPPED
            x = margin_l + i * w1
            y = margin_t + plot_h - (j + 1) * h2
            out.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{w1:.2f}" height="{h2:.2f}" '
                f'fill="{fill}"/>'
            )

    for label, curve in overlays:
        pts = []
        for p1, p2 in curve:
            if ax1.lo - 1e-9 <= p1 <= ax1.hi + 1e-9 and ax2.lo - 1e-9 <= p2 <= ax2.hi + 1e-9:
                x, y = to_px(p1, p2)
                pts.append(f"{x:.2f},{y:.2f}")
        if pts:
            out.append(
                f'<polyline points="{" ".join(pts)}" fill="none" stroke="#1f4f9e" '
                f'stroke-width="1.6" stroke-dasharray="5,3"><title>{label}</title></polyline>'
            )

    out.append(
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    tick_scale = L if ax1.name == "gamma" else 1.0
    for frac in (0.0, 0.5, 1.0):
        v1 = ax1.lo + frac * span1
        x, _ = to_px(v1, ax2.lo)
        out.append(
            f'<text x="{x:.2f}" y="{margin_t + plot_h + 16}" font-family="monospace" '
            f'font-size="10" text-anchor="middle">{v1 * tick_scale:.3g}</text>'
        )
        v2 = ax2.lo + frac * span2
        _, y = to_px(ax1.lo, v2)
        out.append(
            f'<text x="{margin_l - 6}" y="{y:.2f}" font-family="monospace" '
            f'font-size="10" text-anchor="end" dominant-baseline="middle">{v2:.3g}</text>'
        )
    out.append(
        f'<text x="{margin_l + plot_w / 2:.2f}" y="{height - 12}" font-family="monospace" '
        f'font-size="11" text-anchor="middle">{_axis_label(ax1.name, L)}</text>'
    )
    out.append(
        f'<text x="16" y="{margin_t + plot_h / 2:.2f}" font-family="monospace" '
        f'font-size="11" text-anchor="middle" '
        f'transform="rotate(-90 16 {margin_t + plot_h / 2:.2f})">{ax2.name}</text>'
    )
    out.append("</svg>")

    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out))
        fh.write("\n")
