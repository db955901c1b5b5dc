"""Minimal static SVG rendering (no plotting library)."""

from __future__ import annotations

from xml.sax.saxutils import escape


def _header(width: int, height: int) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">'
            f'<rect width="{width}" height="{height}" fill="white"/>')


def roc_svg(points: list[tuple[float, float]], auc: float,
            width: int = 480, height: int = 480) -> str:
    pad = 48
    span_x = width - 2 * pad
    span_y = height - 2 * pad

    def sx(fpr: float) -> float:
        return pad + fpr * span_x

    def sy(tpr: float) -> float:
        return height - pad - tpr * span_y

    path = " ".join(f"{'M' if i == 0 else 'L'}{sx(p[0]):.2f},{sy(p[1]):.2f}"
                    for i, p in enumerate(points))
    parts = [
        _header(width, height),
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="#333"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="#333"/>',
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(1):.2f}" '
        f'stroke="#bbb" stroke-dasharray="4 4"/>',
        f'<path d="{path}" fill="none" stroke="#1f6fb2" stroke-width="2"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">false positive rate</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height / 2:.0f})">true positive rate</text>',
        f'<text x="{width - pad}" y="{pad - 10}" text-anchor="end" font-size="13">'
        f'AUC = {auc:.4f}</text>',
        "</svg>",
    ]
    return "".join(parts)


def _ramp(t: float) -> str:
    """White -> blue color ramp for cell intensity in [0, 1]."""
    t = min(1.0, max(0.0, t))
    r = int(247 - t * (247 - 33))
    g = int(251 - t * (251 - 113))
    b = int(255 - t * (255 - 181))
    return f"rgb({r},{g},{b})"


def heatmap_svg(row_labels: list[str], col_labels: list[str],
                cells: list[list[float | None]], metric: str,
                cell: int = 56, label_w: int = 150, label_h: int = 96) -> str:
    width = label_w + cell * max(1, len(col_labels)) + 16
    height = label_h + cell * max(1, len(row_labels)) + 16
    values = [v for row in cells for v in row if v is not None]
    lo = min(values) if values else 0.0
    hi = max(values) if values else 1.0
    span = (hi - lo) or 1.0
    parts = [_header(width, height)]
    for i, row in enumerate(cells):
        for j, value in enumerate(row):
            x = label_w + j * cell
            y = label_h + i * cell
            if value is None:
                fill = "#eee"
                text = "-"
            else:
                fill = _ramp((value - lo) / span)
                text = f"{value:.2f}"
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="{fill}" stroke="#fff"/>')
            parts.append(f'<text x="{x + cell / 2:.0f}" y="{y + cell / 2 + 4:.0f}" '
                         f'text-anchor="middle" font-size="11">{text}</text>')
    for i, label in enumerate(row_labels):
        parts.append(f'<text x="{label_w - 6}" y="{label_h + i * cell + cell / 2 + 4:.0f}" '
                     f'text-anchor="end" font-size="11">{escape(label)}</text>')
    for j, label in enumerate(col_labels):
        x = label_w + j * cell + cell / 2
        parts.append(f'<text x="{x:.0f}" y="{label_h - 8}" text-anchor="start" font-size="11" '
                     f'transform="rotate(-45 {x:.0f} {label_h - 8})">{escape(label)}</text>')
    parts.append(f'<text x="8" y="16" font-size="13">best {escape(metric)} per '
                 f'algorithm and dataset</text>')
    parts.append("</svg>")
    return "".join(parts)
