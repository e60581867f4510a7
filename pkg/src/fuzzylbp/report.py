"""Report writers: CSV tables, console summary and an SVG ROC plot.

All numbers are written with fixed 6-decimal formatting so reruns with the
same seed are byte-identical. The SVG is rendered from the ROC CSV files,
not from in-memory curves.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .evaluate import TARGET_FAR
from .features import DescriptorKind

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def fmt(x: float) -> str:
    return f"{x:.6f}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_reports(reports: list, out_dir) -> list:
    """Write rates.csv, kfold.csv, roc_<descriptor>.csv, roc_summary.csv and roc.svg."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    rows = [(r.descriptor, name, fmt(rate)) for r in reports for name, rate in r.split_rates.items()]
    _write_csv(out / "rates.csv", ("descriptor", "classifier", "rate_percent"), rows)
    written.append(out / "rates.csv")

    rows = [
        (r.descriptor, fold + 1, fmt(rate))
        for r in reports
        if r.kfold is not None
        for fold, rate in enumerate(r.kfold.rates)
    ]
    _write_csv(out / "kfold.csv", ("descriptor", "fold", "rate_percent"), rows)
    written.append(out / "kfold.csv")

    roc_files = []
    for r in reports:
        path = out / f"roc_{r.descriptor}.csv"
        rows = zip(map(fmt, r.roc.thresholds), map(fmt, r.roc.far), map(fmt, r.roc.recognition_rate))
        _write_csv(path, ("threshold", "far", "recognition_rate"), rows)
        roc_files.append(path)
    written += roc_files

    rows = [(r.descriptor, fmt(TARGET_FAR), fmt(r.rate_at_far)) for r in reports]
    _write_csv(out / "roc_summary.csv", ("descriptor", "far", "recognition_rate"), rows)
    written.append(out / "roc_summary.csv")

    svg = out / "roc.svg"
    svg.write_text(render_roc_svg(roc_files), encoding="utf-8")
    written.append(svg)
    return written


def _display(descriptor: str) -> str:
    try:
        return DescriptorKind(descriptor).label
    except ValueError:
        return descriptor


def summary_table(reports: list, degrees) -> list:
    """Rows laid out like the published tables: split rates then k-fold MIN/MAX/AVG."""
    header = ["Descriptor"] + [f"SVM Poly{d}" for d in degrees] + ["MIN", "MAX", "AVG"]
    rows = [header]
    for r in reports:
        row = [_display(r.descriptor)] + [f"{r.split_rates[f'SVM Poly{d}']:.2f}" for d in degrees]
        if r.kfold is None:
            row += ["-", "-", "-"]
        else:
            row += [f"{r.kfold.min:.2f}", f"{r.kfold.max:.2f}", f"{r.kfold.avg:.2f}"]
        rows.append(row)
    return rows


def format_table(rows: list) -> str:
    widths = [max(len(str(row[i])) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for n, row in enumerate(rows):
        cells = [str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells))
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def roc_table(reports: list) -> list:
    rows = [["Descriptor", "k-NN rate", f"RR@FAR={TARGET_FAR:g}"]]
    for r in reports:
        rows.append([_display(r.descriptor), f"{r.split_rates['k-NN']:.2f}", f"{100 * r.rate_at_far:.2f}"])
    return rows


def _read_roc_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [(float(row["far"]), float(row["recognition_rate"])) for row in reader]


def render_roc_svg(csv_paths, width: int = 480, height: int = 400) -> str:
    left, right, top, bottom = 60, 140, 20, 50
    pw, ph = width - left - right, height - top - bottom

    def xy(far, rr):
        return left + far * pw, top + (1.0 - rr) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        x, _ = xy(t, 0)
        _, y = xy(0, t)
        parts.append(f'<text x="{x:.1f}" y="{top + ph + 15}" text-anchor="middle">{t:g}</text>')
        parts.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{t:g}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">False accept rate</text>')
    parts.append(
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">Recognition rate</text>'
    )
    x, _ = xy(TARGET_FAR, 0)
    parts.append(f'<line x1="{x:.1f}" y1="{top}" x2="{x:.1f}" y2="{top + ph}" stroke="#bbb" stroke-dasharray="4 3"/>')
    for n, path in enumerate(csv_paths):
        path = Path(path)
        color = _COLORS[n % len(_COLORS)]
        pts = " ".join("{:.2f},{:.2f}".format(*xy(f, r)) for f, r in _read_roc_csv(path))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        name = path.stem.removeprefix("roc_")
        ly = top + 14 + 16 * n
        parts.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + pw + 35}" y="{ly}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
