"""Render an evaluation report as JSON, CSV, or markdown tables."""

from __future__ import annotations

import csv
import io
import json

FORMATS = ("json", "csv", "markdown")


def emit_report(report, fmt="markdown"):
    if fmt == "json":
        return _emit_json(report)
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "markdown":
        return _emit_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _emit_json(report):
    return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"


_CSV_COLUMNS = ("id", "category", "gold", "entanglement", "correct_runs",
                "total_runs", "accuracy", "mean_attempts")


def _emit_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in report.problems:
        writer.writerow([row.get(col, "") for col in _CSV_COLUMNS])
    return buf.getvalue()


def _emit_markdown(report):
    lines = ["# Evaluation report", ""]
    meta = report.meta or {}
    if meta:
        lines.append("| setting | value |")
        lines.append("| --- | --- |")
        for key in sorted(meta):
            lines.append(f"| {key} | {meta[key]} |")
        lines.append("")
    lines.append("## Categories")
    lines.append("")
    lines.append("| category | problems | accuracy | mean attempts |")
    lines.append("| --- | ---: | ---: | ---: |")
    for name in sorted(report.categories):
        bucket = report.categories[name]
        lines.append(f"| {name} | {bucket['problems']} "
                     f"| {bucket['accuracy']:.3f} "
                     f"| {bucket['mean_attempts']:.2f} |")
    lines.append("")
    lines.append("## Problems")
    lines.append("")
    lines.append("| id | category | accuracy | mean attempts | gold |")
    lines.append("| --- | --- | ---: | ---: | ---: |")
    for row in report.problems:
        lines.append(f"| {row['id']} | {row['category']} "
                     f"| {row['accuracy']:.3f} "
                     f"| {row['mean_attempts']:.2f} | {row['gold']} |")
    lines.append("")
    return "\n".join(lines)
