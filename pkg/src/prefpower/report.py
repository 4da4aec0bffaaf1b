"""Render a PowerReport as CSV rows or a markdown table."""

from __future__ import annotations

import csv
import io

from .harness import PowerReport

CSV_COLUMNS = (
    "method",
    "scenario",
    "power_pct",
    "mc_se_pct",
    "threshold",
    "n_sim",
    "preference_mode",
    "correlation",
    "margin_mode",
)


def emit_report(report: PowerReport, format: str) -> str:
    if format == "csv":
        return _emit_csv(report)
    if format == "markdown":
        return _emit_markdown(report)
    raise ValueError(f"unknown report format {format!r} (expected 'csv' or 'markdown')")


def _plan_field(report, key):
    return report.metadata.get("plan", {}).get(key, "")


def _emit_csv(report: PowerReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for method in report.methods:
        for scenario in report.scenarios:
            cell = report.cells[(method, scenario)]
            writer.writerow(
                [
                    method,
                    scenario,
                    f"{100.0 * cell.power:.4f}",
                    f"{100.0 * cell.mc_se:.4f}",
                    f"{cell.threshold:.6g}",
                    cell.n_sim,
                    _plan_field(report, "preference_mode"),
                    _plan_field(report, "correlation"),
                    _plan_field(report, "margin_mode"),
                ]
            )
    return buffer.getvalue()


def _emit_markdown(report: PowerReport) -> str:
    lines = ["# Power (%) by method and scenario", ""]
    plan = report.metadata.get("plan", {})
    for key in (
        "preference_mode",
        "correlation",
        "margin_mode",
        "n_sim",
        "alpha",
        "master_seed",
        "recalibrate",
    ):
        if key in plan:
            lines.append(f"- {key}: {plan[key]}")
    thresholds = report.metadata.get("thresholds", {})
    calibrated = {
        method: thr
        for method, thr in thresholds.items()
        if plan.get("alpha") is not None and thr != plan["alpha"]
    }
    if calibrated:
        rendered = ", ".join(f"{method}={thr:.6g}" for method, thr in calibrated.items())
        lines.append(f"- calibrated thresholds: {rendered}")
    lines.append("")
    lines.append("| Method | " + " | ".join(report.scenarios) + " |")
    lines.append("| --- " * (len(report.scenarios) + 1) + "|")
    for method in report.methods:
        values = [
            f"{100.0 * report.cells[(method, scenario)].power:.1f}"
            for scenario in report.scenarios
        ]
        lines.append(f"| {method} | " + " | ".join(values) + " |")
    lines.append("")
    return "\n".join(lines)
