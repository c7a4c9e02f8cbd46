from __future__ import annotations

import csv
import io
import json
from typing import IO, Any, Dict, List, Sequence

from .oracle import OracleRow
from .pipeline import Report, RequestResult

FORMATS = ("text", "json")
CSV_COLUMNS = ("quantity", "epsilon", "grid", "value", "error_estimate", "symbolic_value", "pass")


def _json_result(r: RequestResult) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"request": r.label, "status": r.status, "output": r.output, "rule": r.rule}
    if r.oracle is not None:
        row = r.oracle
        entry["oracle"] = {
            "kind": row.kind,
            "quantity": row.quantity,
            "symbolic": str(row.symbolic_value),
            "numeric": row.value,
            "error": row.error_estimate,
            "epsilon": row.epsilon,
            "grid": row.grid,
            "ok": row.passed,
        }
    return entry


def render_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        payload = {
            "engine_version": report.engine_version,
            "scenario": report.scenario_echo,
            "results": [_json_result(r) for r in report.results],
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")

    lines: List[str] = [f"engine {report.engine_version}", "", "== scenario"]
    lines.extend(report.scenario_echo.rstrip("\n").splitlines())
    lines.append("== results")
    for i, r in enumerate(report.results, start=1):
        lines.append(f"[{i}] {r.label}")
        if r.status == "error":
            lines.append(f"    error {r.rule}: {r.output}")
        elif r.status == "fail":
            lines.append(f"    fail: {r.output}")
        else:
            lines.append(f"    {r.output}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_oracle_csv(rows: Sequence[OracleRow], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.quantity,
                f"{row.epsilon:.6g}",
                row.grid,
                f"{row.value:.6f}",
                f"{row.error_estimate:.6f}",
                str(row.symbolic_value),
                "true" if row.passed else "false",
            ]
        )


def oracle_csv_text(rows: Sequence[OracleRow]) -> str:
    buf = io.StringIO()
    write_oracle_csv(rows, buf)
    return buf.getvalue()
