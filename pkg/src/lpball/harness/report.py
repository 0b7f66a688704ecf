"""Experiment reports: per-n rows, named verdicts, CSV and JSON emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .config import ExperimentConfig

__all__ = ["PASS", "FAIL", "INFO", "INSUFFICIENT", "ReportRow", "Verdict", "ExperimentReport", "json_safe"]

PASS, FAIL, INFO, INSUFFICIENT = "PASS", "FAIL", "INFO", "INSUFFICIENT"
CSV_HEADER = ("n", "statistic", "empirical", "target", "stderr", "verdict")


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def json_safe(obj):
    """Replace non-finite floats by the strings ``inf``, ``-inf``, ``nan``; unwrap numpy scalars."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


@dataclass(frozen=True)
class ReportRow:
    n: Union[int, str]
    statistic: str
    empirical: float
    target: Optional[float]
    stderr: Optional[float]
    verdict: str = INFO

    def csv_fields(self) -> list[str]:
        return [str(self.n), self.statistic, _num(self.empirical), _num(self.target), _num(self.stderr), self.verdict]


@dataclass(frozen=True)
class Verdict:
    """Outcome of one named check; ``criterion`` is ``<experiment label>:<check>``."""

    criterion: str
    status: str
    empirical: float
    target: float
    tolerance: float
    stderr: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def line(self) -> str:
        return (
            f"{self.status} {self.criterion}: empirical={_num(self.empirical)} target={_num(self.target)} "
            f"tol={_num(self.tolerance)} se={_num(self.stderr)}" + (f" ({self.detail})" if self.detail else "")
        )


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[ReportRow] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(v.passed for v in self.verdicts)

    def verdict(self, check: str) -> Verdict:
        for v in self.verdicts:
            if v.criterion.endswith(":" + check):
                return v
        raise KeyError(check)

    def add_verdict(self, check: str, status: str, empirical, target, tolerance, stderr, detail: str = "") -> Verdict:
        v = Verdict(f"{self.config.name}:{check}", status, float(empirical), float(target), float(tolerance),
                    float(stderr), detail)
        self.verdicts.append(v)
        return v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow(row.csv_fields())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return json_safe(
            {
                "config": self.config.to_dict(),
                "passed": self.passed,
                "verdicts": [
                    {
                        "criterion": v.criterion,
                        "status": v.status,
                        "empirical": v.empirical,
                        "target": v.target,
                        "tolerance": v.tolerance,
                        "stderr": v.stderr,
                        "detail": v.detail,
                    }
                    for v in self.verdicts
                ],
                "diagnostics": self.diagnostics,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"
