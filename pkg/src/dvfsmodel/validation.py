"""Prediction-error reports against measured sweeps, and model comparison tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    NoMatchingPoints,
    PointSetMismatch,
    SystemMismatch,
    error_percent,
)
from .measurements import COMPLETION, MeasurementSet, cpu_key


@dataclass(frozen=True)
class PointError:
    cpu: float
    freq_mhz: int
    measured: float
    predicted: float
    percent: float


@dataclass(frozen=True)
class ErrorReport:
    model_name: str
    per_point: tuple[PointError, ...]
    avg_percent: float
    max_percent: float
    cdf: tuple[tuple[float, float], ...]

    @classmethod
    def from_points(cls, model_name: str, points: Sequence[PointError]) -> "ErrorReport":
        if not points:
            raise NoMatchingPoints(f"no points to report for {model_name}")
        points = tuple(points)
        percents = sorted(p.percent for p in points)
        n = len(percents)
        cdf = []
        for i, pct in enumerate(percents):
            # keep the last index of each distinct value: fraction of points <= pct
            if i + 1 == n or percents[i + 1] != pct:
                cdf.append((pct, (i + 1) / n))
        return cls(
            model_name=model_name,
            per_point=points,
            avg_percent=sum(percents) / n,
            max_percent=percents[-1],
            cdf=tuple(cdf),
        )

    def point_keys(self) -> list[tuple]:
        return sorted((cpu_key(p.cpu), p.freq_mhz, p.measured) for p in self.per_point)

    def cdf_text(self) -> str:
        return "".join(f"{pct!r} {frac!r}\n" for pct, frac in self.cdf)

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "avg_percent": self.avg_percent,
            "max_percent": self.max_percent,
            "per_point": [
                {"cpu": p.cpu, "freq_mhz": p.freq_mhz, "measured": p.measured,
                 "predicted": p.predicted, "percent": p.percent}
                for p in self.per_point
            ],
            "cdf": [list(row) for row in self.cdf],
        }


def evaluate(predictor, measurements: MeasurementSet, exclude_calibration_points: bool = False,
             model_name: Optional[str] = None) -> ErrorReport:
    """Score ``predictor`` against every matching row of ``measurements``.

    Power predictors match ``power_watts`` rows; completion-time predictors
    match ``completion_seconds`` rows of their own workload. Calibration
    corners reproduce exactly by construction, so they can be dropped to keep
    them from pulling the average toward zero.
    """
    if predictor.system_id and measurements.system_id and predictor.system_id != measurements.system_id:
        raise SystemMismatch(
            f"model is for system {predictor.system_id!r}, measurements are from "
            f"{measurements.system_id!r}"
        )
    if predictor.metric == COMPLETION:
        rows = measurements.completion(predictor.workload_id or None)
    else:
        rows = measurements.power()
    if exclude_calibration_points:
        corners = {(cpu_key(c), f) for c, f in predictor.calibration_points()}
        rows = [r for r in rows if (cpu_key(r.cpu), r.freq_mhz) not in corners]
    if not rows:
        raise NoMatchingPoints(
            f"no {predictor.metric} measurements for {model_name or predictor.name}"
        )
    points = []
    for r in rows:
        predicted = predictor.predict(r.cpu, r.freq_mhz)
        err = error_percent(r.value, predicted)
        points.append(PointError(r.cpu, r.freq_mhz, r.value, predicted, err.percent))
    return ErrorReport.from_points(model_name or predictor.name, points)


@dataclass(frozen=True)
class ComparisonRow:
    statistic: str
    values: tuple[float, ...]
    winner: str


@dataclass(frozen=True)
class ComparisonTable:
    models: tuple[str, ...]
    rows: tuple[ComparisonRow, ...]

    def to_dict(self) -> dict:
        return {
            "models": list(self.models),
            "rows": [
                {"statistic": r.statistic, "values": dict(zip(self.models, r.values)),
                 "winner": r.winner}
                for r in self.rows
            ],
        }

    def format(self) -> str:
        width = max(12, *(len(m) for m in self.models))
        lines = ["statistic".ljust(10) + "".join(m.rjust(width + 2) for m in self.models) + "  winner"]
        for r in self.rows:
            cells = "".join(f"{v:.2f}".rjust(width + 2) for v in r.values)
            lines.append(r.statistic.ljust(10) + cells + "  " + r.winner)
        return "\n".join(lines) + "\n"


def _winner(models: Sequence[str], values: Sequence[float]) -> str:
    best = min(values)
    leaders = [m for m, v in zip(models, values) if v == best]
    return leaders[0] if len(leaders) == 1 else "tie"


def compare(reports: Sequence[ErrorReport]) -> ComparisonTable:
    """Side-by-side average and maximum error, lowest error wins each row."""
    if len(reports) < 2:
        raise PointSetMismatch("comparison needs at least two reports")
    keys = reports[0].point_keys()
    for rep in reports[1:]:
        if rep.point_keys() != keys:
            raise PointSetMismatch(
                f"{rep.model_name} was evaluated on different points than {reports[0].model_name}"
            )
    models = tuple(r.model_name for r in reports)
    rows = []
    for stat in ("avg", "max"):
        values = tuple(getattr(r, f"{stat}_percent") for r in reports)
        rows.append(ComparisonRow(stat, values, _winner(models, values)))
    return ComparisonTable(models, tuple(rows))
