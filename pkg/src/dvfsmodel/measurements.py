"""Calibration and validation observations, and their CSV format.

CSV layout (header required)::

    metric,workload_id,cpu,freq_mhz,value

``metric`` is ``power_watts`` or ``completion_seconds``; ``workload_id`` is
empty for power rows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .core import InputError, MeasurementFormatError, _as_mhz

POWER = "power_watts"
COMPLETION = "completion_seconds"
METRICS = (POWER, COMPLETION)
CSV_HEADER = ("metric", "workload_id", "cpu", "freq_mhz", "value")

# cpu values are matched after rounding so that "0.2" and 0.2000000001 collide
_CPU_DIGITS = 9


def cpu_key(cpu: float) -> float:
    return round(float(cpu), _CPU_DIGITS)


@dataclass(frozen=True)
class Measurement:
    metric: str
    workload_id: Optional[str]
    cpu: float
    freq_mhz: int
    value: float

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise MeasurementFormatError(f"unknown metric {self.metric!r}")
        if not math.isfinite(self.cpu) or not 0.0 <= self.cpu <= 1.0:
            raise MeasurementFormatError(f"cpu must lie in [0, 1], got {self.cpu}")
        if self.metric == COMPLETION and self.cpu == 0.0:
            raise MeasurementFormatError("completion_seconds rows require cpu > 0")
        if not math.isfinite(self.value) or self.value < 0:
            raise MeasurementFormatError(f"value must be a non-negative number, got {self.value}")
        if self.metric == POWER and self.workload_id:
            raise MeasurementFormatError("power_watts rows must not carry a workload_id")

    @property
    def key(self) -> tuple:
        return (self.metric, self.workload_id or None, cpu_key(self.cpu), self.freq_mhz)


@dataclass(frozen=True)
class MeasurementSet:
    system_id: str
    records: tuple[Measurement, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.key in seen:
                raise MeasurementFormatError(f"duplicate measurement {rec.key}")
            seen.add(rec.key)

    def __len__(self) -> int:
        return len(self.records)

    def power(self) -> list[Measurement]:
        return [r for r in self.records if r.metric == POWER]

    def completion(self, workload_id: Optional[str] = None) -> list[Measurement]:
        return [
            r for r in self.records
            if r.metric == COMPLETION and (workload_id is None or r.workload_id == workload_id)
        ]

    def workloads(self) -> list[str]:
        return sorted({r.workload_id for r in self.records if r.metric == COMPLETION and r.workload_id})

    def lookup(self, metric: str, cpu: float, freq_mhz: int,
               workload_id: Optional[str] = None) -> Optional[float]:
        key = (metric, workload_id or None, cpu_key(cpu), int(freq_mhz))
        for rec in self.records:
            if rec.key == key:
                return rec.value
        return None


def _parse_row(row: dict, lineno: int) -> Measurement:
    try:
        metric = row["metric"].strip()
        workload = (row.get("workload_id") or "").strip() or None
        cpu = float(row["cpu"])
        freq = _as_mhz(row["freq_mhz"].strip())
        value = float(row["value"])
    except (KeyError, AttributeError, ValueError, InputError) as exc:
        raise MeasurementFormatError(f"line {lineno}: cannot parse row {row}: {exc}") from None
    try:
        return Measurement(metric, workload, cpu, freq, value)
    except MeasurementFormatError as exc:
        raise MeasurementFormatError(f"line {lineno}: {exc}") from None


def parse_csv(text: str, system_id: str = "") -> MeasurementSet:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MeasurementFormatError("measurement CSV is empty")
    missing = set(CSV_HEADER) - {name.strip() for name in reader.fieldnames}
    if missing:
        raise MeasurementFormatError(f"CSV header is missing columns: {sorted(missing)}")
    reader.fieldnames = [name.strip() for name in reader.fieldnames]
    records = [
        _parse_row(row, lineno)
        for lineno, row in enumerate(reader, start=2)
        if any((v or "").strip() for v in row.values() if isinstance(v, str))
    ]
    return MeasurementSet(system_id, tuple(records))


def read_csv(path, system_id: str = "") -> MeasurementSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read measurements: {exc}") from None
    return parse_csv(text, system_id)


def format_csv(records: Iterable[Measurement]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([r.metric, r.workload_id or "", repr(float(r.cpu)), r.freq_mhz, repr(float(r.value))])
    return buf.getvalue()


def write_csv(ms: MeasurementSet, path) -> None:
    Path(path).write_text(format_csv(ms.records))
