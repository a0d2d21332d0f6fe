"""Completion time of a workload as a function of CPU allocation and frequency.

    CT(cpu, f) = [theta(f) * base_cpu / cpu + (1 - theta(f))]
                 * [U * f_max / f + (1 - U)] * CT(base_cpu, f_max)

``U`` is the frequency-dependent share of the run time and ``theta(f)`` the
share that scales with CPU allocation. ``theta`` is linear in
``f_max / f - 1`` with slope ``k``, so two endpoints determine it everywhere.
``base_cpu`` is the reference allocation (1.0 normally, 0.8 for workloads
that slow down at full allocation).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    CalibrationWarning,
    DegenerateProbe,
    FrequencyGrid,
    InputError,
    InvalidCalibration,
    MissingCornerPoint,
    NonPositiveCT,
    _as_mhz,
    check_cpu,
    validate_grid,
)
from .measurements import COMPLETION, MeasurementSet
from .power import linear_fit

DEFAULT_PROBE_CPU = 0.2
PLAUSIBLE_RANGE = (-0.1, 1.5)


@dataclass(frozen=True)
class CtCalibrationInputs:
    grid: FrequencyGrid
    ct_base_fmax: float
    ct_base_fmin: float
    ct_probe_fmax: float
    ct_probe_fmin: float
    base_cpu: float = 1.0
    probe_cpu: float = DEFAULT_PROBE_CPU

    def __post_init__(self) -> None:
        cts = (self.ct_base_fmax, self.ct_base_fmin, self.ct_probe_fmax, self.ct_probe_fmin)
        if not all(math.isfinite(v) and v > 0 for v in cts):
            raise NonPositiveCT(f"completion times must be positive and finite, got {cts}")
        base = check_cpu(self.base_cpu)
        probe = check_cpu(self.probe_cpu)
        if probe == base:
            raise DegenerateProbe(f"probe cpu equals base cpu ({base}); theta is undetermined")
        if probe > base:
            raise InvalidCalibration(f"probe cpu {probe} must be below base cpu {base}")

    @classmethod
    def from_measurements(cls, ms: MeasurementSet, grid: FrequencyGrid, workload_id: str,
                          base_cpu: float = 1.0,
                          probe_cpu: float = DEFAULT_PROBE_CPU) -> "CtCalibrationInputs":
        if check_cpu(base_cpu) == check_cpu(probe_cpu):
            raise DegenerateProbe(f"probe cpu equals base cpu ({base_cpu})")
        values = {}
        for name, cpu, f in (
            ("ct_base_fmax", base_cpu, grid.f_max),
            ("ct_base_fmin", base_cpu, grid.f_min),
            ("ct_probe_fmax", probe_cpu, grid.f_max),
            ("ct_probe_fmin", probe_cpu, grid.f_min),
        ):
            value = ms.lookup(COMPLETION, cpu, f, workload_id)
            if value is None:
                raise MissingCornerPoint(
                    f"no completion_seconds row for {workload_id!r} at cpu={cpu}, freq_mhz={f}"
                )
            values[name] = value
        return cls(grid, base_cpu=base_cpu, probe_cpu=probe_cpu, **values)


@dataclass(frozen=True)
class CompletionTimeModel:
    grid: FrequencyGrid
    workload_id: str
    u: float
    theta_fmax: float
    theta_fmin: float
    k: float
    base_cpu: float
    ct_base_fmax: float
    probe_cpu: float = DEFAULT_PROBE_CPU
    system_id: str = ""

    metric = COMPLETION
    name = "ct_model"

    @property
    def v(self) -> float:
        return 1.0 - self.u

    def theta(self, f) -> float:
        return self._theta(self.grid.require(f))

    def mu(self, f) -> float:
        return 1.0 - self.theta(f)

    def _theta(self, f: int) -> float:
        # k * (f_max / f - 1) + theta_fmax, written as a blend of the two
        # endpoints so both are reproduced exactly (weight is 1.0 at f_min)
        f_min, f_max = self.grid.f_min, self.grid.f_max
        w = (f_min * (f_max - f)) / (f * (f_max - f_min))
        return self.theta_fmin * w + self.theta_fmax * (1.0 - w)

    def _predict(self, cpu: float, f: int) -> float:
        theta = self._theta(f)
        cpu_term = theta * self.base_cpu / cpu + (1.0 - theta)
        freq_term = 1.0 + self.u * ((self.grid.f_max - f) / f)
        return cpu_term * freq_term * self.ct_base_fmax

    def predict(self, cpu, f) -> float:
        return self._predict(check_cpu(cpu), self.grid.require(f))

    def extrapolates(self, cpu: float) -> bool:
        """True when ``cpu`` lies above the reference allocation the model was built on."""
        return cpu > self.base_cpu

    def calibration_points(self) -> set[tuple[float, int]]:
        g = self.grid
        return {(self.base_cpu, g.f_max), (self.base_cpu, g.f_min),
                (self.probe_cpu, g.f_max), (self.probe_cpu, g.f_min)}

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "workload_id": self.workload_id,
            "grid_mhz": list(self.grid.steps),
            "u": self.u,
            "theta_fmax": self.theta_fmax,
            "theta_fmin": self.theta_fmin,
            "k": self.k,
            "base_cpu": self.base_cpu,
            "ct_base_fmax_s": self.ct_base_fmax,
            "probe_cpu": self.probe_cpu,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CompletionTimeModel":
        try:
            model = cls(
                grid=validate_grid(doc["grid_mhz"]),
                workload_id=str(doc["workload_id"]),
                u=float(doc["u"]),
                theta_fmax=float(doc["theta_fmax"]),
                theta_fmin=float(doc["theta_fmin"]),
                k=float(doc["k"]),
                base_cpu=float(doc["base_cpu"]),
                ct_base_fmax=float(doc["ct_base_fmax_s"]),
                probe_cpu=float(doc.get("probe_cpu", DEFAULT_PROBE_CPU)),
                system_id=str(doc.get("system_id", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"not a completion-time model document: {exc}") from None
        g = model.grid
        expected = theta_slope(model.theta_fmin, model.theta_fmax, g.f_min, g.f_max)
        if not math.isclose(model.k, expected, rel_tol=1e-9, abs_tol=1e-12):
            raise InputError(f"k = {model.k} is inconsistent with the theta endpoints (expected {expected})")
        return model


def _theta_at(base_cpu: float, probe_cpu: float, ct_base: float, ct_probe: float) -> float:
    return (probe_cpu / (base_cpu - probe_cpu)) * ((ct_probe - ct_base) / ct_base)


def _warn_if_implausible(name: str, value: float) -> None:
    lo, hi = PLAUSIBLE_RANGE
    if not lo <= value <= hi:
        warnings.warn(f"{name} = {value:.4g} is outside [{lo}, {hi}]; check the measurements",
                      CalibrationWarning, stacklevel=3)


def calibrate_ct(inputs: CtCalibrationInputs, workload_id: str = "",
                 system_id: str = "") -> CompletionTimeModel:
    g = inputs.grid
    span = g.f_max - g.f_min
    u = ((inputs.ct_base_fmin - inputs.ct_base_fmax) / inputs.ct_base_fmax) * (g.f_min / span)
    theta_fmax = _theta_at(inputs.base_cpu, inputs.probe_cpu, inputs.ct_base_fmax, inputs.ct_probe_fmax)
    theta_fmin = _theta_at(inputs.base_cpu, inputs.probe_cpu, inputs.ct_base_fmin, inputs.ct_probe_fmin)
    k = theta_slope(theta_fmin, theta_fmax, g.f_min, g.f_max)
    _warn_if_implausible("U", u)
    _warn_if_implausible("theta at f_max", theta_fmax)
    _warn_if_implausible("theta at f_min", theta_fmin)
    return CompletionTimeModel(
        grid=g, workload_id=workload_id, u=u, theta_fmax=theta_fmax, theta_fmin=theta_fmin,
        k=k, base_cpu=inputs.base_cpu, ct_base_fmax=inputs.ct_base_fmax,
        probe_cpu=inputs.probe_cpu, system_id=system_id,
    )


def predict_ct(model: CompletionTimeModel, cpu, f) -> float:
    return model.predict(cpu, f)


def theta_slope(theta_fmin: float, theta_fmax: float, f_min: int, f_max: int) -> float:
    return (theta_fmin - theta_fmax) * (f_min / (f_max - f_min))


def fit_theta_slope(freqs: Sequence, thetas: Sequence[float],
                    f_max: int) -> tuple[float, float, float]:
    """Regress per-frequency theta on ``f_max / f - 1``; returns (K, theta at f_max, R^2).

    Diagnostic only: the model itself always uses the two-endpoint slope.
    """
    x = [f_max / _as_mhz(f) - 1.0 for f in freqs]
    return linear_fit(x, thetas)


def petrucci_ct(r_at_fmax: float, cpu, f, grid: FrequencyGrid) -> float:
    """Baseline that treats the whole run as CPU- and frequency-bound."""
    cpu = check_cpu(cpu)
    f = grid.require(f)
    return r_at_fmax / (cpu * f / grid.f_max)


@dataclass(frozen=True)
class PetrucciCtModel:
    grid: FrequencyGrid
    r_at_fmax: float
    workload_id: str = ""
    system_id: str = ""
    corner_points: Optional[frozenset] = None

    metric = COMPLETION
    name = "petrucci_ct"

    def predict(self, cpu, f) -> float:
        return petrucci_ct(self.r_at_fmax, cpu, f, self.grid)

    def calibration_points(self) -> set[tuple[float, int]]:
        if self.corner_points is not None:
            return set(self.corner_points)
        return {(1.0, self.grid.f_max)}

    @classmethod
    def from_model(cls, model: CompletionTimeModel) -> "PetrucciCtModel":
        """Baseline anchored at the model's reference run, sharing its calibration corners."""
        return cls(model.grid, model.ct_base_fmax, model.workload_id, model.system_id,
                   frozenset(model.calibration_points()))
