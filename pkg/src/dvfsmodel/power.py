"""Server power as a function of CPU allocation and operating frequency.

    P(cpu, f) = P_idle(f_max) - alpha * (f_max - f) / f_max + (A * f / f_max + B) * cpu

The idle term is linear in relative frequency with slope ``alpha``; the
dynamic slope ``beta(f) = A * f / f_max + B`` is linear in relative frequency
too. Four power readings at the (idle, full) x (f_min, f_max) corners fix all
three constants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    CalibrationWarning,
    FrequencyGrid,
    InputError,
    InsufficientData,
    InvalidCalibration,
    MissingCornerPoint,
    _as_mhz,
    check_cpu,
    validate_grid,
)
from .measurements import POWER, MeasurementSet, cpu_key

CLOSED_FORM = "closed_form"
LEAST_SQUARES = "least_squares"


@dataclass(frozen=True)
class PowerCalibrationInputs:
    """The four corner power readings (watts) at f_min and f_max."""

    grid: FrequencyGrid
    p_idle_fmin: float
    p_idle_fmax: float
    p_full_fmin: float
    p_full_fmax: float

    def __post_init__(self) -> None:
        values = (self.p_idle_fmin, self.p_idle_fmax, self.p_full_fmin, self.p_full_fmax)
        if not all(math.isfinite(v) for v in values):
            raise InvalidCalibration(f"power inputs must be finite, got {values}")
        if not self.p_idle_fmax < self.p_full_fmax:
            raise InvalidCalibration(
                "full-load power at f_max must exceed idle power at f_max "
                f"({self.p_full_fmax} <= {self.p_idle_fmax})"
            )
        if self.p_idle_fmin > self.p_idle_fmax:
            warnings.warn(
                f"idle power falls with frequency ({self.p_idle_fmin} W at f_min > "
                f"{self.p_idle_fmax} W at f_max); alpha will be negative",
                CalibrationWarning, stacklevel=3,
            )
        if self.p_full_fmin > self.p_full_fmax:
            warnings.warn(
                f"full-load power falls with frequency ({self.p_full_fmin} W at f_min > "
                f"{self.p_full_fmax} W at f_max)",
                CalibrationWarning, stacklevel=3,
            )

    @classmethod
    def from_measurements(cls, ms: MeasurementSet, grid: FrequencyGrid) -> "PowerCalibrationInputs":
        corners = {}
        for name, cpu, f in (
            ("p_idle_fmin", 0.0, grid.f_min),
            ("p_idle_fmax", 0.0, grid.f_max),
            ("p_full_fmin", 1.0, grid.f_min),
            ("p_full_fmax", 1.0, grid.f_max),
        ):
            value = ms.lookup(POWER, cpu, f)
            if value is None:
                raise MissingCornerPoint(f"no power_watts row at cpu={cpu}, freq_mhz={f}")
            corners[name] = value
        return cls(grid, **corners)

    def dynamic_range_percent(self) -> float:
        return dynamic_range_percent(self)


def dynamic_range_percent(inputs: PowerCalibrationInputs) -> float:
    """Share of peak power above the lowest idle power, in percent.

    Peak is full load at f_max; the floor is idle at f_min.
    """
    return (inputs.p_full_fmax - inputs.p_idle_fmin) / inputs.p_full_fmax * 100.0


@dataclass(frozen=True)
class PowerModel:
    grid: FrequencyGrid
    p_idle_fmax: float
    alpha: float
    a: float
    b: float
    system_id: str = ""
    source: str = CLOSED_FORM
    r_squared: Optional[float] = None

    metric = POWER
    workload_id = None
    name = "power_model"

    def beta(self, f) -> float:
        f = self.grid.require(f)
        return self.a * f / self.grid.f_max + self.b

    def idle(self, f) -> float:
        f = self.grid.require(f)
        return self._idle(f)

    def _idle(self, f: int) -> float:
        f_max = self.grid.f_max
        return self.p_idle_fmax - self.alpha * ((f_max - f) / f_max)

    def _predict(self, cpu: float, f: int) -> float:
        f_max = self.grid.f_max
        return (self.p_idle_fmax - self.alpha * ((f_max - f) / f_max)
                + (self.a * f / f_max + self.b) * cpu)

    def predict(self, cpu, f) -> float:
        return self._predict(check_cpu(cpu, allow_zero=True), self.grid.require(f))

    def calibration_points(self) -> set[tuple[float, int]]:
        return {(0.0, self.grid.f_min), (0.0, self.grid.f_max),
                (1.0, self.grid.f_min), (1.0, self.grid.f_max)}

    def corners(self) -> PowerCalibrationInputs:
        """Corner powers implied by the model (the calibration inputs, for closed-form models)."""
        lo, hi = self.grid.f_min, self.grid.f_max
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CalibrationWarning)
            return PowerCalibrationInputs(
                self.grid,
                p_idle_fmin=self._predict(0.0, lo),
                p_idle_fmax=self._predict(0.0, hi),
                p_full_fmin=self._predict(1.0, lo),
                p_full_fmax=self._predict(1.0, hi),
            )

    def to_dict(self) -> dict:
        doc = {
            "system_id": self.system_id,
            "grid_mhz": list(self.grid.steps),
            "p_idle_fmax_w": self.p_idle_fmax,
            "alpha_w": self.alpha,
            "a_w": self.a,
            "b_w": self.b,
            "source": self.source,
        }
        if self.r_squared is not None:
            doc["r_squared"] = self.r_squared
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "PowerModel":
        try:
            return cls(
                grid=validate_grid(doc["grid_mhz"]),
                p_idle_fmax=float(doc["p_idle_fmax_w"]),
                alpha=float(doc["alpha_w"]),
                a=float(doc["a_w"]),
                b=float(doc["b_w"]),
                system_id=str(doc.get("system_id", "")),
                source=doc.get("source", CLOSED_FORM),
                r_squared=doc.get("r_squared"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"not a power model document: {exc}") from None


def calibrate_power(inputs: PowerCalibrationInputs, system_id: str = "") -> PowerModel:
    grid = inputs.grid
    scale = grid.f_max / (grid.f_max - grid.f_min)
    dyn_fmax = inputs.p_full_fmax - inputs.p_idle_fmax
    dyn_fmin = inputs.p_full_fmin - inputs.p_idle_fmin
    a = (dyn_fmax - dyn_fmin) * scale
    b = dyn_fmax - a
    alpha = (inputs.p_idle_fmax - inputs.p_idle_fmin) * scale
    # beta(f_min) equals dyn_fmin algebraically; test the exact difference
    if dyn_fmin < 0:
        raise InvalidCalibration(
            f"dynamic power slope at f_min is negative ({dyn_fmin:.4g} W); "
            "full-load power at f_min is below idle power"
        )
    return PowerModel(grid, inputs.p_idle_fmax, alpha, a, b, system_id=system_id)


def predict_power(model: PowerModel, cpu, f) -> float:
    return model.predict(cpu, f)


def effective_frequency(per_core: Sequence, grid: Optional[FrequencyGrid] = None) -> int:
    """Frequency that determines chip power: the highest per-core frequency."""
    if not per_core:
        raise InputError("per-core frequency list is empty")
    freqs = [grid.require(f) if grid is not None else _as_mhz(f) for f in per_core]
    return max(freqs)


def petrucci_power(inputs: PowerCalibrationInputs, cpu, f) -> float:
    """Baseline with quadratic interpolation of idle and peak power in frequency."""
    grid = inputs.grid
    f = grid.require(f)
    cpu = check_cpu(cpu, allow_zero=True)
    frac = (f - grid.f_min) ** 2 / (grid.f_max - grid.f_min) ** 2
    p_min = inputs.p_idle_fmin + (inputs.p_idle_fmax - inputs.p_idle_fmin) * frac
    p_max = inputs.p_full_fmin + (inputs.p_full_fmax - inputs.p_full_fmin) * frac
    return p_min + (p_max - p_min) * cpu


@dataclass(frozen=True)
class PetrucciPowerModel:
    inputs: PowerCalibrationInputs
    system_id: str = ""

    metric = POWER
    workload_id = None
    name = "petrucci_power"

    @property
    def grid(self) -> FrequencyGrid:
        return self.inputs.grid

    def predict(self, cpu, f) -> float:
        return petrucci_power(self.inputs, cpu, f)

    def calibration_points(self) -> set[tuple[float, int]]:
        g = self.inputs.grid
        return {(0.0, g.f_min), (0.0, g.f_max), (1.0, g.f_min), (1.0, g.f_max)}

    @classmethod
    def from_model(cls, model: PowerModel) -> "PetrucciPowerModel":
        return cls(model.corners(), system_id=model.system_id)


def linear_fit(x, y) -> tuple[float, float, float]:
    """Ordinary least squares ``y = slope * x + intercept``; returns (slope, intercept, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise InsufficientData("need at least two distinct x values for a line fit")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def fit_beta_line(freqs: Sequence, betas: Sequence[float], f_max: int) -> tuple[float, float, float]:
    """Regress per-frequency dynamic slopes on relative frequency; returns (A, B, R^2)."""
    rel = [_as_mhz(f) / f_max for f in freqs]
    return linear_fit(rel, betas)


@dataclass(frozen=True)
class PowerFit:
    idle_r_squared: float
    beta_r_squared: float
    betas: dict = field(default_factory=dict)
    beta_r_squared_by_freq: dict = field(default_factory=dict)


def fit_power_least_squares(ms: MeasurementSet, grid: Optional[FrequencyGrid] = None,
                            system_id: Optional[str] = None) -> tuple[PowerModel, PowerFit]:
    """Fit alpha, A and B from a full power sweep rather than the four corners.

    Idle rows give the idle line against relative frequency; each frequency
    with at least two CPU levels gives a dynamic slope, and those slopes are
    regressed on relative frequency.
    """
    rows = ms.power()
    if grid is None:
        if len({r.freq_mhz for r in rows}) < 2:
            raise InsufficientData("power sweep covers fewer than two frequencies")
        grid = validate_grid(r.freq_mhz for r in rows)
    f_max = grid.f_max

    idle = [r for r in rows if r.cpu == 0.0]
    if len({r.freq_mhz for r in idle}) < 2:
        raise InsufficientData("need idle power at two or more frequencies")
    slope, p_idle_fmax, idle_r2 = linear_fit(
        [(f_max - r.freq_mhz) / f_max for r in idle], [r.value for r in idle]
    )
    alpha = -slope

    by_freq: dict[int, list] = {}
    for r in rows:
        by_freq.setdefault(r.freq_mhz, []).append(r)
    betas, per_freq_r2 = {}, {}
    for f in sorted(by_freq):
        pts = by_freq[f]
        if len({cpu_key(r.cpu) for r in pts}) < 2:
            continue
        betas[f], _, per_freq_r2[f] = linear_fit([r.cpu for r in pts], [r.value for r in pts])
    if len(betas) < 2:
        raise InsufficientData("need two or more CPU levels at two or more frequencies")
    a, b, beta_r2 = fit_beta_line(list(betas), list(betas.values()), f_max)

    if a * grid.f_min / f_max + b < 0:
        raise InvalidCalibration("fitted dynamic power slope is negative at f_min")
    model = PowerModel(
        grid, p_idle_fmax, alpha, a, b,
        system_id=ms.system_id if system_id is None else system_id,
        source=LEAST_SQUARES, r_squared=beta_r2,
    )
    return model, PowerFit(idle_r2, beta_r2, betas, per_freq_r2)
