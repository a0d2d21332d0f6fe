"""Shared domain types: frequency grids, CPU fractions, prediction error, exceptions.

Frequencies are integer MHz throughout. CPU allocations are fractions of the
whole machine in (0, 1]; idle (0.0) only appears in power measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


class ModelError(Exception):
    """Base class for domain errors. Maps to CLI exit code 2."""

    exit_code = 2


class InputError(ModelError):
    """Malformed or incomplete input data. Maps to CLI exit code 1."""

    exit_code = 1


class EmptyGrid(ModelError):
    pass


class SingleStep(ModelError):
    pass


class FrequencyNotOnGrid(ModelError):
    pass


class ZeroCpu(ModelError):
    pass


class InvalidCpu(ModelError):
    pass


class NonPositiveMeasured(ModelError):
    pass


class InvalidCalibration(ModelError):
    pass


class InsufficientData(ModelError):
    pass


class NonPositiveCT(InvalidCalibration):
    pass


class DegenerateProbe(InvalidCalibration):
    pass


class SystemMismatch(ModelError):
    pass


class GridMismatch(ModelError):
    pass


class InfeasibleConstraint(ModelError):
    pass


class NoMatchingPoints(ModelError):
    pass


class PointSetMismatch(ModelError):
    pass


class MissingCornerPoint(InputError):
    pass


class MeasurementFormatError(InputError):
    pass


class CalibrationWarning(UserWarning):
    """Calibration succeeded but the inputs or constants look suspicious."""


def _as_mhz(value) -> int:
    if isinstance(value, bool):
        raise InputError(f"frequency must be an integer MHz value, got {value!r}")
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise InputError(f"frequency must be an integer MHz value, got {value!r}") from None
    if not math.isfinite(as_float) or as_float != int(as_float):
        raise InputError(f"frequency must be an integer MHz value, got {value!r}")
    mhz = int(as_float)
    if mhz <= 0:
        raise InputError(f"frequency must be positive, got {mhz} MHz")
    return mhz


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing frequency steps of one machine, in MHz."""

    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise EmptyGrid("frequency grid has no steps")
        if any(b <= a for a, b in zip(self.steps, self.steps[1:])):
            raise InputError(f"grid steps must be strictly increasing: {self.steps}")
        if len(self.steps) < 2:
            raise SingleStep(
                f"grid needs at least two distinct frequencies, got {self.steps}"
            )

    @property
    def f_min(self) -> int:
        return self.steps[0]

    @property
    def f_max(self) -> int:
        return self.steps[-1]

    def __contains__(self, f: object) -> bool:
        return f in self.steps

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def require(self, f) -> int:
        """Return ``f`` as int MHz, raising FrequencyNotOnGrid if it is not a step."""
        try:
            mhz = _as_mhz(f)
        except InputError:
            raise FrequencyNotOnGrid(f"{f!r} is not a grid frequency") from None
        if mhz not in self.steps:
            raise FrequencyNotOnGrid(
                f"{mhz} MHz is not on the grid {list(self.steps)}"
            )
        return mhz


def validate_grid(steps: Iterable) -> FrequencyGrid:
    """Build a grid from unordered, possibly duplicated MHz values."""
    values = sorted({_as_mhz(s) for s in steps})
    if not values:
        raise EmptyGrid("frequency grid has no steps")
    if len(values) == 1:
        raise SingleStep(
            f"only one distinct frequency ({values[0]} MHz); calibration needs f_min < f_max"
        )
    return FrequencyGrid(tuple(values))


def check_cpu(cpu, allow_zero: bool = False) -> float:
    """Validate a CPU fraction. Zero is accepted only for idle power queries."""
    try:
        value = float(cpu)
    except (TypeError, ValueError):
        raise InvalidCpu(f"cpu must be a number in (0, 1], got {cpu!r}") from None
    if not math.isfinite(value):
        raise InvalidCpu(f"cpu must be finite, got {cpu!r}")
    if value == 0.0 and not allow_zero:
        raise ZeroCpu("cpu must be > 0 for this prediction")
    if value < 0.0 or value > 1.0:
        raise InvalidCpu(f"cpu must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class PredictionError:
    measured: float
    predicted: float
    percent: float


def error_percent(measured: float, predicted: float) -> PredictionError:
    """Absolute deviation of ``predicted`` from ``measured`` as a percentage of measured."""
    if not measured > 0:
        raise NonPositiveMeasured(f"measured value must be positive, got {measured}")
    percent = abs(measured - predicted) / measured * 100.0
    return PredictionError(float(measured), float(predicted), percent)
