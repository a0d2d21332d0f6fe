"""Power and completion-time models over CPU allocation and DVFS frequency,
plus a planner that combines them to provision VMs."""

from .comptime import (
    CompletionTimeModel,
    CtCalibrationInputs,
    PetrucciCtModel,
    calibrate_ct,
    fit_theta_slope,
    petrucci_ct,
    predict_ct,
)
from .config import MachineConfig
from .core import FrequencyGrid, PredictionError, check_cpu, error_percent, validate_grid
from .measurements import Measurement, MeasurementSet, parse_csv, read_csv
from .planner import (
    OperatingPoint,
    ProvisionPlan,
    enumerate_feasible,
    plan_scenario1,
    plan_scenario2,
)
from .power import (
    PetrucciPowerModel,
    PowerCalibrationInputs,
    PowerModel,
    calibrate_power,
    dynamic_range_percent,
    effective_frequency,
    fit_beta_line,
    fit_power_least_squares,
    petrucci_power,
    predict_power,
)
from .validation import ErrorReport, compare, evaluate

__all__ = [
    "CompletionTimeModel", "CtCalibrationInputs", "ErrorReport", "FrequencyGrid",
    "MachineConfig", "Measurement", "MeasurementSet", "OperatingPoint",
    "PetrucciCtModel", "PetrucciPowerModel", "PowerCalibrationInputs", "PowerModel",
    "PredictionError", "ProvisionPlan", "calibrate_ct", "calibrate_power", "check_cpu",
    "compare", "dynamic_range_percent", "effective_frequency", "enumerate_feasible",
    "error_percent", "evaluate", "fit_beta_line", "fit_power_least_squares",
    "fit_theta_slope", "parse_csv", "petrucci_ct", "petrucci_power", "plan_scenario1",
    "plan_scenario2", "predict_ct", "predict_power", "read_csv", "validate_grid",
]
