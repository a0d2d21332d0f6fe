"""Choose a (frequency, CPU) operating point from a power model and a completion-time model.

Scenario 1 minimises predicted power subject to a completion-time threshold.
Scenario 2 minimises predicted completion time subject to a power budget.
Both enumerate every grid frequency against CPU levels ``step, 2*step, ..., 1.0``
and break ties toward lower frequency, then lower CPU.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .comptime import CompletionTimeModel
from .core import GridMismatch, InfeasibleConstraint, InputError, SystemMismatch
from .power import PowerModel

DEFAULT_CPU_STEP = 0.01
CPU_STEP_ENV = "DVFS_CPU_STEP"

MIN_POWER = "min_power"
MIN_CT = "min_ct"


def default_cpu_step() -> float:
    raw = os.environ.get(CPU_STEP_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_CPU_STEP
    try:
        return check_cpu_step(float(raw))
    except ValueError:
        raise InputError(f"{CPU_STEP_ENV}={raw!r} is not a number") from None


def check_cpu_step(step: float) -> float:
    if not (math.isfinite(step) and 0 < step <= 1):
        raise InputError(f"cpu step must lie in (0, 1], got {step}")
    return step


def cpu_levels(step: float) -> list[float]:
    """``step, 2*step, ...`` up to 1.0; 1.0 is always the last level."""
    check_cpu_step(step)
    n = int(math.floor(1.0 / step + 1e-9))
    levels = [round(k * step, 12) for k in range(1, n + 1)]
    if not levels or levels[-1] < 1.0:
        if levels and 1.0 - levels[-1] < 1e-9:
            levels[-1] = 1.0
        else:
            levels.append(1.0)
    return levels


@dataclass(frozen=True)
class OperatingPoint:
    freq_mhz: int
    cpu: float
    power_w: float
    ct_s: float

    def to_dict(self) -> dict:
        return {"freq_mhz": self.freq_mhz, "cpu": self.cpu, "power_w": self.power_w, "ct_s": self.ct_s}


@dataclass(frozen=True)
class ProvisionPlan:
    scenario: int
    objective: str
    constraint: dict
    chosen: OperatingPoint
    reference: Optional[OperatingPoint]
    savings_percent: Optional[float]
    candidates_considered: int
    system_id: str = ""
    workload_id: str = ""

    @property
    def objective_value(self) -> float:
        return self.chosen.power_w if self.objective == MIN_POWER else self.chosen.ct_s

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "objective": self.objective,
            "system_id": self.system_id,
            "workload_id": self.workload_id,
            "constraint": dict(self.constraint),
            "chosen": self.chosen.to_dict(),
            "reference": self.reference.to_dict() if self.reference else None,
            "savings_percent": self.savings_percent,
            "candidates_considered": self.candidates_considered,
        }


def check_pair(pm: PowerModel, ctm: CompletionTimeModel) -> None:
    if pm.grid != ctm.grid:
        raise GridMismatch(
            f"power model grid {list(pm.grid)} differs from completion-time grid {list(ctm.grid)}"
        )
    if pm.system_id and ctm.system_id and pm.system_id != ctm.system_id:
        raise SystemMismatch(f"power model is for {pm.system_id!r}, CT model for {ctm.system_id!r}")


def enumerate_points(pm: PowerModel, ctm: CompletionTimeModel, cpu_step: float) -> list[OperatingPoint]:
    check_pair(pm, ctm)
    levels = cpu_levels(cpu_step)
    return [
        OperatingPoint(f, cpu, pm._predict(cpu, f), ctm._predict(cpu, f))
        for f in pm.grid.steps
        for cpu in levels
    ]


def enumerate_feasible(pm: PowerModel, ctm: CompletionTimeModel, *,
                       ct_threshold: Optional[float] = None,
                       power_budget: Optional[float] = None,
                       cpu_step: Optional[float] = None) -> list[OperatingPoint]:
    """All grid points meeting the CT threshold and/or the power budget."""
    step = default_cpu_step() if cpu_step is None else cpu_step
    points = enumerate_points(pm, ctm, step)
    feasible = [
        p for p in points
        if (ct_threshold is None or p.ct_s <= ct_threshold)
        and (power_budget is None or p.power_w <= power_budget)
    ]
    if not feasible:
        raise InfeasibleConstraint(
            f"no operating point satisfies ct_threshold={ct_threshold}, power_budget={power_budget}"
        )
    return feasible


def _best(points: Sequence[OperatingPoint], objective: str) -> OperatingPoint:
    if objective == MIN_POWER:
        return min(points, key=lambda p: (p.power_w, p.freq_mhz, p.cpu))
    return min(points, key=lambda p: (p.ct_s, p.freq_mhz, p.cpu))


def _percent_reduction(reference: float, chosen: float) -> float:
    return (reference - chosen) / reference * 100.0


def plan_scenario1(pm: PowerModel, ctm: CompletionTimeModel, ct_threshold: float,
                   cpu_step: Optional[float] = None) -> ProvisionPlan:
    """Least-power point whose predicted completion time is within ``ct_threshold``.

    Savings are measured against the smallest CPU allocation at f_max that
    meets the same threshold; they are None when f_max cannot meet it.
    """
    feasible = enumerate_feasible(pm, ctm, ct_threshold=ct_threshold, cpu_step=cpu_step)
    chosen = _best(feasible, MIN_POWER)
    at_fmax = [p for p in feasible if p.freq_mhz == pm.grid.f_max]
    reference = min(at_fmax, key=lambda p: p.cpu) if at_fmax else None
    savings = _percent_reduction(reference.power_w, chosen.power_w) if reference else None
    return ProvisionPlan(1, MIN_POWER, {"ct_threshold_s": ct_threshold}, chosen, reference,
                         savings, len(feasible), pm.system_id or ctm.system_id, ctm.workload_id)


def plan_scenario2(pm: PowerModel, ctm: CompletionTimeModel, power_budget: float,
                   cpu_step: Optional[float] = None) -> ProvisionPlan:
    """Fastest point whose predicted power stays within ``power_budget``.

    The speedup is measured against the fastest point at f_max under the same
    budget; it is None when no f_max point fits the budget.
    """
    feasible = enumerate_feasible(pm, ctm, power_budget=power_budget, cpu_step=cpu_step)
    chosen = _best(feasible, MIN_CT)
    at_fmax = [p for p in feasible if p.freq_mhz == pm.grid.f_max]
    reference = _best(at_fmax, MIN_CT) if at_fmax else None
    speedup = _percent_reduction(reference.ct_s, chosen.ct_s) if reference else None
    return ProvisionPlan(2, MIN_CT, {"power_budget_w": power_budget}, chosen, reference,
                         speedup, len(feasible), pm.system_id or ctm.system_id, ctm.workload_id)


def plan(pm: PowerModel, ctm: CompletionTimeModel, scenario: int, constraint: float,
         cpu_step: Optional[float] = None) -> ProvisionPlan:
    if scenario == 1:
        return plan_scenario1(pm, ctm, constraint, cpu_step)
    if scenario == 2:
        return plan_scenario2(pm, ctm, constraint, cpu_step)
    raise InputError(f"scenario must be 1 or 2, got {scenario}")


def best_plan(plans: Sequence[ProvisionPlan]) -> int:
    """Index of the plan with the best objective value; earlier plans win ties."""
    if not plans:
        raise InputError("no plans to compare")
    return min(range(len(plans)), key=lambda i: (plans[i].objective_value, i))
