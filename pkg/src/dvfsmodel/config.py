"""Per-machine configuration file.

Example::

    {
      "system_id": "i5-760",
      "grid_mhz": ["low", 1862, 1995, 2128, 2261, 2394, 2527, 2660, 2793, "turbo"],
      "low_effective_mhz": 1197,
      "turbo_effective_mhz": 2926,
      "notes": "turbo and low modes mapped to assumed effective clocks"
    }

``"turbo"`` and ``"low"`` entries are replaced by the effective frequencies.
An effective frequency given without a matching marker is added to the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import FrequencyGrid, InputError, validate_grid

_MARKERS = ("turbo", "low")


@dataclass(frozen=True)
class MachineConfig:
    system_id: str
    grid_mhz: tuple
    turbo_effective_mhz: Optional[int] = None
    low_effective_mhz: Optional[int] = None
    notes: str = ""

    def grid(self) -> FrequencyGrid:
        effective = {"turbo": self.turbo_effective_mhz, "low": self.low_effective_mhz}
        steps = []
        for entry in self.grid_mhz:
            if isinstance(entry, str) and entry.strip().lower() in _MARKERS:
                mode = entry.strip().lower()
                if effective[mode] is None:
                    raise InputError(f"grid lists {mode!r} but {mode}_effective_mhz is not set")
                steps.append(effective[mode])
            else:
                steps.append(entry)
        for mode, mhz in effective.items():
            if mhz is not None and mode not in [str(e).strip().lower() for e in self.grid_mhz]:
                steps.append(mhz)
        return validate_grid(steps)

    @classmethod
    def from_dict(cls, doc: dict) -> "MachineConfig":
        if not isinstance(doc, dict) or "grid_mhz" not in doc:
            raise InputError("machine config needs a grid_mhz list")
        return cls(
            system_id=str(doc.get("system_id", "")),
            grid_mhz=tuple(doc["grid_mhz"]),
            turbo_effective_mhz=doc.get("turbo_effective_mhz"),
            low_effective_mhz=doc.get("low_effective_mhz"),
            notes=str(doc.get("notes", "")),
        )

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "grid_mhz": list(self.grid_mhz),
            "turbo_effective_mhz": self.turbo_effective_mhz,
            "low_effective_mhz": self.low_effective_mhz,
            "notes": self.notes,
        }


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_machine_config(path) -> MachineConfig:
    return MachineConfig.from_dict(load_json(path))
