from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

from ..errors import ConfigurationError
from .spectral import SpectralHeatKernel

_METADATA_KEYS = ("h", "m", "N", "node_count")


def spectrum_snapshot(spec: SpectralHeatKernel, modes: int = 0) -> Dict[str, object]:
    """JSON-ready {eigenvalues, h, m, N, node_count}; ``modes`` > 0 keeps the lowest ones."""
    values = spec.eigenvalues if modes <= 0 else spec.eigenvalues[:modes]
    return {
        "eigenvalues": [float(v) for v in values],
        "h": float(spec.spacing),
        "m": int(spec.m),
        "N": int(spec.N),
        "node_count": int(spec.node_count),
    }


def write_snapshot(spec: SpectralHeatKernel, path: Union[str, Path], modes: int = 0) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(spectrum_snapshot(spec, modes), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def load_snapshot(path: Union[str, Path]) -> Dict[str, object]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, dict) or "eigenvalues" not in payload:
        raise ConfigurationError(f"{path} is not a spectrum snapshot.")
    missing = [key for key in _METADATA_KEYS if key not in payload]
    if missing:
        raise ConfigurationError(f"spectrum snapshot is missing {', '.join(missing)}.")
    return payload


@dataclass
class SpectrumDiff:
    added_modes: List[int] = field(default_factory=list)
    removed_modes: List[int] = field(default_factory=list)
    changed_modes: List[Tuple[int, float, float]] = field(default_factory=list)
    changed_metadata: List[Tuple[str, object, object]] = field(default_factory=list)

    def has_changes(self) -> bool:
        return any(
            [
                self.added_modes,
                self.removed_modes,
                self.changed_modes,
                self.changed_metadata,
            ]
        )


def diff_spectra(before: Dict[str, object], after: Dict[str, object], rtol: float = 1e-10) -> SpectrumDiff:
    result = SpectrumDiff()
    for key in _METADATA_KEYS:
        if before.get(key) != after.get(key):
            result.changed_metadata.append((key, before.get(key), after.get(key)))

    old = list(before["eigenvalues"])
    new = list(after["eigenvalues"])
    for index in range(min(len(old), len(new))):
        a, b = float(old[index]), float(new[index])
        if abs(a - b) > rtol * max(abs(a), abs(b), 1.0):
            result.changed_modes.append((index, a, b))
    result.added_modes.extend(range(len(old), len(new)))
    result.removed_modes.extend(range(len(new), len(old)))
    return result
