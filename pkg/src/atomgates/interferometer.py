"""Mach-Zehnder BS - M - BS sequences on the internal two-level space."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from atomgates.core import KET_0, check_unitary
from atomgates.cost import GateKind, gate_matrix


@dataclass(frozen=True)
class MzSequence:
    """Beam splitter, mirror, relative phase ``diag(1, e^{i phase})``, beam splitter."""

    bs_gate: np.ndarray
    mirror_gate: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "bs_gate", check_unitary(self.bs_gate, "beam-splitter gate"))
        object.__setattr__(self, "mirror_gate", check_unitary(self.mirror_gate, "mirror gate"))

    @classmethod
    def ideal(cls, phase: float = 0.0) -> "MzSequence":
        return cls(gate_matrix(GateKind.BEAM_SPLITTER), gate_matrix(GateKind.MIRROR), phase)

    def total_unitary(self) -> np.ndarray:
        shift = np.diag([1.0, complex(math.cos(self.phase), math.sin(self.phase))])
        return self.bs_gate @ shift @ self.mirror_gate @ self.bs_gate


@dataclass(frozen=True)
class FringeScan:
    phases: tuple[float, ...]
    transfer_probabilities: tuple[float, ...]
    visibility: float


def output_probabilities(seq: MzSequence, initial=KET_0) -> tuple[float, float]:
    """Populations of ``|0>`` and ``|1>`` after the sequence."""
    out = seq.total_unitary() @ np.asarray(initial, dtype=complex)
    return float(abs(out[0]) ** 2), float(abs(out[1]) ** 2)


def mz_transfer_probability(seq: MzSequence, initial=KET_0) -> float:
    return output_probabilities(seq, initial)[1]


def visibility(probabilities: Sequence[float]) -> float:
    hi, lo = max(probabilities), min(probabilities)
    return 0.0 if hi + lo == 0 else (hi - lo) / (hi + lo)


def phase_grid(n: int) -> tuple[float, ...]:
    if n < 1:
        raise ValueError("phase grid needs at least one point")
    return tuple(float(x) for x in np.linspace(0.0, 2.0 * math.pi, n))


def fringe_scan(template: MzSequence, phases: Sequence[float], initial=KET_0) -> FringeScan:
    """Transfer probability at each phase, with the template's own phase replaced."""
    phases = tuple(float(p) for p in phases)
    if not phases:
        raise ValueError("phase grid is empty")
    probs = tuple(mz_transfer_probability(replace(template, phase=p), initial) for p in phases)
    return FringeScan(phases, probs, visibility(probs))
