"""Two-level atom propagation in hbar = 1 units.

Frequencies are angular (rad/s), times in seconds. A unitary is a plain
2x2 complex ``numpy`` array; a qubit state is a length-2 complex array.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

UNITARY_ATOL = 1e-12

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)


class PulseSample(NamedTuple):
    omega: float
    delta: float


@dataclass(frozen=True)
class PulseTrain:
    """Piecewise-constant drive: one ``(omega, delta)`` pair per time step."""

    dt: float
    phi: float
    omegas: tuple[float, ...]
    deltas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(x) for x in self.omegas))
        object.__setattr__(self, "deltas", tuple(float(x) for x in self.deltas))
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if len(self.omegas) != len(self.deltas):
            raise ValueError("omegas and deltas must have the same length")
        if not all(map(math.isfinite, self.omegas + self.deltas)):
            raise ValueError("pulse samples must be finite")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")

    @classmethod
    def from_samples(cls, dt: float, phi: float, samples: Sequence[PulseSample]) -> "PulseTrain":
        return cls(dt, phi, tuple(s[0] for s in samples), tuple(s[1] for s in samples))

    @property
    def samples(self) -> list[PulseSample]:
        return [PulseSample(o, d) for o, d in zip(self.omegas, self.deltas)]

    def __len__(self) -> int:
        return len(self.omegas)

    def _check_index(self, k: int) -> None:
        if not 0 <= k < len(self):
            raise IndexError(f"sample index {k} out of range for train of length {len(self)}")


class AxisAngle(NamedTuple):
    """Rotation by ``alpha`` radians about the unit vector ``axis``."""

    alpha: float
    axis: tuple[float, float, float]


@dataclass(frozen=True)
class RamanParams:
    omega1: float
    omega2: float
    delta: float
    phi1: float = 0.0
    phi2: float = 0.0


class RamanValidityWarning(UserWarning):
    """Single-photon detuning is not large against the Rabi frequencies."""


def cumulative_sums(train: PulseTrain, k: int) -> tuple[float, float]:
    """Return ``(sum(omegas[:k+1]), sum(deltas[:k+1]))``, accumulated left to right."""
    train._check_index(k)
    s_omega = 0.0
    s_delta = 0.0
    for n in range(k + 1):
        s_omega += train.omegas[n]
        s_delta += train.deltas[n]
    return s_omega, s_delta


def axis_angle_from_sums(s_omega: float, s_delta: float, dt: float, phi: float) -> AxisAngle:
    norm = math.hypot(s_omega, s_delta)
    if norm == 0.0:
        return AxisAngle(0.0, (0.0, 0.0, 1.0))
    # alpha >= 0 by construction; no sign flip is ever needed.
    return AxisAngle(
        dt * norm,
        (math.cos(phi) * s_omega / norm, math.sin(phi) * s_omega / norm, s_delta / norm),
    )


def axis_angle_of_train(train: PulseTrain, k: int) -> AxisAngle:
    s_omega, s_delta = cumulative_sums(train, k)
    return axis_angle_from_sums(s_omega, s_delta, train.dt, train.phi)


def su2_from_axis_angle(aa: AxisAngle) -> np.ndarray:
    """``exp(-i alpha/2 n.sigma) = cos(alpha/2) I - i sin(alpha/2) n.sigma``."""
    half = 0.5 * aa.alpha
    c, s = math.cos(half), math.sin(half)
    nx, ny, nz = aa.axis
    return np.array(
        [
            [complex(c, -s * nz), complex(-s * ny, -s * nx)],
            [complex(s * ny, -s * nx), complex(c, s * nz)],
        ]
    )


def propagate_summed(train: PulseTrain, k: int) -> np.ndarray:
    """Evolution after samples ``0..k`` with the exponent built from the summed drive.

    Time ordering is ignored: all sample Hamiltonians are added before
    exponentiating. This is exact only when the samples commute.
    """
    return su2_from_axis_angle(axis_angle_of_train(train, k))


def sample_unitary(omega: float, delta: float, dt: float, phi: float) -> np.ndarray:
    return su2_from_axis_angle(axis_angle_from_sums(omega, delta, dt, phi))


def propagate_product(train: PulseTrain, k: int) -> np.ndarray:
    """Time-ordered product ``exp(-i H_k dt) ... exp(-i H_0 dt)``."""
    train._check_index(k)
    u = IDENTITY.copy()
    for n in range(k + 1):
        u = sample_unitary(train.omegas[n], train.deltas[n], train.dt, train.phi) @ u
    return u


def hamiltonian(omega: float, delta: float, phi: float) -> np.ndarray:
    """Rabi Hamiltonian ``(1/2)(omega cos(phi) sx + omega sin(phi) sy + delta sz)``."""
    return 0.5 * (omega * math.cos(phi) * SIGMA_X + omega * math.sin(phi) * SIGMA_Y + delta * SIGMA_Z)


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.shape != (2, 2):
        return False
    return bool(
        np.max(np.abs(u.conj().T @ u - IDENTITY)) <= atol
        and abs(abs(np.linalg.det(u)) - 1.0) <= atol
    )


def check_unitary(u, name: str = "matrix", atol: float = UNITARY_ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol):
        raise ValueError(f"{name} is not unitary to within {atol}")
    return u


def check_state(psi, atol: float = UNITARY_ATOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValueError(f"qubit state must have shape (2,), got {psi.shape}")
    if abs(np.vdot(psi, psi).real - 1.0) > atol:
        raise ValueError("qubit state is not normalized")
    return psi


def apply_gate(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return np.asarray(u, dtype=complex) @ np.asarray(psi, dtype=complex)


def bloch_vector(psi: np.ndarray) -> tuple[float, float, float]:
    """Pauli expectation values; ``|0>`` maps to the north pole."""
    c0, c1 = complex(psi[0]), complex(psi[1])
    cross = c0.conjugate() * c1
    return (2.0 * cross.real, 2.0 * cross.imag, abs(c0) ** 2 - abs(c1) ** 2)


def raman_effective(p: RamanParams, validity_ratio: float = 10.0) -> tuple[float, float, bool]:
    """Two-level reduction of a far-detuned Raman transition.

    Returns:
        ``(omega, phi, valid)``: effective Rabi frequency, effective phase in
        ``(-pi, pi]``, and whether ``|delta| >= validity_ratio * max(|omega1|, |omega2|)``.
        A ``RamanValidityWarning`` is issued when ``valid`` is false.
    """
    if p.delta == 0:
        raise ValueError("Raman reduction is undefined at zero detuning")
    omega = p.omega1 * p.omega2 / (2.0 * p.delta)
    phi = wrap_phase(p.phi2 - p.phi1)
    valid = abs(p.delta) >= validity_ratio * max(abs(p.omega1), abs(p.omega2))
    if not valid:
        warnings.warn(
            f"|delta|={abs(p.delta):g} is below {validity_ratio:g}x the single-photon "
            "Rabi frequencies; two-level reduction is unreliable",
            RamanValidityWarning,
            stacklevel=2,
        )
    return omega, phi, valid


def wrap_phase(x: float) -> float:
    """Reduce an angle into ``(-pi, pi]``."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y == -math.pi else y
