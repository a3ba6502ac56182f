"""Gate targets, trace-overlap fidelity, and gradients of the gate cost.

The cost of a realized unitary ``U`` against a target ``G`` is
``J = 1 - |Tr(G^dag U)|^2 / 4``. For the summed-exponent propagator it
depends on the pulses only through the cumulative sums ``(S_omega, S_delta)``,
so the gradient with respect to any sample ``k`` is the gradient with
respect to the sums.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from atomgates.core import PulseTrain, cumulative_sums, propagate_summed

_SQRT1_2 = 1.0 / math.sqrt(2.0)


class GateKind(str, enum.Enum):
    MIRROR = "mirror"
    BEAM_SPLITTER = "beam_splitter"


GATE_MATRICES = {
    GateKind.MIRROR: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.BEAM_SPLITTER: _SQRT1_2 * np.array([[1, 1j], [1j, 1]], dtype=complex),
}


def gate_matrix(kind: GateKind) -> np.ndarray:
    return GATE_MATRICES[GateKind(kind)].copy()


class FidelityReport(NamedTuple):
    f_trace: float
    f_squared: float
    cost: float


class Gradient(NamedTuple):
    d_omega: float
    d_delta: float


class SingularOriginError(ArithmeticError):
    """Gradient requested where both cumulative sums vanish."""


def trace_fidelity(target: GateKind, u: np.ndarray) -> FidelityReport:
    """Phase-insensitive overlap ``|Tr(G^dag U)| / 2`` and the cost ``1 - f^2``."""
    g = GATE_MATRICES[GateKind(target)]
    f = abs(np.trace(g.conj().T @ u)) / 2.0
    f2 = f * f
    return FidelityReport(float(f), float(f2), float(1.0 - f2))


def _trig(s_omega, s_delta, dt, phi):
    norm = math.hypot(s_omega, s_delta)
    alpha = dt * norm
    return norm, alpha, math.cos(0.5 * alpha), math.sin(0.5 * alpha), math.cos(phi)


def cost_from_sums(target: GateKind, s_omega: float, s_delta: float, dt: float, phi: float) -> float:
    norm, _, c, s, cos_phi = _trig(s_omega, s_delta, dt, phi)
    r_x = cos_phi * s_omega / norm if norm > 0 else 0.0
    if GateKind(target) is GateKind.MIRROR:
        return 1.0 - (s * r_x) ** 2
    return 1.0 - 0.5 * (c - s * r_x) ** 2


def closed_form_cost(target: GateKind, train: PulseTrain, k: int) -> float:
    """Cost of ``propagate_summed(train, k)`` from its axis-angle form."""
    s_omega, s_delta = cumulative_sums(train, k)
    return cost_from_sums(target, s_omega, s_delta, train.dt, train.phi)


def gradient_from_sums(target: GateKind, s_omega: float, s_delta: float, dt: float, phi: float) -> Gradient:
    """Partial derivatives of the cost with respect to ``S_omega`` and ``S_delta``."""
    norm, alpha, c, s, cos_phi = _trig(s_omega, s_delta, dt, phi)
    if norm == 0.0:
        raise SingularOriginError("gradient is undefined at S_omega = S_delta = 0")
    # direction cosines keep the powers of the sums bounded
    a, b = s_omega / norm, s_delta / norm
    if GateKind(target) is GateKind.MIRROR:
        cc = cos_phi * cos_phi
        sin_a = math.sin(alpha)
        s2 = s * s
        d_omega = -cc * (0.5 * dt * sin_a * a**3 + 2.0 * s2 * a * b * b / norm)
        d_delta = -cc * (0.5 * dt * sin_a * a * a * b - 2.0 * s2 * a * a * b / norm)
        return Gradient(d_omega, d_delta)
    # J = 1 - g^2/2 with g = cos(alpha/2) - sin(alpha/2) r_x
    r_x = cos_phi * a
    dg_dalpha = -0.5 * (s + c * r_x)
    g = c - s * r_x
    dg_du = dg_dalpha * dt * a - s * cos_phi * b * b / norm
    dg_dv = dg_dalpha * dt * b + s * cos_phi * a * b / norm
    return Gradient(-g * dg_du, -g * dg_dv)


def analytic_gradient(target: GateKind, train: PulseTrain, k: int) -> Gradient:
    """Gradient of the cost at step ``k`` with respect to any sample ``n <= k``."""
    s_omega, s_delta = cumulative_sums(train, k)
    return gradient_from_sums(target, s_omega, s_delta, train.dt, train.phi)


def default_fd_step(train: PulseTrain, k: int) -> float:
    return max(1e-6 * math.hypot(*cumulative_sums(train, k)), 1e-3)


def finite_difference_gradient(
    target: GateKind, train: PulseTrain, k: int, h: float | None = None
) -> Gradient:
    """Central difference of the trace cost under a perturbation of sample ``k``.

    The cost is evaluated through the full matrix propagator, independently
    of the closed forms used by ``analytic_gradient``. Differences are taken
    on ``f_squared`` (cost = 1 - f_squared) so that a cost close to 1 does
    not swamp small gradients in rounding error.
    """
    if h is None:
        h = default_fd_step(train, k)
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    omegas, deltas = list(train.omegas), list(train.deltas)

    def cost(om, de):
        t = PulseTrain(train.dt, train.phi, om, de)
        return -trace_fidelity(target, propagate_summed(t, k)).f_squared

    def bumped(values, step):
        out = list(values)
        out[k] += step
        return out

    d_omega = (cost(bumped(omegas, h), deltas) - cost(bumped(omegas, -h), deltas)) / (2 * h)
    d_delta = (cost(omegas, bumped(deltas, h)) - cost(omegas, bumped(deltas, -h))) / (2 * h)
    return Gradient(d_omega, d_delta)


def gradient_relative_error(analytic: Gradient, numeric: Gradient) -> float:
    """Euclidean relative error ``|a - n| / |a|`` over both components."""
    a = np.array(analytic)
    n = np.array(numeric)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return float(np.linalg.norm(n))
    return float(np.linalg.norm(a - n) / scale)


def random_train(
    rng: np.random.Generator,
    dt: float = 1e-6,
    max_len: int = 50,
    min_norm: float | None = None,
    phase_margin: float = 0.1,
) -> PulseTrain:
    """Draw a train with total pulse area of order 2 pi, for gradient checks.

    Redraws until the summed drive exceeds ``min_norm`` (default ``0.1/dt``)
    and ``phi`` is at least ``phase_margin`` away from odd multiples of pi/2.
    """
    if min_norm is None:
        min_norm = 0.1 / dt
    while True:
        n = int(rng.integers(1, max_len + 1))
        scale = 2.0 * math.pi / (dt * math.sqrt(n))
        omegas = rng.normal(0.0, scale, n)
        deltas = rng.normal(0.0, scale, n)
        phi = float(rng.uniform(-math.pi, math.pi))
        if abs(math.remainder(phi - 0.5 * math.pi, math.pi)) < phase_margin:
            continue
        train = PulseTrain(dt, phi, omegas, deltas)
        if math.hypot(*cumulative_sums(train, n - 1)) > min_norm:
            return train
