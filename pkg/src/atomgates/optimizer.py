"""Sequential gradient-descent pulse construction.

One optimizer step emits one pulse sample of duration ``dt``: the gradient
of the gate cost at the current cumulative sums sets the next sample,

    omega[k+1] = omega[k] - eta_omega * dJ/dS_omega
    delta[k+1] = delta[k] - eta_delta * dJ/dS_delta

so the train grows by one sample per step and the run length is also the
gate duration in units of ``dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from atomgates.core import (
    KET_0,
    KET_1,
    PulseTrain,
    apply_gate,
    axis_angle_from_sums,
    bloch_vector,
    propagate_product,
    su2_from_axis_angle,
)
from atomgates.cost import GateKind, gradient_from_sums, trace_fidelity

DEFAULT_THRESHOLDS = {GateKind.MIRROR: 0.995, GateKind.BEAM_SPLITTER: 0.998}

_SQRT1_2 = 1.0 / math.sqrt(2.0)

# Initial states whose transfer the optimized gates are shown to perform.
DEFAULT_BLOCH_STATES = {
    GateKind.MIRROR: {"0": KET_0, "1": KET_1},
    GateKind.BEAM_SPLITTER: {"0": KET_0, "i0+1": np.array([1j * _SQRT1_2, _SQRT1_2])},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseConfig:
    sigma_omega: float
    sigma_delta: float
    seed: int


@dataclass(frozen=True)
class OptimizerConfig:
    target: GateKind
    phi: float
    dt: float
    omega0: float
    delta0: float
    eta_omega: float
    eta_delta: float
    max_steps: int
    fidelity_threshold: float | None = None
    noise: NoiseConfig | None = None
    omega_max: float | None = None
    delta_max: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "target", GateKind(self.target))
        if self.fidelity_threshold is None:
            object.__setattr__(self, "fidelity_threshold", DEFAULT_THRESHOLDS[self.target])
        self.validate()

    def validate(self) -> None:
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be at least 1")
        if self.eta_omega < 0 or self.eta_delta < 0:
            raise ConfigError("learning rates must be non-negative")
        if self.omega0 == 0 and self.delta0 == 0:
            raise ConfigError("initial pulse (omega0, delta0) must be nonzero")
        if math.cos(self.phi) == 0:
            raise ConfigError("cos(phi) must be nonzero")
        if not 0 < self.fidelity_threshold <= 1:
            raise ConfigError("fidelity_threshold must lie in (0, 1]")
        for name in ("omega_max", "delta_max"):
            bound = getattr(self, name)
            if bound is not None and not bound > 0:
                raise ConfigError(f"{name} must be positive")
        if self.noise is not None and (self.noise.sigma_omega < 0 or self.noise.sigma_delta < 0):
            raise ConfigError("noise sigmas must be non-negative")


@dataclass(frozen=True)
class StepEntry:
    k: int
    omega: float
    delta: float
    s_omega: float
    s_delta: float
    alpha: float
    axis: tuple[float, float, float]
    f_trace: float
    f_squared: float
    cost: float


@dataclass
class RunRecord:
    config: OptimizerConfig
    entries: list[StepEntry]
    final_unitary: np.ndarray
    converged: bool
    steps_used: int
    f_trace_product: float
    bloch_trajectories: dict[str, list[tuple[float, float, float]]] = field(default_factory=dict)

    @property
    def final(self) -> StepEntry:
        return self.entries[-1]

    def train(self) -> PulseTrain:
        return PulseTrain(
            self.config.dt,
            self.config.phi,
            tuple(e.omega for e in self.entries),
            tuple(e.delta for e in self.entries),
        )

    def unitaries(self) -> list[np.ndarray]:
        return [
            su2_from_axis_angle(axis_angle_from_sums(e.s_omega, e.s_delta, self.config.dt, self.config.phi))
            for e in self.entries
        ]


def _clip(x: float, bound: float | None) -> float:
    if bound is None:
        return x
    return min(max(x, -bound), bound)


def run_sequential_sgd(config: OptimizerConfig, bloch: bool = True) -> RunRecord:
    """Grow a pulse train one sample at a time until the gate converges.

    Stops at the first step whose ``f_trace`` reaches the threshold, or after
    ``max_steps`` samples. Raises ``SingularOriginError`` if both cumulative
    sums return exactly to zero.
    """
    config.validate()
    rng = np.random.default_rng(config.noise.seed) if config.noise is not None else None
    omega, delta = config.omega0, config.delta0
    s_omega = s_delta = 0.0
    entries: list[StepEntry] = []
    converged = False
    u = None
    for k in range(config.max_steps):
        s_omega += omega
        s_delta += delta
        aa = axis_angle_from_sums(s_omega, s_delta, config.dt, config.phi)
        u = su2_from_axis_angle(aa)
        rep = trace_fidelity(config.target, u)
        entries.append(StepEntry(k, omega, delta, s_omega, s_delta, aa.alpha, aa.axis, *rep))
        if rep.f_trace >= config.fidelity_threshold:
            converged = True
            break
        if k + 1 == config.max_steps:
            break
        grad = gradient_from_sums(config.target, s_omega, s_delta, config.dt, config.phi)
        omega = omega - config.eta_omega * grad.d_omega
        delta = delta - config.eta_delta * grad.d_delta
        if rng is not None:
            omega += rng.normal(0.0, config.noise.sigma_omega)
            delta += rng.normal(0.0, config.noise.sigma_delta)
        omega = _clip(omega, config.omega_max)
        delta = _clip(delta, config.delta_max)

    record = RunRecord(
        config=config,
        entries=entries,
        final_unitary=u,
        converged=converged,
        steps_used=len(entries),
        f_trace_product=0.0,
    )
    record.f_trace_product = trace_fidelity(
        config.target, propagate_product(record.train(), len(entries) - 1)
    ).f_trace
    if bloch:
        record_bloch_trajectories(record)
    return record


def record_bloch_trajectories(record: RunRecord, initial_states: dict | None = None) -> RunRecord:
    """Fill ``record.bloch_trajectories`` with the Bloch vector of ``U_k |psi0>`` for every step."""
    if initial_states is None:
        initial_states = DEFAULT_BLOCH_STATES[record.config.target]
    unitaries = record.unitaries()
    for label, psi in initial_states.items():
        psi = np.asarray(psi, dtype=complex)
        record.bloch_trajectories[label] = [bloch_vector(apply_gate(u, psi)) for u in unitaries]
    return record
