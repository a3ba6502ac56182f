"""Config files, run-record persistence, and CSV tables.

Configs and records are JSON documents. Floats are written with ``repr``
semantics (shortest string that parses back to the same double), so a
record read back is value-identical to the one written.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from atomgates.cost import GateKind
from atomgates.optimizer import (
    ConfigError,
    NoiseConfig,
    OptimizerConfig,
    RunRecord,
    StepEntry,
)

log = logging.getLogger(__name__)

RECORD_FORMAT = "atomgates.run-record"
RECORD_VERSION = 1

OUTPUT_KEYS = ("record_path", "pulses_csv", "fidelity_csv", "bloch_csv")
REQUIRED_KEYS = ("target", "phi", "dt", "omega0", "delta0", "eta_omega", "eta_delta", "max_steps")
OPTIONAL_KEYS = ("fidelity_threshold", "noise", "omega_max", "delta_max") + OUTPUT_KEYS
NOISE_KEYS = ("sigma_omega", "sigma_delta", "seed")

# Rejection window around odd multiples of pi/2, where cos(phi) vanishes.
PHASE_TOLERANCE = 1e-9
# Beyond rejection, warn when the mirror cost landscape is nearly flat.
PHASE_WARN_MARGIN = 0.1

_TARGET_ALIASES = {
    "mirror": GateKind.MIRROR,
    "m": GateKind.MIRROR,
    "beam_splitter": GateKind.BEAM_SPLITTER,
    "beamsplitter": GateKind.BEAM_SPLITTER,
    "bs": GateKind.BEAM_SPLITTER,
}


class PhaseValidityError(ConfigError):
    """The laser phase sits on an odd multiple of pi/2."""


@dataclass
class RunSpec:
    """A parsed config file: optimizer settings plus output locations."""

    config: OptimizerConfig
    outputs: dict[str, str] = field(default_factory=dict)


def distance_to_odd_half_pi(phi: float) -> float:
    return abs(math.remainder(phi - 0.5 * math.pi, math.pi))


def check_phase(phi: float, force: bool = False) -> None:
    d = distance_to_odd_half_pi(phi)
    if d <= PHASE_TOLERANCE:
        if force:
            log.warning("phi=%r is an odd multiple of pi/2; proceeding because the check was overridden", phi)
            return
        raise PhaseValidityError(
            f"phi={phi!r} is within {PHASE_TOLERANCE:g} of an odd multiple of pi/2; "
            "cos(phi) = 0 leaves the drive without an x component and the mirror cost "
            "flat, so phi must differ from (2n+1)pi/2"
        )
    if d < PHASE_WARN_MARGIN:
        log.warning("phi=%r is %.3g rad from an odd multiple of pi/2; the cost landscape is nearly flat", phi, d)


def _line_of_key(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name} is not allowed")


def parse_config(path, force_phase: bool = False) -> RunSpec:
    """Read and validate a JSON config file.

    Raises:
        ConfigError: unreadable file, malformed JSON (with line and column),
            missing or unknown fields, or values outside their valid range.
        PhaseValidityError: ``phi`` on an odd multiple of pi/2, unless
            ``force_phase`` is set.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: parse error: {exc.msg}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(doc, source=str(path), text=text, force_phase=force_phase)


def config_from_dict(doc: dict, source: str = "<config>", text: str = "", force_phase: bool = False) -> RunSpec:
    def where(key):
        line = _line_of_key(text, key) if text else None
        return f"{source}:{line}" if line else source

    unknown = sorted(set(doc) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        raise ConfigError(f"{source}: unknown field(s): {', '.join(unknown)}")
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise ConfigError(f"{source}: missing required field '{key}'")

    def number(key, value, integer=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where(key)}: field '{key}' must be a number, got {value!r}")
        if integer:
            if isinstance(value, float) and not value.is_integer():
                raise ConfigError(f"{where(key)}: field '{key}' must be an integer, got {value!r}")
            return int(value)
        if not math.isfinite(value):
            raise ConfigError(f"{where(key)}: field '{key}' must be finite")
        return float(value)

    target = doc["target"]
    if not isinstance(target, str) or target.lower() not in _TARGET_ALIASES:
        raise ConfigError(f"{where('target')}: field 'target' must be 'mirror' or 'beam_splitter', got {target!r}")
    values = {"target": _TARGET_ALIASES[target.lower()]}
    for key in REQUIRED_KEYS[1:]:
        values[key] = number(key, doc[key], integer=key == "max_steps")
    for key in ("fidelity_threshold", "omega_max", "delta_max"):
        if doc.get(key) is not None:
            values[key] = number(key, doc[key])
    if doc.get("noise") is not None:
        noise = doc["noise"]
        if not isinstance(noise, dict):
            raise ConfigError(f"{where('noise')}: field 'noise' must be an object")
        extra = sorted(set(noise) - set(NOISE_KEYS))
        if extra:
            raise ConfigError(f"{where('noise')}: unknown field(s) in 'noise': {', '.join(extra)}")
        for key in NOISE_KEYS:
            if key not in noise:
                raise ConfigError(f"{where('noise')}: missing required field 'noise.{key}'")
        values["noise"] = NoiseConfig(
            number("sigma_omega", noise["sigma_omega"]),
            number("sigma_delta", noise["sigma_delta"]),
            number("seed", noise["seed"], integer=True),
        )

    check_phase(values["phi"], force=force_phase)
    try:
        config = OptimizerConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    outputs = {}
    for key in OUTPUT_KEYS:
        if doc.get(key) is not None:
            if not isinstance(doc[key], str):
                raise ConfigError(f"{where(key)}: field '{key}' must be a path string")
            outputs[key] = doc[key]
    return RunSpec(config, outputs)


def config_to_dict(config: OptimizerConfig) -> dict:
    doc = {
        "target": config.target.value,
        "phi": config.phi,
        "dt": config.dt,
        "omega0": config.omega0,
        "delta0": config.delta0,
        "eta_omega": config.eta_omega,
        "eta_delta": config.eta_delta,
        "max_steps": config.max_steps,
        "fidelity_threshold": config.fidelity_threshold,
    }
    if config.noise is not None:
        doc["noise"] = {
            "sigma_omega": config.noise.sigma_omega,
            "sigma_delta": config.noise.sigma_delta,
            "seed": config.noise.seed,
        }
    for key in ("omega_max", "delta_max"):
        if getattr(config, key) is not None:
            doc[key] = getattr(config, key)
    return doc


def write_config(path, config: OptimizerConfig, outputs: dict | None = None) -> None:
    doc = config_to_dict(config)
    doc.update(outputs or {})
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _complex_pair(z) -> list[float]:
    return [float(z.real), float(z.imag)]


def record_to_dict(record: RunRecord) -> dict:
    return {
        "format": RECORD_FORMAT,
        "version": RECORD_VERSION,
        "config": config_to_dict(record.config),
        "converged": record.converged,
        "steps_used": record.steps_used,
        "final_f_trace": record.final.f_trace,
        "f_trace_product": record.f_trace_product,
        "final_unitary": [[_complex_pair(z) for z in row] for row in record.final_unitary],
        "entries": [
            {
                "k": e.k,
                "omega": e.omega,
                "delta": e.delta,
                "s_omega": e.s_omega,
                "s_delta": e.s_delta,
                "alpha": e.alpha,
                "axis": list(e.axis),
                "f_trace": e.f_trace,
                "f_squared": e.f_squared,
                "cost": e.cost,
            }
            for e in record.entries
        ],
        "bloch_trajectories": {label: [list(v) for v in traj] for label, traj in record.bloch_trajectories.items()},
    }


def record_from_dict(doc: dict) -> RunRecord:
    if doc.get("format") != RECORD_FORMAT:
        raise ValueError(f"not a run record (format={doc.get('format')!r})")
    if doc.get("version") != RECORD_VERSION:
        raise ValueError(f"unsupported run-record version {doc.get('version')!r}")
    config = config_from_dict(doc["config"], source="record config", force_phase=True).config
    entries = [
        StepEntry(
            k=int(e["k"]),
            omega=e["omega"],
            delta=e["delta"],
            s_omega=e["s_omega"],
            s_delta=e["s_delta"],
            alpha=e["alpha"],
            axis=tuple(e["axis"]),
            f_trace=e["f_trace"],
            f_squared=e["f_squared"],
            cost=e["cost"],
        )
        for e in doc["entries"]
    ]
    unitary = np.array([[complex(re, im) for re, im in row] for row in doc["final_unitary"]])
    return RunRecord(
        config=config,
        entries=entries,
        final_unitary=unitary,
        converged=bool(doc["converged"]),
        steps_used=int(doc["steps_used"]),
        f_trace_product=doc["f_trace_product"],
        bloch_trajectories={
            label: [tuple(v) for v in traj] for label, traj in doc.get("bloch_trajectories", {}).items()
        },
    )


def write_record(path, record: RunRecord) -> None:
    Path(path).write_text(json.dumps(record_to_dict(record), indent=1) + "\n")


def read_record(path) -> RunRecord:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        return record_from_dict(doc)
    except OSError as exc:
        raise ValueError(f"cannot read record {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"invalid run record {path}: {exc}") from exc


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_pulses_csv(path, record: RunRecord) -> None:
    write_table(path, ("k", "omega", "delta"), ((e.k, e.omega, e.delta) for e in record.entries))


def write_fidelity_csv(path, record: RunRecord) -> None:
    write_table(
        path,
        ("k", "f_trace", "f_squared", "cost"),
        ((e.k, e.f_trace, e.f_squared, e.cost) for e in record.entries),
    )


def write_bloch_csv(path, record: RunRecord) -> None:
    rows = []
    for label, traj in record.bloch_trajectories.items():
        rows.extend((label, k, x, y, z) for k, (x, y, z) in enumerate(traj))
    write_table(path, ("state", "k", "x", "y", "z"), rows)
