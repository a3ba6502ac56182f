"""Optimal-control synthesis of atom-interferometer mirror and beam-splitter gates."""

from atomgates.core import (
    AxisAngle,
    PulseSample,
    PulseTrain,
    RamanParams,
    apply_gate,
    axis_angle_of_train,
    bloch_vector,
    cumulative_sums,
    propagate_product,
    propagate_summed,
    raman_effective,
    su2_from_axis_angle,
)
from atomgates.cost import (
    FidelityReport,
    GateKind,
    Gradient,
    SingularOriginError,
    analytic_gradient,
    closed_form_cost,
    finite_difference_gradient,
    gate_matrix,
    trace_fidelity,
)
from atomgates.interferometer import FringeScan, MzSequence, fringe_scan, mz_transfer_probability
from atomgates.optimizer import (
    ConfigError,
    NoiseConfig,
    OptimizerConfig,
    RunRecord,
    record_bloch_trajectories,
    run_sequential_sgd,
)

__version__ = "0.1.0"
