"""Quantum Fisher information of multi-qubit probes in correlated Pauli channels.

The package provides two independent routes to the QFI of a probe state
pushed through a classically correlated Pauli channel: a numeric route
(channel application + symmetric-logarithmic-derivative formula in the
state's eigenbasis) and an analytic route (closed-form output spectra fed
into the spectral QFI formula), together with a Monte-Carlo Cramer-Rao
compliance check and a sweep/figure CLI.
"""

from .channels import (
    ChannelKind,
    ChannelSpec,
    JointDistribution,
    apply_channel,
    conditional_probability,
    joint_distribution,
    single_use_distribution,
)
from .closed_form import (
    DegenerateSpectrumError,
    bitflip_spectrum,
    closed_form_qfi,
    depolarizing_coefficients,
    depolarizing_spectrum,
    flip_coefficients,
    output_density,
    phase_flip_weight,
    phaseflip_spectrum,
)
from .linalg import CapacityError, EigenSystem, JacobiConvergenceError, eigh, kron, kron_all, pauli
from .metrology import (
    EstimationConfig,
    EstimationReport,
    MeasurementModel,
    computational_basis_model,
    cramer_rao_report,
    interleaved_basis_model,
    mle_estimate,
    outcome_probabilities,
    sample_outcomes,
)
from .probes import (
    Param,
    ProbeFamily,
    ProbeSpec,
    bell_state_vector,
    density,
    density_derivative,
)
from .qfi import (
    SpectralData,
    build_sld,
    cramer_rao_bound,
    qfi_numeric,
    qfi_numeric_fd,
    qfi_sld,
    qfi_spectral,
)
from .sweep import (
    CheckReport,
    Method,
    SweepConfig,
    SweepRecord,
    cross_check,
    evaluate_point,
    figure,
    render_heatmap,
    run_point,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "ChannelSpec",
    "JointDistribution",
    "apply_channel",
    "conditional_probability",
    "joint_distribution",
    "single_use_distribution",
    "DegenerateSpectrumError",
    "bitflip_spectrum",
    "closed_form_qfi",
    "depolarizing_coefficients",
    "depolarizing_spectrum",
    "flip_coefficients",
    "output_density",
    "phase_flip_weight",
    "phaseflip_spectrum",
    "CapacityError",
    "EigenSystem",
    "JacobiConvergenceError",
    "eigh",
    "kron",
    "kron_all",
    "pauli",
    "EstimationConfig",
    "EstimationReport",
    "MeasurementModel",
    "computational_basis_model",
    "cramer_rao_report",
    "interleaved_basis_model",
    "mle_estimate",
    "outcome_probabilities",
    "sample_outcomes",
    "Param",
    "ProbeFamily",
    "ProbeSpec",
    "bell_state_vector",
    "density",
    "density_derivative",
    "SpectralData",
    "build_sld",
    "cramer_rao_bound",
    "qfi_numeric",
    "qfi_numeric_fd",
    "qfi_sld",
    "qfi_spectral",
    "CheckReport",
    "Method",
    "SweepConfig",
    "SweepRecord",
    "cross_check",
    "evaluate_point",
    "figure",
    "render_heatmap",
    "run_point",
    "run_sweep",
    "__version__",
]
