"""Driven three-level flux qubit mediating a photon-phonon beam-splitter
coupling between an electric and a mechanical resonator."""

from .analysis import (
    ComparisonReport,
    TransferResult,
    compare_full_vs_effective,
    run_effective,
    run_transfer,
    swap_time_estimate,
    transfer_result,
)
from .config import PRESETS, ScenarioConfig
from .model import (
    LindbladModel,
    SystemParams,
    adiabaticity_report,
    build_collapse_channels,
    build_effective_hamiltonian,
    build_model,
    build_rotating_frame_hamiltonian,
    derive_detunings,
    effective_params,
)
from .operators import HilbertSpace
from .solver import IntegratorConfig, Trajectory, integrate, liouvillian_superoperator, propagate_expm

__all__ = [
    "ComparisonReport",
    "HilbertSpace",
    "IntegratorConfig",
    "LindbladModel",
    "PRESETS",
    "ScenarioConfig",
    "SystemParams",
    "Trajectory",
    "TransferResult",
    "adiabaticity_report",
    "build_collapse_channels",
    "build_effective_hamiltonian",
    "build_model",
    "build_rotating_frame_hamiltonian",
    "compare_full_vs_effective",
    "derive_detunings",
    "effective_params",
    "integrate",
    "liouvillian_superoperator",
    "propagate_expm",
    "run_effective",
    "run_transfer",
    "swap_time_estimate",
    "transfer_result",
]
