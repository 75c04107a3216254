"""Physical parameters to operators: full rotating-frame model, dissipation
channels, the two-mode beam-splitter model and adiabaticity diagnostics.

Parameters are ordinary frequencies in MHz; operators come out in angular
units (rad/µs), so time is measured in µs throughout.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .errors import DispersiveRegimeViolation, FrameValidityError, InvalidParameter, InvalidRate
from .operators import (
    HERMITIAN_TOL,
    HilbertSpace,
    annihilation,
    dagger,
    embed,
    full_space,
    hermiticity_residual,
    qubit_projector,
    qubit_transition,
    qubit_z,
)

TWO_PI = 2.0 * pi
RESONANCE_TOL = 1e-6
ADIABATIC_THRESHOLD = 0.2
RATE_FIELDS = ("kappa_a", "kappa_b", "Gamma1", "Gamma2")


@dataclass(frozen=True)
class SystemParams:
    omega10: float = 1720.0
    omega21: float = 4280.0
    omega_a: float = 5680.0
    omega_b: float = 1400.0
    omega_drive: float = 4280.0
    Omega: float = 64.0
    g1: float = 40.0
    g2: float = 40.0
    kappa_a: float = 0.005
    kappa_b: float = 0.1
    Gamma1: float = 0.01
    Gamma2: float = 0.1
    n_a: int = 2
    n_b: int = 2

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name in ("n_a", "n_b"):
                if int(value) != value or value < 2:
                    raise InvalidParameter(f"{f.name} must be an integer >= 2, got {value!r}")
                object.__setattr__(self, f.name, int(value))
                continue
            value = float(value)
            if not np.isfinite(value) or value < 0:
                err = InvalidRate if f.name in RATE_FIELDS else InvalidParameter
                raise err(f"{f.name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, f.name, value)
        for name in ("omega10", "omega21", "omega_a", "omega_b"):
            if getattr(self, name) <= 0:
                raise InvalidParameter(f"{name} must be > 0")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def lossless(self) -> "SystemParams":
        return self.replace(**{name: 0.0 for name in RATE_FIELDS})

    @property
    def space(self) -> HilbertSpace:
        return full_space(self.n_a, self.n_b)

    @property
    def resonance_residual(self) -> float:
        return abs(self.omega_a - self.omega_b - self.omega_drive)


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian and (rate, collapse operator) channels, rates in rad/µs."""

    hamiltonian: np.ndarray
    channels: tuple[tuple[float, np.ndarray], ...]
    space: HilbertSpace

    def __post_init__(self):
        h = self.hamiltonian
        n = self.space.total_dim
        if h.shape != (n, n):
            raise ValueError(f"Hamiltonian shape {h.shape} does not match space dimension {n}")
        scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
        if hermiticity_residual(h) > HERMITIAN_TOL * scale:
            raise ValueError("Hamiltonian is not Hermitian")
        for rate, op in self.channels:
            if rate < 0:
                raise InvalidRate(f"negative channel rate {rate}")
            if op.shape != (n, n):
                raise ValueError(f"collapse operator shape {op.shape} does not match space")
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def dim(self) -> int:
        return self.space.total_dim


@dataclass(frozen=True)
class EffectiveParams:
    lambda_eff: float
    lambda1: float
    lambda2: float
    swap_time: float


@dataclass(frozen=True)
class AdiabaticityReport:
    ratio_g1: float
    ratio_g2: float
    ratio_drive: float
    resonance_residual: float
    threshold: float = ADIABATIC_THRESHOLD
    resonance_tol: float = RESONANCE_TOL
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())


def _raw_detunings(p: SystemParams) -> tuple[float, float]:
    return (p.omega10 + p.omega21) - p.omega_a, p.omega10 - p.omega_b


def derive_detunings(p: SystemParams) -> tuple[float, float]:
    """Return (delta1, delta2) in MHz: level 2 above the photon, level 1 above the phonon."""
    d1, d2 = _raw_detunings(p)
    if d1 <= 0 or d2 <= 0:
        raise DispersiveRegimeViolation(
            f"detunings must be positive for the dispersive regime, got delta1={d1}, delta2={d2}"
        )
    return d1, d2


def mode_operators(space: HilbertSpace) -> tuple[np.ndarray, np.ndarray]:
    """Photon and phonon lowering operators on the full space."""
    return (
        embed(annihilation(space.dims[1]), 1, space),
        embed(annihilation(space.dims[2]), 2, space),
    )


def excitation_operator(space: HilbertSpace) -> np.ndarray:
    """a^dag a + b^dag b + |1><1| + |2><2|, conserved by the rotating-frame Hamiltonian."""
    a, b = mode_operators(space)
    excited = qubit_projector(1) + qubit_projector(2)
    return dagger(a) @ a + dagger(b) @ b + embed(excited, 0, space)


def build_rotating_frame_hamiltonian(
    p: SystemParams,
    space: HilbertSpace | None = None,
    resonance_tol: float = RESONANCE_TOL,
) -> np.ndarray:
    """Static Hamiltonian in the frame co-rotating with
    omega_a (a^dag a + |2><2|) + omega_b (b^dag b + |1><1|).

    Only valid at three-photon resonance; otherwise the drive term keeps a
    residual time dependence and FrameValidityError is raised.
    """
    if p.resonance_residual > resonance_tol:
        raise FrameValidityError(
            f"three-photon resonance residual {p.resonance_residual:.3e} MHz exceeds {resonance_tol:.1e}"
        )
    space = space or p.space
    d1, d2 = _raw_detunings(p)
    a, b = mode_operators(space)
    s01 = embed(qubit_transition(0, 1), 0, space)
    s02 = embed(qubit_transition(0, 2), 0, space)
    s12 = embed(qubit_transition(1, 2), 0, space)
    bare = embed(np.diag([0.0, d2, d1]).astype(complex), 0, space)
    drive = p.Omega * (s12 + dagger(s12))
    photon = p.g1 * (dagger(a) @ s02 + dagger(s02) @ a)
    phonon = p.g2 * (dagger(b) @ s01 + dagger(s01) @ b)
    return TWO_PI * (bare + drive + photon + phonon)


def build_collapse_channels(
    p: SystemParams, space: HilbertSpace | None = None
) -> list[tuple[float, np.ndarray]]:
    """Dissipation channels in D[A] form, rates in rad/µs.

    A master-equation term (k/2)(2 A rho A^dag - {A^dag A, rho}) is k * D[A],
    so the rates carry over without a factor of two. Zero-rate channels are
    dropped; order is fixed.
    """
    space = space or p.space
    a, b = mode_operators(space)
    q = lambda m: embed(m, 0, space)  # noqa: E731
    spec = [
        (p.kappa_a, a),
        (p.kappa_b, b),
        (p.Gamma1, q(qubit_transition(0, 1))),
        (p.Gamma1, q(qubit_z(0, 1))),
        (p.Gamma2, q(qubit_transition(0, 2))),
        (p.Gamma2, q(qubit_z(0, 2))),
        (p.Gamma2, q(qubit_transition(1, 2))),
        (p.Gamma2, q(qubit_z(1, 2))),
    ]
    channels = []
    for rate, op in spec:
        if rate < 0:
            raise InvalidRate(f"negative rate {rate}")
        if rate > 0:
            channels.append((TWO_PI * rate, op))
    return channels


def build_model(p: SystemParams, resonance_tol: float = RESONANCE_TOL) -> LindbladModel:
    space = p.space
    return LindbladModel(
        hamiltonian=build_rotating_frame_hamiltonian(p, space, resonance_tol),
        channels=tuple(build_collapse_channels(p, space)),
        space=space,
    )


def effective_params(p: SystemParams) -> EffectiveParams:
    d1, d2 = derive_detunings(p)
    lam = p.Omega * p.g1 * p.g2 / (d1 * d2)
    lam1 = d1 * p.g1**2 / (d1 * d2)
    lam2 = d2 * p.g2**2 / (d1 * d2)
    swap = 1.0 / (4.0 * lam) if lam > 0 else float("inf")
    return EffectiveParams(lambda_eff=lam, lambda1=lam1, lambda2=lam2, swap_time=swap)


def mode_space(p: SystemParams) -> HilbertSpace:
    return HilbertSpace((p.n_a, p.n_b))


def build_effective_hamiltonian(
    p: SystemParams, space: HilbertSpace | None = None, include_stark: bool = False
) -> np.ndarray:
    """Beam-splitter Hamiltonian lambda (a^dag b + a b^dag) on photon x phonon.

    With ``include_stark`` the shifts lambda1 (photon) and lambda2 (phonon)
    are added as lambda1 a^dag a + lambda2 b^dag b.
    """
    space = space or mode_space(p)
    if len(space) != 2:
        raise ValueError("the effective model lives on a two-mode space")
    eff = effective_params(p)
    a = embed(annihilation(space.dims[0]), 0, space)
    b = embed(annihilation(space.dims[1]), 1, space)
    h = eff.lambda_eff * (dagger(a) @ b + a @ dagger(b))
    if include_stark:
        h = h + eff.lambda1 * dagger(a) @ a + eff.lambda2 * dagger(b) @ b
    return TWO_PI * h


def build_effective_model(p: SystemParams, include_stark: bool = False) -> LindbladModel:
    """Two-mode model with the resonator decay channels kept and the qubit eliminated."""
    space = mode_space(p)
    a = embed(annihilation(space.dims[0]), 0, space)
    b = embed(annihilation(space.dims[1]), 1, space)
    channels = [(TWO_PI * r, op) for r, op in ((p.kappa_a, a), (p.kappa_b, b)) if r > 0]
    return LindbladModel(
        hamiltonian=build_effective_hamiltonian(p, space, include_stark),
        channels=tuple(channels),
        space=space,
    )


def qubit_only_model(
    omega1: float = 0.0,
    omega2: float = 0.0,
    drive: float = 0.0,
    rates: dict | None = None,
) -> LindbladModel:
    """Bare three-level system: level energies, a 1<->2 drive and any of the
    qubit channels keyed as in ``QUBIT_CHANNELS``. Used by oracle checks."""
    space = HilbertSpace((3,))
    h = TWO_PI * (
        np.diag([0.0, omega1, omega2]).astype(complex)
        + drive * (qubit_transition(1, 2) + dagger(qubit_transition(1, 2)))
    )
    channels = []
    for name, rate in (rates or {}).items():
        if rate < 0:
            raise InvalidRate(f"negative rate {rate}")
        if rate > 0:
            channels.append((TWO_PI * rate, QUBIT_CHANNELS[name]()))
    return LindbladModel(hamiltonian=h, channels=tuple(channels), space=space)


QUBIT_CHANNELS = {
    "s01": lambda: qubit_transition(0, 1),
    "z01": lambda: qubit_z(0, 1),
    "s02": lambda: qubit_transition(0, 2),
    "z02": lambda: qubit_z(0, 2),
    "s12": lambda: qubit_transition(1, 2),
    "z12": lambda: qubit_z(1, 2),
}


def cavity_only_model(n: int, kappa: float) -> LindbladModel:
    space = HilbertSpace((n,))
    channels = ((TWO_PI * kappa, annihilation(n)),) if kappa > 0 else ()
    return LindbladModel(hamiltonian=np.zeros((n, n), dtype=complex), channels=channels, space=space)


def adiabaticity_report(
    p: SystemParams,
    threshold: float = ADIABATIC_THRESHOLD,
    resonance_tol: float = RESONANCE_TOL,
) -> AdiabaticityReport:
    d1, d2 = derive_detunings(p)
    ratios = {
        "ratio_g1": p.g1 / d1,
        "ratio_g2": p.g2 / d2,
        "ratio_drive": p.Omega**2 / (d1 * d2),
    }
    verdicts = {k: v <= threshold for k, v in ratios.items()}
    verdicts["resonance"] = p.resonance_residual <= resonance_tol
    return AdiabaticityReport(
        resonance_residual=p.resonance_residual,
        threshold=threshold,
        resonance_tol=resonance_tol,
        verdicts=verdicts,
        **ratios,
    )


def drive_bound(p: SystemParams) -> float:
    """sqrt(delta1 delta2), the scale the drive amplitude must stay well below."""
    d1, d2 = derive_detunings(p)
    return sqrt(d1 * d2)

