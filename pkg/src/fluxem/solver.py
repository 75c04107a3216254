"""Master-equation integration.

The generator is drho/dt = -i[H, rho] + sum_j r_j (A_j rho A_j^dag - {A_j^dag A_j, rho}/2).
``integrate`` steps it with classic fixed-step RK4 on the density matrix;
``liouvillian_superoperator`` / ``propagate_expm`` build the same generator
as a column-stacked d^2 x d^2 matrix and exponentiate it, serving as an
independent oracle for small systems.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HermiticityViolation, IntegrationDiverged, InvalidDimension, OracleSizeError
from .model import LindbladModel
from .operators import dagger, hermiticity_residual, identity, matrix_exponential, partial_trace

ORACLE_MAX_DIM = 16
STABILITY_BOUND = 0.1
DIVERGENCE_TOL = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 2e-5
    t_end: float = 0.5
    sample_every: int = 50
    hermitize_every: int = 100
    check_trace: bool = True
    check_positivity: bool = True
    keep_mode_states: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError(f"t_end must be >= dt, got t_end={self.t_end}, dt={self.dt}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError(f"sample_every must be a positive integer, got {self.sample_every}")
        if int(self.hermitize_every) != self.hermitize_every or self.hermitize_every < 0:
            raise ValueError(f"hermitize_every must be a non-negative integer, got {self.hermitize_every}")
        object.__setattr__(self, "sample_every", int(self.sample_every))
        object.__setattr__(self, "hermitize_every", int(self.hermitize_every))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    times: np.ndarray
    observables: dict[str, np.ndarray]
    trace_dev: np.ndarray
    herm_residual: np.ndarray
    min_eig: np.ndarray
    purity: np.ndarray
    mode_states: list[np.ndarray] | None = None
    final_state: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.observables[name]


class _Generator:
    """Precomputed pieces of the Lindblad generator for repeated evaluation."""

    def __init__(self, model: LindbladModel):
        h = model.hamiltonian
        self.dim = h.shape[0]
        # -i H_eff with H_eff = H - (i/2) sum r A^dag A
        decay = sum((r * dagger(a) @ a for r, a in model.channels), np.zeros_like(h))
        self.k = -1j * h - 0.5 * decay
        self.k_dag = dagger(self.k)
        # diagonal collapse operators (dephasing) act elementwise:
        # sum_j r_j z_j rho z_j^* = (sum_j r_j z_j z_j^H) * rho
        diagonal = [(r, a) for r, a in model.channels if not np.any(a - np.diag(np.diag(a)))]
        general = [(r, a) for r, a in model.channels if np.any(a - np.diag(np.diag(a)))]
        self.mask = None
        if diagonal:
            self.mask = sum(r * np.outer(np.diag(a), np.diag(a).conj()) for r, a in diagonal)
        # remaining sum_j B_j rho B_j^dag as two matmuls: stacked (kd x d) @ rho,
        # then the (d x kd) row of blocks against the stacked daggers
        self.n_jumps = len(general)
        if general:
            jumps = [np.sqrt(r) * a for r, a in general]
            self.stacked = np.vstack(jumps)
            self.stacked_dag = np.vstack([dagger(b) for b in jumps])

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = self.k @ rho + rho @ self.k_dag
        if self.mask is not None:
            out += self.mask * rho
        if self.n_jumps:
            d, k = self.dim, self.n_jumps
            m = (self.stacked @ rho).reshape(k, d, d).transpose(1, 0, 2).reshape(d, k * d)
            out += m @ self.stacked_dag
        return out


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    if rho.shape != (model.dim, model.dim):
        raise InvalidDimension(f"state shape {rho.shape} does not match model dimension {model.dim}")
    return _Generator(model)(rho)


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def _check_initial(rho0: np.ndarray) -> None:
    if hermiticity_residual(rho0) > 1e-10:
        raise HermiticityViolation("initial state is not Hermitian")
    tr = np.trace(rho0).real
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"initial state has trace {tr}")
    if np.linalg.eigvalsh(0.5 * (rho0 + dagger(rho0)))[0] < -1e-10:
        raise ValueError("initial state is not positive semidefinite")


def integrate(
    model: LindbladModel,
    rho0: np.ndarray,
    cfg: IntegratorConfig,
    observables: dict[str, np.ndarray] | None = None,
) -> Trajectory:
    """RK4 integration of ``rho0`` over ``[0, cfg.t_end]``.

    Expectations of ``observables`` and the physicality diagnostics are
    recorded every ``cfg.sample_every`` steps (and at the final step).
    Raises IntegrationDiverged, carrying the partial trajectory, as soon as
    a sample breaks the trace or positivity bound.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (model.dim, model.dim):
        raise InvalidDimension(f"state shape {rho.shape} does not match model dimension {model.dim}")
    _check_initial(rho)
    observables = observables or {}
    ops = {name: np.ascontiguousarray(op.T) for name, op in observables.items()}
    for name, op in ops.items():
        if op.shape != rho.shape:
            raise InvalidDimension(f"observable {name!r} has shape {op.shape}")

    dt = cfg.dt
    stiffness = dt * spectral_norm(model.hamiltonian)
    if stiffness > STABILITY_BOUND:
        warnings.warn(
            f"dt * ||H|| = {stiffness:.3g} exceeds {STABILITY_BOUND}; RK4 accuracy not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )

    f = _Generator(model)
    n = cfg.n_steps
    times, diag = [], {"trace_dev": [], "herm": [], "min_eig": [], "purity": []}
    series = {name: [] for name in ops}
    modes = [] if cfg.keep_mode_states else None

    def partial():
        return _assemble(times, series, diag, modes, None)

    def record(step):
        t = step * dt
        times.append(t)
        for name, opt in ops.items():
            series[name].append(float(np.sum(opt * rho).real))
        tr = np.trace(rho).real - 1.0
        herm = hermiticity_residual(rho)
        finite = np.all(np.isfinite(rho))
        lo = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] if finite else -np.inf
        diag["trace_dev"].append(tr if finite else np.inf)
        diag["herm"].append(herm)
        diag["min_eig"].append(lo)
        diag["purity"].append(float(np.sum(rho.T * rho).real) if finite else np.nan)
        if modes is not None and len(model.space) == 3:
            modes.append(partial_trace(rho, (1, 2), model.space))
        if not finite or (cfg.check_trace and abs(tr) > DIVERGENCE_TOL):
            raise IntegrationDiverged(
                f"trace deviation {tr:.3e} exceeds {DIVERGENCE_TOL:.0e} at t = {t:.6g} us",
                t,
                partial(),
            )
        if cfg.check_positivity and lo < -DIVERGENCE_TOL:
            raise IntegrationDiverged(
                f"minimum eigenvalue {lo:.3e} below -{DIVERGENCE_TOL:.0e} at t = {t:.6g} us",
                t,
                partial(),
            )

    half = 0.5 * dt
    sixth = dt / 6.0
    with np.errstate(over="ignore", invalid="ignore"):
        record(0)
        for step in range(1, n + 1):
            k1 = f(rho)
            k2 = f(rho + half * k1)
            k3 = f(rho + half * k2)
            k4 = f(rho + dt * k3)
            rho = rho + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            if cfg.hermitize_every and step % cfg.hermitize_every == 0:
                rho = 0.5 * (rho + dagger(rho))
            if step % cfg.sample_every == 0 or step == n:
                record(step)
    return _assemble(times, series, diag, modes, rho)


def _assemble(times, series, diag, modes, final):
    return Trajectory(
        times=np.array(times),
        observables={k: np.array(v) for k, v in series.items()},
        trace_dev=np.array(diag["trace_dev"]),
        herm_residual=np.array(diag["herm"]),
        min_eig=np.array(diag["min_eig"]),
        purity=np.array(diag["purity"]),
        mode_states=modes,
        final_state=final,
    )


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorisation."""
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def liouvillian_superoperator(model: LindbladModel) -> np.ndarray:
    """Column-stacked generator L with vec(drho/dt) = L vec(rho).

    Uses vec(A X B) = (B^T kron A) vec(X).
    """
    d = model.dim
    if d > ORACLE_MAX_DIM:
        raise OracleSizeError(f"oracle limited to dimension <= {ORACLE_MAX_DIM}, got {d}")
    eye = identity(d)
    h = model.hamiltonian
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for r, a in model.channels:
        ada = dagger(a) @ a
        lv += r * (np.kron(a.conj(), a) - 0.5 * np.kron(eye, ada) - 0.5 * np.kron(ada.T, eye))
    return lv


def propagate_expm(model: LindbladModel, rho0: np.ndarray, t: float) -> np.ndarray:
    lv = liouvillian_superoperator(model)
    if rho0.shape != (model.dim, model.dim):
        raise InvalidDimension(f"state shape {rho0.shape} does not match model dimension {model.dim}")
    if t == 0:
        return np.array(rho0, dtype=complex)
    return unvec(matrix_exponential(lv * t) @ vec(rho0), model.dim)
