import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh

from fluxem.analysis import full_observables
from fluxem.checks import oracle_initial_state, oracle_model, order_factor, rk4_final_state
from fluxem.errors import IntegrationDiverged, OracleSizeError
from fluxem.model import (
    TWO_PI,
    LindbladModel,
    SystemParams,
    build_model,
    cavity_only_model,
    qubit_only_model,
)
from fluxem.operators import HilbertSpace, basis_density, basis_state, dagger, number, qubit_projector
from fluxem.solver import (
    IntegratorConfig,
    integrate,
    lindblad_rhs,
    liouvillian_superoperator,
    propagate_expm,
    unvec,
    vec,
)

from conftest import random_density


def zero_model(d=3):
    return LindbladModel(np.zeros((d, d), dtype=complex), (), HilbertSpace((d,)))


def random_model(seed, d=4, k=3):
    r = np.random.default_rng(seed)
    h = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    channels = tuple(
        (float(r.uniform(0, 2)), r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))) for _ in range(k)
    )
    return LindbladModel(h + dagger(h), channels, HilbertSpace((d,)))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=1e-3, t_end=1e-4)
    with pytest.raises(ValueError):
        IntegratorConfig(sample_every=0)
    assert IntegratorConfig().n_steps == 25000


def test_rhs_zero_model(rng):
    assert np.array_equal(lindblad_rhs(zero_model(), random_density(rng, 3)), np.zeros((3, 3)))


@given(st.integers(0, 2**32 - 1))
def test_rhs_hermitian_and_traceless(seed):
    model = random_model(seed)
    r = np.random.default_rng(seed + 1)
    rho = random_density(r, 4)
    out = lindblad_rhs(model, rho)
    assert np.max(np.abs(out - dagger(out))) <= 1e-12
    general = r.normal(size=(4, 4)) + 1j * r.normal(size=(4, 4))
    assert abs(np.trace(lindblad_rhs(model, general))) <= 1e-12


def test_rhs_fig2_model_hermitian(fig2_params, rng):
    model = build_model(fig2_params)
    rho = random_density(rng, 12)
    out = lindblad_rhs(model, rho)
    assert np.max(np.abs(out - dagger(out))) <= 1e-12
    assert abs(np.trace(out)) <= 1e-12


def test_liouvillian_zero_and_trace_functional(fig2_params):
    assert np.array_equal(liouvillian_superoperator(zero_model(4)), np.zeros((16, 16)))
    lv = liouvillian_superoperator(build_model(fig2_params))
    functional = vec(np.eye(12)).conj() @ lv
    assert np.max(np.abs(functional)) <= 1e-12 * np.max(np.abs(lv))


def test_liouvillian_agrees_with_rhs(fig2_params, rng):
    for model in (build_model(fig2_params), random_model(7), oracle_model()):
        lv = liouvillian_superoperator(model)
        for _ in range(20):
            rho = random_density(rng, model.dim)
            assert np.max(np.abs(unvec(lv @ vec(rho), model.dim) - lindblad_rhs(model, rho))) <= 1e-12


def test_liouvillian_size_limit():
    with pytest.raises(OracleSizeError):
        liouvillian_superoperator(build_model(SystemParams(n_a=3, n_b=2)))


def test_propagate_expm_basics(fig2_params):
    model = build_model(fig2_params)
    rho0 = basis_density(fig2_params.space, (0, 1, 0))
    assert np.array_equal(propagate_expm(model, rho0, 0.0), rho0)
    rho = propagate_expm(model, rho0, 0.3)
    assert abs(np.trace(rho) - 1) <= 1e-9
    assert np.max(np.abs(rho - dagger(rho))) <= 1e-9


def test_zero_generator_constant(rng):
    rho = random_density(rng, 3)
    obs = {"P1": qubit_projector(1), "P2": qubit_projector(2)}
    traj = integrate(zero_model(), rho, IntegratorConfig(dt=1e-2, t_end=1.0, sample_every=10), obs)
    for series in traj.observables.values():
        assert np.all(series == series[0])
    assert len(traj) == 11


def test_amplitude_damping_closed_form():
    model = qubit_only_model(rates={"s01": 0.01})
    cfg = IntegratorConfig(dt=1e-2, t_end=10.0, sample_every=10)
    traj = integrate(model, np.diag([0, 1, 0]).astype(complex), cfg, {"P1": qubit_projector(1)})
    exact = np.exp(-TWO_PI * 0.01 * traj.times)
    assert np.max(np.abs(traj["P1"] - exact)) <= 1e-6
    assert traj["P1"][-1] == pytest.approx(math.exp(-TWO_PI * 0.1), abs=1e-6)
    assert traj["P1"][-1] == pytest.approx(0.5335, abs=1e-4)


def test_cavity_decay_closed_form():
    model = cavity_only_model(3, 0.005)
    rho0 = np.diag([0, 1, 0]).astype(complex)
    traj = integrate(model, rho0, IntegratorConfig(dt=1e-2, t_end=10.0, sample_every=20), {"n": number(3)})
    assert np.max(np.abs(traj["n"] - np.exp(-TWO_PI * 0.005 * traj.times))) <= 1e-6


def test_rk4_matches_expm_oracle():
    model, rho0 = oracle_model(), oracle_initial_state()
    for t in (0.2, 1.0, 2.0):
        rho = rk4_final_state(model, rho0, 1e-4, t)
        assert np.max(np.abs(rho - propagate_expm(model, rho0, t))) <= 1e-8


def test_rk4_fourth_order():
    f = order_factor()
    assert f >= 10
    assert f == pytest.approx(16, rel=0.1)


def test_lossless_full_model_against_exact_diagonalisation(fig2_params, lossless_traj):
    # single-excitation sector is closed: |0,1,0>, |2,0,0>, |1,0,0>, |0,0,1>
    p = fig2_params.lossless()
    model = build_model(p)
    s = p.space
    idx = [int(np.argmax(np.abs(basis_state(s, occ)))) for occ in [(0, 1, 0), (2, 0, 0), (1, 0, 0), (0, 0, 1)]]
    w, v = eigh(model.hamiltonian[np.ix_(idx, idx)])
    amps = v @ (np.exp(-1j * np.outer(w, lossless_traj.times)) * v[0][:, None])
    pops = np.abs(amps) ** 2
    assert np.max(np.abs(lossless_traj["n_a"] - pops[0])) <= 1e-6
    assert np.max(np.abs(lossless_traj["P2"] - pops[1])) <= 1e-6
    assert np.max(np.abs(lossless_traj["P1"] - pops[2])) <= 1e-6
    assert np.max(np.abs(lossless_traj["n_b"] - pops[3])) <= 1e-6


def test_full_model_rk4_vs_expm(fig2_params):
    model = build_model(fig2_params)
    rho0 = basis_density(fig2_params.space, (0, 1, 0))
    cfg = IntegratorConfig(dt=5e-6, t_end=0.05, sample_every=10000)
    traj = integrate(model, rho0, cfg)
    assert np.max(np.abs(traj.final_state - propagate_expm(model, rho0, 0.05))) <= 1e-8


def test_physicality_diagnostics(fig2_traj):
    assert np.max(np.abs(fig2_traj.trace_dev)) <= 1e-8
    assert np.max(fig2_traj.herm_residual) <= 1e-9
    assert np.min(fig2_traj.min_eig) >= -1e-8


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_model_stays_physical(seed):
    model = random_model(seed, d=3, k=2)
    rho = random_density(np.random.default_rng(seed), 3)
    traj = integrate(model, rho, IntegratorConfig(dt=1e-3, t_end=1.0, sample_every=50))
    assert np.max(np.abs(traj.trace_dev)) <= 1e-10
    assert np.min(traj.min_eig) >= -1e-8


def test_closed_system_conservation(fig2_params):
    p = fig2_params.lossless()
    obs = full_observables(p)
    traj = integrate(build_model(p), basis_density(p.space, (0, 1, 0)), IntegratorConfig(dt=1e-5), {"N": obs["N"]})
    assert np.max(np.abs(traj["N"] - 1)) <= 1e-8
    assert np.max(np.abs(traj.purity - 1)) <= 1e-8


def test_divergence_is_reported(fig2_params):
    model = build_model(fig2_params)
    rho0 = basis_density(fig2_params.space, (0, 1, 0))
    cfg = IntegratorConfig(dt=1e-2, t_end=0.5, sample_every=1)
    with pytest.warns(RuntimeWarning, match="dt"):
        with pytest.raises(IntegrationDiverged) as info:
            integrate(model, rho0, cfg, {"n_b": full_observables(fig2_params)["n_b"]})
    assert 0 < info.value.time <= 0.5
    partial = info.value.trajectory
    assert len(partial) >= 2 and partial.times[-1] == pytest.approx(info.value.time)


def test_rejects_unphysical_initial_state():
    with pytest.raises(ValueError):
        integrate(zero_model(), np.eye(3, dtype=complex), IntegratorConfig(dt=0.1, t_end=1.0))
    with pytest.raises(ValueError):
        integrate(zero_model(2), np.diag([1.5, -0.5]).astype(complex), IntegratorConfig(dt=0.1, t_end=1.0))


def test_mode_states_kept(fig2_params):
    cfg = IntegratorConfig(t_end=0.01, sample_every=100, keep_mode_states=True)
    traj = integrate(build_model(fig2_params), basis_density(fig2_params.space, (0, 1, 0)), cfg)
    assert len(traj.mode_states) == len(traj)
    assert all(abs(np.trace(m) - 1) <= 1e-12 for m in traj.mode_states)
    assert traj.mode_states[0][2, 2] == 1
