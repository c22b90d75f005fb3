import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsuppress import optimizer as opt
from catsuppress.channels import PipelineParams
from catsuppress.errors import ConvergenceError
from catsuppress.optimizer import (
    AscentConfig,
    cp_project,
    cptp_project,
    cptp_residuals,
    delta_A,
    first_order_delta,
    gradient_matrix,
    hermitize,
    optimize,
    partial_trace_k,
    random_cptp,
    step,
    tp_project,
)
from catsuppress.recovery import canonical_recovery, noise_channel, pipeline_noise, worst_case_fidelity

seeds = st.integers(0, 2**32 - 1)


def random_hermitian(rng, d=8):
    return hermitize(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = g @ g.conj().T
    return r / np.trace(r).real


def is_cptp(R, tol=1e-8):
    tp, mn = cptp_residuals(R)
    return tp <= tol and mn >= -tol


# ---------------------------------------------------------------------------
# projections


def test_cp_diag():
    R = np.diag([1.0, -1.0, 0, 0, 0, 0, 0, 0])
    assert np.allclose(cp_project(R), np.diag([1.0, 0, 0, 0, 0, 0, 0, 0]))


def test_cp_keeps_psd():
    R = canonical_recovery(2.0, 2.0)
    assert np.abs(cp_project(R) - R).max() < 1e-12


@settings(max_examples=100)
@given(seeds)
def test_cp_idempotent(seed):
    R = cp_project(random_hermitian(np.random.default_rng(seed)))
    assert np.abs(cp_project(R) - R).max() < 1e-10
    assert np.linalg.eigvalsh(R)[0] > -1e-12


def test_tp_fixes_canonical():
    R = canonical_recovery(2.0, 2.0)
    assert np.abs(tp_project(R) - R).max() < 1e-10


def test_tp_of_zero():
    R = tp_project(np.zeros((8, 8)))
    assert np.abs(partial_trace_k(R) - np.eye(4)).max() < 1e-12
    assert np.allclose(R, np.eye(8) / 2)


@settings(max_examples=50)
@given(seeds)
def test_tp_idempotent(seed):
    rng = np.random.default_rng(seed)
    R = tp_project(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    assert np.abs(partial_trace_k(R) - np.eye(4)).max() < 1e-10
    assert np.abs(tp_project(R) - R).max() < 1e-10


def test_tp_projector_matrix_is_partial_trace():
    rng = np.random.default_rng(2)
    R = rng.normal(size=(8, 8))
    M = opt.TpProjector().matrix
    assert np.allclose(M @ R.reshape(-1, order="F"), partial_trace_k(R).reshape(-1, order="F"))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_cptp_projection_random_seed(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    R = cptp_project(g @ g.conj().T, tol=1e-8)
    assert is_cptp(R)
    R2 = cptp_project(R, tol=1e-8)
    assert np.abs(R2 - R).max() < 1e-8


def test_cptp_fixed_point():
    R = canonical_recovery(1.5, 1.5)
    assert np.abs(cptp_project(R) - R).max() < 1e-10


def test_cptp_nonconvergence_reports_residuals():
    g = np.random.default_rng(0).normal(size=(8, 8))
    with pytest.raises(ConvergenceError) as e:
        cptp_project(20 * g @ g.T, max_iter=1, tol=1e-14)
    assert "tp_residual" in e.value.residuals


# ---------------------------------------------------------------------------
# ascent direction and step


def test_delta_a_zero_gradient():
    R = random_cptp(np.random.default_rng(0))
    assert np.abs(delta_A(np.zeros((8, 8)), R, 3.0)).max() == 0


@given(seeds, st.floats(1e-4, 10))
def test_delta_a_linear_in_epsilon(seed, eps):
    rng = np.random.default_rng(seed)
    R = random_cptp(rng)
    M = gradient_matrix(random_density(rng, 4), random_density(rng, 2))
    a = delta_A(M, R, eps)
    assert np.allclose(a, eps * delta_A(M, R, 1.0), atol=1e-12)
    assert np.abs(a - a.conj().T).max() == 0


def test_gradient_matrix_psd():
    rng = np.random.default_rng(1)
    M = gradient_matrix(random_density(rng, 4), random_density(rng, 2))
    assert np.linalg.eigvalsh(M)[0] > -1e-14


def test_ascent_direction_nonnegative():
    rng = np.random.default_rng(4)
    for _ in range(100):
        R = random_cptp(rng)
        M = gradient_matrix(random_density(rng, 4), random_density(rng, 2))
        dF = opt.directional_derivative(M, first_order_delta(R, delta_A(M, R, 1e-4)))
        assert dF >= -1e-12


def test_step_zero_is_identity():
    R = random_cptp(np.random.default_rng(5))
    assert np.abs(step(R, np.zeros((8, 8))) - R).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(1e-4, 0.3))
def test_step_preserves_cptp(seed, scale):
    rng = np.random.default_rng(seed)
    R = random_cptp(rng)
    R2 = step(R, scale * random_hermitian(rng))
    tp, mn = cptp_residuals(R2)
    assert tp < 1e-10 and mn > -1e-10


def test_step_gradient_central_difference():
    rng = np.random.default_rng(6)
    R = random_cptp(rng)
    psi = np.array([0.6, 0.8j])
    rho = np.outer(psi, psi.conj())
    ch = noise_channel(2.0, 1 / 0.9, 0.9)
    M = gradient_matrix(ch.apply(rho), rho)
    h = 1e-5
    for _ in range(20):
        H = random_hermitian(rng)
        fd = (np.trace(M @ step(R, h * H)).real - np.trace(M @ step(R, -h * H)).real) / (2 * h)
        an = opt.directional_derivative(M, first_order_delta(R, H))
        assert abs(fd - an) <= 1e-5 * abs(an)


def test_frozen_state_monotone():
    rng = np.random.default_rng(8)
    ch = noise_channel(2.0, 1 / 0.9, 0.9)
    psi = np.array([1, 1j]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    M = gradient_matrix(ch.apply(rho), rho)
    R = random_cptp(rng)
    F = [np.trace(M @ R).real]
    for _ in range(200):
        R = step(R, delta_A(M, R, 1e-3))
        F.append(np.trace(M @ R).real)
    ups = np.count_nonzero(np.diff(F) >= -1e-14)
    assert ups >= 0.99 * 200


def test_step_singular_normalizer():
    R = np.zeros((8, 8))
    with pytest.raises(opt.SingularNormalizerError):
        step(R, np.zeros((8, 8)), reg=0.0)


# ---------------------------------------------------------------------------
# driver


def test_config_validation():
    with pytest.raises(ValueError):
        AscentConfig(decay=1.0)
    with pytest.raises(ValueError):
        AscentConfig(epsilon0=0.0)


def test_lossless_reaches_one():
    ch = pipeline_noise(PipelineParams(2.0, 0.35, 1.0, 1.0))
    res = optimize(ch, AscentConfig(restarts=1, max_steps=100))
    assert abs(res.fidelity - 1) < 1e-6
    assert len(res.trace) <= 100


@pytest.fixture(scope="module")
def short_run():
    ch = noise_channel(2.0, 1 / 0.9, 0.9)
    return ch, optimize(ch, AscentConfig(restarts=2, max_steps=200, seed=3))


def test_iterates_cptp(short_run):
    _, res = short_run
    for t in res.traces:
        assert max(t.tp_residual) <= 1e-8
        assert min(t.min_eigenvalue) >= -1e-8
        assert len(t) <= 200
    assert is_cptp(res.choi)


def test_trace_fields(short_run):
    _, res = short_run
    t = res.trace
    n = len(t)
    assert len(t.theta) == len(t.phi) == len(t.epsilon) == len(t.delta_norm) == n
    assert t.epsilon[0] == 3.0
    assert abs(t.epsilon[1] / t.epsilon[0] - 0.994) < 1e-15
    assert res.fidelity == max(t.fidelity)


def test_result_is_worst_case(short_run):
    ch, res = short_run
    assert abs(worst_case_fidelity(res.choi, ch).fidelity - res.fidelity) < 1e-8


def test_beats_random_channels(short_run):
    ch, res = short_run
    rng = np.random.default_rng(12)
    for _ in range(100):
        assert worst_case_fidelity(random_cptp(rng), ch).fidelity < res.fidelity


def test_pinching_keeps_fidelity(short_run):
    # the noise output carries no even/odd coherence, so the off blocks are inert
    ch, res = short_run
    R4 = res.choi.reshape(4, 2, 4, 2).copy()
    R4[:2, :, 2:, :] = 0
    R4[2:, :, :2, :] = 0
    P = R4.reshape(8, 8)
    assert is_cptp(P, 1e-8)
    assert abs(worst_case_fidelity(P, ch).fidelity - res.fidelity) < 1e-8


def test_reproducible():
    ch = noise_channel(1.5, 1 / 0.85, 0.85)
    cfg = AscentConfig(restarts=2, max_steps=30, seed=9)
    a = optimize(ch, cfg)
    b = optimize(ch, cfg)
    assert np.array_equal(a.choi, b.choi)
    for ta, tb in zip(a.traces, b.traces):
        assert ta.fidelity == tb.fidelity and ta.theta == tb.theta


def test_pool_matches_serial():
    ch = noise_channel(1.5, 1 / 0.85, 0.85)
    a = optimize(ch, AscentConfig(restarts=2, max_steps=20, seed=1))
    b = optimize(ch, AscentConfig(restarts=2, max_steps=20, seed=1, workers=2))
    assert np.array_equal(a.choi, b.choi)
