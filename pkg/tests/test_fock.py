import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from catsuppress import fock
from catsuppress.errors import CutoffError
from catsuppress.fock import MultiModeState, beamsplitter, coherent_vector, project_photons

amplitudes = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
transmittances = st.floats(min_value=0.0, max_value=1.0)


def complex_arrays(shape):
    parts = arrays(np.float64, shape, elements=st.floats(-1, 1))
    return st.tuples(parts, parts).map(lambda t: t[0] + 1j * t[1])


def test_coherent_vacuum():
    assert np.allclose(coherent_vector(0.0, 5), [1, 0, 0, 0, 0, 0])


def test_coherent_normalized():
    v = coherent_vector(1.0, 40)
    assert abs(np.vdot(v, v).real - 1.0) < 1e-12


def test_coherent_overlap_opposite():
    # direct summation against exp(-2|alpha|^2)
    u = coherent_vector(2.0, 60)
    v = coherent_vector(-2.0, 60)
    assert abs(np.vdot(u, v) - math.exp(-8.0)) < 1e-15


def test_coherent_cutoff_error():
    with pytest.raises(CutoffError):
        coherent_vector(3.0, 5)


@given(st.floats(0, 3), st.floats(0, 2 * math.pi))
def test_coherent_tail_rule(r, phi):
    a = r * np.exp(1j * phi)
    n_max = math.ceil(r * r + 10 * math.sqrt(r * r + 1))
    v = coherent_vector(a, n_max)
    assert np.vdot(v, v).real >= 1 - 1e-9


def test_annihilate_single_photon():
    assert np.allclose(fock.annihilate(fock.number_state(1, 3)), [1, 0, 0, 0])


@given(amplitudes, st.floats(-2, 2))
def test_annihilate_eigenstate(x, y):
    a = complex(x, y)
    v = coherent_vector(a, 50)
    w = fock.annihilate(v, 1)
    assert np.allclose(w[:-1], a * v[:-1], atol=1e-12)


def test_annihilate_twice():
    v = np.array([1, 0, 1, 0]) / math.sqrt(2)
    w = fock.annihilate(v, 2)
    assert np.allclose(w, [1, 0, 0, 0])  # sqrt(2!) / sqrt(2)


def test_rescale_identity():
    v = coherent_vector(1.3, 30)
    assert np.allclose(fock.rescale(v, 1.0), v)


@given(st.floats(0.1, 2.0), st.floats(0.2, 1.0))
def test_rescale_coherent(alpha, nu):
    v = fock.rescale(coherent_vector(alpha, 60), nu)
    expect = math.exp((nu**2 - 1) * alpha**2 / 2) * coherent_vector(nu * alpha, 60)
    assert np.allclose(v, expect, atol=1e-12)


def test_beamsplitter_identity():
    st_ = MultiModeState.product({"a": coherent_vector(1.0, 20), "b": coherent_vector(0.5, 20)})
    out = beamsplitter(st_, "a", "b", 1.0)
    assert np.allclose(out.tensor, st_.tensor)


def test_beamsplitter_single_photon():
    st_ = MultiModeState.product({"a": fock.number_state(1, 2), "b": fock.number_state(0, 2)})
    out = beamsplitter(st_, "a", "b", 0.5).tensor
    # a1 -> sqrt(T) a1 - sqrt(R) a2 acting on creation operators
    assert abs(out[1, 0] - 1 / math.sqrt(2)) < 1e-14
    assert abs(abs(out[0, 1]) - 1 / math.sqrt(2)) < 1e-14
    assert abs(np.sum(np.abs(out) ** 2) - 1) < 1e-14


@given(st.floats(0.0, 1.5), transmittances)
def test_beamsplitter_coherent_product(alpha, T):
    n = 30
    st_ = MultiModeState.product({"a": coherent_vector(alpha, n), "b": fock.number_state(0, n)})
    out = beamsplitter(st_, "a", "b", T)
    R = 1 - T
    expect = np.multiply.outer(coherent_vector(math.sqrt(T) * alpha, n), coherent_vector(math.sqrt(R) * alpha, n))
    assert abs(abs(np.vdot(expect, out.tensor)) - 1) < 1e-10


@settings(max_examples=30)
@given(complex_arrays((6, 6)), transmittances)
def test_beamsplitter_unitary(psi, T):
    if np.linalg.norm(psi) < 1e-3:
        return
    # two-photon-limited input fits cutoff 8 exactly
    t = np.zeros((9, 9), complex)
    t[:3, :3] = psi[:3, :3]
    s = MultiModeState(t / np.linalg.norm(t), ("a", "b"))
    out = beamsplitter(s, "a", "b", T)
    assert abs(out.norm_squared() - 1) < 1e-10


def test_beamsplitter_overflow_names_modes():
    s = MultiModeState.product({"a": fock.number_state(3, 3), "b": fock.number_state(3, 3)})
    with pytest.raises(CutoffError, match="a"):
        beamsplitter(s, "a", "b", 0.5)


def test_project_vacuum():
    s = MultiModeState.product({"a": coherent_vector(0.7, 20), "b": fock.number_state(0, 4)})
    out, p = project_photons(s, "b", 0)
    assert abs(p - 1) < 1e-14
    assert np.allclose(out.vector(), coherent_vector(0.7, 20))


def test_project_split_photon():
    s = MultiModeState.product({"a": fock.number_state(1, 2), "b": fock.number_state(0, 2)})
    s = beamsplitter(s, "a", "b", 0.5)
    _, p = project_photons(s, "b", 1)
    assert abs(p - 0.5) < 1e-14


@given(st.floats(0.1, 1.5), transmittances)
def test_project_probabilities_sum(alpha, T):
    n = fock.default_cutoff(alpha)
    s = MultiModeState.product({"a": coherent_vector(alpha, n), "b": fock.number_state(0, n)})
    s = beamsplitter(s, "a", "b", T)
    total = sum(project_photons(s, "b", k)[1] for k in range(n + 1))
    assert abs(total - 1) < 1e-9


def test_wigner_vacuum_and_photon():
    rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
    rho1 = np.diag([0.0, 1.0, 0.0]).astype(complex)
    assert abs(fock.wigner(rho0, 0.0, 0.0) - 1 / math.pi) < 1e-14
    assert abs(fock.wigner(rho1, 0.0, 0.0) + 1 / math.pi) < 1e-14
    xs = np.linspace(-3, 3, 61)
    X, P = np.meshgrid(xs, xs)
    W = fock.wigner(rho0, X, P)
    assert W.max() == fock.wigner(rho0, 0.0, 0.0)


def test_wigner_coherent_peak():
    # peak at (x, p) = sqrt(2) (Re beta, Im beta)
    b = 0.8 + 0.3j
    v = coherent_vector(b, 30)
    rho = np.outer(v, v.conj())
    assert abs(fock.wigner(rho, math.sqrt(2) * b.real, math.sqrt(2) * b.imag) - 1 / math.pi) < 1e-12


def test_wigner_integrates_to_trace():
    from catsuppress.catstates import CatBasisKind, basis_state

    v = basis_state(CatBasisKind.PLUS_BAR, 2.0)
    rho = np.outer(v, v.conj())
    xs = np.linspace(-7, 7, 141)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    W = fock.wigner(rho, X, P)
    h = xs[1] - xs[0]
    assert abs(W.sum() * h * h - 1) < 1e-3


def test_wigner_fourfold_symmetry():
    from catsuppress.catstates import CatBasisKind, basis_state

    v = basis_state(CatBasisKind.PLUS_BAR, 2.0)
    rho = np.outer(v, v.conj())
    xs = np.linspace(-4, 4, 21)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    # z -> iz is (x, p) -> (-p, x)
    assert np.allclose(fock.wigner(rho, X, P), fock.wigner(rho, -P, X), atol=1e-8)


def test_vectorize_convention():
    m = np.array([[1, 3], [2, 4]])
    assert np.array_equal(fock.vectorize(m), [1, 2, 3, 4])
    assert np.array_equal(fock.vectorize(np.eye(2)), [1, 0, 0, 1])


@given(complex_arrays((2, 2)), complex_arrays((2, 2)), complex_arrays((2, 2)))
def test_vec_kron_identity(A, X, B):
    assert np.allclose(fock.vectorize(A @ X @ B), np.kron(B.T, A) @ fock.vectorize(X))


@given(complex_arrays((3, 4)))
def test_devectorize_roundtrip(m):
    assert np.array_equal(fock.devectorize(fock.vectorize(m), m.shape), m)


def test_devectorize_dimension_mismatch():
    with pytest.raises(ValueError):
        fock.devectorize(np.ones(5))


def test_mixed_fidelity_pure_limit():
    u = fock.normalize(coherent_vector(0.5, 20))
    v = fock.normalize(coherent_vector(0.7j, 20))
    f = fock.mixed_fidelity(np.outer(u, u.conj()), np.outer(v, v.conj()))
    assert abs(f - fock.pure_fidelity(u, v)) < 1e-12


@pytest.mark.parametrize("n,eta", [(0, 0.9), (1, 0.8), (2, 0.6)])
def test_detection_povm_matches_loss_beamsplitter(n, eta):
    N = 24
    s = MultiModeState.product({"a": coherent_vector(1.2, N), "d": fock.number_state(0, N)})
    s = beamsplitter(s, "a", "d", 0.5)
    rho = sum(np.outer(b.vector(), b.vector().conj()) for b in fock.detection_branches(s, "d", n, eta))
    t = MultiModeState(np.concatenate([s.tensor[..., None], np.zeros(s.tensor.shape + (N,))], axis=-1),
                       ("a", "d", "e"))
    t = beamsplitter(t, "d", "e", eta)
    out, _ = project_photons(t, "d", n)
    m = out.tensor
    ref = np.einsum("ae,be->ab", m, m.conj())
    assert np.abs(rho - ref).max() < 1e-12
