"""Noise and recovery channels between the code space and the error space.

Coordinates:

* code space: ``(|+bar>, |-bar>)`` at the restored amplitude ``alpha_bar``;
* error space: ``(|+~>, |-~>, |+~'>, |-~'>)`` at the post-channel
  amplitude ``alpha_tilde``.  These four states occupy the photon-number
  residues 0, 2, 3, 1 (mod 4) and are therefore orthonormal.

Choi matrices are ordered ``input (x) output`` and built with column
stacking, ``J = sum_k vec(K_k) vec(K_k)^dag``.  For a recovery (error ->
code) this gives an 8x8 matrix with index ``2 i + p`` for error index ``i``
and code index ``p``; the fidelity is ``F = tr[(rho'^T (x) rho) R]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from . import catstates, fock
from .catstates import RING, CatBasisKind, LogicalBasis, check_alpha, ring_gram
from .channels import loss_mixture

ERROR_KINDS = (
    CatBasisKind.PLUS_BAR,
    CatBasisKind.MINUS_BAR,
    CatBasisKind.PLUS_BAR_PRIME,
    CatBasisKind.MINUS_BAR_PRIME,
)
CODE_KINDS = (CatBasisKind.PLUS_BAR, CatBasisKind.MINUS_BAR)
OPERATOR_LABELS = ("0e", "1e", "2e", "3e", "0o", "1o", "2o", "3o")
KRAUS_TAIL = 1e-16

_S = 1.0 / math.sqrt(2.0)
_BLOCKS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
) * _S


def _basis_matrices():
    B = np.zeros((8, 2, 4), dtype=complex)
    for i in range(4):
        B[i, :, :2] = _BLOCKS[i]
        B[4 + i, :, 2:] = _BLOCKS[i]
    return B


def error_ring(alpha_tilde):
    """Normalized ring coefficients of the error basis, shape ``(4, 4)``."""
    return np.array([catstates.basis_ring(k, alpha_tilde) for k in ERROR_KINDS])


def code_ring(alpha_bar):
    return np.array([catstates.basis_ring(k, alpha_bar) for k in CODE_KINDS])


@dataclass(frozen=True)
class BasisOperators:
    """Hilbert-Schmidt orthonormal operators from the error space to the code space.

    ``matrices[i]`` is the 2x4 coordinate matrix of ``B_i`` in the order
    ``OPERATOR_LABELS``.
    """

    alpha_tilde: float
    alpha_bar: float
    matrices: np.ndarray
    labels: tuple = OPERATOR_LABELS

    def error_vectors(self, n_max):
        return np.column_stack(
            [catstates.basis_state(k, self.alpha_tilde, n_max) for k in ERROR_KINDS]
        )

    def code_vectors(self, n_max):
        return np.column_stack(
            [catstates.basis_state(k, self.alpha_bar, n_max) for k in CODE_KINDS]
        )

    def fock_operator(self, i, n_max):
        """``B_i`` embedded in the truncated Fock space."""
        return self.code_vectors(n_max) @ self.matrices[i] @ self.error_vectors(n_max).conj().T


def basis_operators(alpha_tilde, alpha_bar):
    check_alpha(alpha_tilde, "alpha_tilde")
    check_alpha(alpha_bar, "alpha_bar")
    return BasisOperators(float(alpha_tilde), float(alpha_bar), _basis_matrices())


def vec(m):
    return fock.vectorize(m)


# ---------------------------------------------------------------------------
# noise channel


def _kraus_count(mean):
    """Number of loss Kraus terms needed for a Poisson tail below ``KRAUS_TAIL``."""
    if mean <= 0:
        return 1
    k = int(stats.poisson.isf(KRAUS_TAIL, mean)) + 2
    while stats.poisson.sf(k - 1, mean) > KRAUS_TAIL:
        k += 1
    return k


@dataclass(frozen=True)
class NoiseChannel:
    """Effective noise ``rho -> sum_k K_k rho K_k^dag`` from code to error space.

    ``K_k = E_k(gamma_eff) a^n_sub sqrt(T_eff)^n`` in coordinates; the map is
    not trace preserving (it carries the heralding weight), so states are
    normalized after it.
    """

    alpha: float
    t_eff: float
    gamma_eff: float
    n_sub: int
    kraus: np.ndarray  # (K, 4, 2)

    @property
    def alpha_bar(self):
        """Amplitude after the noiseless rescaling."""
        return math.sqrt(self.t_eff) * self.alpha

    @property
    def alpha_tilde(self):
        """Amplitude after the loss."""
        return math.sqrt(self.t_eff * self.gamma_eff) * self.alpha

    def superoperator(self):
        """``L[i, j, p, q]`` with ``rho'_ij = sum L[i, j, p, q] rho_pq``."""
        return np.einsum("kip,kjq->ijpq", self.kraus, self.kraus.conj())

    def apply(self, rho, normalize=True):
        out = np.einsum("kip,pq,kjq->ij", self.kraus, rho, self.kraus.conj())
        out = (out + out.conj().T) / 2
        return out / np.trace(out).real if normalize else out

    def choi(self):
        """8x8 Choi matrix over ``code (x) error``."""
        v = np.array([vec(K) for K in self.kraus])
        return v.T @ v.conj()

    def omega(self, basis=None):
        """``omega[k, l] = tr(K_k B_l)`` so that ``K_k = sum_l omega[k, l] B_l^dag``."""
        B = _basis_matrices() if basis is None else basis.matrices
        return np.einsum("kip,lpi->kl", self.kraus, B)


def noise_channel(alpha, t_eff, gamma_eff, n_sub=0):
    """Build the effective noise channel from the effective parameters.

    Each Kraus operator is evaluated exactly on the ring: rescaling by
    ``sqrt(T_eff)``, ``n_sub`` annihilations and the ``k``-th loss Kraus
    operator act on ``|r u^j>`` by scalar factors, and the result is
    expressed in the error basis through the ring Gram matrix.  Loss terms
    are kept until the Poisson weight tail is below ``KRAUS_TAIL``.
    """
    alpha = check_alpha(alpha)
    a_bar = math.sqrt(t_eff) * alpha
    a_til = math.sqrt(gamma_eff) * a_bar
    check_alpha(a_til, "alpha_tilde")
    code = code_ring(alpha).T.astype(complex)  # (4 ring, 2 code)
    code = code * math.exp((t_eff - 1.0) * alpha**2 / 2.0)
    code = code * ((a_bar * RING) ** n_sub)[:, None]
    err = error_ring(a_til)
    proj = err.conj() @ ring_gram(a_til)  # rows: <e_i| acting on ring coefficients
    mean = (1.0 - gamma_eff) * a_bar**2
    K = _kraus_count(mean)
    kraus = np.zeros((K, 4, 2), dtype=complex)
    s = math.sqrt(1.0 - gamma_eff) * a_bar
    for k in range(K):
        amp = math.exp(-0.5 * s * s + (k * math.log(s) if k else 0.0) - 0.5 * math.lgamma(k + 1))
        kraus[k] = proj @ (code * (amp * RING**k)[:, None])
    return NoiseChannel(alpha, float(t_eff), float(gamma_eff), int(n_sub), kraus)


def pipeline_noise(params):
    """Noise channel of a :class:`PipelineParams` heralding outcome."""
    e = params.effective()
    return noise_channel(params.alpha, e.t_eff, e.gamma_eff, params.n_prime % 4)


def noise_process_matrix(alpha, t_eff, gamma_eff, a=None, b=None, n_sub=0, basis=LogicalBasis.PLUS_MINUS):
    """Process matrix ``W`` of the noise in the ``B`` operator basis.

    With coefficients ``(a, b)`` the matrix is divided by the heralded trace
    for that input, which is how the encoded state enters ``W``.
    """
    ch = noise_channel(alpha, t_eff, gamma_eff, n_sub)
    om = ch.omega()
    W = om.T @ om.conj()
    if a is not None and b is not None:
        rho = code_density(a, b, basis, alpha)
        W = W / float(np.trace(ch.apply(rho, normalize=False)).real)
    return (W + W.conj().T) / 2


def apply_process(W, rho, basis=None):
    """Noise map rebuilt from its process matrix, ``sum_lm W_lm B_l^dag rho B_m``."""
    B = _basis_matrices() if basis is None else basis.matrices
    out = np.einsum("lm,lpi,pq,mqj->ij", W, B.conj(), rho, B)
    return (out + out.conj().T) / 2


def code_density(a, b, basis, alpha):
    """Code-space density (in ``+/-`` coordinates) of ``a|L0> + b|L1>``."""
    basis = LogicalBasis(basis)
    if basis is LogicalBasis.PLUS_MINUS:
        v = np.array([a, b], dtype=complex)
    else:
        c = catstates.ring_coefficients(a, b, basis, alpha)
        v = code_ring(alpha).conj() @ ring_gram(alpha) @ c
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# Choi and process matrices


def choi_from_process(X, basis=None):
    """``J = sum_kk' vec(B_k) X_kk' vec(B_k')^dag`` for error -> code maps."""
    B = _basis_matrices() if basis is None else basis.matrices
    V = np.array([vec(b) for b in B]).T  # (8, 8) columns vec(B_k)
    return V @ X @ V.conj().T


def process_from_choi(J, basis=None):
    B = _basis_matrices() if basis is None else basis.matrices
    V = np.array([vec(b) for b in B]).T
    return V.conj().T @ J @ V


def choi_from_kraus(kraus):
    v = np.array([vec(K) for K in kraus])
    return v.T @ v.conj()


def kraus_from_choi(J, tol=1e-14):
    """Kraus operators (2x4) of a recovery Choi matrix."""
    w, V = np.linalg.eigh((J + J.conj().T) / 2)
    out = []
    for i in np.nonzero(w > tol)[0]:
        out.append(fock.devectorize(V[:, i] * math.sqrt(w[i]), (2, 4)))
    return out


def partial_trace_output(J, d_in=4, d_out=2):
    """``tr_out J`` for an ``input (x) output`` Choi matrix."""
    return np.einsum("akbk->ab", J.reshape(d_in, d_out, d_in, d_out))


def apply_choi(J, rho, d_in=4, d_out=2):
    """``R(rho) = tr_in[(rho^T (x) I) J]``, i.e. ``sum_k K_k rho K_k^dag``."""
    J4 = J.reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ab,apbq->pq", rho, J4)


def canonical_recovery(alpha_tilde, alpha_bar, n_sub=0):
    """Choi matrix of the parity-sector recovery.

    For each parity sector of the error space, the code states' images under
    the leading loss term landing there are mapped back onto ``|+bar>`` and
    ``|-bar>`` with their phases undone.  For ``n_sub = 0`` this is the
    identity on the even sector and ``|+~'> -> |+bar>``, ``|-~'> -> |-bar>``
    on the odd sector.
    """
    check_alpha(alpha_tilde, "alpha_tilde")
    check_alpha(alpha_bar, "alpha_bar")
    err = error_ring(1.0)
    proj = err.conj() @ ring_gram(1.0)
    code = code_ring(1.0).T
    kraus = []
    for k in (0, 1):
        R = np.zeros((2, 4), dtype=complex)
        img = proj @ (code * (RING ** (n_sub + k))[:, None])  # (4 error, 2 code)
        for p in range(2):
            i = int(np.argmax(np.abs(img[:, p])))
            R[p, i] = np.conj(img[i, p]) / abs(img[i, p])
        kraus.append(R)
    return choi_from_kraus(kraus)


# ---------------------------------------------------------------------------
# fidelity


def fidelity(recovery, rho_in, rho_before):
    """``F = tr[(rho'^T (x) rho) R]``; ``rho_before`` should be normalized."""
    J4 = np.asarray(recovery).reshape(4, 2, 4, 2)
    return float(np.einsum("ca,bd,cdab->", rho_before, rho_in, J4).real)


def bloch_state(theta, phi):
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


@dataclass(frozen=True)
class Landscape:
    """``F(psi) = num(psi) / den(psi)`` as quartic over quadratic forms."""

    num: np.ndarray  # (2, 2, 2, 2)
    den: np.ndarray  # (2, 2)

    def __call__(self, psi):
        psi = np.asarray(psi)
        pc = psi.conj()
        n = np.einsum("...p,...q,...k,...l,pqkl->...", psi, pc, psi, pc, self.num)
        d = np.einsum("...p,...q,pq->...", psi, pc, self.den)
        return (n / d).real

    def at(self, theta, phi):
        theta = np.asarray(theta, float)
        phi = np.asarray(phi, float)
        psi = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)
        return self(psi)


def landscape(recovery, noise):
    L = noise.superoperator()
    J4 = np.asarray(recovery).reshape(4, 2, 4, 2)
    num = np.einsum("capq,cdab->pqbd", L, J4)
    den = np.einsum("iipq->pq", L)
    return Landscape(num, den)


@dataclass(frozen=True)
class WorstCase:
    fidelity: float
    theta: float
    phi: float

    @property
    def state(self):
        return bloch_state(self.theta, self.phi)


def worst_case_fidelity(recovery, noise, grid=(32, 64), warm_start=None, xatol=1e-8):
    """Minimum fidelity over code-space pure states.

    A ``grid`` of ``(theta, phi)`` points seeds Nelder-Mead refinement from
    the best grid point and from ``warm_start`` (if given); the iteration
    stops once the simplex is narrower than ``xatol``.
    """
    f = landscape(recovery, noise)
    th = np.linspace(0.0, math.pi, grid[0])
    ph = np.linspace(0.0, 2 * math.pi, grid[1], endpoint=False)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    vals = f.at(TH, PH)
    i = np.unravel_index(np.argmin(vals), vals.shape)
    starts = [(TH[i], PH[i])]
    if warm_start is not None:
        starts.append(tuple(warm_start))
    best = WorstCase(float(vals[i]), float(TH[i]), float(PH[i]))
    obj = lambda x: float(f.at(x[0], x[1]))  # noqa: E731
    for x0 in starts:
        r = optimize.minimize(
            obj,
            np.asarray(x0, float),
            method="Nelder-Mead",
            options=dict(xatol=xatol, fatol=1e-15, maxiter=2000, initial_simplex=_simplex(x0)),
        )
        if r.fun < best.fidelity:
            best = WorstCase(float(r.fun), float(r.x[0]), float(r.x[1]))
    th, phv = _canonical_angles(best.theta, best.phi)
    return WorstCase(best.fidelity, th, phv)


def _simplex(x0, h=0.05):
    x0 = np.asarray(x0, float)
    return np.array([x0, x0 + [h, 0.0], x0 + [0.0, h]])


def _canonical_angles(theta, phi):
    theta = math.fmod(theta, 2 * math.pi)
    if theta < 0:
        theta = -theta
        phi += math.pi
    if theta > math.pi:
        theta = 2 * math.pi - theta
        phi += math.pi
    return theta, math.fmod(phi, 2 * math.pi) % (2 * math.pi)


def sample_bloch(n, rng):
    """Uniform pure states on the Bloch sphere, shape ``(n, 2)``."""
    z = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    theta = np.arccos(z)
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


# ---------------------------------------------------------------------------
# closed-form fidelities of the ideal branch recovery


def branch_map_fidelity(a, b, alpha, T, gamma):
    """Fidelity when each loss branch is mapped back exactly.

    Branches 0 and 1 return ``a|0bar> + b|1bar>``; branches 2 and 3 return
    ``a|0bar> - b|1bar>``.
    """
    m = loss_mixture(a, b, alpha, T, gamma)
    c = catstates.zero_one_overlap(alpha)
    n = catstates.normalizations(alpha, a, b)
    ov = (abs(a) ** 2 - abs(b) ** 2) + c * (np.conj(b) * a - np.conj(a) * b)
    f2 = abs(ov * n.n0 * n.n2) ** 2
    p = m.weights
    return float(p[0] + p[1] + (p[2] + p[3]) * f2)


def branch_map_worst_case(alpha, T, gamma, n_grid=721):
    """``min over |a| = |b| = 1/sqrt(2)`` of ``p~0 + p~1``."""

    def f(phi):
        a = _S
        b = _S * np.exp(1j * phi)
        w = loss_mixture(a, b, alpha, T, gamma).weights
        return w[0] + w[1]

    grid = np.linspace(0.0, 2 * math.pi, n_grid)
    vals = np.array([f(x) for x in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_grid - 1)]
    r = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options=dict(xatol=1e-12))
    phi = r.x if r.fun < vals[i] else grid[i]
    return float(min(r.fun, vals[i])), float(phi)


def mixture_error_density(a, b, alpha, T, gamma):
    """The loss mixture in error-space coordinates at ``sqrt(gamma T) alpha``."""
    m = loss_mixture(a, b, alpha, T, gamma)
    at = m.amplitude
    err = error_ring(at)
    proj = err.conj() @ ring_gram(at)
    rho = np.zeros((4, 4), dtype=complex)
    for k, p in enumerate(m.weights):
        (ca, cb), primed = m.branches[k]
        if primed:
            k0, k1 = CatBasisKind.ZERO_BAR_PRIME, CatBasisKind.ONE_BAR_PRIME
        else:
            k0, k1 = CatBasisKind.ZERO_BAR, CatBasisKind.ONE_BAR
        c = ca * catstates.basis_ring(k0, at) + cb * catstates.basis_ring(k1, at)
        v = proj @ c
        v = v / np.linalg.norm(v)
        rho += p * np.outer(v, v.conj())
    return rho

