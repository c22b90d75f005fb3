"""Truncated Fock-space numerics.

State vectors and density matrices are plain complex numpy arrays indexed by
photon number.  Multimode states are dense tensors with one axis per labelled
mode.

Beamsplitter convention::

    a1^dag -> sqrt(T) a1^dag + sqrt(R) a2^dag
    a2^dag -> -sqrt(R) a1^dag + sqrt(T) a2^dag

so coherent amplitudes map as ``(a1, a2) -> (sqrt(T) a1 - sqrt(R) a2,
sqrt(R) a1 + sqrt(T) a2)``.

Wigner convention: ``alpha = (x + i p) / sqrt(2)`` and
``W(x, p) = (1/pi) tr[rho D(alpha) P D(alpha)^dag]`` with ``P`` the parity
operator, so that ``integral W dx dp = tr rho`` and the vacuum peaks at
``1/pi`` at the origin.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CutoffError

TAIL_TOL = 1e-9


def default_cutoff(alpha_max):
    """Cutoff ``ceil(|a|^2 + 10|a| + 10)`` for the largest amplitude in play."""
    a = abs(alpha_max)
    return int(math.ceil(a * a + 10.0 * a + 10.0))


def coherent_vector(alpha, n_max, tol=TAIL_TOL):
    """Coherent state ``|alpha>`` truncated at photon number ``n_max``.

    :param alpha: complex amplitude.
    :param n_max: photon-number cutoff.
    :param tol: largest allowed probability mass beyond the cutoff.
    :raises CutoffError: if the truncated tail exceeds ``tol``.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    r = abs(alpha)
    if r == 0.0:
        v = np.zeros(n_max + 1, dtype=complex)
        v[0] = 1.0
        return v
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    v = np.exp(logmag + 1j * n * np.angle(alpha))
    tail = 1.0 - float(np.sum(np.abs(v) ** 2))
    if tail > tol:
        raise CutoffError(
            f"coherent amplitude {alpha} needs a cutoff above {n_max} "
            f"(tail mass {tail:.3g})"
        )
    return v


def number_state(n, n_max):
    v = np.zeros(n_max + 1, dtype=complex)
    v[n] = 1.0
    return v


def annihilation_operator(n_max):
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def annihilate(v, n=1):
    """Apply ``a^n`` without renormalizing (works on vectors or matrix columns)."""
    v = np.asarray(v)
    if n < 0:
        raise ValueError("n must be non-negative")
    dim = v.shape[0]
    out = np.zeros_like(v, dtype=complex)
    if n >= dim:
        return out
    k = np.arange(dim - n)
    factor = np.exp(0.5 * (gammaln(k + n + 1) - gammaln(k + 1)))
    out[: dim - n] = (v[n:].T * factor).T
    return out


def rescale(v, factor):
    """Apply ``factor^n`` to a vector; no renormalization."""
    if not factor > 0:
        raise ValueError("rescale factor must be positive")
    v = np.asarray(v)
    n = np.arange(v.shape[0])
    return (v.T * np.power(float(factor), n)).T


def rescale_density(rho, factor):
    """Apply ``factor^n rho factor^n``."""
    f = np.power(float(factor), np.arange(rho.shape[0]))
    return rho * np.outer(f, f)


def normalize(v):
    return v / np.linalg.norm(v)


def vectorize(m):
    """Column-stacking vectorization."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("vectorize expects a matrix")
    return m.reshape(-1, order="F")


def devectorize(v, shape=None):
    """Inverse of :func:`vectorize`; a square shape is inferred if omitted."""
    v = np.asarray(v).reshape(-1)
    if shape is None:
        d = math.isqrt(v.size)
        if d * d != v.size:
            raise ValueError(f"cannot infer a square shape for length {v.size}")
        shape = (d, d)
    if shape[0] * shape[1] != v.size:
        raise ValueError(f"length {v.size} does not match shape {shape}")
    return v.reshape(shape, order="F")


def trace_distance(rho, sigma):
    d = np.asarray(rho) - np.asarray(sigma)
    d = (d + d.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(d))))


def pure_fidelity(u, v):
    """``|<u|v>|^2`` for (not necessarily normalized) vectors."""
    u = np.asarray(u)
    v = np.asarray(v)
    n = min(u.size, v.size)
    num = abs(np.vdot(u[:n], v[:n])) ** 2
    return float(num / (np.vdot(u, u).real * np.vdot(v, v).real))


def _psd_sqrt(rho):
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def mixed_fidelity(rho, sigma):
    """Uhlmann fidelity ``||sqrt(rho) sqrt(sigma)||_1^2``."""
    s = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False)
    return float(np.sum(s) ** 2)


def pad(v, n_max):
    """Zero-pad or truncate a vector (or square matrix) to cutoff ``n_max``."""
    v = np.asarray(v)
    d = n_max + 1
    if v.ndim == 1:
        out = np.zeros(d, dtype=complex)
        m = min(d, v.size)
        out[:m] = v[:m]
        return out
    out = np.zeros((d, d), dtype=complex)
    m = min(d, v.shape[0])
    out[:m, :m] = v[:m, :m]
    return out


# ---------------------------------------------------------------------------
# multimode states


@dataclass(frozen=True)
class MultiModeState:
    """Dense amplitude tensor with one labelled axis per mode.

    The norm may be below one after heralded projections.
    """

    tensor: np.ndarray
    labels: tuple

    def __post_init__(self):
        if self.tensor.ndim != len(self.labels):
            raise ValueError("one label per tensor axis is required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("mode labels must be unique")

    @classmethod
    def product(cls, modes):
        """Product state from ``{label: vector}`` (insertion order kept)."""
        labels = tuple(modes)
        t = np.ones((), dtype=complex)
        for lab in labels:
            t = np.multiply.outer(t, np.asarray(modes[lab], dtype=complex))
        return cls(t, labels)

    @property
    def cutoffs(self):
        return tuple(s - 1 for s in self.tensor.shape)

    def axis(self, mode):
        if isinstance(mode, (int, np.integer)):
            return int(mode)
        try:
            return self.labels.index(mode)
        except ValueError:
            raise KeyError(f"unknown mode {mode!r}") from None

    def norm_squared(self):
        return float(np.vdot(self.tensor, self.tensor).real)

    def add_mode(self, label, vector):
        t = np.multiply.outer(self.tensor, np.asarray(vector, dtype=complex))
        return MultiModeState(t, self.labels + (label,))

    def add_vacuum(self, label, n_max):
        return self.add_mode(label, number_state(0, n_max))

    def resize(self, mode, n_max, tol=TAIL_TOL):
        """Change one mode's cutoff, refusing to drop more than ``tol`` mass."""
        ax = self.axis(mode)
        old = self.tensor.shape[ax]
        new = n_max + 1
        t = np.moveaxis(self.tensor, ax, 0)
        if new < old:
            lost = float(np.sum(np.abs(t[new:]) ** 2))
            if lost > tol * max(self.norm_squared(), 1e-300):
                raise CutoffError(
                    f"mode {self.labels[ax]!r}: cutoff {n_max} drops mass {lost:.3g}"
                )
            t = t[:new]
        else:
            t = np.concatenate([t, np.zeros((new - old,) + t.shape[1:], complex)])
        return MultiModeState(np.moveaxis(t, 0, ax), self.labels)

    def scaled(self, c):
        return MultiModeState(self.tensor * c, self.labels)

    def vector(self):
        if len(self.labels) != 1:
            raise ValueError("vector() needs a single-mode state")
        return self.tensor.copy()

    def reduced_density(self, mode):
        """Unnormalized reduced density matrix of one mode."""
        ax = self.axis(mode)
        t = np.moveaxis(self.tensor, ax, 0).reshape(self.tensor.shape[ax], -1)
        return t @ t.conj().T


@functools.lru_cache(maxsize=64)
def _beamsplitter_blocks(T, n_total):
    """Per-total-photon-number blocks ``d[N][p, m]``.

    ``d[N][p, m] = <p, N-p| U |m, N-m>``, obtained by acting with the
    transformed creation operators one photon at a time.
    """
    st = math.sqrt(T)
    sr = math.sqrt(max(0.0, 1.0 - T))
    blocks = [np.ones((1, 1))]
    for N in range(1, n_total + 1):
        prev = blocks[-1]
        d = np.zeros((N + 1, N + 1))
        p = np.arange(N + 1)
        sp = np.sqrt(p)
        sq = np.sqrt(N - p)
        # input (0, N): add one photon in mode 2 to input (0, N-1)
        v = np.zeros(N + 1)
        v[:N] = prev[:, 0]
        vs = np.zeros(N + 1)
        vs[1:] = prev[:, 0]
        d[:, 0] = (-sr * sp * vs + st * sq * v) / math.sqrt(N)
        # input (m, N-m), m >= 1: add one photon in mode 1 to (m-1, N-m)
        for m in range(1, N + 1):
            v = np.zeros(N + 1)
            v[:N] = prev[:, m - 1]
            vs = np.zeros(N + 1)
            vs[1:] = prev[:, m - 1]
            d[:, m] = (st * sp * vs + sr * sq * v) / math.sqrt(m)
        blocks.append(d)
    return tuple(blocks)


def beamsplitter_matrix(T, n1, n2):
    """Matrix elements ``U[p, q, m, k] = <p, q| U |m, k>`` within cutoffs."""
    if not 0.0 <= T <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    blocks = _beamsplitter_blocks(float(T), n1 + n2)
    U = np.zeros((n1 + 1, n2 + 1, n1 + 1, n2 + 1))
    for N, d in enumerate(blocks):
        p = np.arange(N + 1)
        p = p[(p <= n1) & (N - p <= n2)]
        U[p[:, None], (N - p)[:, None], p[None, :], (N - p)[None, :]] = d[np.ix_(p, p)]
    return U


def beamsplitter(state, mode_i, mode_j, T, tol=TAIL_TOL):
    """Apply the two-mode beamsplitter with transmittance ``T``.

    Output cutoffs equal input cutoffs.

    :raises CutoffError: if more than ``tol`` of the norm leaves the cutoffs;
        the message names both modes.
    """
    i = state.axis(mode_i)
    j = state.axis(mode_j)
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    n1, n2 = state.cutoffs[i], state.cutoffs[j]
    U = beamsplitter_matrix(T, n1, n2)
    t = np.tensordot(U, state.tensor, axes=([2, 3], [i, j]))
    kept = np.moveaxis(t, [0, 1], [i, j])
    norm_in = state.norm_squared()
    lost = norm_in - float(np.vdot(kept, kept).real)
    if lost > tol * max(norm_in, 1e-300):
        raise CutoffError(
            f"beamsplitter on modes {state.labels[i]!r}, {state.labels[j]!r}: "
            f"mass {lost:.3g} beyond cutoffs ({n1}, {n2})"
        )
    return MultiModeState(np.ascontiguousarray(kept), state.labels)


def phase_shift(state, mode, theta):
    """Apply ``exp(i theta n)`` on one mode."""
    ax = state.axis(mode)
    ph = np.exp(1j * theta * np.arange(state.tensor.shape[ax]))
    shape = [1] * state.tensor.ndim
    shape[ax] = -1
    return MultiModeState(state.tensor * ph.reshape(shape), state.labels)


def project_photons(state, mode, n):
    """Project ``mode`` onto ``|n>`` and drop it.

    :returns: ``(remaining state, probability)`` where the state is left
        unnormalized and the probability is its squared norm.
    """
    ax = state.axis(mode)
    if not 0 <= n <= state.cutoffs[ax]:
        raise ValueError(f"photon number {n} outside cutoff of mode {mode!r}")
    t = np.take(state.tensor, n, axis=ax)
    labels = state.labels[:ax] + state.labels[ax + 1 :]
    out = MultiModeState(np.ascontiguousarray(t), labels)
    return out, out.norm_squared()


def detection_branches(state, mode, n, eta, prune=1e-30):
    """Inefficient ``n``-photon detection as a list of pure branches.

    A detector of efficiency ``eta`` registering ``n`` photons has POVM
    element ``sum_m C(m, n) eta^n (1-eta)^(m-n) |m><m|``; each ``m >= n``
    contributes one unnormalized branch on the remaining modes.
    """
    ax = state.axis(mode)
    branches = []
    if eta == 1.0:
        out, p = project_photons(state, mode, n)
        return [out] if p > 0 else []
    total = state.norm_squared()
    for m in range(n, state.cutoffs[ax] + 1):
        w = math.comb(m, n) * eta**n * (1.0 - eta) ** (m - n)
        out, p = project_photons(state, mode, m)
        if p * w > prune * max(total, 1e-300):
            branches.append(out.scaled(math.sqrt(w)))
    return branches


# ---------------------------------------------------------------------------
# Wigner function


def wigner(rho, x, p):
    """Wigner function on a grid of phase-space points.

    Uses the iterative Laguerre recursion over matrix elements, which stays
    stable for large cutoffs.

    :param rho: density matrix (a pure vector is also accepted).
    :param x, p: arrays of equal shape (or broadcastable) with the quadratures.
    :returns: real array ``W(x, p)``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    A = (x + 1j * p) / math.sqrt(2)
    M = rho.shape[0]
    wl = [np.exp(-2.0 * np.abs(A) ** 2) / math.pi]
    W = rho[0, 0].real * wl[0]
    for n in range(1, M):
        wl.append(2.0 * A * wl[n - 1] / math.sqrt(n))
        W = W + 2.0 * np.real(rho[0, n] * wl[n])
    Ac = np.conj(A)
    for m in range(1, M):
        temp = wl[m]
        wl[m] = (2.0 * Ac * temp - math.sqrt(m) * wl[m - 1]) / math.sqrt(m)
        W = W + np.real(rho[m, m] * wl[m])
        for n in range(m + 1, M):
            temp2 = (2.0 * A * wl[n - 1] - math.sqrt(m) * temp) / math.sqrt(n)
            temp = wl[n]
            wl[n] = temp2
            W = W + 2.0 * np.real(rho[m, n] * wl[n])
    return np.asarray(W, dtype=float)
