"""CPTP-constrained steepest ascent of the worst-case fidelity.

Recovery channels are 8x8 Choi matrices ordered ``input (4) (x) output (2)``
(see :mod:`catsuppress.recovery`).  One ascent step:

1. find the worst-case code state ``psi`` for the current recovery ``R``;
2. form ``M = rho'^T (x) rho`` for that state;
3. move ``R -> (I + dZ)^dag R (I + dZ)`` with
   ``I + dZ = (I + dA) [sqrt(tr_K[(I + dA) R (I + dA)]) (x) I]^-1`` and
   ``dA = (eps/2) (M - tr_K[M R + R M] (x) I / 2)``,
   which keeps ``R`` exactly completely positive and trace preserving.

Restarts are seeded from ``numpy.random.SeedSequence(seed).spawn(restarts)``,
so results do not depend on whether they run serially or in a pool.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, SingularNormalizerError
from .recovery import worst_case_fidelity

DIM_H = 4  # recovery input (error space)
DIM_K = 2  # recovery output (code space)
REG = 1e-12


def partial_trace_k(R):
    return np.einsum("akbk->ab", np.asarray(R).reshape(DIM_H, DIM_K, DIM_H, DIM_K))


def _kron_k(X):
    return np.kron(X, np.eye(DIM_K))


def hermitize(R):
    return (R + R.conj().T) / 2


class TpProjector:
    """Affine projection onto ``tr_K R = I_H`` built from ``M = sum_k I (x) <k| (x) I (x) <k|``.

    ``M`` acts on column-stacked ``vec(R)``; with the ``H (x) K`` ordering
    ``M vec(R) = vec(tr_K R)``.
    """

    def __init__(self, dim_h=DIM_H, dim_k=DIM_K):
        self.dim_h = dim_h
        self.dim_k = dim_k
        ih = np.eye(dim_h)
        M = np.zeros((dim_h * dim_h, (dim_h * dim_k) ** 2))
        for k in range(dim_k):
            bra = np.eye(dim_k)[k][None, :]
            M += np.kron(np.kron(np.kron(ih, bra), ih), bra)
        self.matrix = M
        self._vec_i = np.eye(dim_h).reshape(-1, order="F")

    def __call__(self, R):
        d = self.dim_h * self.dim_k
        v = np.asarray(R).reshape(-1, order="F")
        M = self.matrix
        out = v - (M.T @ (M @ v)) / self.dim_k + (M.T @ self._vec_i) / self.dim_k
        return out.reshape((d, d), order="F")


_TP = TpProjector()


def cp_project(R):
    """Zero the negative eigenvalues of the Hermitian part of ``R``."""
    w, v = np.linalg.eigh(hermitize(R))
    return hermitize((v * np.clip(w, 0.0, None)) @ v.conj().T)


def tp_project(R):
    return _TP(R)


def cptp_residuals(R):
    """``(max |tr_K R - I|, min eigenvalue)``."""
    tp = float(np.max(np.abs(partial_trace_k(R) - np.eye(DIM_H))))
    return tp, float(np.linalg.eigvalsh(hermitize(R))[0])


def cptp_project(R, max_iter=10_000, tol=1e-10):
    """Alternate CP and TP projections (Dykstra) until both hold within ``tol``.

    The returned matrix is exactly PSD; the trace condition holds within
    ``tol``.

    :raises ConvergenceError: after ``max_iter`` alternations.
    """
    x = hermitize(np.asarray(R, dtype=complex))
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_iter):
        y = tp_project(x + p)
        p = x + p - y
        x = cp_project(y + q)
        q = y + q - x
        tp, _ = cptp_residuals(x)
        if tp < tol:
            return x
    tp, mn = cptp_residuals(x)
    raise ConvergenceError(
        f"CPTP projection did not converge in {max_iter} alternations",
        dict(tp_residual=tp, min_eigenvalue=mn),
    )


def random_cptp(rng, rank=None):
    """CPTP projection of a random full-rank (Ginibre) PSD seed."""
    d = DIM_H * DIM_K
    r = rank or d
    G = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    return cptp_project(G @ G.conj().T)


def gradient_matrix(rho_before, rho_in):
    """``M = rho'^T (x) rho``, so that ``F = tr[M R]``."""
    return np.kron(np.asarray(rho_before).T, np.asarray(rho_in))


def delta_A(M, R, epsilon):
    return hermitize(0.5 * epsilon * (M - 0.5 * _kron_k(partial_trace_k(M @ R + R @ M))))


def _psd_sqrt(A):
    w, v = np.linalg.eigh(hermitize(A))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def step(R, dA, reg=REG):
    """One CPTP-preserving update ``R -> (I + dZ)^dag R (I + dZ)``."""
    IA = np.eye(R.shape[0]) + dA
    S = _psd_sqrt(partial_trace_k(IA @ R @ IA)) + reg * np.eye(DIM_H)
    w = np.linalg.eigvalsh(hermitize(S))
    if w[0] <= 0 or w[-1] / w[0] > 1e14:
        raise SingularNormalizerError(f"normalizer condition number {w[-1] / max(w[0], 1e-300):.3g}")
    Z = IA @ _kron_k(np.linalg.inv(S))
    return hermitize(Z.conj().T @ R @ Z)


def first_order_delta(R, dA):
    """Linear part of ``step(R, dA) - R``: ``Y R + R Y`` with ``Y = dA - tr_K[dA R + R dA] (x) I / 2``."""
    Y = dA - 0.5 * _kron_k(partial_trace_k(dA @ R + R @ dA))
    return Y @ R + R @ Y


def parity_off_block(R):
    """Largest Choi entry coupling even and odd error-space inputs."""
    R4 = np.asarray(R).reshape(DIM_H, DIM_K, DIM_H, DIM_K)
    return float(max(np.abs(R4[:2, :, 2:, :]).max(), np.abs(R4[2:, :, :2, :]).max()))


@dataclass(frozen=True)
class AscentConfig:
    epsilon0: float = 3.0
    decay: float = 0.994
    max_steps: int = 1000
    restarts: int = 8
    plateau_tol: float = 1e-7
    plateau_window: int = 100
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must lie in (0, 1)")
        if not self.epsilon0 > 0.0:
            raise ValueError("epsilon0 must be positive")
        if self.max_steps < 1 or self.restarts < 1:
            raise ValueError("max_steps and restarts must be positive")


@dataclass
class OptimizerTrace:
    """Per-step record of one restart; ``fidelity[t]`` is ``F_w`` of the t-th iterate."""

    fidelity: list = field(default_factory=list)
    delta_norm: list = field(default_factory=list)
    epsilon: list = field(default_factory=list)
    theta: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    tp_residual: list = field(default_factory=list)
    min_eigenvalue: list = field(default_factory=list)
    stopped_early: bool = False

    def __len__(self):
        return len(self.fidelity)


@dataclass(frozen=True)
class OptimizationResult:
    choi: np.ndarray
    fidelity: float
    traces: tuple
    best_restart: int
    off_block: float

    @property
    def trace(self):
        return self.traces[self.best_restart]


def ascend(noise, R0, config, trace=None):
    """Run the ascent from ``R0``; returns ``(best R, best F_w, trace)``."""
    trace = trace if trace is not None else OptimizerTrace()
    R = R0
    eps = config.epsilon0
    warm = None
    best_R, best_F = R, -np.inf
    for t in range(config.max_steps):
        wc = worst_case_fidelity(R, noise, warm_start=warm)
        warm = (wc.theta, wc.phi)
        tp, mn = cptp_residuals(R)
        trace.fidelity.append(wc.fidelity)
        trace.theta.append(wc.theta)
        trace.phi.append(wc.phi)
        trace.epsilon.append(eps)
        trace.tp_residual.append(tp)
        trace.min_eigenvalue.append(mn)
        if wc.fidelity > best_F:
            best_R, best_F = R, wc.fidelity
        w = config.plateau_window
        if t >= w and abs(trace.fidelity[-1] - trace.fidelity[-1 - w]) < config.plateau_tol:
            trace.delta_norm.append(0.0)
            trace.stopped_early = True
            break
        psi = wc.state
        rho = np.outer(psi, psi.conj())
        M = gradient_matrix(noise.apply(rho), rho)
        R_new = step(R, delta_A(M, R, eps))
        trace.delta_norm.append(float(np.linalg.norm(R_new - R, 2)))
        R = R_new
        eps *= config.decay
    return best_R, best_F, trace


def _restart(args):
    noise, config, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    R0 = random_cptp(rng)
    return ascend(noise, R0, config)


def optimize(noise, config=AscentConfig()):
    """Multi-start ascent; ``epsilon`` restarts from ``epsilon0`` on every restart."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    jobs = [(noise, config, s) for s in seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_restart, jobs))
    else:
        results = [_restart(j) for j in jobs]
    fids = [r[1] for r in results]
    i = int(np.argmax(fids))
    R = results[i][0]
    return OptimizationResult(
        choi=R,
        fidelity=float(fids[i]),
        traces=tuple(r[2] for r in results),
        best_restart=i,
        off_block=parity_off_block(R),
    )


def directional_derivative(M, dR):
    """First-order change ``tr[M dR]``."""
    return float(np.trace(M @ dR).real)


__all__ = [
    "AscentConfig",
    "OptimizerTrace",
    "OptimizationResult",
    "TpProjector",
    "cp_project",
    "tp_project",
    "cptp_project",
    "cptp_residuals",
    "random_cptp",
    "gradient_matrix",
    "delta_A",
    "step",
    "first_order_delta",
    "ascend",
    "optimize",
    "parity_off_block",
    "directional_derivative",
]
