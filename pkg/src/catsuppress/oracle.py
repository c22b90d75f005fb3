"""Brute-force Fock-space simulation of the optical circuits.

Everything here is built from the primitives in :mod:`catsuppress.fock`:
coherent and cat state vectors, beamsplitters, a phase shifter and
photon-number projections.  Mixed states are carried as ensembles of
unnormalized pure branches.  The closed forms in :mod:`catsuppress.channels`
are tested against these circuits.

Teleamplification network (modes named after their final role)::

    resource |+bar'>_beta  -> BS(T_B) -> modes B, C'
    input in mode A, BS(1/2) on (A, C')
    BS(1/2) on (A, A'), project A onto vacuum
    BS(1/2) on (C, C'), count x1 in C
    phase -pi/2 on A', BS(1/2) on (C', A'), count x2 in A' and x3 in C'
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import catstates, fock
from .channels import apply_loss, noisy_nps_equivalent, noisy_teleamp_equivalent
from .errors import CutoffError
from .fock import MultiModeState, beamsplitter, default_cutoff, detection_branches

PRUNE = 1e-30


class Scenario(enum.Enum):
    IDENTITY = "identity"
    SUBTRACTION = "subtraction"
    LOSS = "loss"
    TELEAMP = "teleamp"
    PIPELINE = "pipeline"


@dataclass(frozen=True)
class OracleCutoffs:
    """Per-mode cutoffs; ``None`` picks the default rule for the mode amplitude."""

    signal: int | None = None
    network: int | None = None
    resource: int | None = None
    output: int | None = None


@dataclass(frozen=True)
class OracleResult:
    density: np.ndarray  # unnormalized, trace = probability
    probability: float
    vector: np.ndarray | None = None  # set when the output is pure

    def normalized_density(self):
        return self.density / self.probability


def _ensemble_density(branches, n_max):
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for v in branches:
        v = fock.pad(v, n_max)
        rho += np.outer(v, v.conj())
    return rho


def _split(state, keep):
    """Pure branches of mode ``keep`` after discarding all other modes."""
    ax = state.axis(keep)
    t = np.moveaxis(state.tensor, ax, 0).reshape(state.tensor.shape[ax], -1)
    total = state.norm_squared()
    norms = np.sum(np.abs(t) ** 2, axis=0)
    return [t[:, i].copy() for i in np.nonzero(norms > PRUNE * max(total, 1e-300))[0]]


def _compress(branches, rel=1e-18):
    """Replace an ensemble by the eigenvectors of its density matrix."""
    if len(branches) <= 1:
        return branches
    n = max(v.size for v in branches) - 1
    rho = _ensemble_density(branches, n)
    w, V = np.linalg.eigh((rho + rho.conj().T) / 2)
    keep = w > rel * max(w.max(), 1e-300)
    return [V[:, i] * math.sqrt(w[i]) for i in np.nonzero(keep)[0]]


def _shrink(v, n_max, label="signal"):
    v = np.asarray(v)
    if v.size - 1 > n_max:
        lost = float(np.sum(np.abs(v[n_max + 1 :]) ** 2))
        if lost > fock.TAIL_TOL * max(float(np.vdot(v, v).real), 1e-300):
            raise CutoffError(f"mode {label!r}: cutoff {n_max} drops mass {lost:.3g}")
    return fock.pad(v, n_max)


# ---------------------------------------------------------------------------
# stages


def subtraction_stage(branches, T, n, eta=1.0):
    """n-photon subtraction with a detector of efficiency ``eta``.

    The detector inefficiency is an explicit beamsplitter into an
    environment mode that is traced out.
    """
    out = []
    for v in branches:
        N = v.size - 1
        st = MultiModeState.product({"S": v, "D": fock.number_state(0, N)})
        st = beamsplitter(st, "S", "D", T)
        if eta < 1.0:
            st = st.add_vacuum("E", N)
            st = beamsplitter(st, "D", "E", eta)
        if n > N:
            continue
        st, _ = fock.project_photons(st, "D", n)
        if st.norm_squared() > 0:
            out.extend(_split(st, "S"))
    return _compress(out)


def loss_stage(branches, gamma):
    """Pure loss as a beamsplitter with a traced-out vacuum environment."""
    if gamma == 1.0:
        return list(branches)
    out = []
    for v in branches:
        N = v.size - 1
        st = MultiModeState.product({"S": v, "E": fock.number_state(0, N)})
        st = beamsplitter(st, "S", "E", gamma)
        out.extend(_split(st, "S"))
    return _compress(out)


def amplify_stage(branches, factor):
    """Ideal ``factor^n`` on every branch (no renormalization)."""
    return [fock.rescale(v, factor) for v in branches]


def _detect(states, mode, x, eta):
    out = []
    for st in states:
        out.extend(detection_branches(st, mode, x, eta, prune=PRUNE))
    return out


def teleamp_stage(branches, alpha_in, g, x, eta=1.0, cutoffs=OracleCutoffs()):
    """Teleamplification heralded on ``x = (x1, x2, x3)`` in modes ``C, A', C'``.

    :param alpha_in: ring amplitude of the input; fixes the resource
        amplitude ``alpha_in sqrt(1 + g^2)`` and splitting ratio.
    """
    x1, x2, x3 = (int(v) for v in x)
    beta = alpha_in * math.sqrt(1.0 + g * g)
    t_b = g * g / (1.0 + g * g)
    n_res = cutoffs.resource or default_cutoff(beta)
    n_net = cutoffs.network or default_cutoff(math.sqrt(2.0) * alpha_in)
    n_out = cutoffs.output or default_cutoff(g * alpha_in)

    res = catstates.basis_state(catstates.CatBasisKind.PLUS_BAR_PRIME, beta, n_res)
    rs = MultiModeState.product({"B": res, "Cp": fock.number_state(0, n_res)})
    rs = beamsplitter(rs, "B", "Cp", t_b)
    rs = rs.resize("B", n_out).resize("Cp", n_net)

    out = []
    for v in branches:
        v = _shrink(v, n_net, "A")
        st = MultiModeState(np.multiply.outer(rs.tensor, v), ("B", "Cp", "A"))
        st = beamsplitter(st, "A", "Cp", 0.5)
        st = st.add_vacuum("Ap", n_net)
        st = beamsplitter(st, "A", "Ap", 0.5)
        st, _ = fock.project_photons(st, "A", 0)
        st = st.add_vacuum("C", n_net)
        st = beamsplitter(st, "C", "Cp", 0.5)
        for s1 in _detect([st], "C", x1, eta):
            s1 = fock.phase_shift(s1, "Ap", -math.pi / 2)
            s1 = beamsplitter(s1, "Cp", "Ap", 0.5)
            for s2 in _detect(_detect([s1], "Ap", x2, eta), "Cp", x3, eta):
                out.append(s2.vector())
    return _compress(out)


# ---------------------------------------------------------------------------
# scenarios


def circuit_oracle(scenario, params, coeffs, cutoffs=OracleCutoffs()):
    """Simulate one circuit on the ring state ``sum_k c_k |i^k alpha>``.

    :param scenario: which circuit (:class:`Scenario`).
    :param params: :class:`~catsuppress.channels.PipelineParams`; the gain
        is taken from ``params.g`` for a bare teleamp and solved otherwise.
    :returns: :class:`OracleResult` with the heralded output density.
    """
    scenario = Scenario(scenario)
    alpha = params.alpha
    n_sig = cutoffs.signal or default_cutoff(alpha)
    psi = catstates.ring_vector(coeffs, alpha, n_sig)
    branches = [psi]
    n_final = n_sig
    if scenario is Scenario.SUBTRACTION:
        branches = subtraction_stage(branches, params.T, params.n, params.eta)
    elif scenario is Scenario.LOSS:
        branches = loss_stage(branches, params.gamma)
    elif scenario is Scenario.TELEAMP:
        g = params.g if params.g is not None else 1.0
        branches = teleamp_stage(branches, alpha, g, params.x, params.eta, cutoffs)
        n_final = cutoffs.output or default_cutoff(g * alpha)
    elif scenario is Scenario.PIPELINE:
        g = params.gain()
        branches = subtraction_stage(branches, params.T, params.n, params.eta)
        branches = loss_stage(branches, params.gamma)
        a_t = math.sqrt(params.gamma * params.T) * alpha
        branches = teleamp_stage(branches, a_t, g, params.x, params.eta, cutoffs)
        n_final = cutoffs.output or default_cutoff(g * a_t)
    rho = _ensemble_density(branches, n_final)
    prob = float(np.trace(rho).real)
    vec = branches[0] if len(branches) == 1 else None
    return OracleResult(rho, prob, None if vec is None else fock.pad(vec, n_final))


def nps_equivalence(coeffs, alpha, T, eta, n, n_max=None):
    """Noisy nPS versus preamplify, ideal nPS, then loss ``1 - eta'``.

    :returns: ``(rho_noisy, rho_equivalent)``, both normalized.
    """
    n_max = n_max or default_cutoff(alpha)
    psi = catstates.ring_vector(coeffs, alpha, n_max)
    noisy = subtraction_stage([psi], T, n, eta)
    mu, eta_prime = noisy_nps_equivalent(T, eta)
    eq = amplify_stage([psi], mu)
    eq = subtraction_stage(eq, T, n, 1.0)
    eq = loss_stage(eq, eta_prime)
    a = _ensemble_density(noisy, n_max)
    b = _ensemble_density(eq, n_max)
    return a / np.trace(a).real, b / np.trace(b).real


def teleamp_equivalence(coeffs, alpha, r1, g, eta, x, n_max=None, cutoffs=OracleCutoffs()):
    """Input loss ``R1`` then noisy teleamp, versus the reduced circuit.

    The reduced circuit applies the same input loss, noiseless gain
    ``g' = g / sqrt(1 - R2)``, ``x1 + x2 + x3 - 3`` subtractions and loss
    ``R2``.

    :returns: ``(rho_circuit, rho_reduced)``, both normalized.
    """
    n_max = n_max or default_cutoff(alpha)
    psi = catstates.ring_vector(coeffs, alpha, n_max)
    lossy = loss_stage([psi], 1.0 - r1)
    a_in = math.sqrt(1.0 - r1) * alpha
    circ = teleamp_stage(lossy, a_in, g, x, eta, cutoffs)
    n_out = cutoffs.output or default_cutoff(g * a_in)
    rho_c = _ensemble_density(circ, n_out)

    g_prime, r2 = noisy_teleamp_equivalent(g, eta)
    rho = _ensemble_density(lossy, n_max)
    big = max(n_out, n_max)
    rho = fock.pad(rho, big)
    rho = fock.rescale_density(rho, g_prime)
    m = sum(x) - 3
    rho = fock.annihilate(fock.annihilate(rho, m).conj().T, m).conj().T
    rho = apply_loss(rho, 1.0 - r2)
    rho = fock.pad(rho, n_out)
    return rho_c / np.trace(rho_c).real, rho / np.trace(rho).real



# ---------------------------------------------------------------------------
# cross-validation suite

FIDELITY_TOL = 1e-6
PROBABILITY_TOL = 1e-6
EQUIVALENCE_TOL = 1e-5


@dataclass(frozen=True)
class Check:
    name: str
    kind: str  # "infidelity", "relative_probability" or "trace_distance"
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)


def _rel(p, q):
    return abs(p - q) / max(abs(q), 1e-300)


def _compare(name, rho_circuit, p_circuit, rho_closed, p_closed):
    f = fock.mixed_fidelity(rho_circuit / p_circuit, rho_closed / p_closed)
    return [
        Check(f"{name}.state", "infidelity", max(0.0, 1.0 - f), FIDELITY_TOL),
        Check(f"{name}.probability", "relative_probability", _rel(p_circuit, p_closed), PROBABILITY_TOL),
    ]


def oracle_suite(alpha=1.2, T=0.6, gamma=0.8, eta=0.9, g=1.3, x=(1, 2, 1), n=1, a=0.6, b=0.8j,
                 cutoffs=OracleCutoffs(), scenarios=None):
    """Closed forms versus circuits for one parameter set.

    :param a, b: encoded state ``a|+bar> + b|-bar>``; the ZPS check uses the
        same pair in the ``(0bar, 1bar)`` basis.
    :param scenarios: subset of ``zps, nps, teleamp, pipeline, effective,
        nps_equivalence, teleamp_equivalence, identity``; default all.
    :returns: list of :class:`Check`.
    """
    from .channels import (
        PipelineParams,
        combined_success_probability,
        effective_ring_state,
        pipeline_ring_state,
        subtraction_ring_state,
        teleamp_heralded_state,
        zps_success_probability,
    )

    alpha = catstates.check_alpha(alpha)
    wanted = set(scenarios or (
        "zps", "nps", "teleamp", "pipeline", "effective",
        "nps_equivalence", "teleamp_equivalence", "identity",
    ))
    c = catstates.ring_coefficients(a, b, catstates.LogicalBasis.PLUS_MINUS, alpha)
    n_sig = cutoffs.signal or default_cutoff(alpha)
    out = []

    if "identity" in wanted:
        p = PipelineParams(alpha, 1.0, 1.0)
        res = circuit_oracle(Scenario.LOSS, p, c, cutoffs)
        rho = _pure_density(c, alpha, n_sig)
        out.append(Check("identity.trace_distance", "trace_distance",
                         fock.trace_distance(res.density, rho), 1e-12))
    if "zps" in wanted:
        c01 = catstates.ring_coefficients(a, b, catstates.LogicalBasis.ZERO_ONE, alpha)
        p = PipelineParams(alpha, T, 1.0, n=0)
        res = circuit_oracle(Scenario.SUBTRACTION, p, c01, cutoffs)
        st = subtraction_ring_state(c01, alpha, T, 0)
        out += _compare("zps", res.density, res.probability, st.density(n_sig),
                        zps_success_probability(a, b, alpha, T))
    if "nps" in wanted:
        p = PipelineParams(alpha, T, 1.0, eta=eta, n=n)
        res = circuit_oracle(Scenario.SUBTRACTION, p, c, cutoffs)
        st = subtraction_ring_state(c, alpha, T, n, eta)
        out += _compare("nps", res.density, res.probability, st.density(n_sig), st.trace())
    if "teleamp" in wanted:
        p = PipelineParams(alpha, 1.0, 1.0, g=g, x=x)
        res = circuit_oracle(Scenario.TELEAMP, p, c, cutoffs)
        n_out = cutoffs.output or default_cutoff(g * alpha)
        v, prob = teleamp_heralded_state(c, alpha, g, x, n_out)
        out += _compare("teleamp", res.density, res.probability, np.outer(v, v.conj()), prob)
        if res.vector is not None:
            ov = np.vdot(v, res.vector) / (np.linalg.norm(v) * np.linalg.norm(res.vector))
            out.append(Check("teleamp.sign", "phase", abs(ov - 1.0), FIDELITY_TOL))
    if "pipeline" in wanted or "effective" in wanted:
        p = PipelineParams(alpha, T, gamma, eta=eta, n=n, x=x)
        res = circuit_oracle(Scenario.PIPELINE, p, c, cutoffs)
        n_out = res.density.shape[0] - 1
        if "pipeline" in wanted:
            st = pipeline_ring_state(c, p)
            out += _compare("pipeline", res.density, res.probability, st.density(n_out),
                            combined_success_probability(c, p))
        if "effective" in wanted:
            e = p.effective()
            st = effective_ring_state(c, alpha, e.t_eff, e.gamma_eff, p.n_prime)
            out.append(Check("effective.trace_distance", "trace_distance",
                             fock.trace_distance(res.normalized_density(), st.density(n_out)),
                             EQUIVALENCE_TOL))
    if "nps_equivalence" in wanted:
        r1, r2 = nps_equivalence(c, alpha, T, eta, n)
        out.append(Check("nps_equivalence.trace_distance", "trace_distance",
                         fock.trace_distance(r1, r2), EQUIVALENCE_TOL))
    if "teleamp_equivalence" in wanted:
        r1, r2 = teleamp_equivalence(c, alpha, 1.0 - gamma, g, eta, x, cutoffs=cutoffs)
        out.append(Check("teleamp_equivalence.trace_distance", "trace_distance",
                         fock.trace_distance(r1, r2), EQUIVALENCE_TOL))
    return out


def _pure_density(coeffs, alpha, n_max):
    v = catstates.ring_vector(coeffs, alpha, n_max)
    return np.outer(v, v.conj())
