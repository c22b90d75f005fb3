"""Physical channels acting on four-component cat states, in closed form.

Most states that appear in the pipeline are operators of the form
``sum_jk C[j, k] |r u^j><r u^k|`` with ``u = i`` and a common real amplitude
``r``; :class:`RingMixture` carries them through subtraction, loss and
heralded amplification exactly, without a Fock cutoff.

Teleamplification heralding order is fixed as ``x1 -> C``, ``x2 -> A'``,
``x3 -> C'``.  The probabilities only depend on ``x1 + x2 + x3`` and on
``x2 + x3``, so the labelling of the last two modes does not matter.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize
from scipy.special import gammaln

from . import catstates, fock
from .catstates import RING, LogicalBasis, check_alpha, normalizations, ring_gram
from .errors import DomainError, NoRealRootError

PHASE = RING[:, None] * np.conj(RING)[None, :]  # u^(j - k)
CONSTRAINT_TOL = 1e-10


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class PipelineParams:
    """Physical knobs of the subtraction, loss and teleamplification chain.

    ``g=None`` means the gain is solved from the amplitude-restoration
    constraint by :func:`effective_params`.
    """

    alpha: float
    T: float
    gamma: float
    eta: float = 1.0
    g: float | None = None
    n: int = 0
    x: tuple = (1, 1, 1)
    gain_rule: str = "constraint"

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        for name in ("T", "gamma", "eta"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {v}")
        if self.g is not None and not self.g >= 1.0:
            raise DomainError(f"g must be >= 1, got {self.g}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        x = tuple(int(v) for v in self.x)
        if len(x) != 3 or min(x) < 1:
            raise DomainError(f"x must be three counts >= 1, got {self.x}")
        object.__setattr__(self, "x", x)

    @property
    def R(self):
        return 1.0 - self.T

    @property
    def n_prime(self):
        return self.n + sum(self.x) - 3

    def effective(self):
        return effective_params(self.T, self.gamma, self.eta, g=self.g, gain_rule=self.gain_rule)

    def gain(self):
        return self.effective().g


@dataclass(frozen=True)
class EffectiveParams:
    t_eff: float
    gamma_eff: float
    g: float
    mu: float
    eta_prime: float
    g_prime: float
    g_double_prime: float
    r1: float
    r1_prime: float
    r2: float
    residual: float
    sextic_gains: tuple = field(default=())


def noisy_nps_equivalent(T, eta):
    """``(mu, eta')`` with ``eta' = T / (1 - eta R)`` and ``mu = 1/sqrt(eta')``."""
    eta_prime = T / (1.0 - eta * (1.0 - T))
    return 1.0 / math.sqrt(eta_prime), eta_prime


def noisy_teleamp_equivalent(g, eta):
    """``(g', R2)`` with ``R2 = 2(1 - eta)/(g^2 + 2(1 - eta))``."""
    r2 = 2.0 * (1.0 - eta) / (g * g + 2.0 * (1.0 - eta))
    return g / math.sqrt(1.0 - r2), r2


def sextic_coefficients(T, gamma, eta):
    """Coefficients (highest first) of the gain polynomial in ``y = g^2``."""
    gt = gamma * T
    return (
        gt * gt,
        gt * (gt - eta * ((2.0 * gamma - 1.0) * T + 1.0)),
        eta - T * (eta + gamma * (1.0 - 2.0 * eta)) - 1.0,
        2.0 * (1.0 - eta) * (gt + eta * (1.0 - T) - 1.0),
    )


def sextic_gains(T, gamma, eta):
    """Real roots ``g >= 1`` of the gain polynomial, ascending."""
    roots = np.roots(sextic_coefficients(T, gamma, eta))
    out = []
    for y in roots:
        if abs(y.imag) <= 1e-9 * max(1.0, abs(y)) and y.real >= 1.0 - 1e-12:
            out.append(math.sqrt(max(y.real, 1.0)))
    return tuple(sorted(out))


def _chain(T, gamma, eta, g):
    mu, eta_prime = noisy_nps_equivalent(T, eta)
    r1 = 1.0 - eta_prime * gamma
    g_prime, r2 = noisy_teleamp_equivalent(g, eta)
    gdp2 = (1.0 - r1) * g_prime**2 + r1
    r1_prime = r1 / gdp2
    t_eff = T * gdp2 / eta_prime
    gamma_eff = (1.0 - r1_prime) * (1.0 - r2)
    residual = math.sqrt(T / eta_prime) * math.sqrt(gdp2) * math.sqrt(gamma_eff) - 1.0
    return dict(
        t_eff=t_eff,
        gamma_eff=gamma_eff,
        g=g,
        mu=mu,
        eta_prime=eta_prime,
        g_prime=g_prime,
        g_double_prime=math.sqrt(gdp2),
        r1=r1,
        r1_prime=r1_prime,
        r2=r2,
        residual=residual,
    )


def effective_params(T, gamma, eta, g=None, gain_rule="constraint"):
    """Collapse subtraction, detector noise, loss and gain into ``(T_eff, gamma_eff)``.

    :param g: explicit gain; if ``None`` it is solved.
    :param gain_rule: ``"constraint"`` solves the amplitude-restoration
        constraint directly (root of a monotone function of ``g``);
        ``"sextic"`` takes the smallest real root ``g >= 1`` of the published
        gain polynomial.  The two coincide for ``eta = 1``.
    :raises NoRealRootError: when no admissible gain exists.
    """
    for name, v in (("T", T), ("gamma", gamma), ("eta", eta)):
        if not 0.0 < v <= 1.0:
            raise DomainError(f"{name} must lie in (0, 1], got {v}")
    roots = sextic_gains(T, gamma, eta)
    if g is None:
        if gain_rule == "sextic":
            if not roots:
                raise NoRealRootError(
                    f"gain polynomial has no real root g >= 1 at T={T}, gamma={gamma}, eta={eta}"
                )
            g = roots[0]
        elif gain_rule == "constraint":
            f = lambda gg: _chain(T, gamma, eta, gg)["residual"]  # noqa: E731
            lo, hi = 1.0, 2.0
            if f(lo) > 0:
                raise NoRealRootError(
                    f"no gain g >= 1 restores the amplitude at T={T}, gamma={gamma}, eta={eta}"
                )
            while f(hi) < 0:
                hi *= 2.0
                if hi > 1e8:
                    raise NoRealRootError(f"gain search diverged at T={T}, gamma={gamma}")
            g = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            raise ValueError(f"unknown gain rule {gain_rule!r}")
    return EffectiveParams(sextic_gains=roots, **_chain(T, gamma, eta, float(g)))


# ---------------------------------------------------------------------------
# ring mixtures


@dataclass(frozen=True)
class RingMixture:
    """The operator ``sum_jk C[j, k] |r u^j><r u^k|`` with real ``r >= 0``."""

    coeffs: np.ndarray
    amplitude: float

    @classmethod
    def pure(cls, c, amplitude):
        c = np.asarray(c, dtype=complex)
        return cls(np.outer(c, c.conj()), float(amplitude))

    def scaled(self, factor):
        return RingMixture(self.coeffs * factor, self.amplitude)

    def rescale(self, factor):
        """Noiseless ``factor^n``: ``|b> -> exp((f^2-1)|b|^2/2) |f b>``."""
        r = self.amplitude
        return RingMixture(self.coeffs * math.exp((factor**2 - 1.0) * r * r), r * factor)

    def subtract(self, m):
        """``a^m rho a^dag^m``."""
        r = self.amplitude
        return RingMixture(self.coeffs * r ** (2 * m) * PHASE**m, r)

    def lose(self, gamma):
        """Pure loss with transmittance ``gamma``."""
        r = self.amplitude
        env = np.exp(-(1.0 - gamma) * r * r * (1.0 - PHASE))
        return RingMixture(self.coeffs * env, r * math.sqrt(gamma))

    def trace(self):
        return float(np.sum(self.coeffs * ring_gram(self.amplitude).T).real)

    def normalized(self):
        return self.scaled(1.0 / self.trace())

    def density(self, n_max):
        V = np.array([fock.coherent_vector(self.amplitude * u, n_max) for u in RING])
        rho = V.T @ self.coeffs @ V.conj()
        return (rho + rho.conj().T) / 2


# ---------------------------------------------------------------------------
# loss


def loss_kraus(gamma, k, n_max):
    """``E_k = sqrt((1-gamma)^k / k!) sqrt(gamma)^n a^k`` on the truncated space.

    Entries are ``<m|E_k|m+k> = sqrt(C(m+k, k) (1-gamma)^k gamma^m)``.
    """
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    E = np.zeros((n_max + 1, n_max + 1))
    m = np.arange(max(n_max + 1 - k, 0))
    if m.size == 0:
        return E
    if gamma == 1.0:
        if k == 0:
            np.fill_diagonal(E, 1.0)
        return E
    logv = 0.5 * (
        gammaln(m + k + 1.0)
        - gammaln(m + 1.0)
        - gammaln(k + 1.0)
        + k * math.log(1.0 - gamma)
        + m * math.log(gamma)
    )
    E[m, m + k] = np.exp(logv)
    return E


def apply_loss(rho, gamma):
    """Apply the loss channel to a density matrix (all Kraus terms in cutoff)."""
    n_max = rho.shape[0] - 1
    out = np.zeros_like(rho, dtype=complex)
    for k in range(n_max + 1):
        E = loss_kraus(gamma, k, n_max)
        out += E @ rho @ E.T
    return out


# ---------------------------------------------------------------------------
# subtraction and teleamplification


def zps_success_probability(a, b, alpha, T):
    """Zero-photon subtraction success for ``a|0bar> + b|1bar>`` (ideal detector)."""
    alpha = check_alpha(alpha)
    if T == 1.0:
        return 1.0
    at = math.sqrt(T) * alpha
    n_bar = normalizations(alpha).n_plus
    n_til = normalizations(at, check=False).n_plus
    num = 1.0 + 2.0 * (np.conj(a) * catstates._cos_over_cosh(at * at) * b).real
    den = 1.0 + 2.0 * (np.conj(a) * catstates.zero_one_overlap(alpha) * b).real
    return float((n_bar / n_til) ** 2 * num / den * math.exp(-(1.0 - T) * alpha**2))


def subtraction_ring_state(coeffs, alpha, T, n=0, eta=1.0):
    """Heralded nPS output as a ring mixture; its trace is the success probability.

    The detector of efficiency ``eta`` is a beamsplitter followed by an ideal
    counter, so the unobserved environment decoheres the ring components.
    """
    R = 1.0 - T
    C = np.outer(coeffs, np.conj(coeffs))
    env = np.exp(-(1.0 - eta) * R * alpha**2 * (1.0 - PHASE))
    x = eta * R * alpha**2
    weight = math.exp(-x + n * math.log(x) - math.lgamma(n + 1)) if x > 0 else float(n == 0)
    return RingMixture(C * weight * PHASE**n * env, math.sqrt(T) * alpha)


def _teleamp_prefactor(alpha, g, x, eta=1.0):
    """Real amplitude prefactor of a teleamp herald (without the sign)."""
    beta = alpha * math.sqrt(1.0 + g * g)
    mp = normalizations(beta, check=False).m_plus_prime
    s = sum(x)
    logp = (
        -eta * alpha**2
        + s * math.log(math.sqrt(eta) * alpha)
        - 0.5 * sum(math.lgamma(v + 1) for v in x)
        - 0.5 * (x[1] + x[2]) * math.log(2.0)
    )
    return mp * math.exp(logp)


def teleamp_heralded_state(coeffs, alpha, g, x, n_max=None):
    """Output of ideal teleamplification heralded on ``x = (x1, x2, x3)``.

    :param coeffs: ring coefficients of the input at amplitude ``alpha``.
    :returns: ``(unnormalized Fock vector of mode B, success probability)``.
        The vector carries the sign ``(-1)^x1`` from the displaced mode C.
    """
    alpha = check_alpha(alpha)
    x = tuple(int(v) for v in x)
    if min(x) < 1:
        raise DomainError("teleamp heralding needs x_k >= 1")
    if n_max is None:
        n_max = fock.default_cutoff(g * alpha)
    s = sum(x)
    pref = (-1) ** x[0] * _teleamp_prefactor(alpha, g, x)
    c = np.asarray(coeffs, dtype=complex) * RING ** (s - 3)
    v = pref * catstates.ring_vector(c, g * alpha, n_max)
    return v, teleamp_success_probability(coeffs, alpha, g, x)


def teleamp_success_probability(coeffs, alpha, g, x):
    """Closed-form success probability of ideal teleamplification."""
    x = tuple(int(v) for v in x)
    s = sum(x)
    pref = _teleamp_prefactor(alpha, g, x)
    c = np.asarray(coeffs, dtype=complex)
    Q = np.conj(PHASE) ** (s - 3) * np.exp(-(g * alpha) ** 2 * (1.0 - np.conj(PHASE)))
    return float(pref**2 * np.vdot(c, Q @ c).real)


def teleamp_ring_state(state, g, x, eta=1.0):
    """Apply (noisy) teleamplification to a ring mixture.

    Inefficient detectors are modelled by beamsplitters before ideal
    counters; heralding on nonzero counts in all three modes still selects
    the diagonal resource-input pairs, and the lost light decoheres the ring.
    """
    r = state.amplitude
    x = tuple(int(v) for v in x)
    s = sum(x)
    p2 = _teleamp_prefactor(r, g, x, eta) ** 2
    env = np.exp(-2.0 * (1.0 - eta) * r * r * (1.0 - PHASE))
    return RingMixture(state.coeffs * p2 * PHASE ** (s - 3) * env, g * r)


def pipeline_ring_state(coeffs, params):
    """Heralded output of nPS, loss and teleamplification for one outcome.

    The trace of the returned mixture is the outcome probability.
    """
    g = params.gain()
    st = subtraction_ring_state(coeffs, params.alpha, params.T, params.n, params.eta)
    st = st.lose(params.gamma)
    return teleamp_ring_state(st, g, params.x, params.eta)


def effective_ring_state(coeffs, alpha, t_eff, gamma_eff, n_sub):
    """Normalized output of ``E_gamma_eff . a^n' . sqrt(T_eff)^n`` on a ring state."""
    st = RingMixture.pure(coeffs, alpha).rescale(math.sqrt(t_eff)).subtract(n_sub)
    return st.lose(gamma_eff).normalized()


def combined_success_probability(coeffs, params):
    """Closed-form probability of the outcome ``(n; x1, x2, x3)``."""
    return float(np.vdot(np.asarray(coeffs, complex), _outcome_form(params) @ np.asarray(coeffs, complex)).real)


def _outcome_weight(alpha, T, gamma, eta, g, n, x):
    R = 1.0 - T
    gt = gamma * T
    beta = math.sqrt((1.0 + g * g) * gt) * alpha
    mp = normalizations(beta, check=False).m_plus_prime
    s = sum(x)
    logw = (
        -2.0 * eta * (R / 2.0 + gt) * alpha**2
        + (n * math.log(eta * R * alpha**2) if n else 0.0)
        + s * math.log(eta * gt * alpha**2)
        - math.lgamma(n + 1)
        - sum(math.lgamma(v + 1) for v in x)
        - (x[1] + x[2]) * math.log(2.0)
    )
    return mp * mp * math.exp(logw)


def _coherence_matrix(alpha, T, gamma, eta, g, r):
    R = 1.0 - T
    E = alpha**2 * (1.0 - eta * R + gamma * T * (1.0 + g * g - 2.0 * eta))
    return np.conj(PHASE) ** r * np.exp(-E * (1.0 - np.conj(PHASE)))


def _outcome_form(params):
    g = params.gain()
    w = _outcome_weight(params.alpha, params.T, params.gamma, params.eta, g, params.n, params.x)
    return w * _coherence_matrix(params.alpha, params.T, params.gamma, params.eta, g, params.n_prime)


@dataclass(frozen=True)
class HeraldingSet:
    """Accepted outcomes: every ``n`` in ``n_values`` with every ``x`` in ``x_values``."""

    n_values: tuple
    x_values: tuple

    @classmethod
    def standard(cls, n=0):
        return cls((n,), ((1, 1, 1),))

    @classmethod
    def any_n(cls, n_max=10):
        return cls(tuple(range(n_max + 1)), ((1, 1, 1),))

    @classmethod
    def generalized(cls, n_max=10, x_max=10):
        xs = tuple(itertools.product(range(1, x_max + 1), repeat=3))
        return cls(tuple(range(n_max + 1)), xs)

    def outcomes(self):
        for n in self.n_values:
            for x in self.x_values:
                yield n, tuple(x)


def residue_weights(alpha, T, gamma, eta, g, heralds):
    """Total outcome weight per residue ``n' mod 4``."""
    w = np.zeros(4)
    for n, x in heralds.outcomes():
        w[(n + sum(x) - 3) % 4] += _outcome_weight(alpha, T, gamma, eta, g, n, x)
    return w


def success_form(alpha, T, gamma, eta, g, heralds, residues=(0, 1, 2, 3)):
    """Hermitian ``Q`` with ``P_total(c) = c^dag Q c`` over the accepted outcomes."""
    w = residue_weights(alpha, T, gamma, eta, g, heralds)
    Q = np.zeros((4, 4), dtype=complex)
    for r in residues:
        if w[r]:
            Q += w[r] * _coherence_matrix(alpha, T, gamma, eta, g, r)
    return (Q + Q.conj().T) / 2


def total_success_probability(coeffs, params, heralds):
    g = params.gain()
    Q = success_form(params.alpha, params.T, params.gamma, params.eta, g, heralds)
    c = np.asarray(coeffs, dtype=complex)
    return float(np.vdot(c, Q @ c).real)


@dataclass(frozen=True)
class MinimumSuccess:
    probability: float
    a: complex
    b: complex


def min_success_probability(params, heralds, basis=LogicalBasis.PLUS_MINUS, residues=(0, 1, 2, 3)):
    """Exact minimum of the total success probability over encoded pure states.

    The probability is a ratio of Hermitian forms in ``(a, b)``, so the
    minimum is the smallest generalized eigenvalue.
    """
    g = params.gain()
    Q = success_form(params.alpha, params.T, params.gamma, params.eta, g, heralds, residues)
    k0, k1 = catstates.LOGICAL_PAIRS[LogicalBasis(basis)]
    V = np.column_stack(
        [catstates.basis_ring(k0, params.alpha), catstates.basis_ring(k1, params.alpha)]
    )
    H = V.conj().T @ Q @ V
    G = V.conj().T @ ring_gram(params.alpha) @ V
    w, vecs = linalg.eigh((H + H.conj().T) / 2, (G + G.conj().T) / 2)
    v = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    return MinimumSuccess(float(w[0]), complex(v[0]), complex(v[1]))


# ---------------------------------------------------------------------------
# loss mixture


@dataclass(frozen=True)
class LossMixture:
    """Four-branch form of lossy attenuated ``a|0bar> + b|1bar>``.

    Branch ``k`` is ``a|L0> + s_k b|L1>`` at amplitude ``amplitude`` with
    ``(L0, L1, s_k)`` = ``(0, 1, 1)``, ``(0', 1', i)``, ``(0, 1, -1)``,
    ``(0', 1', -i)``.
    """

    weights: tuple
    raw_weights: tuple
    branches: tuple  # ((a, b'), primed) per branch
    amplitude: float

    def branch_vector(self, k, n_max):
        (a, b), primed = self.branches[k]
        if primed:
            k0, k1 = catstates.CatBasisKind.ZERO_BAR_PRIME, catstates.CatBasisKind.ONE_BAR_PRIME
        else:
            k0, k1 = catstates.CatBasisKind.ZERO_BAR, catstates.CatBasisKind.ONE_BAR
        v = a * catstates.basis_state(k0, self.amplitude, n_max) + b * catstates.basis_state(
            k1, self.amplitude, n_max
        )
        return fock.normalize(v)

    def density_matrix(self, n_max=None):
        if n_max is None:
            n_max = fock.default_cutoff(self.amplitude)
        rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        for k, p in enumerate(self.weights):
            v = self.branch_vector(k, n_max)
            rho += p * np.outer(v, v.conj())
        return rho


def loss_branch_probabilities(alpha, T, gamma):
    """Raw weights ``p_k`` (independent of the encoded coefficients)."""
    x = T * alpha**2
    y = (1.0 - gamma) * x
    z = gamma * x
    # ratios cosh(z)/cosh(x), sinh(z)/cosh(x) written to avoid overflow
    ch = (math.exp(z - x) + math.exp(-z - x)) / (1.0 + math.exp(-2.0 * x))
    sh = (math.exp(z - x) - math.exp(-z - x)) / (1.0 + math.exp(-2.0 * x))
    return (
        ch * (math.cosh(y) + math.cos(y)) / 2.0,
        sh * (math.sinh(y) + math.sin(y)) / 2.0,
        ch * (math.cosh(y) - math.cos(y)) / 2.0,
        sh * (math.sinh(y) - math.sin(y)) / 2.0,
    )


def loss_mixture(a, b, alpha, T, gamma):
    """Mixture produced by loss ``gamma`` on ``a|0bar> + b|1bar>`` attenuated by ``sqrt(T)``.

    The mixture weights are ``p_k (N0(sqrt(T) alpha) / N_k(sqrt(gamma T) alpha))^2``;
    with this squared ratio they sum to one.
    """
    alpha = check_alpha(alpha)
    p = loss_branch_probabilities(alpha, T, gamma)
    at = math.sqrt(T) * alpha
    af = math.sqrt(gamma * T) * alpha
    n_in = normalizations(at, a, b, check=False)
    n_out = normalizations(af, a, b, check=False)
    ns = (n_out.n0, n_out.n1, n_out.n2, n_out.n3)
    pt = tuple(p[k] * (n_in.n0 / ns[k]) ** 2 for k in range(4))
    branches = (
        ((a, b), False),
        ((a, 1j * b), True),
        ((a, -b), False),
        ((a, -1j * b), True),
    )
    return LossMixture(pt, p, branches, af)


# ---------------------------------------------------------------------------
# alternate restoration setup


@dataclass(frozen=True)
class AlternateSetup:
    g_alt: float
    beta_alt: float
    beta_orig: float
    lost_intensity_alt: float
    lost_intensity_orig: float


def alternate_setup(gamma, r_b, alpha):
    """Compare restoration after the channel with loss inside the resource arm.

    In the alternate scheme half of the resource crosses the channel, so unit
    gain ``sqrt(T_B / (R_B gamma))`` needs ``beta = alpha / sqrt(R_B gamma)``
    and leaks ``(1 - gamma) alpha^2 / gamma`` to the environment; the
    original scheme leaks ``(1 - gamma) alpha^2`` with ``beta = alpha sqrt(gamma / R_B)``.
    """
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if not 0.0 < r_b < 1.0:
        raise DomainError(f"r_b must lie in (0, 1), got {r_b}")
    return AlternateSetup(
        g_alt=math.sqrt((1.0 - r_b) / (r_b * gamma)),
        beta_alt=alpha / math.sqrt(r_b * gamma),
        beta_orig=alpha * math.sqrt(gamma / r_b),
        lost_intensity_alt=(1.0 - gamma) * alpha**2 / gamma,
        lost_intensity_orig=(1.0 - gamma) * alpha**2,
    )
