"""Four-component cat states on the ring ``alpha * i^k``.

Every cat state here is written as ``sum_k c_k |i^k alpha>`` for a
coefficient vector ``c`` (the "ring coefficients").  Fock vectors are built
from coherent vectors and normalized numerically; the closed-form constants
in :func:`normalizations` serve as independent checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import DomainError

MIN_ALPHA = 0.1
U = 1j  # ring phase
RING = U ** np.arange(4)


class CatBasisKind(enum.Enum):
    ZERO_BAR = "zero_bar"
    ONE_BAR = "one_bar"
    ZERO_BAR_PRIME = "zero_bar_prime"
    ONE_BAR_PRIME = "one_bar_prime"
    PLUS_BAR = "plus_bar"
    MINUS_BAR = "minus_bar"
    PLUS_BAR_PRIME = "plus_bar_prime"
    MINUS_BAR_PRIME = "minus_bar_prime"


RING_COEFFICIENTS = {
    CatBasisKind.ZERO_BAR: (1, 0, 1, 0),
    CatBasisKind.ONE_BAR: (0, 1, 0, 1),
    CatBasisKind.ZERO_BAR_PRIME: (1, 0, -1, 0),
    CatBasisKind.ONE_BAR_PRIME: (0, 1, 0, -1),
    CatBasisKind.PLUS_BAR: (1, 1, 1, 1),
    CatBasisKind.MINUS_BAR: (1, -1, 1, -1),
    CatBasisKind.PLUS_BAR_PRIME: (1, 1j, -1, -1j),
    CatBasisKind.MINUS_BAR_PRIME: (1, -1j, -1, 1j),
}

# photon-number residue (mod 4) carried by each four-component state
RESIDUE = {
    CatBasisKind.PLUS_BAR: 0,
    CatBasisKind.MINUS_BAR_PRIME: 1,
    CatBasisKind.MINUS_BAR: 2,
    CatBasisKind.PLUS_BAR_PRIME: 3,
}


class LogicalBasis(enum.Enum):
    ZERO_ONE = "zero_one"
    PLUS_MINUS = "plus_minus"


LOGICAL_PAIRS = {
    LogicalBasis.ZERO_ONE: (CatBasisKind.ZERO_BAR, CatBasisKind.ONE_BAR),
    LogicalBasis.PLUS_MINUS: (CatBasisKind.PLUS_BAR, CatBasisKind.MINUS_BAR),
}


def check_alpha(alpha, name="alpha"):
    """Return ``alpha`` as a float, rejecting complex and tiny amplitudes."""
    if isinstance(alpha, complex) or np.iscomplexobj(alpha):
        if complex(alpha).imag != 0.0:
            raise DomainError(f"{name} must be real, got {alpha}")
        alpha = complex(alpha).real
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < MIN_ALPHA:
        raise DomainError(f"{name} must be a real amplitude >= {MIN_ALPHA}, got {alpha}")
    return alpha


def ring_gram(alpha):
    """Gram matrix ``G[j, k] = <i^j alpha | i^k alpha>`` for real ``alpha``."""
    z = np.conj(RING)[:, None] * RING[None, :]
    return np.exp(-alpha * alpha * (1.0 - z))


def ring_norm(coeffs, alpha):
    c = np.asarray(coeffs, dtype=complex)
    return math.sqrt(np.vdot(c, ring_gram(alpha) @ c).real)


def ring_vector(coeffs, alpha, n_max):
    """Unnormalized Fock vector ``sum_k c_k |i^k alpha>``."""
    v = np.zeros(n_max + 1, dtype=complex)
    for k, c in enumerate(coeffs):
        if c != 0:
            v += c * fock.coherent_vector(alpha * RING[k], n_max)
    return v


@dataclass(frozen=True)
class Normalizations:
    n_plus: float
    n_minus: float
    m_plus: float
    m_minus: float
    m_plus_prime: float
    m_minus_prime: float
    n0: float | None = None
    n1: float | None = None
    n2: float | None = None
    n3: float | None = None


def _cos_over_cosh(x):
    return 2.0 * math.cos(x) * math.exp(-x) / (1.0 + math.exp(-2.0 * x))


def _sin_over_sinh(x):
    return 2.0 * math.sin(x) * math.exp(-x) / (1.0 - math.exp(-2.0 * x))


def zero_one_overlap(alpha):
    """``<0bar|1bar> = cos(alpha^2) / cosh(alpha^2)``."""
    return _cos_over_cosh(check_alpha(alpha) ** 2)


def zero_one_prime_overlap(alpha):
    """``<0bar'|1bar'> = i sin(alpha^2) / sinh(alpha^2)``."""
    return 1j * _sin_over_sinh(check_alpha(alpha) ** 2)


def normalizations(alpha, a=None, b=None, check=True):
    """Closed-form normalization constants.

    ``n0..n3`` normalize the loss branches ``a|0> + b|1>``, ``a|0'> + ib|1'>``,
    ``a|0> - b|1>`` and ``a|0'> - ib|1'>``; they are only filled when ``a``
    and ``b`` are given.  ``check=False`` admits any positive amplitude, for
    attenuated states inside a pipeline.
    """
    if check:
        alpha = check_alpha(alpha)
    elif not alpha > 0:
        raise DomainError(f"amplitude must be positive, got {alpha}")
    x = alpha * alpha
    e2 = math.exp(-2.0 * x)
    e1 = math.exp(-x)
    kw = {}
    if a is not None and b is not None:
        re = (complex(a) * complex(b).conjugate()).real
        cc = _cos_over_cosh(x)
        ss = _sin_over_sinh(x)
        kw = dict(
            n0=1.0 / math.sqrt(1.0 + 2.0 * re * cc),
            n1=1.0 / math.sqrt(1.0 - 2.0 * re * ss),
            n2=1.0 / math.sqrt(1.0 - 2.0 * re * cc),
            n3=1.0 / math.sqrt(1.0 + 2.0 * re * ss),
        )
    return Normalizations(
        n_plus=1.0 / math.sqrt(2.0 * (1.0 + e2)),
        n_minus=1.0 / math.sqrt(2.0 * (1.0 - e2)),
        m_plus=0.5 / math.sqrt(1.0 + e2 + 2.0 * e1 * math.cos(x)),
        m_minus=0.5 / math.sqrt(1.0 + e2 - 2.0 * e1 * math.cos(x)),
        m_plus_prime=0.5 / math.sqrt(1.0 - e2 - 2.0 * e1 * math.sin(x)),
        m_minus_prime=0.5 / math.sqrt(1.0 - e2 + 2.0 * e1 * math.sin(x)),
        **kw,
    )


def basis_state(kind, alpha, n_max=None):
    """Normalized Fock vector of one of the eight cat basis states."""
    alpha = check_alpha(alpha)
    if n_max is None:
        n_max = fock.default_cutoff(alpha)
    return fock.normalize(ring_vector(RING_COEFFICIENTS[CatBasisKind(kind)], alpha, n_max))


def basis_ring(kind, alpha):
    """Ring coefficients of a basis state, normalized at amplitude ``alpha``."""
    c = np.asarray(RING_COEFFICIENTS[CatBasisKind(kind)], dtype=complex)
    return c / ring_norm(c, alpha)


def _check_unit(a, b):
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-10:
        raise ValueError("coefficients must satisfy |a|^2 + |b|^2 = 1")


def ring_coefficients(a, b, basis, alpha):
    """Normalized ring coefficients of ``a|L0> + b|L1>`` in the given basis."""
    alpha = check_alpha(alpha)
    _check_unit(a, b)
    k0, k1 = LOGICAL_PAIRS[LogicalBasis(basis)]
    c = a * basis_ring(k0, alpha) + b * basis_ring(k1, alpha)
    return c / ring_norm(c, alpha)


def encode(a, b, basis, alpha, n_max=None):
    """Normalized Fock vector of ``a|L0> + b|L1>``.

    For the ``ZERO_ONE`` pair the logical states overlap, so the physical
    state is renormalized.
    """
    alpha = check_alpha(alpha)
    _check_unit(a, b)
    if n_max is None:
        n_max = fock.default_cutoff(alpha)
    k0, k1 = LOGICAL_PAIRS[LogicalBasis(basis)]
    v = a * basis_state(k0, alpha, n_max) + b * basis_state(k1, alpha, n_max)
    return fock.normalize(v)


@dataclass(frozen=True)
class Distortion:
    a: complex
    b: complex
    ratio_plus: float
    ratio_minus: float
    polar_shift: float  # change of Bloch polar angle


def distorted_coefficients(a, b, alpha_from, alpha_to):
    """Coefficients in the (+, -) basis after rescaling ``alpha_from -> alpha_to``.

    ``a|+> + b|->`` at ``alpha_from`` maps onto a state proportional to
    ``a (M+/M~+)|+~> + b (M-/M~-)|-~>`` at ``alpha_to``.
    """
    n_from = normalizations(alpha_from)
    n_to = normalizations(alpha_to)
    rp = n_from.m_plus / n_to.m_plus
    rm = n_from.m_minus / n_to.m_minus
    a2, b2 = a * rp, b * rm
    s = math.sqrt(abs(a2) ** 2 + abs(b2) ** 2)
    a2, b2 = a2 / s, b2 / s
    shift = 2.0 * (math.atan2(abs(b2), abs(a2)) - math.atan2(abs(b), abs(a)))
    return Distortion(a2, b2, rp, rm, shift)
