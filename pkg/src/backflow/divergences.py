"""Distinguishability quantifiers between density matrices.

All entropies use the natural logarithm. The telescopic relative entropy

    S_mu(rho, sigma) = S(rho, mu*rho + (1 - mu)*sigma) / log(1/mu)

is bounded in ``[0, 1]`` and does not depend on the logarithm base. The
quantum Jensen-Shannon divergence is its symmetrized form at ``mu = 1/2``,
i.e. the usual definition taken with base-2 logarithms.
"""
from __future__ import annotations

import math

import numpy as np

from .linalg import ZERO_THRESHOLD, as_matrix, trace_norm

SUPPORT_TOL = 1e-10

MU_OPT = math.exp(-1.5)
MU_ALT_OPT = math.exp(-0.5)


def _same_shape(rho, sigma):
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 < mu < 1.0:
        raise ValueError(f"telescopic parameter must lie in (0, 1), got {mu}")
    return mu


def _spectrum(m):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w, v


def trace_distance(rho, sigma) -> float:
    a, b = _same_shape(rho, sigma)
    return 0.5 * trace_norm(a - b)


def _xlogx_excess(x: np.ndarray) -> np.ndarray:
    """``(1 + x) log(1 + x) - x`` for ``x >= -1``, accurate near zero."""
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    # alternating series sum_{n>=2} (-1)^n x^n / (n (n - 1))
    out[small] = xs**2 * (0.5 - xs * (1 / 6 - xs * (1 / 12 - xs * (1 / 20 - xs / 30))))
    xl = x[~small]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~small] = np.where(xl <= -1.0, 1.0, (1.0 + xl) * np.log1p(xl) - xl)
    return out


def _relative_entropy(a, b, null_weight_tol: float) -> float:
    # Summed as sum_ij |<u_i|v_j>|^2 [l_i log(l_i/t_j) - l_i + t_j], which
    # equals Tr(a log a - a log b) for equal traces; every term is >= 0, so
    # nearly equal states lose no digits to cancellation.
    if np.array_equal(a, b):
        return 0.0
    wa, va = _spectrum(a)
    wb, vb = _spectrum(b)
    wa = np.where(wa > ZERO_THRESHOLD, wa, 0.0)
    overlaps = np.abs(va.conj().T @ vb) ** 2
    null_b = wb <= ZERO_THRESHOLD
    if np.any(null_b):
        leaked = float(wa @ overlaps[:, null_b].sum(axis=1))
        if leaked > null_weight_tol:
            return math.inf
    tb = wb[~null_b]
    ov = overlaps[:, ~null_b]
    x = wa[:, None] / tb[None, :] - 1.0
    terms = tb[None, :] * _xlogx_excess(x)
    return max(float(np.sum(ov * terms)), 0.0)


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy ``Tr(rho log rho - rho log sigma)``.

    Returns ``inf`` when the support of ``rho`` leaves that of ``sigma``,
    detected as more than ``1e-10`` of rho's weight on sigma's null space.
    """
    a, b = _same_shape(rho, sigma)
    return _relative_entropy(a, b, SUPPORT_TOL)


def telescopic_re(rho, sigma, mu: float) -> float:
    mu = _check_mu(mu)
    a, b = _same_shape(rho, sigma)
    if np.array_equal(a, b):
        return 0.0
    mixture = mu * a + (1.0 - mu) * b
    # supp(rho) lies inside supp(mixture), so any null weight is roundoff
    value = _relative_entropy(a, mixture, math.inf) / math.log(1.0 / mu)
    return min(value, 1.0)


def symmetrized_tre(rho, sigma, mu: float) -> float:
    return 0.5 * (telescopic_re(rho, sigma, mu) + telescopic_re(sigma, rho, mu))


def qjsd(rho, sigma) -> float:
    """Quantum Jensen-Shannon divergence, normalized to ``[0, 1]``."""
    return symmetrized_tre(rho, sigma, 0.5)


def sqrt_qjsd(rho, sigma) -> float:
    return math.sqrt(qjsd(rho, sigma))


def scalar_tre(a: float, b: float, mu: float) -> float:
    """Telescopic relative entropy of two non-negative numbers.

    ``a log(a / (mu a + (1 - mu) b)) / log(1/mu)`` with ``0 log 0 = 0``.
    """
    mu = _check_mu(mu)
    if a < 0 or b < 0:
        raise ValueError(f"scalar arguments must be non-negative, got {a}, {b}")
    if a == 0:
        return 0.0
    return a * math.log(a / (mu * a + (1.0 - mu) * b)) / math.log(1.0 / mu)


def pinsker_coefficient(mu: float) -> float:
    """Coefficient ``c`` in ``c * D**2 <= S_mu``."""
    mu = _check_mu(mu)
    return 2.0 * (1.0 - mu) ** 2 / math.log(1.0 / mu)


def kappa(mu: float) -> float:
    """Prefactor ``(2 mu^2 log^3(1/mu))^(-1/4)`` of the fourth-root backflow bound."""
    mu = _check_mu(mu)
    return (2.0 * mu**2 * math.log(1.0 / mu) ** 3) ** -0.25


def kappa_alt(mu: float) -> float:
    """Prefactor ``(2 mu^2 log(1/mu))^(-1/2)`` of the alternate backflow bound."""
    mu = _check_mu(mu)
    return (2.0 * mu**2 * math.log(1.0 / mu)) ** -0.5


def triangle_first_bound(d: float, mu: float) -> float:
    """Upper bound on ``S_mu(r, s) - S_mu(r, t)`` given ``d = D(s, t)``.

    Equals ``1 - S_mu(1, d) = log(1 + d (1 - mu)/mu) / log(1/mu)``.
    """
    return 1.0 - scalar_tre(1.0, d, mu)


def triangle_second_bound(d: float, mu: float) -> float:
    """Upper bound on ``S_mu(r, s) - S_mu(e, s)`` given ``d = D(r, e)``.

    Equals ``d - S_mu(d, 1) = d log(1 + (1 - mu)/(mu d)) / log(1/mu)``.
    """
    return d - scalar_tre(d, 1.0, mu)


QUANTIFIERS = ("TD", "TRE", "QJSD", "SQRT_QJSD")


def divergence(name: str, rho, sigma, mu: float = MU_OPT) -> float:
    """Dispatch on a quantifier name; ``mu`` is used by ``"TRE"`` only."""
    if name == "TD":
        return trace_distance(rho, sigma)
    if name == "TRE":
        return telescopic_re(rho, sigma, mu)
    if name == "QJSD":
        return qjsd(rho, sigma)
    if name == "SQRT_QJSD":
        return sqrt_qjsd(rho, sigma)
    raise ValueError(f"unknown quantifier {name!r}")
