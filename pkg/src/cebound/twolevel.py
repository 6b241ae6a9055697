"""The scalar two-level entropy functional Phi(a, eps, x) and its derivatives.

Phi(a, eps, x) is the relative entropy of the 2x2 state with diagonal
(a, eps) and coherence sqrt(x) against its diagonal part:

    Phi = lam_+ log lam_+ + lam_- log lam_- - a log a - eps log eps,
    lam_pm = (a + eps +- sqrt((a - eps)^2 + 4x)) / 2,

with the convention 0 log 0 = 0.  The domain is 0 <= x <= a*eps (positivity
of the 2x2 block).
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .bkm import log_mean_kernel
from .errors import DomainError

X_DOMAIN_TOL = 1e-14


class TwoLevelParams(NamedTuple):
    a: float
    eps: float
    x: float


def _check_domain(a: float, eps: float, x: float) -> None:
    if a < 0.0 or eps < 0.0 or x < 0.0:
        raise DomainError(f"parameters must be nonnegative, got ({a}, {eps}, {x})")
    if x > a * eps + X_DOMAIN_TOL:
        raise DomainError(f"x = {x} exceeds a*eps = {a * eps}")


def _xlogx(v: float) -> float:
    return v * math.log(v) if v > 0.0 else 0.0


def _eigenvalues(a: float, eps: float, x: float) -> tuple[float, float]:
    """(lam_+, lam_-) of the 2x2 block, with lam_- computed cancellation-free.

    The eigenvalue product is a*eps - x exactly, so lam_- = (a*eps - x)/lam_+.
    """
    root = math.sqrt((a - eps) ** 2 + 4.0 * x)
    lam_plus = 0.5 * (a + eps + root)
    if lam_plus <= 0.0:
        return 0.0, 0.0
    lam_minus = max((a * eps - x) / lam_plus, 0.0)
    return lam_plus, lam_minus


def phi(a: float, eps: float, x: float) -> float:
    """The two-level entropy functional.  Phi(a, eps, 0) = 0; Phi >= 0."""
    _check_domain(a, eps, x)
    if x == 0.0:
        return 0.0
    lam_plus, lam_minus = _eigenvalues(a, eps, x)
    val = _xlogx(lam_plus) + _xlogx(lam_minus) - _xlogx(a) - _xlogx(eps)
    return max(val, 0.0)


def phi_dx(a: float, eps: float, x: float) -> float:
    """d Phi / dx = log(lam_+/lam_-)/sqrt((a-eps)^2 + 4x).

    At x = 0 this equals L(a, eps).  At the boundary x = a*eps (lam_- = 0)
    the derivative diverges and +inf is returned.
    """
    _check_domain(a, eps, x)
    if a <= 0.0 or eps <= 0.0:
        raise DomainError("phi_dx requires a > 0 and eps > 0")
    if x == 0.0:
        return log_mean_kernel(a, eps)
    lam_plus, lam_minus = _eigenvalues(a, eps, x)
    if lam_minus <= 0.0:
        return float("inf")
    root = math.sqrt((a - eps) ** 2 + 4.0 * x)
    return math.log(lam_plus / lam_minus) / root


def phi_dxx(a: float, eps: float, x: float) -> float:
    """d^2 Phi / dx^2 = 4 (sinh(2u)/2 - u) / D^3 with u = log(lam_+/lam_-)/2,
    D = lam_+ - lam_-.  Strictly positive on the interior; +inf at x = a*eps.

    For u < 1e-4 the numerator is evaluated by its odd series
    2u^3/3 + 2u^5/15 + 4u^7/315 to avoid cancellation.
    """
    _check_domain(a, eps, x)
    if a <= 0.0 or eps <= 0.0:
        raise DomainError("phi_dxx requires a > 0 and eps > 0")
    lam_plus, lam_minus = _eigenvalues(a, eps, x)
    if lam_minus <= 0.0:
        return float("inf")
    u = 0.5 * math.log(lam_plus / lam_minus)
    d = math.sqrt((a - eps) ** 2 + 4.0 * x)  # lam_+ - lam_- exactly
    if d <= 0.0:
        d = 2.0 * math.sqrt(lam_plus * lam_minus) * math.sinh(u)
        if d <= 0.0:
            return float("inf")
    if u < 1e-4:
        numer = 2.0 * u**3 / 3.0 + 2.0 * u**5 / 15.0 + 4.0 * u**7 / 315.0
        return 4.0 * numer / d**3
    return 4.0 * (0.5 * math.sinh(2.0 * u) - u) / d**3


class ChainCheck(NamedTuple):
    phi: float
    x_kernel: float
    x_log: float
    ok: bool


def phi_chain_check(a: float, eps: float, x: float) -> ChainCheck:
    """Check the chain Phi >= x L(a, eps) >= x log(a/eps) for 0 < eps < a <= 1.

    The hypothesis gate is mandatory: the chain fails outside it (for example
    a = 10, eps = 0.01 breaks L(a, eps) >= log(a/eps)).
    """
    if not 0.0 < eps < a <= 1.0:
        raise DomainError(f"phi_chain_check requires 0 < eps < a <= 1, got ({a}, {eps})")
    _check_domain(a, eps, x)
    val = phi(a, eps, x)
    x_kernel = x * log_mean_kernel(a, eps)
    x_log = x * math.log(a / eps)
    ok = (val >= x_kernel - 1e-12) and (x_kernel >= x_log - 1e-12)
    return ChainCheck(phi=val, x_kernel=x_kernel, x_log=x_log, ok=ok)


def binary_entropy(q: float) -> float:
    """h(q) = -q log q - (1-q) log(1-q), in nats."""
    return -(_xlogx(q) + _xlogx(1.0 - q))
