"""The BKM (Bogoliubov-Kubo-Mori) kernel and quadratic form.

The kernel of the form is the reciprocal logarithmic mean
L(a, c) = log(a/c)/(a - c).  The quadratic form is evaluated spectrally by
default; an adaptive Gauss-Legendre quadrature of the resolvent integral is
kept as an independent oracle.  The module also provides the Petz monotone
metrics for four named operator-monotone functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, PositivityError
from .linalg import BlockState, validate_hermitian

POSITIVITY_FLOOR = 1e-12
_SERIES_THRESHOLD = 1e-8


def log_mean_kernel(a: float, c: float) -> float:
    """L(a, c) = log(a/c)/(a - c), with L(a, a) = 1/a.

    Near a = c the direct quotient cancels; there we use the even series
    L = (2/(a+c)) (1 + z^2/3 + z^4/5 + z^6/7) with z = (a-c)/(a+c).
    """
    if a <= 0.0 or c <= 0.0:
        raise DomainError(f"log_mean_kernel needs positive arguments, got ({a}, {c})")
    hi, lo = (a, c) if a >= c else (c, a)  # exact symmetry in (a, c)
    s = hi + lo
    diff = hi - lo
    if diff <= _SERIES_THRESHOLD * s:
        z2 = (diff / s) ** 2
        return (2.0 / s) * (1.0 + z2 / 3.0 + z2**2 / 5.0 + z2**3 / 7.0)
    return float(np.log(hi / lo) / diff)


def _kernel_matrix(avals: np.ndarray, cvals: np.ndarray) -> np.ndarray:
    return np.array(
        [[log_mean_kernel(a, c) for c in cvals] for a in avals]
    )


def _eigh_positive(h, name: str):
    h = validate_hermitian(h, name)
    w, v = np.linalg.eigh(h)
    if w[0] <= POSITIVITY_FLOOR:
        raise PositivityError(
            f"{name} must be positive definite, lambda_min = {w[0]:.3e}"
        )
    return w, v


def bkm_apply(a, c, b) -> np.ndarray:
    """Omega^{-1}(B) = int_0^inf (A + r)^{-1} B (C + r)^{-1} dr, spectrally."""
    wa, va = _eigh_positive(a, "A")
    wc, vc = _eigh_positive(c, "C")
    b = np.asarray(b, dtype=complex)
    bt = va.conj().T @ b @ vc
    out = bt * _kernel_matrix(wa, wc)
    return va @ out @ vc.conj().T


def bkm_form(a, c, b) -> float:
    """Tr[B* Omega^{-1}(B)] = sum_{ab} |B~_{ab}|^2 L(a_a, c_b) >= 0."""
    wa, va = _eigh_positive(a, "A")
    wc, vc = _eigh_positive(c, "C")
    b = np.asarray(b, dtype=complex)
    bt = va.conj().T @ b @ vc
    return float(np.sum(np.abs(bt) ** 2 * _kernel_matrix(wa, wc)))


@dataclass(frozen=True)
class ChannelWeights:
    """Coherence channel weights w_{ab} = |<e_a, B f_b>|^2 / ||B||_F^2."""

    weights: np.ndarray
    a_eigen: np.ndarray
    c_eigen: np.ndarray
    frob_sq: float

    def reconstruct_form(self) -> float:
        """frob_sq * sum w_{ab} L(a_a, c_b), the BKM form rebuilt from weights."""
        if self.frob_sq == 0.0:
            return 0.0
        kern = _kernel_matrix(self.a_eigen, self.c_eigen)
        return self.frob_sq * float(np.sum(self.weights * kern))


def channel_weights(a, c, b) -> ChannelWeights:
    """Spectral channel weights of the coherence block B against (A, C).

    B = 0 returns all-zero weights with frob_sq = 0 by convention.
    """
    wa, va = _eigh_positive(a, "A")
    wc, vc = _eigh_positive(c, "C")
    b = np.asarray(b, dtype=complex)
    frob_sq = float(np.sum(np.abs(b) ** 2))
    bt = va.conj().T @ b @ vc
    if frob_sq == 0.0:
        return ChannelWeights(
            weights=np.zeros(bt.shape), a_eigen=wa, c_eigen=wc, frob_sq=0.0
        )
    return ChannelWeights(
        weights=np.abs(bt) ** 2 / frob_sq, a_eigen=wa, c_eigen=wc, frob_sq=frob_sq
    )


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def bkm_quadrature(a, c, b, tol: float = 1e-10) -> float:
    """Quadrature oracle for Tr[B* Omega^{-1}(B)].

    Substitutes r = t/(1-t) and applies composite 16-point Gauss-Legendre on
    a dyadically refined partition of (0, 1) until two successive refinement
    levels agree to ``tol`` relative.
    """
    wa, _ = _eigh_positive(a, "A")
    wc, _ = _eigh_positive(c, "C")
    a = np.asarray(a, dtype=complex)
    c = np.asarray(c, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dp, dq = b.shape
    eye_p = np.eye(dp)
    eye_q = np.eye(dq)

    def integrand(t: float) -> float:
        r = t / (1.0 - t)
        inv_a = np.linalg.inv(a + r * eye_p)
        inv_c = np.linalg.inv(c + r * eye_q)
        val = np.trace(b.conj().T @ inv_a @ b @ inv_c).real
        return val / (1.0 - t) ** 2

    def composite(panels: int) -> float:
        edges = np.linspace(0.0, 1.0, panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
                total += weight * half * integrand(mid + half * node)
        return total

    prev = composite(1)
    for level in range(1, 25):
        cur = composite(2**level)
        if abs(cur - prev) < tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise NumericError("bkm_quadrature did not converge in 24 refinement levels")


def bkm_hessian(n, y) -> float:
    """H_N(Y, Y) = sum_{ij} |Y~_{ij}|^2 L(nu_i, nu_j) in the eigenbasis of N."""
    wn, vn = _eigh_positive(n, "N")
    y = validate_hermitian(y, "Y")
    yt = vn.conj().T @ y @ vn
    return float(np.sum(np.abs(yt) ** 2 * _kernel_matrix(wn, wn)))


def _midpoint_inputs(state: BlockState):
    m = np.zeros((state.dim, state.dim), dtype=complex)
    m[: state.dim_p, : state.dim_p] = state.a
    m[state.dim_p :, state.dim_p :] = state.c
    y = state.off_diagonal()
    wm = np.linalg.eigvalsh(m)
    if wm[0] <= POSITIVITY_FLOOR:
        raise PositivityError("pinched state M must be positive definite")
    for sign in (+1.0, -1.0):
        if np.linalg.eigvalsh(m + sign * y)[0] < -1e-12:
            raise DomainError("M +- Y must be positive semidefinite")
    return m, y


SYMMETRY_TOL = 1e-9


def midpoint_margin(state: BlockState, t_grid) -> np.ndarray:
    """Margins H_{M+tY}(Y,Y) - H_M(Y,Y) along the coherence direction.

    Also checks the block-sign symmetry H_{M+tY} = H_{M-tY} to SYMMETRY_TOL.
    """
    m, y = _midpoint_inputs(state)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0.0) or np.any(t_grid >= 1.0):
        raise DomainError("every t must lie in [0, 1)")
    base = bkm_hessian(m, y)
    margins = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        plus = bkm_hessian(m + t * y, y)
        minus = bkm_hessian(m - t * y, y)
        if abs(plus - minus) > SYMMETRY_TOL:
            raise NumericError(
                f"midpoint symmetry violated at t={t}: |H+ - H-| = {abs(plus - minus):.3e}"
            )
        margins[i] = plus - base
    return margins


def _f_bkm(x):
    x = np.asarray(x, dtype=float)
    near_one = np.abs(x - 1.0) < 1e-12
    safe = np.where(near_one, 2.0, x)
    return np.where(near_one, 1.0, (safe - 1.0) / np.log(safe))


PETZ_FUNCTIONS = {
    "bkm": _f_bkm,
    "arithmetic": lambda x: (1.0 + np.asarray(x, dtype=float)) / 2.0,
    "geometric": lambda x: np.sqrt(np.asarray(x, dtype=float)),
    "harmonic": lambda x: 2.0 * np.asarray(x, dtype=float) / (1.0 + x),
}


def _petz_kernel(nu: np.ndarray, tag: str) -> np.ndarray:
    if tag not in PETZ_FUNCTIONS:
        raise DomainError(f"unknown operator-monotone tag {tag!r}")
    if tag == "bkm":
        # series-stable reciprocal logarithmic mean, identical to the BKM kernel
        return _kernel_matrix(nu, nu)
    f = PETZ_FUNCTIONS[tag]
    ratio = nu[:, None] / nu[None, :]
    return 1.0 / (nu[None, :] * np.asarray(f(ratio), dtype=float))


def petz_form(n, y, tag: str) -> float:
    """Petz monotone metric g^f_N(Y, Y) = sum_{ij} |Y~_{ij}|^2 / (nu_j f(nu_i/nu_j))."""
    wn, vn = _eigh_positive(n, "N")
    y = validate_hermitian(y, "Y")
    yt = vn.conj().T @ y @ vn
    return float(np.sum(np.abs(yt) ** 2 * _petz_kernel(wn, tag)))


def petz_midpoint_margin(state: BlockState, t_grid, tag: str) -> np.ndarray:
    """Margins g^f_{M+tY}(Y,Y) - g^f_M(Y,Y) for a named Petz metric."""
    m, y = _midpoint_inputs(state)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0.0) or np.any(t_grid >= 1.0):
        raise DomainError("every t must lie in [0, 1)")
    base = petz_form(m, y, tag)
    margins = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        plus = petz_form(m + t * y, y, tag)
        minus = petz_form(m - t * y, y, tag)
        if abs(plus - minus) > SYMMETRY_TOL:
            raise NumericError(
                f"Petz midpoint symmetry violated at t={t} for tag {tag!r}"
            )
        margins[i] = plus - base
    return margins
