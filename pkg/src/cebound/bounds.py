"""Entropy lower bounds for D(rho || pinch(rho)) and the two witness families.

Bounds collected per state: the BKM operator bound Tr[B* Omega^{-1}(B)], its
boundary logarithmic specialization ||B||_F^2 log(a0/eps_Q) (applicable when
eps_Q <= a0/2), Pinsker 2||B||_1^2, and the fidelity bound -2 log F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bkm import bkm_form, log_mean_kernel
from .errors import DomainError, InfeasibleError, PositivityError
from .linalg import BlockState, coherence_entropy, pinch, two_level_pure
from .twolevel import binary_entropy

MARGIN_TOL = 1e-9
REG_DELTA = 1e-10


def _regularized(state: BlockState) -> BlockState:
    d = state.dim
    eye_scale = REG_DELTA / d
    return BlockState(
        dim_p=state.dim_p,
        dim_q=state.dim_q,
        a=(1.0 - REG_DELTA) * state.a + eye_scale * np.eye(state.dim_p),
        b=(1.0 - REG_DELTA) * state.b,
        c=(1.0 - REG_DELTA) * state.c + eye_scale * np.eye(state.dim_q),
    )


def _blocks_positive(state: BlockState) -> bool:
    return (
        np.linalg.eigvalsh(state.a)[0] > 1e-12
        and np.linalg.eigvalsh(state.c)[0] > 1e-12
    )


def operator_bound(state: BlockState, regularize: bool = False) -> float:
    """The BKM operator lower bound Tr[B* Omega_{A,C}^{-1}(B)].

    Singular A or C raises unless ``regularize`` is set, in which case the
    bound is computed on (1-delta) rho + (delta/d) I with delta = 1e-10.
    """
    if not _blocks_positive(state):
        if not regularize:
            raise PositivityError("operator_bound requires A > 0 and C > 0")
        state = _regularized(state)
    return bkm_form(state.a, state.c, state.b)


def log_boundary_bound(state: BlockState) -> float | None:
    """||B||_F^2 log(lambda_min(A)/Tr C), or None when the hypotheses
    lambda_min(A) > 0, Tr C > 0, Tr C <= lambda_min(A)/2 fail."""
    a0 = float(np.linalg.eigvalsh(state.a)[0])
    eps_q = float(np.trace(state.c).real)
    if a0 <= 0.0 or eps_q <= 0.0 or eps_q > a0 / 2.0:
        return None
    frob_sq = float(np.sum(np.abs(state.b) ** 2))
    return frob_sq * math.log(a0 / eps_q)


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)))


def pinsker_bound(state: BlockState) -> float:
    """Pinsker applied to sigma = pinch(rho): D >= (1/2)||rho - Pi rho||_1^2 = 2||B||_1^2."""
    return 2.0 * trace_norm(state.b) ** 2


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(sigma) rho sqrt(sigma))."""
    rho = np.asarray(rho, dtype=complex)
    ws, vs = np.linalg.eigh(np.asarray(sigma, dtype=complex))
    ws = np.clip(ws, 0.0, None)
    sqrt_sigma = (vs * np.sqrt(ws)) @ vs.conj().T
    inner = sqrt_sigma @ rho @ sqrt_sigma
    w = np.linalg.eigvalsh(inner)
    if w[0] < -1e-14:
        raise DomainError(f"fidelity inner matrix not PSD: lambda_min = {w[0]:.3e}")
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def fidelity_bound(state: BlockState) -> float:
    """-2 log F(rho, pinch(rho))."""
    f = fidelity(state.to_matrix(), pinch(state))
    return -2.0 * math.log(min(f, 1.0)) if f < 1.0 else 0.0


@dataclass
class BoundReport:
    """D(rho || pinch(rho)) with every computed lower bound and margin."""

    entropy: float
    bkm_bound: float
    log_bound: float | None
    pinsker_bound: float
    fidelity_bound: float
    coarse_applicable: bool
    margins: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    regularized: bool = False

    def to_dict(self) -> dict:
        return {
            "entropy": self.entropy,
            "bkm_bound": self.bkm_bound,
            "log_bound": self.log_bound,
            "pinsker_bound": self.pinsker_bound,
            "fidelity_bound": self.fidelity_bound,
            "coarse_applicable": self.coarse_applicable,
            "margins": self.margins,
            "params": self.params,
            "regularized": self.regularized,
        }

    def worst_margin(self) -> float:
        return min(self.margins.values())


def bound_report(state: BlockState, regularize: bool = False) -> BoundReport:
    """Aggregate all lower bounds for one state, with margins entropy - bound."""
    entropy = coherence_entropy(state)
    used_reg = regularize and not _blocks_positive(state)
    bkm = operator_bound(state, regularize=regularize)
    log_b = log_boundary_bound(state)
    pinsker = pinsker_bound(state)
    fid = fidelity_bound(state)
    margins = {
        "bkm": entropy - bkm,
        "pinsker": entropy - pinsker,
        "fidelity": entropy - fid,
    }
    if log_b is not None:
        margins["log"] = entropy - log_b
        margins["log_vs_bkm"] = bkm - log_b
    a0 = float(np.linalg.eigvalsh(state.a)[0])
    eps_q = float(np.trace(state.c).real)
    frob_sq = float(np.sum(np.abs(state.b) ** 2))
    b1 = trace_norm(state.b)
    params = {
        "a0": a0,
        "eps_q": eps_q,
        "frob_sq": frob_sq,
        "trace_norm_b": b1,
        # Pinsker-domination diagnostic: log bound wins when the first
        # quantity exceeds the second (eps_q <= a0 e^{-2 rank B} suffices)
        "log_ratio": math.log(a0 / eps_q) if a0 > 0 and eps_q > 0 else None,
        "pinsker_ratio": 2.0 * b1**2 / frob_sq if frob_sq > 0 else None,
    }
    return BoundReport(
        entropy=entropy,
        bkm_bound=bkm,
        log_bound=log_b,
        pinsker_bound=pinsker,
        fidelity_bound=fid,
        coarse_applicable=log_b is not None,
        margins=margins,
        params=params,
        regularized=used_reg,
    )


@dataclass(frozen=True)
class SharpnessPoint:
    state: BlockState
    entropy: float
    bkm: float
    ratio_bkm: float
    ratio_log: float


def sharpness_family(q: float) -> SharpnessPoint:
    """The pure two-level family rho_q where both bounds become tight as q -> 0.

    entropy = h(q), bkm = q(1-q) L(1-q, q); both ratios tend to 1.
    """
    state = two_level_pure(q)
    entropy = binary_entropy(q)
    bkm = q * (1.0 - q) * log_mean_kernel(1.0 - q, q)
    log_scalar = q * (1.0 - q) * math.log((1.0 - q) / q)
    return SharpnessPoint(
        state=state,
        entropy=entropy,
        bkm=bkm,
        ratio_bkm=entropy / bkm,
        ratio_log=entropy / log_scalar,
    )


@dataclass(frozen=True)
class SeparationPoint:
    state: BlockState
    ratio: float


def separation_family(k: float, eps: float) -> SeparationPoint:
    """Witness state whose BKM bound exceeds the scalar log bound by factor ~k.

    With eta = 1/(k+1): A = diag(a1, m), C = (eps), B = (sqrt(a1 eps/2), 0)^T
    where m = eps^(1-eta) and a1 = 1 - m - eps.  The ratio
    bkm_form / (||B||_F^2 log(lambda_min(A)/Tr C)) equals
    L(a1, eps)/log(m/eps) and tends to k+1 as eps -> 0.
    """
    if k <= 1.0:
        raise DomainError(f"k must exceed 1, got {k}")
    if not 0.0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 0.25), got {eps}")
    eta = 1.0 / (k + 1.0)
    m = eps ** (1.0 - eta)
    a1 = 1.0 - m - eps
    if a1 <= m:
        raise InfeasibleError(
            f"eps = {eps} too large: a1 = {a1} must exceed m = {m}"
        )
    state = BlockState(
        dim_p=2,
        dim_q=1,
        a=np.diag([a1, m]).astype(complex),
        b=np.array([[math.sqrt(a1 * eps / 2.0)], [0.0]], dtype=complex),
        c=np.array([[eps]], dtype=complex),
    )
    bkm = bkm_form(state.a, state.c, state.b)
    frob_sq = a1 * eps / 2.0
    ratio = bkm / (frob_sq * math.log(m / eps))
    return SeparationPoint(state=state, ratio=ratio)


SEPARATION_GRID = [10.0**-e for e in range(2, 13)]


def find_separation_eps(k: float) -> float:
    """Largest eps on the decade grid 1e-2..1e-12 whose separation ratio >= k."""
    tried = []
    for eps in SEPARATION_GRID:
        try:
            point = separation_family(k, eps)
        except InfeasibleError:
            tried.append((eps, None))
            continue
        tried.append((eps, point.ratio))
        if point.ratio >= k:
            return eps
    table = ", ".join(
        f"eps={eps:g}: ratio={ratio if ratio is None else round(ratio, 4)}"
        for eps, ratio in tried
    )
    raise InfeasibleError(f"no eps on the grid reaches ratio {k}; tried {table}")
