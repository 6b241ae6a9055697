"""Hermitian matrix utilities: validation, block decomposition, pinching,
relative entropy, and seeded random state generation.

All matrices are dense complex numpy arrays.  Entropies are in nats.
Eigenvalues below ``SUPPORT_TOL * (1 + scale)`` are treated as zero, with
the convention ``0 log 0 = 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError, ValidationError

HERM_TOL = 1e-12
PSD_TOL = 1e-12
TRACE_TOL = 1e-12
SUPPORT_TOL = 1e-12
SUPPORT_MASS_TOL = 1e-10
RECON_TOL = 1e-10


def _as_complex(m) -> np.ndarray:
    return np.asarray(m, dtype=complex)


def validate_hermitian(h, name: str = "matrix") -> np.ndarray:
    """Check that ``h`` is square, finite, and self-adjoint within tolerance."""
    h = _as_complex(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValidationError(f"{name} has non-finite entries")
    scale = 1.0 + np.max(np.abs(h)) if h.size else 1.0
    defect = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if defect > HERM_TOL * scale:
        raise ValidationError(
            f"{name} is not Hermitian: defect {defect:.3e} exceeds tolerance"
        )
    return h


def validate_density(rho, name: str = "rho") -> np.ndarray:
    """Check that ``rho`` is a density matrix (Hermitian, PSD, unit trace)."""
    rho = validate_hermitian(rho, name)
    w = np.linalg.eigvalsh(rho)
    if w[0] < -PSD_TOL:
        raise ValidationError(
            f"{name} is not positive semidefinite: lambda_min = {w[0]:.3e}"
        )
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} has trace {tr!r}, expected 1")
    return rho


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(h, name: str = "matrix") -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, validated on input and output."""
    h = validate_hermitian(h, name)
    w, v = np.linalg.eigh(h)
    dec = SpectralDecomposition(eigenvalues=w, eigenvectors=v)
    hnorm = np.linalg.norm(h)
    recon = np.linalg.norm(dec.reconstruct() - h)
    ortho = np.linalg.norm(v.conj().T @ v - np.eye(h.shape[0]))
    if recon > RECON_TOL * (1.0 + hnorm) or ortho > RECON_TOL:
        raise ValidationError(
            f"eigendecomposition of {name} failed self-check "
            f"(recon {recon:.3e}, ortho {ortho:.3e})"
        )
    return dec


@dataclass(frozen=True)
class BlockState:
    """A density matrix with a designated P (+) Q split.

    ``a`` is the dim_p x dim_p leading block, ``c`` the dim_q x dim_q
    trailing block, and ``b`` the dim_p x dim_q coherence block.
    """

    dim_p: int
    dim_q: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def to_matrix(self) -> np.ndarray:
        """Reassemble the full density matrix [[A, B], [B*, C]]."""
        top = np.hstack([self.a, self.b])
        bot = np.hstack([self.b.conj().T, self.c])
        return np.vstack([top, bot])

    @property
    def dim(self) -> int:
        return self.dim_p + self.dim_q

    def off_diagonal(self) -> np.ndarray:
        """The direction Y = rho - pinch(rho), i.e. the off-diagonal part."""
        y = np.zeros((self.dim, self.dim), dtype=complex)
        y[: self.dim_p, self.dim_p :] = self.b
        y[self.dim_p :, : self.dim_p] = self.b.conj().T
        return y


def block_decompose(rho, dim_p: int) -> BlockState:
    """Split a density matrix into its A, B, C blocks for a leading P of size dim_p."""
    rho = validate_density(rho)
    d = rho.shape[0]
    if not 1 <= dim_p < d:
        raise DomainError(f"dim_p must be in [1, {d - 1}], got {dim_p}")
    return BlockState(
        dim_p=dim_p,
        dim_q=d - dim_p,
        a=rho[:dim_p, :dim_p].copy(),
        b=rho[:dim_p, dim_p:].copy(),
        c=rho[dim_p:, dim_p:].copy(),
    )


def pinch(state: BlockState) -> np.ndarray:
    """Block-diagonal pinching A (+) C of the state."""
    m = np.zeros((state.dim, state.dim), dtype=complex)
    m[: state.dim_p, : state.dim_p] = state.a
    m[state.dim_p :, state.dim_p :] = state.c
    return m


def _entropy_terms(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Tr[rho (log rho - log sigma)] for PSD rho, sigma (not necessarily trace 1).

    Returns +inf when the support of rho is not contained in the support of
    sigma (sigma-eigenvalue below SUPPORT_TOL carrying rho-mass above
    SUPPORT_MASS_TOL).
    """
    wr, vr = np.linalg.eigh(rho)
    ws, vs = np.linalg.eigh(sigma)
    scale_r = 1.0 + max(abs(wr[0]), abs(wr[-1]))
    # Tr[rho log rho]
    pos = wr > SUPPORT_TOL * scale_r
    s_rho = float(np.sum(wr[pos] * np.log(wr[pos])))
    # Tr[rho log sigma] via the eigenbasis of sigma
    masses = np.real(np.einsum("ij,jk,ki->i", vs.conj().T, rho, vs))
    cross = 0.0
    for lam, mass in zip(ws, masses):
        if lam <= SUPPORT_TOL:
            if mass > SUPPORT_MASS_TOL:
                return float("inf")
            continue
        cross += mass * np.log(lam)
    return s_rho - cross


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy D(rho || sigma) in nats.

    Returns +inf when support(rho) is not contained in support(sigma).
    """
    rho = validate_density(rho, "rho")
    sigma = validate_density(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise DomainError(
            f"dimension mismatch: {rho.shape[0]} vs {sigma.shape[0]}"
        )
    return _entropy_terms(rho, sigma)


def coherence_entropy(state: BlockState) -> float:
    """D(rho || pinch(rho)), the relative entropy of coherence of the split."""
    return _entropy_terms(state.to_matrix(), pinch(state))


def pythagorean_residual(state: BlockState, sigma) -> float:
    """Residual D(rho||sigma) - D(rho||Pi rho) - D(Pi rho||sigma).

    ``sigma`` must be block-diagonal in the same P (+) Q split.  The residual
    vanishes identically; it is returned (rather than asserted) so callers can
    track numerical error.  NaN when any of the three entropies is infinite.
    """
    sigma = validate_density(sigma, "sigma")
    if sigma.shape[0] != state.dim:
        raise DomainError("sigma dimension does not match the state")
    off = sigma[: state.dim_p, state.dim_p :]
    if np.linalg.norm(off) > 1e-12:
        raise DomainError("sigma is not block-diagonal in the P (+) Q split")
    rho = state.to_matrix()
    m = pinch(state)
    d_rs = _entropy_terms(rho, sigma)
    d_rm = _entropy_terms(rho, m)
    d_ms = _entropy_terms(m, sigma)
    if not (np.isfinite(d_rs) and np.isfinite(d_rm) and np.isfinite(d_ms)):
        return float("nan")
    return d_rs - d_rm - d_ms


def _ginibre_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _assemble(a, b, c) -> np.ndarray:
    top = np.hstack([a, b])
    bot = np.hstack([b.conj().T, c])
    return np.vstack([top, bot])


def random_block_state(
    dim_p: int,
    dim_q: int,
    seed: int,
    ensemble: str = "ginibre",
    a0: float | None = None,
    eps_q: float | None = None,
) -> BlockState:
    """Seeded random BlockState.

    ``ensemble="ginibre"`` draws G with iid standard complex Gaussian entries
    and returns G G*/Tr(G G*).  ``ensemble="boundary"`` additionally rescales
    the Q-block to trace ``eps_q``, mixes the P-block toward the identity
    until lambda_min(A) >= ``a0``, and then rescales B to the largest scale
    keeping the assembled state positive semidefinite.
    """
    if dim_p < 1 or dim_q < 1:
        raise DomainError("dimensions must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), dim_p, dim_q]))
    rho = _ginibre_density(rng, dim_p + dim_q)
    if ensemble == "ginibre":
        return block_decompose(rho, dim_p)
    if ensemble != "boundary":
        raise DomainError(f"unknown ensemble {ensemble!r}")
    if a0 is None or eps_q is None:
        raise DomainError("boundary ensemble requires a0 and eps_q")
    if a0 < 0 or eps_q <= 0 or dim_p * a0 + eps_q > 1.0:
        raise InfeasibleError(
            f"boundary ensemble needs dim_p*a0 + eps_q <= 1, "
            f"got {dim_p * a0 + eps_q}"
        )
    s = block_decompose(rho, dim_p)
    c = s.c * (eps_q / np.trace(s.c).real)
    trace_a = 1.0 - eps_q
    a_raw = s.a * (trace_a / np.trace(s.a).real)
    a_mix = (trace_a / dim_p) * np.eye(dim_p)
    # lambda_min((1-t) a_raw + t a_mix) is concave in t and >= a0 at t = 1,
    # so the feasible set is an interval ending at 1: bisect its left edge.
    def lam_min(t):
        return np.linalg.eigvalsh((1 - t) * a_raw + t * a_mix)[0]

    if lam_min(0.0) >= a0:
        a = a_raw
    else:
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if lam_min(mid) >= a0:
                hi = mid
            else:
                lo = mid
        a = (1 - hi) * a_raw + hi * a_mix
    # largest B scale keeping the assembled state PSD
    b_raw = s.b
    if np.linalg.norm(b_raw) < 1e-14:
        b_raw = (
            rng.standard_normal((dim_p, dim_q))
            + 1j * rng.standard_normal((dim_p, dim_q))
        )
    b_unit = b_raw / np.linalg.norm(b_raw)

    def psd_at(scale):
        return np.linalg.eigvalsh(_assemble(a, scale * b_unit, c))[0] >= 0.0

    hi = 1.0
    while psd_at(hi) and hi < 1e6:
        hi *= 2.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if psd_at(mid):
            lo = mid
        else:
            hi = mid
    return BlockState(dim_p=dim_p, dim_q=dim_q, a=a, b=lo * b_unit, c=c)


def two_level_pure(q: float) -> BlockState:
    """The pure state rho_q = [[1-q, sqrt(q(1-q))], [sqrt(q(1-q)), q]]."""
    if not 0.0 < q < 0.5:
        raise DomainError(f"q must be in (0, 0.5), got {q}")
    b = np.sqrt(q * (1.0 - q))
    return BlockState(
        dim_p=1,
        dim_q=1,
        a=np.array([[1.0 - q]], dtype=complex),
        b=np.array([[b]], dtype=complex),
        c=np.array([[q]], dtype=complex),
    )


def write_state_json(path, state: BlockState) -> None:
    """Serialize a BlockState to the JSON state-file format."""
    rho = state.to_matrix()
    matrix = [[[z.real, z.imag] for z in row] for row in rho]
    payload = {"dim_p": state.dim_p, "dim_q": state.dim_q, "matrix": matrix}
    with open(path, "w") as fh:
        json.dump(payload, fh)


def read_state_json(path) -> BlockState:
    """Load and validate a BlockState from the JSON state-file format."""
    with open(path) as fh:
        payload = json.load(fh)
    try:
        dim_p = int(payload["dim_p"])
        dim_q = int(payload["dim_q"])
        matrix = payload["matrix"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed state file: {exc}") from exc
    d = dim_p + dim_q
    if len(matrix) != d or any(len(row) != d for row in matrix):
        raise ValidationError(
            f"matrix must be {d}x{d} for dim_p={dim_p}, dim_q={dim_q}"
        )
    rho = np.array(
        [[complex(entry[0], entry[1]) for entry in row] for row in matrix]
    )
    validate_density(rho, "state file matrix")
    return block_decompose(rho, dim_p)
