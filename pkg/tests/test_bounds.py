"""Entropy lower bounds, the bound report, and the two witness families."""

import math

import numpy as np
import pytest

from cebound import (
    BlockState,
    DomainError,
    InfeasibleError,
    PositivityError,
    binary_entropy,
    bound_report,
    coherence_entropy,
    fidelity,
    fidelity_bound,
    find_separation_eps,
    log_boundary_bound,
    operator_bound,
    pinsker_bound,
    random_block_state,
    separation_family,
    sharpness_family,
    trace_norm,
    two_level_pure,
)
from cebound.bkm import log_mean_kernel
from cebound.linalg import pinch

from conftest import random_states


def flat_state(seed=1):
    s = random_block_state(2, 2, seed)
    return BlockState(dim_p=2, dim_q=2, a=s.a, b=np.zeros_like(s.b), c=s.c)


# ---------------------------------------------------------- operator bound

def test_operator_bound_zero_b():
    s = flat_state()
    assert operator_bound(s) == 0.0
    assert coherence_entropy(s) == pytest.approx(0.0, abs=1e-12)


def test_operator_bound_two_level():
    s = two_level_pure(0.25)
    bound = operator_bound(s)
    assert bound == pytest.approx(0.1875 * log_mean_kernel(0.75, 0.25), rel=1e-14)
    assert binary_entropy(0.25) - bound > 0.0


def test_operator_bound_boundary_ensemble_margin():
    s = random_block_state(2, 2, 55, "boundary", a0=0.3, eps_q=0.05)
    assert coherence_entropy(s) - operator_bound(s) >= -1e-9


def test_operator_bound_singular_requires_regularization():
    s = two_level_pure(0.25)
    singular = BlockState(
        dim_p=1,
        dim_q=1,
        a=np.array([[1.0]], dtype=complex),
        b=np.zeros((1, 1), dtype=complex),
        c=np.array([[0.0]], dtype=complex),
    )
    with pytest.raises(PositivityError):
        operator_bound(singular)
    assert operator_bound(singular, regularize=True) >= 0.0
    assert operator_bound(s) == operator_bound(s, regularize=True)


# --------------------------------------------------------------- log bound

def test_log_bound_gate():
    # Tr C too large relative to lambda_min(A): bound absent
    s = random_block_state(2, 2, 56)
    if np.trace(s.c).real > np.linalg.eigvalsh(s.a)[0] / 2:
        assert log_boundary_bound(s) is None


def test_log_bound_constructed_value():
    s = BlockState(
        dim_p=2,
        dim_q=1,
        a=0.45 * np.eye(2, dtype=complex),
        b=np.array([[0.1], [0.0]], dtype=complex),
        c=np.array([[0.05]], dtype=complex),
    )
    assert log_boundary_bound(s) == pytest.approx(0.01 * math.log(9.0), abs=1e-14)
    assert log_boundary_bound(s) == pytest.approx(0.021972245773362195, abs=1e-14)


def test_log_bound_two_level():
    s = two_level_pure(0.1)
    val = log_boundary_bound(s)
    assert val == pytest.approx(0.09 * math.log(9.0), abs=1e-14)
    assert binary_entropy(0.1) >= val


def test_log_bound_chain_below_operator_bound():
    for seed in range(10):
        s = random_block_state(2, 2, 700 + seed, "boundary", a0=0.3, eps_q=0.05)
        lb = log_boundary_bound(s)
        assert lb is not None
        assert operator_bound(s) >= lb - 1e-9
        assert coherence_entropy(s) >= lb - 1e-9


# ------------------------------------------------------------ Pinsker bound

def test_pinsker_zero_b():
    assert pinsker_bound(flat_state()) == 0.0


def test_pinsker_two_level():
    s = two_level_pure(0.25)
    assert pinsker_bound(s) == pytest.approx(2.0 * 0.1875, abs=1e-14)
    assert binary_entropy(0.25) >= 0.375


def test_pinsker_rank_two_diagonal_b():
    s1, s2 = 0.05, 0.03
    s = BlockState(
        dim_p=2,
        dim_q=2,
        a=0.3 * np.eye(2, dtype=complex),
        b=np.diag([s1, s2]).astype(complex),
        c=0.2 * np.eye(2, dtype=complex),
    )
    assert pinsker_bound(s) == pytest.approx(2.0 * (s1 + s2) ** 2, abs=1e-14)


def test_trace_norm_identity():
    for s in random_states(20, (1, 2, 3), 660):
        rho = s.to_matrix()
        assert trace_norm(rho - pinch(s)) == pytest.approx(
            2.0 * trace_norm(s.b), abs=1e-10
        )


# ----------------------------------------------------------- fidelity bound

def test_fidelity_bound_block_diagonal():
    assert fidelity_bound(flat_state()) == pytest.approx(0.0, abs=1e-9)


def test_fidelity_two_level_closed_form():
    # pure rho: F(rho, sigma) = sqrt(<psi| sigma |psi>) = sqrt((1-q)^2 + q^2)
    q = 0.25
    s = two_level_pure(q)
    f = fidelity(s.to_matrix(), pinch(s))
    # sqrt at the zero eigenvalue of a pure state amplifies roundoff to ~1e-8
    assert f == pytest.approx(math.sqrt((1 - q) ** 2 + q**2), abs=1e-8)
    assert fidelity_bound(s) == pytest.approx(-math.log((1 - q) ** 2 + q**2), abs=1e-7)
    assert fidelity_bound(s) <= binary_entropy(q) + 1e-9


def test_fidelity_bound_margin_random():
    for s in random_states(20, (2, 3), 550):
        assert coherence_entropy(s) - fidelity_bound(s) >= -1e-9


# ------------------------------------------------------------- bound report

def test_report_block_diagonal_all_zero():
    r = bound_report(flat_state())
    assert r.entropy == pytest.approx(0.0, abs=1e-12)
    assert r.bkm_bound == 0.0
    assert r.pinsker_bound == 0.0
    assert r.fidelity_bound == pytest.approx(0.0, abs=1e-9)


def test_report_two_level_values():
    r = bound_report(two_level_pure(0.25))
    assert r.bkm_bound == pytest.approx(0.412, abs=5e-4)
    assert r.bkm_bound == pytest.approx(
        0.25 * 0.75 * log_mean_kernel(0.75, 0.25), rel=1e-14
    )
    assert r.entropy == pytest.approx(binary_entropy(0.25), abs=1e-12)
    assert not r.regularized
    assert r.worst_margin() >= -1e-9


def test_report_margins_random_sweep():
    states = random_states(30, (1, 2, 3, 4), 440)
    states += [
        random_block_state(dp, dq, 300 + dp * 10 + dq, "boundary",
                           a0=0.5 / dp, eps_q=0.1 / dp)
        for dp in (1, 2, 3)
        for dq in (1, 2, 3)
    ]
    for s in states:
        r = bound_report(s)
        assert r.worst_margin() >= -1e-9
        if r.log_bound is not None:
            assert r.bkm_bound >= r.log_bound - 1e-9


def test_report_pinsker_domination_diagnostic():
    # eps_q <= a0 exp(-2 rank B) makes the log bound dominate Pinsker
    rank = 1
    a0 = 0.4
    eps_q = a0 * math.exp(-2 * rank) / 2
    s = BlockState(
        dim_p=2,
        dim_q=1,
        a=np.diag([a0, 1 - a0 - eps_q]).astype(complex),
        b=np.array([[0.0], [math.sqrt(a0 * eps_q / 4)]], dtype=complex),
        c=np.array([[eps_q]], dtype=complex),
    )
    r = bound_report(s)
    assert r.coarse_applicable
    assert r.log_bound >= r.pinsker_bound
    assert r.params["log_ratio"] >= r.params["pinsker_ratio"]


def test_report_to_dict_fields():
    d = bound_report(two_level_pure(0.2)).to_dict()
    for key in (
        "entropy", "bkm_bound", "log_bound", "pinsker_bound",
        "fidelity_bound", "margins", "params", "regularized",
    ):
        assert key in d


# --------------------------------------------------------- sharpness family

def test_sharpness_point_values():
    pt = sharpness_family(0.25)
    assert pt.entropy == pytest.approx(binary_entropy(0.25), abs=1e-14)
    assert pt.bkm == pytest.approx(0.1875 * math.log(3.0) / 0.5, rel=1e-14)
    assert pt.ratio_bkm > 1.0


def test_sharpness_asymptotic():
    pt = sharpness_family(1e-6)
    assert abs(pt.ratio_bkm - 1.0) <= 0.1
    assert abs(pt.ratio_log - 1.0) <= 0.1


def test_sharpness_state_is_pure():
    pt = sharpness_family(0.1)
    assert np.linalg.eigvalsh(pt.state.to_matrix())[-1] == pytest.approx(
        1.0, abs=1e-12
    )


def test_sharpness_ratios_decreasing():
    ratios = [sharpness_family(10.0**-k).ratio_bkm for k in range(2, 7)]
    assert ratios == sorted(ratios, reverse=True)


def test_sharpness_rejects_out_of_range():
    with pytest.raises(DomainError):
        sharpness_family(0.5)
    with pytest.raises(DomainError):
        sharpness_family(0.0)


# -------------------------------------------------------- separation family

def test_separation_k4_small_eps():
    pt = separation_family(4.0, 1e-6)
    assert pt.ratio >= 4.0
    assert pt.ratio == pytest.approx(5.0, abs=0.1)
    assert np.linalg.eigvalsh(pt.state.to_matrix())[0] >= -1e-12


def test_separation_ratio_formula():
    from cebound.bkm import bkm_form

    for k, eps in ((2.0, 1e-4), (4.0, 1e-6), (5.0, 1e-8)):
        pt = separation_family(k, eps)
        eta = 1.0 / (k + 1.0)
        m = eps ** (1.0 - eta)
        a1 = 1.0 - m - eps
        explicit = log_mean_kernel(a1, eps) / math.log(m / eps)
        assert pt.ratio == pytest.approx(explicit, abs=1e-10)
        # single-channel structure: bkm form concentrates on (a1, eps)
        frob_sq = a1 * eps / 2.0
        assert bkm_form(pt.state.a, pt.state.c, pt.state.b) == pytest.approx(
            frob_sq * log_mean_kernel(a1, eps), rel=1e-12
        )


def test_separation_ratio_converges_to_k_plus_one():
    # ratio = L(a1, eps)/(eta ln(1/eps)) stays above K and tends to K + 1
    # from above as eps -> 0
    k = 4.0
    ratios = [separation_family(k, eps).ratio for eps in (1e-3, 1e-4, 1e-5, 1e-6)]
    assert all(r >= k + 1.0 for r in ratios)
    gaps = [r - (k + 1.0) for r in ratios]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] <= 1e-4


def test_separation_rejects_bad_parameters():
    with pytest.raises(DomainError):
        separation_family(1.0, 1e-4)
    with pytest.raises(DomainError):
        separation_family(4.0, 0.3)
    with pytest.raises(InfeasibleError):
        separation_family(1.2, 0.24)  # m close to 1 makes a1 <= m


def test_find_separation_eps_grid():
    for k in (2.0, 3.0, 4.0, 5.0):
        eps = find_separation_eps(k)
        assert separation_family(k, eps).ratio >= k
    assert find_separation_eps(2.0) >= 1e-6
