"""KMS form, detailed balance, spectral reports, stationary channels."""

from __future__ import annotations

import numpy as np
import pytest

from dlgibbs.errors import (
    BadParams,
    NotDetailedBalanced,
    OverflowDetected,
    PositiveEigenvalue,
    SingularSigma,
)
from dlgibbs.hamiltonians import PAULI_X, PAULI_Z, LocalOperator
from dlgibbs.jumps import WeightProfile, build_coherent, build_jump
from dlgibbs.kms import (
    KmsForm,
    LindbladTerm,
    Superoperator,
    choi_matrix,
    coherent_form,
    cptp_check,
    db_residual,
    gibbs_state,
    kms_inner_product,
    lindblad_superoperator,
    spectral_report,
    stationary_channel,
    term_superoperator,
)


def _davies_qubit(beta: float = 1.0):
    """Single-qubit model: H = Z, coupling X, detailed-balance weights."""
    h = PAULI_Z.copy()
    w = WeightProfile(kind="davies_kms", beta=beta)
    jump = build_jump(PAULI_X, h, w)
    coh = build_coherent(jump, h, w)
    term = LindbladTerm(
        jumps=(LocalOperator(jump, (0,)),),
        coherent=LocalOperator(coh, (0,)) if np.abs(coh).max() > 1e-12 else None,
        support=(0,),
    )
    kms = KmsForm(gibbs_state(h, beta))
    return term, kms


def test_gibbs_state_qubit_weights():
    sigma = gibbs_state(PAULI_Z, 1.0)
    z = np.exp(-1.0) + np.exp(1.0)
    assert abs(sigma[0, 0] - np.exp(-1.0) / z) < 1e-12
    assert abs(sigma[1, 1] - np.exp(1.0) / z) < 1e-12
    assert abs(sigma[0, 0] - 0.11920292202211756) < 1e-12
    assert abs(np.trace(sigma) - 1.0) < 1e-12


def test_gibbs_state_guards():
    with pytest.raises(BadParams):
        gibbs_state(PAULI_Z, -0.5)
    with pytest.raises(OverflowDetected):
        gibbs_state(PAULI_Z, 41.0)


def test_kms_form_normalizes_and_validates():
    kms = KmsForm(np.diag([1.6, 0.4]))
    assert abs(np.trace(kms.sigma) - 1.0) < 1e-14
    assert abs(kms.sigma_min - 0.2) < 1e-14
    assert np.abs(kms.quarter @ kms.quarter - kms.sqrt).max() < 1e-12
    assert np.abs(kms.inv_quarter @ kms.quarter - np.eye(2)).max() < 1e-12
    with pytest.raises(SingularSigma):
        KmsForm(np.diag([1.0, 0.0]))


def test_kms_inner_product_example():
    kms = KmsForm(np.diag([0.8, 0.2]))
    val = kms_inner_product(PAULI_X, PAULI_X, kms)
    assert abs(val - 2.0 * np.sqrt(0.16)) < 1e-12
    assert abs(val - 0.8) < 1e-12


def test_kms_inner_product_is_positive_definite():
    rng = np.random.default_rng(2)
    kms = KmsForm(gibbs_state(PAULI_Z + 0.3 * PAULI_X, 0.7))
    for _ in range(5):
        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert kms_inner_product(x, x, kms).real > 0


def test_term_superoperator_matches_dense_action():
    term, _ = _davies_qubit()
    sup = term_superoperator(term, 1)
    rng = np.random.default_rng(6)
    l = term.jumps[0].op
    g = term.coherent.op if term.coherent is not None else np.zeros((2, 2))
    for _ in range(3):
        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        direct = (
            l.conj().T @ x @ l
            - 0.5 * (l.conj().T @ l @ x + x @ l.conj().T @ l)
            + 1j * (g @ x - x @ g)
        )
        assert np.abs(sup.apply(x) - direct).max() < 1e-12


def test_superoperator_is_unital():
    term, _ = _davies_qubit()
    sup = lindblad_superoperator([term], 1)
    assert np.abs(sup.apply(np.eye(2))).max() < 1e-12


def test_davies_qubit_detailed_balance_and_fixed_point():
    term, kms = _davies_qubit()
    sup = lindblad_superoperator([term], 1)
    assert db_residual(sup, kms) < 1e-12
    schro = sup.adjoint()
    assert np.abs(schro.apply(kms.sigma)).max() < 1e-12


def test_davies_qubit_spectrum_closed_form():
    # Rates a = e^{-1/2}, b = e^{1/2} give coherent-form eigenvalues
    # {0, 1 - k/2, -1 - k/2, -k} with k = e + 1/e.
    term, kms = _davies_qubit()
    sup = lindblad_superoperator([term], 1)
    rep = spectral_report(sup, kms)
    k = np.exp(1.0) + np.exp(-1.0)
    expected = np.sort(np.array([0.0, 1.0 - k / 2, -1.0 - k / 2, -k]))[::-1]
    assert np.abs(rep.eigenvalues - expected).max() < 1e-12
    assert abs(rep.gap - (k / 2 - 1.0)) < 1e-12
    assert rep.kernel_dim == 1
    assert rep.db_residual < 1e-12
    assert rep.hermiticity_residual < 1e-12
    assert rep.dl_residual_energy >= rep.gap - 1e-9


def test_coherent_form_conjugation_identity():
    term, kms = _davies_qubit()
    sup = lindblad_superoperator([term], 1)
    h = coherent_form(sup, kms)
    recon = kms.gamma_inv_half @ h.mat @ kms.gamma_half
    assert np.abs(recon - sup.mat).max() < 1e-12


def test_stationary_channel_structure():
    term, kms = _davies_qubit()
    sup = term_superoperator(term, 1)
    p = stationary_channel(sup, kms)
    assert np.abs(p.mat @ p.mat - p.mat).max() < 1e-10
    assert np.abs(p.apply(np.eye(2)) - np.eye(2)).max() < 1e-10
    hk = kms.gamma_half @ p.mat @ kms.gamma_inv_half
    assert np.abs(hk - hk.conj().T).max() < 1e-10
    schro = p.adjoint()
    assert np.abs(schro.apply(kms.sigma) - kms.sigma).max() < 1e-10
    rep = cptp_check(p)
    assert rep.cp and rep.tp


def test_stationary_channel_rejects_wrong_state():
    term, _ = _davies_qubit(beta=1.0)
    sup = term_superoperator(term, 1)
    wrong = KmsForm(gibbs_state(PAULI_Z, 0.3))
    with pytest.raises(NotDetailedBalanced):
        stationary_channel(sup, wrong)


def test_stationary_channel_rejects_positive_spectrum():
    term, kms = _davies_qubit()
    sup = term_superoperator(term, 1)
    flipped = Superoperator(mat=-sup.mat, picture="heisenberg", dim=2)
    with pytest.raises(PositiveEigenvalue):
        stationary_channel(flipped, kms)


def test_choi_identity_and_transpose():
    d = 2
    ident = Superoperator(np.eye(d * d, dtype=complex), "schrodinger", d)
    rep = cptp_check(ident)
    assert rep.cp and rep.tp
    w = np.linalg.eigvalsh(choi_matrix(ident.mat, d))
    assert np.abs(np.sort(w) - np.array([0.0, 0.0, 0.0, 2.0])).max() < 1e-12
    t = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            t[2 * i + j, 2 * j + i] = 1.0
    rep_t = cptp_check(Superoperator(t, "schrodinger", 2))
    assert rep_t.tp and not rep_t.cp
    assert abs(rep_t.choi_min_eig + 1.0) < 1e-12


def test_reducible_generator_reports_zero_gap():
    # Two independent copies of the qubit model on 2 qubits: the kernel is
    # 4-dimensional in the product but already >= 2 with one coupling only.
    h = np.kron(PAULI_Z, np.eye(2)) + np.kron(np.eye(2), PAULI_Z)
    w = WeightProfile(kind="davies_kms", beta=0.6)
    a = np.kron(PAULI_X, np.eye(2))
    jump = build_jump(a, h, w)
    coh = build_coherent(jump, h, w)
    term = LindbladTerm(
        jumps=(LocalOperator(jump, (0, 1)),),
        coherent=LocalOperator(coh, (0, 1)) if np.abs(coh).max() > 1e-12 else None,
        support=(0, 1),
    )
    kms = KmsForm(gibbs_state(h, 0.6))
    rep = spectral_report(lindblad_superoperator([term], 2), kms)
    assert rep.kernel_dim >= 2
    assert abs(rep.gap) < 1e-9
