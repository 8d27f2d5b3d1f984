"""Local terms, embedding order, instance zoo, ground spaces."""

from __future__ import annotations

import numpy as np
import pytest

from dlgibbs.errors import BadParams, SupportOutOfRange, UnknownKind
from dlgibbs.hamiltonians import (
    PAULI,
    PAULI_X,
    PAULI_Z,
    LocalHamiltonian,
    LocalOperator,
    assemble,
    commutation_degree,
    embed,
    ground_space,
    interaction_degree,
    is_frustration_free,
    make_instance,
    noncommutation_degree,
    standard_couplings,
)


def test_embed_orders_qubit0_most_significant():
    z0 = embed(LocalOperator(PAULI_Z, (0,)), 2)
    assert np.abs(z0 - np.diag([1, 1, -1, -1])).max() < 1e-15
    z1 = embed(LocalOperator(PAULI_Z, (1,)), 2)
    assert np.abs(z1 - np.diag([1, -1, 1, -1])).max() < 1e-15


def test_embed_respects_support_order():
    cnot = np.zeros((4, 4))
    cnot[0, 0] = cnot[1, 1] = cnot[2, 3] = cnot[3, 2] = 1.0
    fwd = embed(LocalOperator(cnot, (0, 1)), 2)
    rev = embed(LocalOperator(cnot, (1, 0)), 2)
    assert np.abs(fwd - cnot).max() < 1e-15
    expected_rev = np.zeros((4, 4))
    expected_rev[0, 0] = expected_rev[2, 2] = expected_rev[1, 3] = expected_rev[3, 1] = 1.0
    assert np.abs(rev - expected_rev).max() < 1e-15


def test_embed_noncontiguous_support():
    zz = np.kron(PAULI_Z, PAULI_Z)
    full = embed(LocalOperator(zz, (0, 2)), 3)
    diag = [1, -1, 1, -1, -1, 1, -1, 1]
    assert np.abs(full - np.diag(diag)).max() < 1e-15


def test_embed_rejects_out_of_range():
    with pytest.raises(SupportOutOfRange):
        embed(LocalOperator(PAULI_X, (3,)), 2)


def test_local_operator_validation():
    with pytest.raises(BadParams):
        LocalOperator(np.eye(4), (1, 1))
    with pytest.raises(Exception):
        LocalOperator(np.eye(3), (0, 1))


def test_zz_chain_ground_space():
    ham = make_instance("zz_chain", 3)
    assert ham.m == 2
    gs = ground_space(ham)
    assert gs.dimension == 2
    assert abs(gs.energy) < 1e-12
    assert abs(gs.gap - 1.0) < 1e-12
    ff, res = is_frustration_free(ham)
    assert ff and abs(res) < 1e-12


def test_field_chain_unique_ground():
    ham = make_instance("field_chain", 3)
    assert ham.m == 3
    assert all(t.support == (i,) for i, t in enumerate(ham.terms))
    gs = ground_space(ham)
    assert gs.dimension == 1
    assert abs(gs.gap - 1.0) < 1e-12
    vac = np.zeros(8)
    vac[0] = 1.0
    assert np.abs(gs.projector - np.outer(vac, vac)).max() < 1e-12
    ff, res = is_frustration_free(ham)
    assert ff and abs(res) < 1e-12


def test_frustration_residual_detects_nonzero_ground_action():
    x = 0.5 * (np.eye(2, dtype=complex) - PAULI["x"])
    z = 0.5 * (np.eye(2, dtype=complex) - PAULI["z"])
    ham = LocalHamiltonian(n=1, terms=(LocalOperator(x, (0,)), LocalOperator(z, (0,))))
    ff, res = is_frustration_free(ham)
    assert not ff
    assert res > 0.1


def test_random_ff_projectors_frustration_free():
    for seed in (0, 1, 2):
        ham = make_instance("random_ff_projectors", 4, seed=seed)
        for t in ham.terms:
            w = np.linalg.eigvalsh(t.op)
            assert np.abs(t.op @ t.op - t.op).max() < 1e-12
            assert abs(w.sum() - 1.0) < 1e-12
        ff, res = is_frustration_free(ham)
        assert ff and abs(res) < 1e-10
        assert commutation_degree(ham) > 0


def test_commuting_projectors_commute():
    ham = make_instance("commuting_projectors", 5, seed=3)
    assert commutation_degree(ham) == 0
    ff, _ = is_frustration_free(ham)
    assert ff


def test_instance_seeding_is_deterministic():
    a = make_instance("random_ff_projectors", 4, seed=7)
    b = make_instance("random_ff_projectors", 4, seed=7)
    c = make_instance("random_ff_projectors", 4, seed=8)
    assert all(np.array_equal(x.op, y.op) for x, y in zip(a.terms, b.terms))
    assert any(not np.array_equal(x.op, y.op) for x, y in zip(a.terms, c.terms))


def test_unknown_kind_and_bad_params():
    with pytest.raises(UnknownKind):
        make_instance("heisenberg", 3)
    with pytest.raises(BadParams):
        make_instance("zz_chain", 1)


def test_interaction_degree_chain():
    assert interaction_degree(make_instance("zz_chain", 5)) == 2
    assert interaction_degree(make_instance("zz_chain", 2)) == 0


def test_noncommutation_degree():
    x = PAULI_X
    z = PAULI_Z
    assert noncommutation_degree([x, z]) == 1
    assert noncommutation_degree([x, x]) == 0


def test_standard_couplings():
    xs = standard_couplings(3, "x")
    assert len(xs) == 3 and xs[0].support == (0,)
    xz = standard_couplings(2, "xz")
    assert len(xz) == 4
    with pytest.raises(UnknownKind):
        standard_couplings(2, "w")


def test_assemble_matches_manual_sum():
    ham = make_instance("zz_chain", 3)
    h = assemble(ham)
    manual = sum(embed(t, 3) for t in ham.terms)
    assert np.abs(h - manual).max() < 1e-14
    assert np.abs(h - h.conj().T).max() < 1e-14
