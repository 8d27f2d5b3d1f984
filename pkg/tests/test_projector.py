"""DL operator, Chebyshev projector polynomials, degree schedules."""

from __future__ import annotations

import numpy as np
import pytest

from dlgibbs.errors import (
    BadEps,
    BadGamma,
    BadParams,
    DegenerateGap,
    FrustrationDetected,
    InsufficientSpread,
)
from dlgibbs.hamiltonians import (
    PAULI,
    LocalHamiltonian,
    LocalOperator,
    ground_space,
    make_instance,
)
from dlgibbs.projector import (
    approximate_projector,
    chebyshev_poly,
    degree_for_error,
    dl_operator,
    planted_spectrum,
    singular_gap,
    speedup_slope,
)

FF_INSTANCES = [("commuting_projectors", 5, 0)] + [
    ("random_ff_projectors", n, seed) for n in (4, 5, 6) for seed in (0, 1, 2)
]


def test_degree_one_poly_is_identity():
    p = chebyshev_poly(0.3, 1)
    xs = np.linspace(-1.0, 1.0, 21)
    assert np.abs(p(xs) - xs).max() < 1e-14


def test_poly_value_golden():
    p = chebyshev_poly(0.5, 2)
    assert abs(p(0.5) - 1.0 / 7.0) < 1e-14


def test_poly_normalization_and_bounds():
    for gamma_star, ell in [(0.5, 10), (0.1, 25), (0.02, 60)]:
        p = chebyshev_poly(gamma_star, ell)
        assert abs(p(1.0) - 1.0) < 1e-12
        xs = np.linspace(-1.0, 1.0, 1001)
        assert np.abs(p(xs)).max() <= 1.0 + 1e-12
        mid = np.linspace(-1.0 + gamma_star, 1.0 - gamma_star, 1001)
        assert np.abs(p(mid)).max() <= 2.0 * np.exp(-ell * np.sqrt(gamma_star)) + 1e-12


def test_poly_is_stable_at_high_degree():
    p = chebyshev_poly(0.5, 800)
    assert abs(p(1.0) - 1.0) < 1e-12
    assert abs(p(0.3)) < 1e-100 or p(0.3) == 0.0
    assert np.isfinite(p(np.linspace(-1, 1, 101))).all()


def test_poly_parity_matches_degree():
    xs = np.linspace(0.1, 0.9, 9)
    podd = chebyshev_poly(0.4, 7)
    assert podd.parity == 1
    assert np.abs(podd(-xs) + podd(xs)).max() < 1e-12
    peven = chebyshev_poly(0.4, 8)
    assert peven.parity == 0
    assert np.abs(peven(-xs) - peven(xs)).max() < 1e-12


def test_poly_validation():
    with pytest.raises(BadGamma):
        chebyshev_poly(0.0, 3)
    with pytest.raises(BadGamma):
        chebyshev_poly(1.0, 3)
    with pytest.raises(BadParams):
        chebyshev_poly(0.5, 0)


def test_degree_for_error_examples():
    assert degree_for_error(1.0, 2.0 / np.e) == 1
    assert degree_for_error(0.25, 1e-6) == 30
    assert degree_for_error(0.5, 5.0) == 1
    with pytest.raises(BadGamma):
        degree_for_error(0.0, 0.1)
    with pytest.raises(BadEps):
        degree_for_error(0.5, 0.0)


def test_dl_operator_commuting_is_exact_projector():
    ham = make_instance("commuting_projectors", 5, seed=0)
    dl = dl_operator(ham)
    c = dl.composite
    assert np.abs(c @ c - c).max() < 1e-10
    assert np.abs(c - ground_space(ham).projector).max() < 1e-10


def test_dl_operator_single_term_equals_factor():
    term = 0.5 * (np.eye(4, dtype=complex) - np.kron(PAULI["z"], PAULI["z"]))
    ham = LocalHamiltonian(n=2, terms=(LocalOperator(term, (0, 1)),))
    dl = dl_operator(ham)
    assert dl.m == 1
    assert np.abs(dl.composite - dl.factors[0]).max() < 1e-12


def test_dl_operator_refuses_frustrated_input():
    x = 0.5 * (np.eye(2, dtype=complex) - PAULI["x"])
    z = 0.5 * (np.eye(2, dtype=complex) - PAULI["z"])
    ham = LocalHamiltonian(n=1, terms=(LocalOperator(x, (0,)), LocalOperator(z, (0,))))
    with pytest.raises(FrustrationDetected):
        dl_operator(ham)


def test_top_singular_block_is_exactly_one():
    for kind, n, seed in FF_INSTANCES:
        ham = make_instance(kind, n, seed=seed)
        dl = dl_operator(ham)
        r = ground_space(ham).dimension
        s = dl.svd.s
        assert np.abs(s[:r] - 1.0).max() < 1e-10
        assert s[r] < 1.0 - 1e-6


def test_singular_gap_certified_bound_holds():
    for kind, n, seed in FF_INSTANCES:
        ham = make_instance(kind, n, seed=seed)
        dl = dl_operator(ham)
        sg = singular_gap(dl, ham)
        assert sg.s_next <= sg.bound + 1e-9
        assert sg.empirical_gap >= sg.gamma_star - 1e-9
        assert 0.0 < sg.gamma_star < 1.0


def test_singular_gap_formula_limit():
    # Disjoint terms have degree 0, driving the certified bound to zero.
    term = 0.5 * (np.eye(2, dtype=complex) - PAULI["z"])
    ham = LocalHamiltonian(
        n=2, terms=(LocalOperator(term, (0,)), LocalOperator(term, (1,)))
    )
    sg = singular_gap(dl_operator(ham), ham)
    assert sg.g == 0
    assert sg.bound == 0.0
    assert sg.s_next < 1e-12
    assert sg.gamma_star > 1.0 - 1e-9


def test_exact_projector_matches_ground_space():
    for kind, n, seed in FF_INSTANCES:
        ham = make_instance(kind, n, seed=seed)
        dl = dl_operator(ham)
        sg = singular_gap(dl, ham)
        res = approximate_projector(dl, chebyshev_poly(sg.gamma_star, 5))
        assert np.abs(res.exact - ground_space(ham).projector).max() < 1e-9
        assert res.r == sg.r


def test_error_bound_dominance_over_degree_sweep():
    for kind, n, seed in [("commuting_projectors", 5, 0), ("random_ff_projectors", 4, 7)]:
        ham = make_instance(kind, n, seed=seed)
        dl = dl_operator(ham)
        sg = singular_gap(dl, ham)
        for ell in range(1, 61):
            res = approximate_projector(dl, chebyshev_poly(sg.gamma_star, ell))
            assert res.error <= res.bound + 1e-9
            assert res.queries == ell * ham.m


def test_commuting_odd_degree_is_exact():
    ham = make_instance("commuting_projectors", 5, seed=0)
    dl = dl_operator(ham)
    sg = singular_gap(dl, ham)
    for ell in (1, 3, 9):
        res = approximate_projector(dl, chebyshev_poly(sg.gamma_star, ell))
        assert res.error <= 1e-10
    # Even degrees leave p(0) nonzero; the bound still dominates.
    res = approximate_projector(dl, chebyshev_poly(sg.gamma_star, 8))
    assert res.error > 1e-10
    assert res.error <= res.bound + 1e-9


def test_query_and_ancilla_accounting():
    ham = make_instance("random_ff_projectors", 4, seed=7)
    dl = dl_operator(ham)
    res = approximate_projector(dl, chebyshev_poly(0.3, 11))
    assert res.queries == 11 * 3
    assert res.ancilla_estimate == int(np.ceil(np.log2(3))) + 1


def test_planted_spectrum_shape():
    spec = planted_spectrum(0.25, dim=12, r=3, seed=5)
    s = spec.singular_values
    assert s.shape == (12,)
    assert np.abs(s[:3] - 1.0).max() == 0.0
    assert abs(s[3] - 0.75) < 1e-12
    assert np.all(s[3:] <= 0.75 + 1e-12)
    assert np.all(np.diff(s) <= 1e-12)


def test_speedup_slope_on_planted_family():
    insts = [
        planted_spectrum(g, seed=i) for i, g in enumerate([0.5, 0.25, 0.1, 0.05])
    ]
    slope = speedup_slope(insts, 1e-6)
    assert 0.4 <= slope <= 0.6
    s8 = speedup_slope(insts, 1e-8)
    s4 = speedup_slope(insts, 1e-4)
    assert abs(s8 - s4) <= 0.1


def test_speedup_slope_requires_spread():
    with pytest.raises(InsufficientSpread):
        speedup_slope([planted_spectrum(0.3)], 1e-6)
    narrow = [planted_spectrum(g, seed=i) for i, g in enumerate([0.4, 0.3, 0.2, 0.1])]
    with pytest.raises(InsufficientSpread):
        speedup_slope(narrow, 1e-6)


def test_singular_gap_requires_gapped_input():
    term = 0.5 * (np.eye(2, dtype=complex) - PAULI["z"])
    ham = LocalHamiltonian(
        n=2, terms=(LocalOperator(1e-4 * term, (0,)), LocalOperator(term, (1,)))
    )
    with pytest.raises(DegenerateGap):
        singular_gap(dl_operator(ham), ham, tol=1e-3)
