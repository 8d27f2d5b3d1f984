"""Parent Hamiltonian of a detailed-balanced Lindbladian on the doubled
register.

Row-major vectorization v(X) = sum_ij X_ij |i>|j> turns the map
X -> A X B^dag into the matrix A (x) B^*.  Conjugating the Heisenberg
generator L by Gamma^{1/2}(X) = sigma^{1/4} X sigma^{1/4} therefore
yields, term by term, the doubled-register matrix

    H^a = Q [ i G^a (x) I - i I (x) (G^a)^T + (L^a)^dag (x) (L^a)^T
              - (1/2) (L^a)^dag L^a (x) I - (1/2) I (x) (L^a)^T (L^a)^* ] Q^{-1},

with Q = sigma^{1/4} (x) (sigma^T)^{1/4}.  Detailed balance makes each
H^a Hermitian and negative semidefinite, and every H^a annihilates the
vectorized square root v(sqrt(sigma)): the sum H = sum_a H^a is a
frustration-free Hamiltonian whose unique top (zero-energy) eigenstate
is the purified Gibbs state, and whose spectrum equals that of the KMS
coherent form, so gap(H) = gap(L).

For commuting H the Bohr components of each coupling are exact
eigenoperators, the quarter-power dressing acts by scalars, and H^a is
supported on the dressed coupling support copied to both halves of the
register; verify_parent checks this locality explicitly and skips it
(with a warning) for non-commuting input.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadParams,
    NotDetailedBalanced,
    PositiveEigenvalue,
    PositivityFailure,
)
from .hamiltonians import (
    LocalHamiltonian,
    LocalOperator,
    assemble,
    embed,
)
from .kms import (
    KmsForm,
    LindbladTerm,
    coherent_form,
    gibbs_state,
    term_superoperator,
)
from .linalg import (
    devectorize,
    hermitian_eigendecompose,
    partial_trace,
    spectral_norm,
    vectorize,
)

__all__ = [
    "ParentHamiltonian",
    "ParentReport",
    "ParentTerm",
    "ProjectorInput",
    "build_parent",
    "devectorize",
    "parent_projector_input",
    "purified_gibbs",
    "vectorize",
    "verify_parent",
]


@dataclass(frozen=True)
class ParentTerm:
    """One per-coupling block of the parent Hamiltonian."""

    mat: np.ndarray
    support: tuple[int, ...]
    norm: float


@dataclass(frozen=True)
class ParentHamiltonian:
    """Doubled-register Hamiltonian with the purified Gibbs ground state."""

    full: np.ndarray
    terms: tuple[ParentTerm, ...]
    beta: float | None
    ground: np.ndarray
    n: int

    @property
    def m(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class ParentReport:
    """Frustration, hermiticity, locality and degree diagnostics."""

    frustration_residuals: tuple[float, ...]
    max_frustration: float
    hermiticity_residuals: tuple[float, ...]
    locality_residuals: tuple[float, ...] | None
    parent_degree: int
    locality_checked: bool
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class ProjectorInput:
    """Negated, normalized, locally extracted parent ready for projection."""

    ham: LocalHamiltonian
    scales: tuple[float, ...]
    locality_residuals: tuple[float, ...]


def _doubled_support(support: tuple[int, ...], n: int) -> tuple[int, ...]:
    base = sorted(support)
    return tuple(base + [q + n for q in base])


def build_parent(
    terms: list[LindbladTerm] | tuple[LindbladTerm, ...],
    kms: KmsForm,
    beta: float | None = None,
    tol: float = 1e-8,
) -> ParentHamiltonian:
    """Assemble H = sum_a H^a from the per-term kron formula.

    Each H^a is cross-checked against the independently computed KMS
    coherent form of the same term (the v L v^{-1} route) to 1e-9; a
    mismatch means the two derivations of the display disagree and is a
    hard error.  Terms failing detailed balance raise
    NotDetailedBalanced; a positive eigenvalue of the assembled parent
    raises PositiveEigenvalue.
    """
    if not terms:
        raise BadParams("need at least one term")
    d = kms.dim
    n = int(round(np.log2(d)))
    if 2**n != d:
        raise BadParams(f"state dimension {d} is not a power of 2")
    eye = np.eye(d, dtype=complex)
    q_mat = np.kron(kms.quarter, kms.quarter.conj())
    q_inv = np.kron(kms.inv_quarter, kms.inv_quarter.conj())
    parent_terms: list[ParentTerm] = []
    full = np.zeros((d * d, d * d), dtype=complex)
    for idx, t in enumerate(terms):
        mid = np.zeros((d * d, d * d), dtype=complex)
        for j in t.jumps:
            jump = embed(j, n)
            ldl = jump.conj().T @ jump
            mid += np.kron(jump.conj().T, jump.T)
            mid -= 0.5 * np.kron(ldl, eye)
            mid -= 0.5 * np.kron(eye, ldl.T)
        if t.coherent is not None:
            g_mat = embed(t.coherent, n)
            mid += 1j * np.kron(g_mat, eye)
            mid -= 1j * np.kron(eye, g_mat.T)
        h_a = q_mat @ mid @ q_inv
        cross = coherent_form(term_superoperator(t, n), kms)
        scale = max(1.0, spectral_norm(h_a))
        if float(cross.hermiticity_residual or 0.0) > tol:
            raise NotDetailedBalanced(
                f"term {idx} has detailed-balance defect "
                f"{cross.hermiticity_residual:.3e}"
            )
        if spectral_norm(h_a - cross.mat) > 1e-9 * scale:
            raise BadParams(
                f"term {idx}: kron assembly disagrees with the vectorized "
                "coherent form"
            )
        h_a = 0.5 * (h_a + h_a.conj().T)
        parent_terms.append(
            ParentTerm(
                mat=h_a,
                support=_doubled_support(t.support, n),
                norm=spectral_norm(h_a),
            )
        )
        full += h_a
    full = 0.5 * (full + full.conj().T)
    ground = vectorize(kms.sqrt)
    ground = ground / np.linalg.norm(ground)
    top = float(np.linalg.eigvalsh(full).max())
    if top > 1e-8 * max(1.0, spectral_norm(full)):
        raise PositiveEigenvalue(f"parent has positive eigenvalue {top:.3e}")
    return ParentHamiltonian(
        full=full, terms=tuple(parent_terms), beta=beta, ground=ground, n=n
    )


def purified_gibbs(ham: LocalHamiltonian | np.ndarray, beta: float) -> np.ndarray:
    """Normalized v(sqrt(sigma_beta)) on the doubled register."""
    h = assemble(ham) if isinstance(ham, LocalHamiltonian) else np.asarray(ham)
    sigma = gibbs_state(h, beta)
    eig = hermitian_eigendecompose(sigma)
    root = (eig.eigenvectors * np.sqrt(np.clip(eig.eigenvalues, 0.0, None))) @ (
        eig.eigenvectors.conj().T
    )
    psi = vectorize(root)
    return psi / np.linalg.norm(psi)


def _local_block(
    mat: np.ndarray, support: tuple[int, ...], nq: int
) -> tuple[np.ndarray, float]:
    """Best local representative on support and the off-support residual."""
    comp = 2 ** (nq - len(support))
    block = partial_trace(mat, keep=list(support), dims=[2] * nq) / comp
    cand = embed(LocalOperator(block, support), nq)
    return block, spectral_norm(mat - cand)


def verify_parent(ph: ParentHamiltonian, ham: LocalHamiltonian) -> ParentReport:
    """Report-only diagnostics: frustration, hermiticity, locality, degree."""
    from .hamiltonians import commutation_degree

    frus = tuple(
        float(np.linalg.norm(t.mat @ ph.ground)) for t in ph.terms
    )
    herm = tuple(float(spectral_norm(t.mat - t.mat.conj().T)) for t in ph.terms)
    warns: list[str] = []
    commuting = commutation_degree(ham) == 0
    locality: tuple[float, ...] | None = None
    if commuting:
        locality = tuple(
            _local_block(t.mat, t.support, 2 * ph.n)[1] for t in ph.terms
        )
    else:
        msg = "Hamiltonian terms do not commute; locality checks skipped"
        warnings.warn(msg)
        warns.append(msg)
    degree = 0
    for a, ta in enumerate(ph.terms):
        cnt = sum(
            1
            for b, tb in enumerate(ph.terms)
            if b != a and set(ta.support) & set(tb.support)
        )
        degree = max(degree, cnt)
    return ParentReport(
        frustration_residuals=frus,
        max_frustration=max(frus),
        hermiticity_residuals=herm,
        locality_residuals=locality,
        parent_degree=degree,
        locality_checked=commuting,
        warnings=tuple(warns),
    )


def parent_projector_input(ph: ParentHamiltonian, tol: float = 1e-9) -> ProjectorInput:
    """Negate, normalize and localize parent terms for the DL projector.

    Each -H^a must be positive semidefinite (PositivityFailure otherwise)
    and exactly local on its doubled dressed support (BadParams
    otherwise); terms are divided by max(1, ||H^a||) with the scales
    recorded.
    """
    nq = 2 * ph.n
    locals_: list[LocalOperator] = []
    scales: list[float] = []
    residuals: list[float] = []
    for idx, t in enumerate(ph.terms):
        scale = max(1.0, t.norm)
        block, res = _local_block(t.mat, t.support, nq)
        if res > tol * max(1.0, t.norm):
            raise BadParams(
                f"parent term {idx} is not local on its dressed support "
                f"(residual {res:.3e}); projection input undefined"
            )
        neg = -block / scale
        neg = 0.5 * (neg + neg.conj().T)
        min_eig = float(np.linalg.eigvalsh(neg).min())
        if min_eig < -1e-10 * max(1.0, spectral_norm(neg)):
            raise PositivityFailure(
                f"negated parent term {idx} has eigenvalue {min_eig:.3e} < 0"
            )
        locals_.append(LocalOperator(neg, t.support))
        scales.append(scale)
        residuals.append(res)
    return ProjectorInput(
        ham=LocalHamiltonian(n=nq, terms=tuple(locals_)),
        scales=tuple(scales),
        locality_residuals=tuple(residuals),
    )
