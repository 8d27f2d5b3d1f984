"""Local Hamiltonians on qubit registers.

Qubit 0 is the most significant tensor factor: a register basis state
|b_0 b_1 ... b_{n-1}> has index sum_i b_i 2^{n-1-i}.  A LocalOperator's
support lists the qubits its matrix acts on, in tensor-factor order, so
embedding permutes axes rather than assuming contiguity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadParams,
    DegenerateGapWarning,
    DimensionMismatch,
    SupportOutOfRange,
    UnknownKind,
)
from .linalg import hermitian_eigendecompose, spectral_norm

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"i": PAULI_I, "x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}


@dataclass(frozen=True)
class LocalOperator:
    """Dense matrix acting on the qubits listed in support."""

    op: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        op = np.asarray(self.op, dtype=complex)
        object.__setattr__(self, "op", op)
        support = tuple(int(q) for q in self.support)
        object.__setattr__(self, "support", support)
        if len(set(support)) != len(support):
            raise BadParams(f"support has repeated qubits: {support}")
        if any(q < 0 for q in support):
            raise SupportOutOfRange(f"negative qubit index in support {support}")
        d = 2 ** len(support)
        if op.ndim != 2 or op.shape != (d, d):
            raise DimensionMismatch(
                f"operator shape {op.shape} does not match support {support}"
                f" (expected {(d, d)})"
            )


LocalTerm = LocalOperator


@dataclass(frozen=True)
class LocalHamiltonian:
    """Sum of local terms on an n-qubit register."""

    n: int
    terms: tuple[LocalTerm, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise BadParams(f"register size must be >= 1, got {self.n}")
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if any(q >= self.n for q in t.support):
                raise SupportOutOfRange(
                    f"term support {t.support} exceeds register size {self.n}"
                )

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def locality(self) -> int:
        return max((len(t.support) for t in self.terms), default=0)


@dataclass(frozen=True)
class GroundSpace:
    """Ground cluster of a Hermitian matrix."""

    projector: np.ndarray
    dimension: int
    energy: float
    gap: float
    degenerate: bool
    frustration_residual: float = 0.0


def embed(op: LocalOperator, n: int) -> np.ndarray:
    """Lift a local operator to the full 2^n-dimensional register."""
    if any(q >= n for q in op.support):
        raise SupportOutOfRange(f"support {op.support} exceeds register size {n}")
    p = len(op.support)
    rest = [q for q in range(n) if q not in op.support]
    full = np.kron(op.op, np.eye(2 ** (n - p), dtype=complex))
    order = list(op.support) + rest
    perm = [order.index(q) for q in range(n)]
    t = full.reshape([2] * (2 * n))
    t = t.transpose(perm + [n + a for a in perm])
    return np.ascontiguousarray(t.reshape(2**n, 2**n))


def assemble(ham: LocalHamiltonian) -> np.ndarray:
    """Dense matrix of the full Hamiltonian."""
    d = 2**ham.n
    h = np.zeros((d, d), dtype=complex)
    for t in ham.terms:
        h += embed(t, ham.n)
    return h


def interaction_degree(ham: LocalHamiltonian) -> int:
    """Max over terms of the number of other terms sharing a qubit."""
    deg = 0
    for a, ta in enumerate(ham.terms):
        sa = set(ta.support)
        cnt = sum(
            1 for b, tb in enumerate(ham.terms) if b != a and sa & set(tb.support)
        )
        deg = max(deg, cnt)
    return deg


def noncommutation_degree(mats: list[np.ndarray], tol: float = 1e-10) -> int:
    """Max over entries of the number of other matrices it fails to commute with."""
    k = len(mats)
    scale = max([1.0] + [spectral_norm(m) for m in mats])
    deg = 0
    for a in range(k):
        cnt = 0
        for b in range(k):
            if b == a:
                continue
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            if spectral_norm(comm) > tol * scale * scale:
                cnt += 1
        deg = max(deg, cnt)
    return deg


def commutation_degree(ham: LocalHamiltonian, tol: float = 1e-10) -> int:
    """noncommutation_degree of the embedded terms."""
    return noncommutation_degree([embed(t, ham.n) for t in ham.terms], tol)


def ground_space(
    h: np.ndarray | LocalHamiltonian, tol: float = 1e-8
) -> GroundSpace:
    """Project onto the lowest eigenvalue cluster of h.

    The ground cluster collects eigenvalues within tol * max(1, ||h||) of
    the minimum; a gap below ten times that width triggers a
    DegenerateGapWarning because the cluster boundary is then ambiguous.
    For a LocalHamiltonian input the frustration residual
    max_a ||P H_a|| is reported as well; it vanishes exactly when the
    ground space sits inside the kernel of every (positive) term.
    """
    embedded: list[np.ndarray] | None = None
    if isinstance(h, LocalHamiltonian):
        ham = h
        h = assemble(ham)
        embedded = [embed(t, ham.n) for t in ham.terms]
    eig = hermitian_eigendecompose(h)
    w, v = eig.eigenvalues, eig.eigenvectors
    scale = max(1.0, spectral_norm(h))
    width = tol * scale
    dim = int(np.sum(w - w[0] <= width))
    proj = v[:, :dim] @ v[:, :dim].conj().T
    gap = float(w[dim] - w[0]) if dim < len(w) else float("inf")
    degenerate = gap < 10 * width
    if degenerate:
        warnings.warn(
            f"ground cluster of dimension {dim} has gap {gap:.3e} within "
            f"10x the cluster width {width:.3e}",
            DegenerateGapWarning,
        )
    residual = 0.0
    if embedded:
        residual = max(spectral_norm(proj @ t) for t in embedded)
    return GroundSpace(
        projector=proj,
        dimension=dim,
        energy=float(w[0]),
        gap=gap,
        degenerate=degenerate,
        frustration_residual=residual,
    )


def is_frustration_free(ham: LocalHamiltonian, tol: float = 1e-8) -> tuple[bool, float]:
    """Whether the ground space annihilates every term.

    Terms are expected in the zoo normalization (positive semidefinite with
    kernel); a term with negative eigenvalues reads as frustrated even when
    it shares its minimizer with the total.
    """
    gs = ground_space(ham, tol)
    scale = max(1.0, spectral_norm(assemble(ham)))
    return abs(gs.frustration_residual) <= tol * scale, gs.frustration_residual


def _projector_from_state(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def make_instance(kind: str, n: int, seed: int = 0) -> LocalHamiltonian:
    """Seeded frustration-free test instances.

    zz_chain: nearest-neighbor projectors (I - Z Z)/2 on an open chain.
    field_chain: single-site projectors (I - Z)/2 on every site.
    random_ff_projectors: nearest-neighbor rank-1 projectors onto seeded
        random two-qubit states orthogonal to |00>; frustration-free by
        construction, generically non-commuting.
    commuting_projectors: nearest-neighbor diagonal 0/1 projectors with the
        |00> diagonal entry forced to 0.
    """
    if n < 2:
        raise BadParams(f"instances need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    zz = 0.5 * (np.eye(4, dtype=complex) - np.kron(PAULI_Z, PAULI_Z))
    terms: list[LocalTerm] = []
    if kind == "zz_chain":
        terms = [LocalTerm(zz, (i, i + 1)) for i in range(n - 1)]
    elif kind == "field_chain":
        fld = 0.5 * (np.eye(2, dtype=complex) - PAULI_Z)
        terms = [LocalTerm(fld, (i,)) for i in range(n)]
    elif kind == "random_ff_projectors":
        for i in range(n - 1):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            v[0] = 0.0
            terms.append(LocalTerm(_projector_from_state(v), (i, i + 1)))
    elif kind == "commuting_projectors":
        for i in range(n - 1):
            diag = rng.integers(0, 2, size=4).astype(float)
            diag[0] = 0.0
            terms.append(LocalTerm(np.diag(diag).astype(complex), (i, i + 1)))
    else:
        raise UnknownKind(f"unknown instance kind {kind!r}")
    return LocalHamiltonian(n=n, terms=tuple(terms))


def standard_couplings(n: int, kinds: str = "x") -> list[LocalOperator]:
    """Single-site Pauli coupling set: kinds is a subset of 'xyz'."""
    kinds = kinds.lower()
    if not kinds or any(k not in "xyz" for k in kinds):
        raise UnknownKind(f"coupling kinds must be drawn from 'xyz', got {kinds!r}")
    out: list[LocalOperator] = []
    for k in kinds:
        for i in range(n):
            out.append(LocalOperator(PAULI[k], (i,)))
    return out
