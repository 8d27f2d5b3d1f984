"""KMS inner product, detailed balance, and Lindbladian superoperators.

For a full-rank state sigma define the KMS inner product

    <X, Y>_sigma = Tr[X' s Y s],       s = sigma^{1/2}, X' = X dagger,

and the quarter-power conjugation G(X) = sigma^{1/4} X sigma^{1/4}.  A
Heisenberg-picture generator L satisfies sigma-detailed balance exactly
when its coherent form

    h = G L G^{-1}

is Hermitian as a matrix on vectorized operators.  Everything downstream
leans on this: h is then negative semidefinite for a dissipative generator,
its kernel is the fixed-point space conjugated by G, the stationary channel
of a single term is P = G^{-1} Pi_0 G with Pi_0 the kernel projector of h,
and gaps of h are the mixing quantities.

Vectorization is row-major, vec(|i><j|) = |i> tensor |j>, so the map
X -> A X B has matrix kron(A, B^T) and the Heisenberg Lindbladian

    L(X) = i[G_c, X] + sum_j ( L_j' X L_j - (1/2){L_j' L_j, X} )

has matrix sum_j [ kron(L_j', L_j^T) - (1/2) kron(L_j' L_j, I)
- (1/2) kron(I, (L_j' L_j)^T) ] + i kron(G_c, I) - i kron(I, G_c^T).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BadParams,
    DegenerateGap,
    DimensionMismatch,
    NotDetailedBalanced,
    OverflowDetected,
    PositiveEigenvalue,
    SingularSigma,
)
from .hamiltonians import LocalOperator, embed
from .linalg import hermitian_eigendecompose, spectral_norm

_PICTURES = ("heisenberg", "schrodinger", "kms")


@dataclass(frozen=True)
class Superoperator:
    """Matrix acting on vectorized operators, tagged with its picture."""

    mat: np.ndarray
    picture: str
    dim: int
    hermiticity_residual: float | None = None

    def __post_init__(self) -> None:
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        if self.picture not in _PICTURES:
            raise BadParams(f"unknown picture {self.picture!r}")
        d2 = self.dim * self.dim
        if mat.shape != (d2, d2):
            raise DimensionMismatch(
                f"superoperator shape {mat.shape} does not match dim {self.dim}"
            )

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"operand shape {x.shape} does not match dim {self.dim}"
            )
        return (self.mat @ x.reshape(-1)).reshape(self.dim, self.dim)

    def adjoint(self) -> "Superoperator":
        """Hilbert-Schmidt adjoint; swaps Heisenberg and Schrodinger."""
        flip = {"heisenberg": "schrodinger", "schrodinger": "heisenberg", "kms": "kms"}
        return Superoperator(
            mat=self.mat.conj().T, picture=flip[self.picture], dim=self.dim
        )

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        if self.picture != other.picture or self.dim != other.dim:
            raise DimensionMismatch(
                f"cannot compose {self.picture}/{self.dim} with "
                f"{other.picture}/{other.dim}"
            )
        return Superoperator(
            mat=self.mat @ other.mat, picture=self.picture, dim=self.dim
        )


@dataclass(frozen=True)
class LindbladTerm:
    """One local dissipative term: jump operators plus an optional coherent part."""

    jumps: tuple[LocalOperator, ...]
    coherent: LocalOperator | None
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "jumps", tuple(self.jumps))
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        if not self.jumps and self.coherent is None:
            raise BadParams("a Lindblad term needs at least one jump or coherent part")


class KmsForm:
    """Cached spectral data of a full-rank stationary state.

    The input is Hermitian-validated and trace-normalized; the smallest
    eigenvalue after normalization must exceed min_eig (default 1e-14).
    Note the tension with large beta * ||H||: at beta * spread = 80 the
    smallest Gibbs weight is ~1e-35, far below the default threshold, so
    high-beta studies must loosen min_eig deliberately.
    """

    def __init__(self, sigma: np.ndarray, min_eig: float = 1e-14):
        sigma = np.asarray(sigma, dtype=complex)
        eig = hermitian_eigendecompose(sigma)
        tr = float(np.real(eig.eigenvalues.sum()))
        if tr <= 0:
            raise SingularSigma(f"state trace {tr:.3e} is not positive")
        w = eig.eigenvalues / tr
        if w.min() <= min_eig:
            raise SingularSigma(
                f"smallest eigenvalue {w.min():.3e} after normalization is "
                f"at or below {min_eig:.1e}"
            )
        self.dim = sigma.shape[0]
        self.eigenvalues = w
        self.eigenvectors = eig.eigenvectors
        self.sigma = eig.eigenvectors @ np.diag(w) @ eig.eigenvectors.conj().T
        self.sigma_min = float(w.min())

    def _power(self, p: float) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues**p) @ v.conj().T

    @cached_property
    def sqrt(self) -> np.ndarray:
        return self._power(0.5)

    @cached_property
    def quarter(self) -> np.ndarray:
        return self._power(0.25)

    @cached_property
    def inv_quarter(self) -> np.ndarray:
        return self._power(-0.25)

    @cached_property
    def gamma_half(self) -> np.ndarray:
        """Matrix of X -> sigma^{1/4} X sigma^{1/4} on vectorized operators."""
        q = self.quarter
        return np.kron(q, q.conj())

    @cached_property
    def gamma_inv_half(self) -> np.ndarray:
        q = self.inv_quarter
        return np.kron(q, q.conj())


def gibbs_state(h: np.ndarray, beta: float) -> np.ndarray:
    """exp(-beta h) / Tr exp(-beta h), computed shift-stably.

    Rejects beta < 0 and beta * (spectral spread) > 80, beyond which the
    smallest weight underflows any usable stationary-state threshold.
    """
    if beta < 0:
        raise BadParams(f"inverse temperature must be >= 0, got {beta}")
    eig = hermitian_eigendecompose(h)
    w = eig.eigenvalues
    spread = float(w[-1] - w[0])
    if beta * spread > 80.0:
        raise OverflowDetected(
            f"beta * spread = {beta * spread:.2f} exceeds 80; the Gibbs "
            "weights would underflow double precision"
        )
    ew = np.exp(-beta * (w - w[0]))
    ew /= ew.sum()
    v = eig.eigenvectors
    return v @ np.diag(ew) @ v.conj().T


def kms_inner_product(x: np.ndarray, y: np.ndarray, kms: KmsForm) -> complex:
    """<X, Y>_sigma = Tr[X dagger sqrt(sigma) Y sqrt(sigma)]."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (kms.dim, kms.dim) or y.shape != x.shape:
        raise DimensionMismatch(
            f"operands {x.shape}, {y.shape} do not match dim {kms.dim}"
        )
    s = kms.sqrt
    return complex(np.trace(x.conj().T @ s @ y @ s))


def term_superoperator(term: LindbladTerm, n: int) -> Superoperator:
    """Heisenberg-picture matrix of one embedded Lindblad term."""
    d = 2**n
    ident = np.eye(d, dtype=complex)
    mat = np.zeros((d * d, d * d), dtype=complex)
    for j in term.jumps:
        lj = embed(j, n)
        ljd = lj.conj().T
        ldl = ljd @ lj
        mat += np.kron(ljd, lj.T)
        mat -= 0.5 * np.kron(ldl, ident)
        mat -= 0.5 * np.kron(ident, ldl.T)
    if term.coherent is not None:
        g = embed(term.coherent, n)
        mat += 1j * np.kron(g, ident)
        mat -= 1j * np.kron(ident, g.T)
    return Superoperator(mat=mat, picture="heisenberg", dim=d)


def lindblad_superoperator(terms: Sequence[LindbladTerm], n: int) -> Superoperator:
    """Heisenberg-picture matrix of a sum of local Lindblad terms."""
    if not terms:
        raise BadParams("need at least one Lindblad term")
    d = 2**n
    mat = np.zeros((d * d, d * d), dtype=complex)
    for t in terms:
        mat += term_superoperator(t, n).mat
    return Superoperator(mat=mat, picture="heisenberg", dim=d)


def coherent_form(lind: Superoperator, kms: KmsForm) -> Superoperator:
    """h = Gamma^{1/2} L Gamma^{-1/2}; Hermitian iff L is sigma-detailed-balanced."""
    if lind.picture != "heisenberg":
        raise BadParams(f"coherent_form expects a Heisenberg generator, got {lind.picture}")
    if lind.dim != kms.dim:
        raise DimensionMismatch(f"generator dim {lind.dim} vs state dim {kms.dim}")
    mat = kms.gamma_half @ lind.mat @ kms.gamma_inv_half
    res = spectral_norm(mat - mat.conj().T)
    return Superoperator(
        mat=mat, picture="kms", dim=lind.dim, hermiticity_residual=float(res)
    )


def db_residual(lind: Superoperator, kms: KmsForm) -> float:
    """Operator-norm defect of detailed balance, ||h - h dagger||."""
    return float(coherent_form(lind, kms).hermiticity_residual)


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum summary of a generator's coherent form."""

    eigenvalues: np.ndarray
    gap: float
    kernel_dim: int
    db_residual: float
    hermiticity_residual: float
    dl_residual_energy: float


def _ones_probe(h_sym: np.ndarray, kernel_vecs: np.ndarray) -> float:
    """Energy <psi|(-h)|psi> of a deterministic unit vector off the kernel."""
    d2 = h_sym.shape[0]
    psi = np.ones(d2, dtype=complex) / np.sqrt(d2)
    if kernel_vecs.size:
        psi = psi - kernel_vecs @ (kernel_vecs.conj().T @ psi)
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        rng = np.random.default_rng(7)
        psi = rng.normal(size=d2) + 1j * rng.normal(size=d2)
        if kernel_vecs.size:
            psi = psi - kernel_vecs @ (kernel_vecs.conj().T @ psi)
        nrm = np.linalg.norm(psi)
    psi = psi / nrm
    return float(np.real(psi.conj() @ (-h_sym) @ psi))


def spectral_report(
    lind: Superoperator, kms: KmsForm, tol: float = 1e-9
) -> SpectralReport:
    """Eigenvalues (descending) of the coherent form, with gap and kernel size.

    gap is literally lambda_1 - lambda_2 of the descending spectrum, so a
    generator with a kernel of dimension >= 2 reports gap ~ 0.  kernel_dim
    counts eigenvalues within tol * max(1, ||h||) of zero.  Both residual
    fields measure the same defect ||h - h dagger|| (detailed balance is
    exactly hermiticity of the coherent form); dl_residual_energy probes the
    energy of a deterministic unit vector orthogonal to the kernel.
    """
    h = lind if lind.picture == "kms" else coherent_form(lind, kms)
    res = h.hermiticity_residual
    if res is None:
        res = float(spectral_norm(h.mat - h.mat.conj().T))
    h_sym = 0.5 * (h.mat + h.mat.conj().T)
    eig = hermitian_eigendecompose(h_sym)
    w = eig.eigenvalues[::-1].copy()
    v = eig.eigenvectors[:, ::-1]
    scale = max(1.0, float(np.abs(w).max()))
    kernel = np.abs(w) <= tol * scale
    kernel_dim = int(kernel.sum())
    gap = float(w[0] - w[1]) if len(w) > 1 else 0.0
    energy = _ones_probe(h_sym, v[:, : max(kernel_dim, 0)])
    return SpectralReport(
        eigenvalues=w,
        gap=gap,
        kernel_dim=kernel_dim,
        db_residual=float(res),
        hermiticity_residual=float(res),
        dl_residual_energy=energy,
    )


def stationary_channel(
    term: Superoperator, kms: KmsForm, tol: float = 1e-8
) -> Superoperator:
    """Kernel projector of one term, pulled back to the Heisenberg picture.

    P = Gamma^{-1/2} Pi_0 Gamma^{1/2}, with Pi_0 the orthogonal projector
    onto the kernel of the term's coherent form h.  Requires h Hermitian
    within tol (NotDetailedBalanced otherwise) and nonpositive within tol
    (PositiveEigenvalue otherwise).  Kernel membership uses the relative
    cutoff 1e-9 * max(1, ||h||).
    """
    h = coherent_form(term, kms) if term.picture == "heisenberg" else term
    scale = max(1.0, spectral_norm(h.mat))
    res = h.hermiticity_residual
    if res is None:
        res = float(spectral_norm(h.mat - h.mat.conj().T))
    if res > tol * scale:
        raise NotDetailedBalanced(
            f"coherent form deviates from Hermitian by {res:.3e} "
            f"(tolerance {tol:.1e} * {scale:.3e})"
        )
    h_sym = 0.5 * (h.mat + h.mat.conj().T)
    eig = hermitian_eigendecompose(h_sym)
    w = eig.eigenvalues
    if w[-1] > tol * scale:
        raise PositiveEigenvalue(
            f"coherent form has eigenvalue {w[-1]:.3e} above zero"
        )
    kernel_cut = 1e-9 * scale
    sel = np.abs(w) <= kernel_cut
    if not sel.any():
        raise DegenerateGap(
            f"no kernel eigenvalue within {kernel_cut:.1e} (largest is {w[-1]:.3e})"
        )
    vk = eig.eigenvectors[:, sel]
    pi0 = vk @ vk.conj().T
    mat = kms.gamma_inv_half @ pi0 @ kms.gamma_half
    return Superoperator(mat=mat, picture="heisenberg", dim=term.dim)


@dataclass(frozen=True)
class CptpReport:
    """Complete positivity / trace preservation diagnostics of a channel."""

    choi_min_eig: float
    tp_residual: float
    cp: bool
    tp: bool


def choi_matrix(schrodinger_mat: np.ndarray, d: int) -> np.ndarray:
    """Choi matrix C[(k,i),(l,j)] = S[(k,l),(i,j)] of a Schrodinger map."""
    s = np.asarray(schrodinger_mat, dtype=complex)
    if s.shape != (d * d, d * d):
        raise DimensionMismatch(f"superoperator shape {s.shape} for dim {d}")
    return s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def cptp_check(channel: Superoperator, tol: float = 1e-9) -> CptpReport:
    """Report Choi positivity and trace preservation; never raises on failure."""
    if channel.picture == "heisenberg":
        s_mat = channel.mat.conj().T
        heis_mat = channel.mat
    elif channel.picture == "schrodinger":
        s_mat = channel.mat
        heis_mat = channel.mat.conj().T
    else:
        raise BadParams("cptp_check needs a Heisenberg or Schrodinger channel")
    d = channel.dim
    choi = choi_matrix(s_mat, d)
    wmin = float(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T)).min())
    ident = np.eye(d, dtype=complex)
    tp_res = float(
        np.linalg.norm((heis_mat @ ident.reshape(-1)).reshape(d, d) - ident)
    )
    scale = max(1.0, spectral_norm(s_mat))
    return CptpReport(
        choi_min_eig=wmin,
        tp_residual=tp_res,
        cp=wmin >= -tol * scale,
        tp=tp_res <= tol * scale,
    )
