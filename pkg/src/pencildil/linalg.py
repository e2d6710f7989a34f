"""Dense complex linear algebra and subspace calculus.

All functions are pure and deterministic: fixed LAPACK code paths and a
canonical phase convention for computed bases (in every basis column the
first entry of largest modulus is made real positive).  Tolerances are
threaded explicitly; there is no hidden global state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContainmentViolation, NotHermitian, NotPSD, ShapeMismatch


@dataclass(frozen=True)
class ToleranceProfile:
    """Decision thresholds threaded through the constructions.

    rank: relative singular-value cutoff for rank/range decisions.
    containment: absolute bound on ||(I - P_A) B|| when B must lie in span(A).
    hermitian: absolute asymmetry bound for matrices required self-adjoint.
    """

    rank: float = 1e-10
    containment: float = 1e-9
    hermitian: float = 1e-12


DEFAULT_TOLERANCES = ToleranceProfile()

# Orthonormality of a SubspaceBasis is a structural invariant, not a knob.
_BASIS_GRAM_TOL = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d complex array and reject non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def spec_norm(m: np.ndarray) -> float:
    """Spectral norm; zero for matrices with an empty dimension."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def canonicalize_phases(b: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of largest modulus is real > 0."""
    b = np.array(b, dtype=complex)
    for j in range(b.shape[1]):
        col = b[:, j]
        i = int(np.argmax(np.abs(col)))
        v = col[i]
        if np.abs(v) > 0:
            b[:, j] = col * (np.conj(v) / np.abs(v))
    return b


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^ambient_dim (columns)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ShapeMismatch(
                f"basis shape {b.shape} incompatible with ambient dim {self.ambient_dim}"
            )
        k = b.shape[1]
        if k > self.ambient_dim:
            raise ShapeMismatch("more basis vectors than ambient dimensions")
        gram = b.conj().T @ b
        if k and spec_norm(gram - np.eye(k)) > _BASIS_GRAM_TOL:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=complex))


def orthonormal_range(m, tol: float = DEFAULT_TOLERANCES.rank) -> SubspaceBasis:
    """Canonical orthonormal basis of the numerical column space of ``m``.

    Singular directions with sigma <= tol * sigma_max are discarded; the
    zero matrix yields the empty basis.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[1] == 0:
        return SubspaceBasis.empty(n)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return SubspaceBasis.empty(n)
    keep = s > tol * s[0]
    return SubspaceBasis(n, canonicalize_phases(u[:, keep]))


def orthocomplement_within(a: SubspaceBasis, b: SubspaceBasis,
                           containment_tol: float = DEFAULT_TOLERANCES.containment
                           ) -> SubspaceBasis:
    """Orthonormal basis of span(a) minus span(b); requires b inside span(a)."""
    if a.ambient_dim != b.ambient_dim:
        raise ShapeMismatch("subspaces live in different ambient spaces")
    if b.dim > a.dim:
        raise ContainmentViolation("second subspace has larger dimension")
    if b.dim:
        leak = b.basis - a.basis @ (a.basis.conj().T @ b.basis)
        if spec_norm(leak) > containment_tol:
            raise ContainmentViolation(
                f"subspace not contained in the first one (leak {spec_norm(leak):.3e})"
            )
    k = a.dim - b.dim
    if k == 0:
        return SubspaceBasis.empty(a.ambient_dim)
    residual = a.basis - b.basis @ (b.basis.conj().T @ a.basis)
    u, _, _ = np.linalg.svd(residual, full_matrices=False)
    # The complement has dimension exactly dim(a) - dim(b); keep that many
    # leading singular directions.
    return SubspaceBasis(a.ambient_dim, canonicalize_phases(u[:, :k]))


def projector(b: SubspaceBasis) -> np.ndarray:
    """Orthogonal projector basis * basis^H onto the subspace."""
    return b.basis @ b.basis.conj().T


def psd_sqrt(m, tol: float = DEFAULT_TOLERANCES.hermitian) -> np.ndarray:
    """PSD square root by eigendecomposition; clips tiny negative eigenvalues.

    Raises NotHermitian when the asymmetry exceeds ``tol`` and NotPSD when
    an eigenvalue falls below ``-tol``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch("psd_sqrt requires a square matrix")
    if m.shape[0] == 0:
        return m.copy()
    asym = spec_norm(m - m.conj().T)
    if asym > tol:
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds tolerance {tol:.3e}")
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    if w[0] < -tol:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{tol:.3e}")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def numerical_rank(m, tol: float = DEFAULT_TOLERANCES.rank) -> int:
    """Number of singular values above tol * sigma_max (0 for the zero matrix)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))
