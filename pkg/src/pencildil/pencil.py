"""Linear operator pencils A0 + lambda*A1 and their classification.

A pencil is classified over the unit circle: contractive means
T(lam)^H T(lam) <= I for all |lam| = 1, isometric means equality, unitary
additionally T(lam) T(lam)^H = I.  Isometry and unitarity are decided
algebraically on the coefficients (exact for all lam at once);
contractivity is a grid decision with a Lipschitz certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import CapExceeded, ShapeMismatch
from .linalg import as_matrix, spec_norm

DEFAULT_GRID = 256
WORD_LENGTH_CAP = 10


def unit_circle_grid(n: int) -> np.ndarray:
    """n equispaced points exp(2*pi*i*k/n), k = 0..n-1."""
    return np.exp(2j * np.pi * np.arange(n) / n)


@dataclass(frozen=True, eq=False)
class LinearPencil:
    """Pair of equal-shape complex matrices representing a0 + lam*a1."""

    a0: np.ndarray
    a1: np.ndarray

    def __post_init__(self):
        a0 = as_matrix(self.a0, "a0")
        a1 = as_matrix(self.a1, "a1")
        if a0.shape != a1.shape:
            raise ShapeMismatch(f"coefficient shapes differ: {a0.shape} vs {a1.shape}")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a0.shape

    def __call__(self, lam: complex) -> np.ndarray:
        return evaluate(self, lam)


def evaluate(p: LinearPencil, lam: complex) -> np.ndarray:
    """Pointwise value a0 + lam*a1 (lam unrestricted; circle grids elsewhere)."""
    return p.a0 + lam * p.a1


class PencilKind(Enum):
    UNITARY = "unitary"
    ISOMETRIC = "isometric"
    CONTRACTIVE = "contractive"
    NONE = "none"


@dataclass(frozen=True)
class PencilClass:
    """Classification verdict with the grid norm statistics behind it."""

    kind: PencilKind
    certified: bool
    margin: float
    max_norm_on_grid: float

    @property
    def is_contractive(self) -> bool:
        return self.kind is not PencilKind.NONE


def classify(p: LinearPencil, grid_size: int = DEFAULT_GRID,
             tol: float = 1e-10) -> PencilClass:
    """Classify a pencil as unitary / isometric / contractive / none.

    Isometric iff a0^H a0 + a1^H a1 = I and a1^H a0 = 0 (expanding
    T(lam)^H T(lam) = I for all lam forces the cross term to vanish);
    unitary iff additionally the adjoint identities hold.  Contractive is a
    grid test: min eig(I - T^H T) >= -tol at grid_size roots of unity;
    ``certified`` marks the stronger Lipschitz bound
    max_grid ||T|| <= 1 - ||a1|| * pi / grid_size, which certifies the
    whole circle.  Boundary pencils (isometric ones have margin 0) pass the
    grid test but are never ``certified`` contractive.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    rows, cols = p.shape
    eye_in = np.eye(cols)

    grid = unit_circle_grid(grid_size)
    values = [evaluate(p, lam) for lam in grid]
    max_norm = max((spec_norm(v) for v in values), default=0.0)

    iso_defect = max(
        spec_norm(p.a0.conj().T @ p.a0 + p.a1.conj().T @ p.a1 - eye_in),
        spec_norm(p.a1.conj().T @ p.a0),
    )
    if iso_defect <= tol:
        eye_out = np.eye(rows)
        uni_defect = max(
            spec_norm(p.a0 @ p.a0.conj().T + p.a1 @ p.a1.conj().T - eye_out),
            spec_norm(p.a1 @ p.a0.conj().T),
        )
        kind = PencilKind.UNITARY if uni_defect <= tol else PencilKind.ISOMETRIC
        return PencilClass(kind, certified=True, margin=0.0, max_norm_on_grid=max_norm)

    min_eig = min(
        (float(np.linalg.eigvalsh(eye_in - v.conj().T @ v)[0]) for v in values),
        default=0.0,
    )
    margin = 1.0 - max_norm
    if min_eig >= -tol:
        lip = spec_norm(p.a1) * math.pi / grid_size
        return PencilClass(PencilKind.CONTRACTIVE, certified=max_norm <= 1.0 - lip,
                           margin=margin, max_norm_on_grid=max_norm)
    return PencilClass(PencilKind.NONE, certified=False, margin=margin,
                       max_norm_on_grid=max_norm)


def word_apply(pencils: Sequence[LinearPencil], word: Sequence[int],
               x: np.ndarray) -> np.ndarray:
    """Apply the coefficient word A_{e1}^(1) ... A_{en}^(n) to x.

    A product of pencil values over independent circle parameters is
    multilinear in them, so spans of such products equal spans of the 2^n
    coefficient words; this makes span and compression checks exact with
    finitely many products.
    """
    if len(pencils) != len(word):
        raise ShapeMismatch("word length must match the number of pencils")
    out = np.asarray(x, dtype=complex)
    for p, bit in zip(reversed(pencils), reversed(word)):
        if bit not in (0, 1):
            raise ValueError("word entries must be 0 or 1")
        coeff = p.a0 if bit == 0 else p.a1
        if coeff.shape[1] != out.shape[0]:
            raise ShapeMismatch("pencil coefficients do not chain with the vector")
        out = coeff @ out
    return out


def coefficient_word_sums(p: LinearPencil, length: int) -> list[np.ndarray]:
    """Sums over all words of the given length grouped by their a1-count.

    Returns S[k] = sum of A_{e1}...A_{en} over words with exactly k ones,
    computed by the prepend recursion S_n(k) = a0 S_{n-1}(k) + a1 S_{n-1}(k-1).
    """
    rows, cols = p.shape
    if rows != cols:
        raise ShapeMismatch("word sums require a square pencil")
    sums = [np.eye(rows, dtype=complex)]
    for _ in range(length):
        nxt = []
        for k in range(len(sums) + 1):
            acc = np.zeros((rows, rows), dtype=complex)
            if k < len(sums):
                acc += p.a0 @ sums[k]
            if k > 0:
                acc += p.a1 @ sums[k - 1]
            nxt.append(acc)
        sums = nxt
    return sums


def symmetrized_multipower(p: LinearPencil, t: tuple[int, int],
                           word_cap: int = WORD_LENGTH_CAP) -> np.ndarray:
    """Average of all ordered products with a0 used t[0] and a1 used t[1] times.

    Equals the binomial-normalized sum over coefficient words; e.g.
    t = (1, 2) gives (a0 a1^2 + a1 a0 a1 + a1^2 a0) / 3.
    """
    t0, t1 = t
    if t0 < 0 or t1 < 0:
        raise ValueError("multipower indices must be nonnegative")
    n = t0 + t1
    if n > word_cap:
        raise CapExceeded(f"word length {n} exceeds cap {word_cap}")
    if p.shape[0] != p.shape[1]:
        raise ShapeMismatch("multipowers require a square pencil")
    sums = coefficient_word_sums(p, n)
    return sums[t1] / math.comb(n, t1)
