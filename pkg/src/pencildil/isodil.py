"""Structured isometric pencils on the space (+)_{-inf}^{-1} Y (+) H.

A StructuredIsometricPencil is an "eventually-shift" operator: tail slots
deeper than the core window shift one slot deeper, identically in the
circle parameter, while a finite core block maps the window
(slots -d..-1, head) into (slots -(d+1)..-1, head).  Vectors are finitely
supported, so the action is evaluated exactly; nothing is discretized.

The canonical minimal isometric dilation of a contractive pencil T is the
d = 0 instance whose core column stacks the outer defect factor F over T.

Dense coordinates order a depth-t window deepest slot first:
[slot -t | ... | slot -1 | head].  The coefficient matrices produced by
``dense_coefficient`` drop content shifted past slot -t, so they agree
with the exact action only while supports stay inside the window; the word
checks size their windows so that never happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, FactorMismatch, ShapeMismatch
from .factorization import FejerRieszFactor, verify_factorization
from .linalg import numerical_rank, spec_norm
from .pencil import DEFAULT_GRID, LinearPencil, evaluate
from .reporting import Report

_FACTOR_TOL = 1e-8
_RANK_TOL = 1e-8


def _as_vector(a, dim: int, name: str) -> np.ndarray:
    v = np.asarray(a, dtype=complex).reshape(-1)
    if v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {dim}")
    return v


@dataclass(frozen=True, eq=False)
class KPlusVector:
    """Finitely supported vector: Y-slots -1, -2, ... plus the head H-part.

    ``tail[i]`` holds slot -(i+1).  Trailing all-zero slots are trimmed on
    construction so support depth is canonical.
    """

    dim_y: int
    dim_h: int
    tail: tuple
    head: np.ndarray

    def __post_init__(self):
        head = _as_vector(self.head, self.dim_h, "head")
        slots = [_as_vector(s, self.dim_y, "tail slot") for s in self.tail]
        while slots and not np.any(slots[-1]):
            slots.pop()
        object.__setattr__(self, "tail", tuple(slots))
        object.__setattr__(self, "head", head)

    @classmethod
    def zero(cls, dim_y: int, dim_h: int) -> "KPlusVector":
        return cls(dim_y, dim_h, (), np.zeros(dim_h))

    @classmethod
    def from_head(cls, head, dim_y: int) -> "KPlusVector":
        head = np.asarray(head, dtype=complex).reshape(-1)
        return cls(dim_y, head.shape[0], (), head)

    @property
    def depth(self) -> int:
        return len(self.tail)

    def slot(self, n: int) -> np.ndarray:
        """Content of Y-slot n (n <= -1); zeros outside the support."""
        if n >= 0:
            raise ValueError("tail slots are indexed by negative integers")
        i = -n - 1
        if i < len(self.tail):
            return self.tail[i]
        return np.zeros(self.dim_y, dtype=complex)

    def window(self, d: int) -> np.ndarray:
        """Slots -d..-1 plus head, deepest first."""
        parts = [self.slot(-n) for n in range(d, 0, -1)]
        parts.append(self.head)
        return np.concatenate(parts) if parts else self.head

    def window_prime(self, d: int) -> np.ndarray:
        """Slots -(d+1)..-1 plus head, deepest first."""
        return self.window(d + 1)

    def norm(self) -> float:
        total = float(np.sum(np.abs(self.head) ** 2))
        for s in self.tail:
            total += float(np.sum(np.abs(s) ** 2))
        return math.sqrt(total)

    def vdot(self, other: "KPlusVector") -> complex:
        """Inner product <self, other>, conjugate-linear in self."""
        self._check_like(other)
        acc = complex(np.vdot(self.head, other.head))
        for n in range(1, max(self.depth, other.depth) + 1):
            acc += complex(np.vdot(self.slot(-n), other.slot(-n)))
        return acc

    def to_dense(self, tail_depth: int) -> np.ndarray:
        if self.depth > tail_depth:
            raise DimensionMismatch(
                f"support depth {self.depth} exceeds window depth {tail_depth}"
            )
        parts = [self.slot(-n) for n in range(tail_depth, 0, -1)]
        parts.append(self.head)
        return np.concatenate(parts)

    @classmethod
    def from_dense(cls, dense, dim_y: int, dim_h: int,
                   tail_depth: int) -> "KPlusVector":
        dense = np.asarray(dense, dtype=complex).reshape(-1)
        if dense.shape[0] != tail_depth * dim_y + dim_h:
            raise DimensionMismatch("dense window length mismatch")
        slots = [dense[(tail_depth - n) * dim_y:(tail_depth - n + 1) * dim_y]
                 for n in range(1, tail_depth + 1)]
        return cls(dim_y, dim_h, tuple(slots), dense[tail_depth * dim_y:])

    def _check_like(self, other: "KPlusVector"):
        if self.dim_y != other.dim_y or self.dim_h != other.dim_h:
            raise DimensionMismatch("vectors live in different spaces")

    def __add__(self, other: "KPlusVector") -> "KPlusVector":
        self._check_like(other)
        depth = max(self.depth, other.depth)
        tail = tuple(self.slot(-n) + other.slot(-n) for n in range(1, depth + 1))
        return KPlusVector(self.dim_y, self.dim_h, tail, self.head + other.head)

    def __sub__(self, other: "KPlusVector") -> "KPlusVector":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "KPlusVector":
        return KPlusVector(self.dim_y, self.dim_h,
                           tuple(scalar * s for s in self.tail),
                           scalar * self.head)


@dataclass(frozen=True, eq=False)
class StructuredIsometricPencil:
    """Eventually-shift pencil determined by a finite core block.

    ``core`` maps the window Y^d (+) H into Y^(d+1) (+) H (deepest slot
    first); tail slots -n with n >= d+1 shift to -(n+1) identically.  The
    whole operator pencil is isometric exactly when the core pencil is,
    because shifted tail output lands in slots orthogonal to the core's
    output window.
    """

    dim_y: int
    dim_h: int
    core_depth: int
    core: LinearPencil

    def __post_init__(self):
        d = self.core_depth
        expected = ((d + 1) * self.dim_y + self.dim_h, d * self.dim_y + self.dim_h)
        if self.core.shape != expected:
            raise ShapeMismatch(
                f"core shape {self.core.shape} != expected {expected} for depth {d}"
            )

    @property
    def window_dim(self) -> int:
        return self.core_depth * self.dim_y + self.dim_h

    @property
    def window_prime_dim(self) -> int:
        return (self.core_depth + 1) * self.dim_y + self.dim_h

    def zero_vector(self) -> KPlusVector:
        return KPlusVector.zero(self.dim_y, self.dim_h)


def core_isometry_defect(v: StructuredIsometricPencil) -> float:
    """How far the core is from an isometric pencil (0 for exact cores)."""
    b0, b1 = v.core.a0, v.core.a1
    eye = np.eye(v.window_dim)
    return max(
        spec_norm(b0.conj().T @ b0 + b1.conj().T @ b1 - eye),
        spec_norm(b1.conj().T @ b0),
    )


def build_canonical(t: LinearPencil, f: FejerRieszFactor,
                    grid_size: int = DEFAULT_GRID) -> StructuredIsometricPencil:
    """Canonical minimal isometric dilation: depth-0 core stacking F over T."""
    residual = verify_factorization(t, f, grid_size=grid_size)
    if residual > _FACTOR_TOL:
        raise FactorMismatch(
            f"factor does not match the pencil defect (residual {residual:.3e})"
        )
    n = t.shape[0]
    core = LinearPencil(np.vstack([f.f0, t.a0]), np.vstack([f.f1, t.a1]))
    return StructuredIsometricPencil(dim_y=f.dim_y, dim_h=n, core_depth=0, core=core)


class BuiltinExample(Enum):
    SHIFT = "shift"
    LAMBDA_SHIFT = "lambda-shift"
    NON_UNIFORM_V = "non-uniform-v"


def builtin_example(name) -> StructuredIsometricPencil:
    """Hand-built example pencils: the forward shift S, the pencil with the
    shift in the lambda coefficient, and the non-uniform depth-2 dilation
    of the zero pencil."""
    name = BuiltinExample(name) if not isinstance(name, BuiltinExample) else name
    if name is BuiltinExample.SHIFT:
        core = LinearPencil([[1.0], [0.0]], [[0.0], [0.0]])
        return StructuredIsometricPencil(1, 1, 0, core)
    if name is BuiltinExample.LAMBDA_SHIFT:
        core = LinearPencil([[0.0], [0.0]], [[1.0], [0.0]])
        return StructuredIsometricPencil(1, 1, 0, core)
    s = 1.0 / math.sqrt(2.0)
    # Rows: slots -3, -2, -1, head; columns: slots -2, -1, head.
    b0 = [[s, 0.0, 0.0],
          [0.0, 0.0, 0.0],
          [0.0, 0.0, s],
          [-s, 0.0, 0.0]]
    b1 = [[0.0, s, 0.0],
          [0.0, 0.0, s],
          [0.0, 0.0, 0.0],
          [0.0, s, 0.0]]
    return StructuredIsometricPencil(1, 1, 2, LinearPencil(b0, b1))


def apply(v: StructuredIsometricPencil, lam: complex,
          x: KPlusVector) -> KPlusVector:
    """Exact action of V(lam) on a finitely supported vector."""
    _check_vector(v, x)
    d = v.core_depth
    e = evaluate(v.core, lam) @ x.window(d)
    tail = [e[(d - i) * v.dim_y:(d - i + 1) * v.dim_y] for i in range(d + 1)]
    for i in range(d, x.depth):
        tail.append(x.tail[i])
    return KPlusVector(v.dim_y, v.dim_h, tuple(tail), e[(d + 1) * v.dim_y:])


def apply_adjoint(v: StructuredIsometricPencil, lam: complex,
                  x: KPlusVector) -> KPlusVector:
    """Exact action of V(lam)^* = V0^* + conj(lam) V1^*."""
    _check_vector(v, x)
    d = v.core_depth
    core_adj = v.core.a0.conj().T + np.conj(lam) * v.core.a1.conj().T
    w = core_adj @ x.window_prime(d)
    tail = [w[(d - 1 - i) * v.dim_y:(d - i) * v.dim_y] for i in range(d)]
    for i in range(d, x.depth - 1):
        tail.append(x.tail[i + 1])
    return KPlusVector(v.dim_y, v.dim_h, tuple(tail), w[d * v.dim_y:])


def _check_vector(v: StructuredIsometricPencil, x: KPlusVector):
    if x.dim_y != v.dim_y or x.dim_h != v.dim_h:
        raise DimensionMismatch("vector does not match the pencil's spaces")


def window_dim(v: StructuredIsometricPencil, tail_depth: int) -> int:
    return tail_depth * v.dim_y + v.dim_h


def dense_coefficient(v: StructuredIsometricPencil, j: int,
                      tail_depth: int) -> np.ndarray:
    """Square matrix of the coefficient operator V_j on a depth-t window.

    Content shifted past slot -t is dropped, so the matrix is exact only
    while supports stay strictly inside the window; its conjugate transpose
    is the matching adjoint coefficient under the same proviso.
    """
    d = v.core_depth
    if tail_depth < d + 1:
        raise DimensionMismatch("window too shallow for the core block")
    dim = window_dim(v, tail_depth)
    m = np.zeros((dim, dim), dtype=complex)
    if j == 0:
        k = (tail_depth - d - 1) * v.dim_y
        if k > 0:
            m[0:k, v.dim_y:v.dim_y + k] = np.eye(k)
    coeff = v.core.a0 if j == 0 else v.core.a1
    m[dim - v.window_prime_dim:, dim - v.window_dim:] = coeff
    return m


def dense_rect(v: StructuredIsometricPencil, lam: complex,
               tail_depth: int) -> np.ndarray:
    """Exact matrix of V(lam) from a depth-t window into a depth-(t+1) one."""
    d = v.core_depth
    if tail_depth < d:
        raise DimensionMismatch("window too shallow for the core block")
    din = window_dim(v, tail_depth)
    dout = window_dim(v, tail_depth + 1)
    m = np.zeros((dout, din), dtype=complex)
    k = (tail_depth - d) * v.dim_y
    if k > 0:
        m[0:k, 0:k] = np.eye(k)
    m[dout - v.window_prime_dim:, din - v.window_dim:] = evaluate(v.core, lam)
    return m


def coefficient_norms(v: StructuredIsometricPencil) -> tuple[float, float]:
    """Operator norms of (V0, V1) on the full space.

    V0 is the orthogonal sum of the deep tail shift (norm 1 whenever Y is
    nontrivial) and the core's constant coefficient; V1 acts through the
    core's lambda coefficient only.
    """
    shift = 1.0 if v.dim_y > 0 else 0.0
    return max(shift, spec_norm(v.core.a0)), spec_norm(v.core.a1)


def _head_block(v: StructuredIsometricPencil, block: np.ndarray,
                tail_depth: int, n_t: int) -> np.ndarray:
    start = tail_depth * v.dim_y
    return block[start:start + n_t, :]


def _embedded_h_basis(v: StructuredIsometricPencil, tail_depth: int,
                      n_t: int) -> np.ndarray:
    e = np.zeros((window_dim(v, tail_depth), n_t), dtype=complex)
    e[tail_depth * v.dim_y:tail_depth * v.dim_y + n_t, :] = np.eye(n_t)
    return e


def _check_dilation_input(v: StructuredIsometricPencil, t: LinearPencil):
    if t.shape[0] != t.shape[1]:
        raise ShapeMismatch("dilated pencil must be square")
    if t.shape[0] > v.dim_h:
        raise DimensionMismatch("pencil space exceeds the dilation's head space")


def check_dilation(v: StructuredIsometricPencil, t: LinearPencil,
                   max_len: int = 6, tol: float = 1e-9) -> Report:
    """Compare compressed symmetrized multipowers of V against those of T.

    For every exponent pair (t0, t1) with t0 + t1 <= max_len the compressed
    multipower P_H V^(t0,t1)|H must equal T^(t0,t1); by multilinearity this
    is the dilation identity for all circle parameters at once.
    """
    from .pencil import symmetrized_multipower

    _check_dilation_input(v, t)
    n_t = t.shape[0]
    tail_depth = max_len + v.core_depth + 1
    v0 = dense_coefficient(v, 0, tail_depth)
    v1 = dense_coefficient(v, 1, tail_depth)
    blocks = [_embedded_h_basis(v, tail_depth, n_t)]
    worst, witness, details = 0.0, None, []
    for length in range(0, max_len + 1):
        if length > 0:
            nxt = []
            for k in range(length + 1):
                acc = np.zeros_like(blocks[0])
                if k < len(blocks):
                    acc += v0 @ blocks[k]
                if k > 0:
                    acc += v1 @ blocks[k - 1]
                nxt.append(acc)
            blocks = nxt
        for k in range(length + 1):
            compressed = _head_block(v, blocks[k], tail_depth, n_t) / math.comb(length, k)
            target = symmetrized_multipower(t, (length - k, k), word_cap=max_len)
            resid = spec_norm(compressed - target)
            details.append({"t": [length - k, k], "residual": resid})
            if resid > worst:
                worst, witness = resid, {"t": [length - k, k]}
    return Report.from_residual("dilation", worst, tol, witness, details)


def check_uniform(v: StructuredIsometricPencil, t: LinearPencil,
                  max_len: int = 6, tol: float = 1e-9) -> Report:
    """Compare every compressed ordered coefficient word against T's word.

    Products over independent circle parameters expand multilinearly into
    ordered words, so matching all 2^n words of each length n <= max_len is
    the uniform dilation property verified exactly.
    """
    _check_dilation_input(v, t)
    n_t = t.shape[0]
    tail_depth = max_len + v.core_depth + 1
    v_ops = (dense_coefficient(v, 0, tail_depth), dense_coefficient(v, 1, tail_depth))
    t_ops = (t.a0, t.a1)
    level = [((), _embedded_h_basis(v, tail_depth, n_t), np.eye(n_t, dtype=complex))]
    worst, witness, details = 0.0, None, []
    for _ in range(max_len):
        nxt = []
        for word, vb, tb in level:
            for bit in (0, 1):
                nxt.append(((bit,) + word, v_ops[bit] @ vb, t_ops[bit] @ tb))
        level = nxt
        for word, vb, tb in level:
            resid = spec_norm(_head_block(v, vb, tail_depth, n_t) - tb)
            if resid > worst:
                worst = resid
                witness = {"word": "".join(str(b) for b in word)}
    details.append({"words_checked": sum(2 ** n for n in range(1, max_len + 1))})
    return Report.from_residual("uniform", worst, tol, witness, details)


def check_minimality(v: StructuredIsometricPencil, t: LinearPencil,
                     depth: int = 5, rank_tol: float = _RANK_TOL) -> Report:
    """Span criterion for minimality at finite depth.

    Collects all coefficient words of length <= depth applied to a basis of
    H, projects onto the window (slots -depth..-1, full head) and demands
    numerical rank depth*dimY + dimH there.  An untouched line adjoined to
    the dilation space shows up as a rank deficit.
    """
    _check_dilation_input(v, t)
    n_t = t.shape[0]
    tail_depth = depth + v.core_depth + 1
    v0 = dense_coefficient(v, 0, tail_depth)
    v1 = dense_coefficient(v, 1, tail_depth)
    level = _embedded_h_basis(v, tail_depth, n_t)
    collected = [level]
    for _ in range(depth):
        level = np.concatenate([v0 @ level, v1 @ level], axis=1)
        collected.append(level)
    stacked = np.concatenate(collected, axis=1)
    window_rows = stacked[(tail_depth - depth) * v.dim_y:, :]
    rank = numerical_rank(window_rows, rank_tol)
    expected = depth * v.dim_y + v.dim_h
    deficit = float(expected - rank)
    return Report.from_residual(
        "minimality", deficit, 0.0,
        witness={"rank": rank, "expected": expected},
        details=[{"window_depth": depth, "rank": rank, "expected": expected}],
    )
