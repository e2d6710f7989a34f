"""Minimal unitary extension of a structured isometric pencil.

The construction runs entirely inside the finite output window of the
core: the closed range of the pencil covers every deeper tail slot, so the
wandering space L, the gap space K1 between the full range and the range
at parameter 1, and the column space U = K1 (+) L are all finite
computations.  The extension acts on K = K+ (+) (+)_{1}^{inf} U by feeding
future slot 1 through the isometric pencil Q(lam) = [P(lam)|K1, 0; 0, I_L]
and shifting the remaining future slots down.

The block function theta(z) = [[F, P_Y Q], [T, P_H Q]] assembled from the
canonical chain is linear, contractive on the disk and unitary on the
circle; its corner blocks carry the density conditions checked (pointwise,
as a surrogate) by ``check_biinner``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotIsometric, PencilError
from .factorization import FejerRieszFactor
from .isodil import (KPlusVector, StructuredIsometricPencil, apply,
                     apply_adjoint, core_isometry_defect, dense_coefficient,
                     dense_rect, window_dim)
from .linalg import (SubspaceBasis, numerical_rank, orthocomplement_within,
                     orthonormal_range, projector, spec_norm)
from .pencil import DEFAULT_GRID, LinearPencil, evaluate, unit_circle_grid
from .reporting import Report

_ISO_TOL = 1e-8
_RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CoreSubspaces:
    """Subspace data of the extension, all inside the core output window."""

    window_prime_dim: int
    ran_n0: SubspaceBasis
    ran_n1: SubspaceBasis
    l_space: SubspaceBasis
    k1_space: SubspaceBasis
    u_space: SubspaceBasis
    p0: np.ndarray
    p1: np.ndarray


@dataclass(frozen=True, eq=False)
class QPencil:
    """Isometric pencil mapping U-coordinates into the window of K+."""

    q0: np.ndarray
    q1: np.ndarray

    def __post_init__(self):
        q0 = np.asarray(self.q0, dtype=complex)
        q1 = np.asarray(self.q1, dtype=complex)
        if q0.shape != q1.shape:
            raise DimensionMismatch("Q coefficients must have equal shape")
        eye = np.eye(q0.shape[1])
        defect = max(
            spec_norm(q0.conj().T @ q0 + q1.conj().T @ q1 - eye),
            spec_norm(q1.conj().T @ q0),
        )
        if defect > _ISO_TOL:
            raise NotIsometric(f"Q pencil is not isometric (defect {defect:.3e})")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "q1", q1)

    @property
    def dim_u(self) -> int:
        return self.q0.shape[1]

    def __call__(self, lam: complex) -> np.ndarray:
        return self.q0 + lam * self.q1


def core_subspaces(v: StructuredIsometricPencil,
                   rank_tol: float = 1e-10) -> CoreSubspaces:
    """Ranges, wandering space L, gap space K1 and U = K1 (+) L.

    Within the output window: the closed range of the pencil splits as
    ran(B0) (+) ran(B1) (the cross term B1^H B0 vanishes for isometric
    pencils), L is its orthocomplement, and K1 is the complement of
    ran(B0 + B1) inside the split range.  Deeper tail slots always belong
    to the range of the shift part, so nothing escapes the window.
    """
    defect = core_isometry_defect(v)
    if defect > _ISO_TOL:
        raise NotIsometric(f"core pencil is not isometric (defect {defect:.3e})")
    wp = v.window_prime_dim
    b0, b1 = v.core.a0, v.core.a1
    ran0 = orthonormal_range(b0, rank_tol)
    ran1 = orthonormal_range(b1, rank_tol)
    if ran0.dim and ran1.dim and \
            spec_norm(ran0.basis.conj().T @ ran1.basis) > 1e-10:
        raise NotIsometric("coefficient ranges are not orthogonal")
    combined = orthonormal_range(np.hstack([b0, b1]), rank_tol)
    if combined.dim != ran0.dim + ran1.dim:
        raise NotIsometric("coefficient ranges overlap")
    l_space = orthocomplement_within(SubspaceBasis.full(wp), combined)
    k1 = orthocomplement_within(combined, orthonormal_range(b0 + b1, rank_tol))
    u_basis = np.hstack([k1.basis, l_space.basis])
    u_space = SubspaceBasis(wp, u_basis)
    if k1.dim != ran0.dim + ran1.dim - v.window_dim:
        raise PencilError("gap space dimension violates the rank bookkeeping")
    if u_space.dim != v.dim_y:
        raise PencilError("dim U != dim Y: construction is inconsistent")
    return CoreSubspaces(
        window_prime_dim=wp,
        ran_n0=ran0,
        ran_n1=ran1,
        l_space=l_space,
        k1_space=k1,
        u_space=u_space,
        p0=projector(ran0),
        p1=projector(ran1),
    )


def build_q(cores: CoreSubspaces) -> QPencil:
    """Q(lam) = [P(lam)|K1, 0; 0, I_L] in U-coordinates (K1 block first)."""
    k1 = cores.k1_space.basis
    l_basis = cores.l_space.basis
    q0 = np.hstack([cores.p0 @ k1, l_basis])
    q1 = np.hstack([cores.p1 @ k1, np.zeros((cores.window_prime_dim, l_basis.shape[1]))])
    return QPencil(q0, q1)


@dataclass(frozen=True, eq=False)
class UnitaryDilation:
    """Structured unitary pencil on K = K+ (+) future copies of U."""

    v: StructuredIsometricPencil
    q: QPencil
    cores: CoreSubspaces

    @property
    def dim_y(self) -> int:
        return self.v.dim_y

    @property
    def dim_h(self) -> int:
        return self.v.dim_h

    @property
    def dim_u(self) -> int:
        return self.q.dim_u

    @property
    def core_depth(self) -> int:
        return self.v.core_depth


def build_unitary(v: StructuredIsometricPencil) -> UnitaryDilation:
    """Minimal unitary extension of an isometric structured pencil."""
    cores = core_subspaces(v)
    return UnitaryDilation(v=v, q=build_q(cores), cores=cores)


@dataclass(frozen=True, eq=False)
class KVector:
    """Finitely supported vector of K+: head space plus future U-slots."""

    kplus: KPlusVector
    dim_u: int
    future: tuple

    def __post_init__(self):
        slots = []
        for s in self.future:
            s = np.asarray(s, dtype=complex).reshape(-1)
            if s.shape[0] != self.dim_u:
                raise DimensionMismatch("future slot has wrong dimension")
            slots.append(s)
        while slots and not np.any(slots[-1]):
            slots.pop()
        object.__setattr__(self, "future", tuple(slots))

    @classmethod
    def from_kplus(cls, kplus: KPlusVector, dim_u: int) -> "KVector":
        return cls(kplus, dim_u, ())

    @property
    def future_depth(self) -> int:
        return len(self.future)

    def future_slot(self, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError("future slots are indexed from 1")
        if n - 1 < len(self.future):
            return self.future[n - 1]
        return np.zeros(self.dim_u, dtype=complex)

    def norm(self) -> float:
        total = self.kplus.norm() ** 2
        for s in self.future:
            total += float(np.sum(np.abs(s) ** 2))
        return math.sqrt(total)

    def vdot(self, other: "KVector") -> complex:
        acc = self.kplus.vdot(other.kplus)
        for n in range(1, max(self.future_depth, other.future_depth) + 1):
            acc += complex(np.vdot(self.future_slot(n), other.future_slot(n)))
        return acc

    def __add__(self, other: "KVector") -> "KVector":
        depth = max(self.future_depth, other.future_depth)
        future = tuple(self.future_slot(n) + other.future_slot(n)
                       for n in range(1, depth + 1))
        return KVector(self.kplus + other.kplus, self.dim_u, future)

    def __sub__(self, other: "KVector") -> "KVector":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "KVector":
        return KVector(scalar * self.kplus, self.dim_u,
                       tuple(scalar * s for s in self.future))


def _embed_window_prime(v: StructuredIsometricPencil, wp_vec) -> KPlusVector:
    return KPlusVector.from_dense(wp_vec, v.dim_y, v.dim_h, v.core_depth + 1)


def apply_u(u: UnitaryDilation, lam: complex, x: KVector) -> KVector:
    """Exact action: (k, u1, u2, ...) -> (V(lam)k + Q(lam)u1, u2, ...)."""
    kp = apply(u.v, lam, x.kplus)
    if x.future:
        kp = kp + _embed_window_prime(u.v, u.q(lam) @ x.future[0])
    return KVector(kp, u.dim_u, x.future[1:])


def apply_u_adjoint(u: UnitaryDilation, lam: complex, x: KVector) -> KVector:
    """Exact action of U(lam)^* = U(lam)^{-1}.

    The K+ part goes through V(lam)^*, its window content lands in future
    slot 1 through Q(lam)^*, and existing future slots shift deeper.
    """
    kp = apply_adjoint(u.v, lam, x.kplus)
    u_new = u.q(lam).conj().T @ x.kplus.window_prime(u.core_depth)
    return KVector(kp, u.dim_u, (u_new,) + x.future)


def coefficient_norms_unitary(u: UnitaryDilation) -> tuple[float, float]:
    """Operator norms of the coefficient operators (U0, U1) on all of K."""
    shift = 1.0 if (u.dim_y > 0 or u.dim_u > 0) else 0.0
    n0 = max(shift, spec_norm(np.hstack([u.v.core.a0, u.q.q0])))
    n1 = spec_norm(np.hstack([u.v.core.a1, u.q.q1]))
    return n0, n1


def dense_u_coefficient(u: UnitaryDilation, j: int, tail_depth: int,
                        future_depth: int) -> np.ndarray:
    """Coefficient operator U_j on the window [K+ depth t | future 1..m].

    Same drop-at-the-edge proviso as ``dense_coefficient``: exact while tail
    support stays below t and (for adjoints) future support below m.
    """
    v = u.v
    kdim = window_dim(v, tail_depth)
    udim = u.dim_u
    dim = kdim + future_depth * udim
    m = np.zeros((dim, dim), dtype=complex)
    m[0:kdim, 0:kdim] = dense_coefficient(v, j, tail_depth)
    qj = u.q.q0 if j == 0 else u.q.q1
    wp = v.window_prime_dim
    m[kdim - wp:kdim, kdim:kdim + udim] = qj
    if j == 0:
        k = (future_depth - 1) * udim
        if k > 0:
            m[kdim:kdim + k, kdim + udim:kdim + udim + k] = np.eye(k)
    return m


def _embedded_h_basis_k(u: UnitaryDilation, tail_depth: int, future_depth: int,
                        n_t: int) -> np.ndarray:
    dim = window_dim(u.v, tail_depth) + future_depth * u.dim_u
    e = np.zeros((dim, n_t), dtype=complex)
    start = tail_depth * u.dim_y
    e[start:start + n_t, :] = np.eye(n_t)
    return e


def verify_q_identities(v: StructuredIsometricPencil, q: QPencil,
                        grid_size: int = DEFAULT_GRID,
                        tol: float = 1e-9) -> Report:
    """Check I - V(lam)V(lam)^* = Q(lam)Q(lam)^* and V(lam)^*Q(lam) = 0.

    Verified as matrix identities on a window covering the core output and
    two deeper tail slots, where both sides act exactly.
    """
    d = v.core_depth
    t = d + 3
    din = window_dim(v, t)
    dout = window_dim(v, t + 1)
    wp = v.window_prime_dim
    embed = np.zeros((dout, din), dtype=complex)
    embed[dout - din:, :] = np.eye(din)
    worst = 0.0
    witness = None
    for lam in unit_circle_grid(grid_size):
        vt = dense_rect(v, lam, t)
        qs = q(lam)
        qq = np.zeros((dout, din), dtype=complex)
        qq[dout - wp:, din - wp:] = qs @ qs.conj().T
        r1 = spec_norm(embed - vt @ (vt.conj().T @ embed) - qq)
        q_emb = np.zeros((dout, qs.shape[1]), dtype=complex)
        q_emb[dout - wp:, :] = qs
        r2 = spec_norm(vt.conj().T @ q_emb)
        resid = max(r1, r2)
        if resid > worst:
            worst = resid
            witness = {"lambda": [lam.real, lam.imag]}
    return Report.from_residual("q-identities", worst, tol, witness)


def check_uniform_unitary(u: UnitaryDilation, t: LinearPencil,
                          max_len: int = 6, tol: float = 1e-9) -> Report:
    """Every compressed ordered word in (U0, U1) must match T's word."""
    n_t = t.shape[0]
    if t.shape[0] != t.shape[1] or n_t > u.dim_h:
        raise DimensionMismatch("pencil does not fit the dilation's head space")
    tail_depth = max_len + u.core_depth + 1
    future_depth = max_len + 1
    u_ops = (dense_u_coefficient(u, 0, tail_depth, future_depth),
             dense_u_coefficient(u, 1, tail_depth, future_depth))
    t_ops = (t.a0, t.a1)
    head_start = tail_depth * u.dim_y
    level = [((), _embedded_h_basis_k(u, tail_depth, future_depth, n_t),
              np.eye(n_t, dtype=complex))]
    worst, witness = 0.0, None
    for _ in range(max_len):
        nxt = []
        for word, ub, tb in level:
            for bit in (0, 1):
                nxt.append(((bit,) + word, u_ops[bit] @ ub, t_ops[bit] @ tb))
        level = nxt
        for word, ub, tb in level:
            resid = spec_norm(ub[head_start:head_start + n_t, :] - tb)
            if resid > worst:
                worst = resid
                witness = {"word": "".join(str(b) for b in word)}
    return Report.from_residual("uniform-unitary", worst, tol, witness)


def compression_tower(u: UnitaryDilation, t: LinearPencil, max_n: int = 6,
                      grid_size: int = 32, tol: float = 1e-9) -> Report:
    """P_H U(lam)^n |H = T(lam)^n and P_H U(lam)^{-n} |H = (T(lam)^n)^*."""
    n_t = t.shape[0]
    if t.shape[0] != t.shape[1] or n_t > u.dim_h:
        raise DimensionMismatch("pencil does not fit the dilation's head space")
    worst = 0.0
    witness = None
    basis = [KVector.from_kplus(
        KPlusVector(u.dim_y, u.dim_h, (), np.eye(u.dim_h)[:, j]), u.dim_u)
        for j in range(n_t)]
    for lam in unit_circle_grid(grid_size):
        tv = evaluate(t, lam)
        power = np.eye(n_t, dtype=complex)
        forward = list(basis)
        backward = list(basis)
        for n in range(1, max_n + 1):
            power = tv @ power
            forward = [apply_u(u, lam, x) for x in forward]
            backward = [apply_u_adjoint(u, lam, x) for x in backward]
            fwd_heads = np.stack([x.kplus.head[:n_t] for x in forward], axis=1)
            bwd_heads = np.stack([x.kplus.head[:n_t] for x in backward], axis=1)
            resid = max(spec_norm(fwd_heads - power),
                        spec_norm(bwd_heads - power.conj().T))
            if resid > worst:
                worst = resid
                witness = {"n": n, "lambda": [lam.real, lam.imag]}
    return Report.from_residual("compression-tower", worst, tol, witness)


def check_minimality_unitary(u: UnitaryDilation, t: LinearPencil,
                             depth: int = 4, rank_tol: float = _RANK_TOL,
                             word_cap: int | None = None) -> Report:
    """Two-sided span criterion at finite depth.

    Words over {U0, U1, U0^*, U1^*} applied to a basis of H must fill the
    window (slots -depth..-1, head, future 1..depth).  Deep cores need a
    setup step before future slots can be reached, so the word length cap
    defaults to depth + core_depth + 1; the demanded rank over the depth
    window is unchanged.
    """
    n_t = t.shape[0]
    if t.shape[0] != t.shape[1] or n_t > u.dim_h:
        raise DimensionMismatch("pencil does not fit the dilation's head space")
    cap = word_cap if word_cap is not None else depth + u.core_depth + 1
    tail_depth = cap + u.core_depth + 1
    future_depth = cap + 1
    ops = [dense_u_coefficient(u, 0, tail_depth, future_depth),
           dense_u_coefficient(u, 1, tail_depth, future_depth)]
    ops += [ops[0].conj().T, ops[1].conj().T]
    level = _embedded_h_basis_k(u, tail_depth, future_depth, n_t)
    collected = [level]
    for _ in range(cap):
        level = np.concatenate([op @ level for op in ops], axis=1)
        collected.append(level)
    stacked = np.concatenate(collected, axis=1)
    kdim = window_dim(u.v, tail_depth)
    rows = np.concatenate([
        stacked[(tail_depth - depth) * u.dim_y:kdim, :],
        stacked[kdim:kdim + depth * u.dim_u, :],
    ], axis=0)
    rank = numerical_rank(rows, rank_tol) if rows.size else 0
    expected = depth * u.dim_y + u.dim_h + depth * u.dim_u
    deficit = float(expected - rank)
    return Report.from_residual(
        "minimality-unitary", deficit, 0.0,
        witness={"rank": rank, "expected": expected},
        details=[{"depth": depth, "word_cap": cap, "rank": rank,
                  "expected": expected}],
    )


def assemble_theta(t: LinearPencil, f: FejerRieszFactor,
                   q: QPencil) -> LinearPencil:
    """Block pencil [[F, P_Y Q], [T, P_H Q]] from H (+) U into Y (+) H."""
    n = t.shape[0]
    dim_y = f.dim_y
    if q.q0.shape[0] != dim_y + n:
        raise DimensionMismatch(
            "Q does not act on the depth-0 window Y (+) H of the canonical chain"
        )
    theta0 = np.block([[f.f0, q.q0[:dim_y, :]], [t.a0, q.q0[dim_y:, :]]])
    theta1 = np.block([[f.f1, q.q1[:dim_y, :]], [t.a1, q.q1[dim_y:, :]]])
    return LinearPencil(theta0, theta1)


def interior_samples(count: int) -> np.ndarray:
    """Deterministic sample points in the open unit disk."""
    radii = np.array([0.15, 0.45, 0.75, 0.95])
    k = np.arange(count)
    return radii[k % 4] * np.exp(2j * np.pi * k / count)


def check_biinner(theta: LinearPencil, dim_y: int, dim_h: int, dim_u: int,
                  grid_size: int = 64, disk_samples: int = 32,
                  tol: float = 1e-9, rank_tol: float = _RANK_TOL) -> Report:
    """Boundary unitarity, disk contractivity and pointwise density ranks.

    The rank conditions on the corner blocks stand in for the L^2 density
    conditions; full pointwise rank on the grid is reported as a surrogate,
    not a certificate.
    """
    rows, cols = theta.shape
    if rows != dim_y + dim_h or cols != dim_h + dim_u:
        raise DimensionMismatch("theta block dimensions are inconsistent")
    worst = 0.0
    witness = None
    rank_ok = True
    eye = np.eye(cols)
    for lam in unit_circle_grid(grid_size):
        val = evaluate(theta, lam)
        resid = spec_norm(val.conj().T @ val - eye)
        if resid > worst:
            worst, witness = resid, {"where": "boundary", "lambda": [lam.real, lam.imag]}
        if numerical_rank(val[:dim_y, :dim_h], rank_tol) != dim_y:
            rank_ok = False
        if numerical_rank(val[dim_y:, dim_h:], rank_tol) != dim_u:
            rank_ok = False
    for z in interior_samples(disk_samples):
        excess = max(0.0, spec_norm(evaluate(theta, z)) - 1.0)
        if excess > worst:
            worst, witness = excess, {"where": "interior", "z": [z.real, z.imag]}
    if not rank_ok:
        worst = max(worst, 1.0)
        witness = {"where": "density-surrogate"}
    details = [{"density_check": "pointwise rank surrogate", "passed": rank_ok}]
    return Report.from_residual("theta-biinner", worst, tol, witness, details)
