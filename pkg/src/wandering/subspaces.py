"""Closed-subspace algebra in truncated models.

A :class:`Subspace` is an orthonormal basis in isometric coordinates, so
projections, orthogonal complements and principal angles are plain
Euclidean linear algebra.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError
from .operators import OperatorMatrix, ShiftTuple, interior_positions, multi_power, operator_norm
from .spaces import SpaceModel, TruncationGrid, check_same_grid, to_isometric

RANK_TOL = 1e-10
ANGLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis (columns, isometric coordinates) of a subspace of ``F_d``."""

    grid: TruncationGrid
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex).reshape(self.grid.size, -1)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        p = self.basis @ self.basis.conj().T
        p.setflags(write=False)
        return p

    def orthonormality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.basis.conj().T @ self.basis - np.eye(self.dim))))

    def complement_residual(self, vectors: np.ndarray) -> float:
        """``||(I - P) V||``; zero iff the columns of ``V`` lie in the subspace."""
        v = np.asarray(vectors).reshape(self.grid.size, -1)
        return operator_norm(v - self.basis @ (self.basis.conj().T @ v))

    def interior_part(self, margin: int) -> Subspace:
        """The vectors of this subspace supported on ``F_{d - margin}``."""
        if margin == 0 or self.dim == 0:
            return self
        outside = ~self.grid.interior_mask(margin)
        return Subspace(self.grid, self.basis @ _null_space(self.basis[outside], RANK_TOL))

    def project_to_interior(self, margin: int, rank_tol: float = RANK_TOL) -> Subspace:
        """Orthogonal projection onto ``F_{d - margin}``, as a subspace of the reduced grid."""
        inner = self.grid.reduced(margin)
        if any(c < 0 for c in inner.caps):
            raise ConfigurationError(f"margin {margin} leaves an empty interior for caps {self.grid.caps}")
        rows = self.grid.interior_mask(margin)
        return from_generators(inner, self.basis[rows], rank_tol)


def zero_subspace(grid: TruncationGrid) -> Subspace:
    return Subspace(grid, np.zeros((grid.size, 0), dtype=complex))


def full_space(grid: TruncationGrid) -> Subspace:
    return Subspace(grid, np.eye(grid.size, dtype=complex))


def _null_space(a: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of ``{x : a x = 0}``; singular values ``<= tol`` count as zero."""
    cols = a.shape[1]
    if a.shape[0] == 0 or cols == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def _columns(grid: TruncationGrid, vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        v = vectors.astype(complex)
    else:
        vecs = [np.asarray(x, dtype=complex).ravel() for x in vectors]
        if not vecs:
            return np.zeros((grid.size, 0), dtype=complex)
        v = np.column_stack(vecs)
    if v.shape[0] != grid.size:
        raise ArgumentError(f"vectors of length {v.shape[0]} do not live on a grid of size {grid.size}")
    return v


def from_generators(grid: TruncationGrid, vectors, rank_tol: float = RANK_TOL,
                    model: SpaceModel | None = None) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    ``vectors`` is a 2-D array (columns) or a sequence of 1-D vectors.
    They are taken as isometric coordinates, unless ``model`` is given, in
    which case they are Taylor coefficients and get rescaled first.
    Singular values ``<= rank_tol * largest`` are dropped.
    """
    v = _columns(grid, vectors)
    if model is not None:
        check_same_grid(grid, model.grid)
        v = to_isometric(model, v)
    if v.shape[1] == 0:
        return zero_subspace(grid)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return zero_subspace(grid)
    r = int(np.sum(s > rank_tol * s[0]))
    return Subspace(grid, u[:, :r])


def intersect(a: Subspace, b: Subspace, tol: float = RANK_TOL) -> Subspace:
    """``A ∩ B`` from the null space of ``[A, -B]``.

    A null vector ``(x, y)`` has ``Ax = By``; the smallest singular values
    of the stacked system are ``sqrt(1 - cos θ)`` for the principal angles,
    so the threshold acts on angles linearly rather than quadratically.
    """
    check_same_grid(a.grid, b.grid)
    if a.dim == 0 or b.dim == 0:
        return zero_subspace(a.grid)
    stacked = np.hstack([a.basis, -b.basis])
    null = _null_space(stacked, tol)
    if null.shape[1] == 0:
        return zero_subspace(a.grid)
    return from_generators(a.grid, a.basis @ null[: a.dim])


def ominus(s: Subspace, a: Subspace, tol: float = RANK_TOL) -> Subspace:
    """``S ⊖ A``, computed as ``S ∩ A^⊥``."""
    check_same_grid(s.grid, a.grid)
    if a.dim == 0 or s.dim == 0:
        return s
    coeffs = _null_space(a.basis.conj().T @ s.basis, tol)
    return Subspace(s.grid, s.basis @ coeffs)


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal angles between ``A`` and ``B``, largest first.

    There are ``min(dim A, dim B)`` of them.  Cosines come from the
    singular values of ``A*B`` and sines from those of ``(I - P_A) B``
    with ``A`` the larger space; angles below ``pi/4`` are read off the
    sines, where ``arccos`` of a cosine near one would lose half the digits.
    """
    check_same_grid(a.grid, b.grid)
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)
    if a.dim < b.dim:
        a, b = b, a
    qa, qb = a.basis, b.basis
    cos = np.clip(np.linalg.svd(qa.conj().T @ qb, compute_uv=False), 0.0, 1.0)
    sin = np.clip(np.linalg.svd(qb - qa @ (qa.conj().T @ qb), compute_uv=False), 0.0, 1.0)[::-1]
    small = cos ** 2 >= 0.5
    angles = np.where(small, np.arcsin(sin), np.arccos(cos))
    return np.sort(angles)[::-1]


def subspace_equal(a: Subspace, b: Subspace, tol: float = ANGLE_TOL) -> bool:
    if a.dim != b.dim:
        return False
    angles = principal_angles(a, b)
    return angles.size == 0 or float(angles[0]) <= tol


def largest_angle(a: Subspace, b: Subspace) -> float:
    """Largest principal angle, or ``pi/2`` when the dimensions differ."""
    if a.dim != b.dim:
        return float(np.pi / 2)
    angles = principal_angles(a, b)
    return float(angles[0]) if angles.size else 0.0


def image(op: OperatorMatrix | np.ndarray, s: Subspace, rank_tol: float = RANK_TOL) -> Subspace:
    m = op.matrix if isinstance(op, OperatorMatrix) else op
    return from_generators(s.grid, m @ s.basis, rank_tol)


def _alpha(alpha: Sequence[int], n: int) -> tuple[int, ...]:
    alpha = tuple(sorted(set(int(i) for i in alpha)))
    if not alpha:
        raise ArgumentError("alpha must be a non-empty subset of the variables")
    if alpha[0] < 1 or alpha[-1] > n:
        raise ArgumentError(f"alpha {alpha} is not a subset of 1..{n}")
    return alpha


def invariant_closure(gens, alpha: Sequence[int], shifts: ShiftTuple, rank_tol: float = RANK_TOL) -> Subspace:
    """Smallest subspace containing ``gens`` and invariant under ``C_i``, ``i in alpha``.

    ``gens`` is a :class:`Subspace` or isometric-coordinate vectors.
    Iterates until the dimension stops growing; a finite grid bounds the
    number of rounds by its size.
    """
    grid = shifts.model.grid
    alpha = _alpha(alpha, shifts.n)
    current = gens if isinstance(gens, Subspace) else from_generators(grid, gens, rank_tol)
    mats = [shifts.op(i).matrix for i in alpha]
    for _ in range(grid.size + 1):
        if current.dim == 0:
            return current
        stack = np.hstack([current.basis] + [m @ current.basis for m in mats])
        nxt = from_generators(grid, stack, rank_tol)
        if nxt.dim == current.dim:
            return current
        current = nxt
    return current


def wandering_subspace_via_kernels(s: Subspace, shifts: ShiftTuple, alpha: Sequence[int],
                                   tol: float = RANK_TOL) -> Subspace:
    """``S ∩ (∩_i ker R_i*)`` with ``R_i* = P_S C_i*|_S``."""
    alpha = _alpha(alpha, shifts.n)
    if s.dim == 0:
        return s
    blocks = [s.basis.conj().T @ shifts.op(i).matrix.conj().T @ s.basis for i in alpha]
    return Subspace(s.grid, s.basis @ _null_space(np.vstack(blocks), tol))


def wandering_subspace(s: Subspace, shifts: ShiftTuple, alpha: Sequence[int],
                       tol: float = RANK_TOL, angle_tol: float = ANGLE_TOL) -> Subspace:
    """``W_α = ∩_{i in α} (S ⊖ C_i S)``.

    Also computed through the kernels of the restricted adjoints.  The two
    routes describe the same space for any ``S``, so a disagreement beyond
    ``angle_tol`` raises a warning: it means the rank decisions were
    numerically ill-conditioned.
    """
    alpha = _alpha(alpha, shifts.n)
    w = None
    for i in alpha:
        piece = ominus(s, image(shifts.op(i), s), tol)
        w = piece if w is None else intersect(w, piece, tol)
    other = wandering_subspace_via_kernels(s, shifts, alpha, tol)
    if not subspace_equal(w, other, angle_tol):
        warnings.warn(
            f"wandering subspace routes disagree (dims {w.dim} vs {other.dim}, "
            f"angle {largest_angle(w, other):.3g}); S is probably not invariant",
            RuntimeWarning,
            stacklevel=2,
        )
    return w


@dataclass(frozen=True, eq=False)
class ShiftRestriction:
    """The compressions ``R_i = P_S C_i |_S`` of a shift tuple to ``S``.

    Operators are kept in ambient coordinates as ``P_S C_i P_S``; the
    invariance defect ``||(I - P_S) C_i|_S||`` is recorded rather than
    assumed to vanish.
    """

    shifts: ShiftTuple
    subspace: Subspace
    margin: int = 1

    @cached_property
    def ops(self) -> tuple[OperatorMatrix, ...]:
        p = self.subspace.projector
        model = self.shifts.model
        return tuple(OperatorMatrix(model, model, p @ t.matrix @ p) for t in self.shifts.ops)

    @cached_property
    def invariance_defect(self) -> float:
        return self._defect(self.subspace.basis)

    @cached_property
    def interior_invariance_defect(self) -> float:
        return self._defect(self.interior_basis())

    def _defect(self, b: np.ndarray) -> float:
        if b.shape[1] == 0:
            return 0.0
        return max(self.subspace.complement_residual(t.matrix @ b) for t in self.shifts.ops)

    def interior_basis(self, margin: int | None = None) -> np.ndarray:
        return self.subspace.interior_part(self.margin if margin is None else margin).basis


def multi_exponents(k: int, depth: int):
    """All ``l in N^k`` with ``0 < |l| <= depth``."""
    for total in range(1, depth + 1):
        for cut in itertools.combinations(range(total + k - 1), k - 1):
            bounds = (-1,) + cut + (total + k - 1,)
            yield tuple(bounds[j + 1] - bounds[j] - 1 for j in range(k))


@dataclass(frozen=True)
class WanderingReport:
    orthogonality_residual: float
    closure_angle: float
    interior_dim_s: int
    interior_dim_closure: int
    containment_residual: float
    depth: int
    residual_tol: float
    angle_tol: float
    orthogonal: bool = field(init=False)
    generates: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "orthogonal", self.orthogonality_residual <= self.residual_tol)
        object.__setattr__(
            self,
            "generates",
            self.interior_dim_s == self.interior_dim_closure and self.closure_angle <= self.angle_tol,
        )

    @property
    def closure_deficit(self) -> int:
        return self.interior_dim_s - self.interior_dim_closure

    @property
    def passed(self) -> bool:
        return self.orthogonal and self.generates

    def to_dict(self) -> dict:
        return {
            "orthogonality_residual": self.orthogonality_residual,
            "closure_angle": self.closure_angle,
            "interior_dim_s": self.interior_dim_s,
            "interior_dim_closure": self.interior_dim_closure,
            "closure_deficit": self.closure_deficit,
            "containment_residual": self.containment_residual,
            "depth": self.depth,
            "orthogonal": self.orthogonal,
            "generates": self.generates,
            "passed": self.passed,
        }


def default_depth(w: Subspace, alpha: Sequence[int]) -> int:
    """Largest ``|l|`` the caps allow above the top degree of ``W`` in the ``alpha`` variables."""
    caps = w.grid.caps
    if w.dim == 0:
        return max(1, min(caps[i - 1] for i in alpha))
    support = np.any(np.abs(w.basis) > RANK_TOL, axis=1)
    top = w.grid.indices[support]
    room = min(caps[i - 1] - int(top[:, i - 1].max()) for i in alpha)
    return max(1, room - 1)


def check_wandering(s: Subspace, shifts: ShiftTuple, alpha: Sequence[int], w: Subspace,
                    depth: int | None = None, residual_tol: float = 1e-10,
                    angle_tol: float = ANGLE_TOL, margin: int | None = None) -> WanderingReport:
    """Check that ``W`` is wandering for ``(C_i)_{i in alpha}`` on ``S``.

    (a) ``||P_W T^l P_W|| <= residual_tol`` for ``0 < |l| <= depth``;
    (b) the ``alpha``-invariant closure of ``W`` equals ``S`` once both
    are projected onto the interior ``F_{d - margin}``.
    """
    alpha = _alpha(alpha, shifts.n)
    margin = shifts.margin if margin is None else margin
    check_same_grid(s.grid, w.grid)
    capacity = min(s.grid.caps[i - 1] for i in alpha)
    if depth is None:
        depth = min(default_depth(w, alpha), capacity) if capacity > 0 else 0
    elif depth > capacity:
        raise ConfigurationError(
            f"depth {depth} exceeds the truncation capacity {capacity}; shrink depth or raise the caps"
        )
    ops = [shifts.op(i) for i in alpha]
    residual = 0.0
    if w.dim:
        for l in multi_exponents(len(alpha), depth):
            block = w.basis.conj().T @ multi_power(ops, l) @ w.basis
            residual = max(residual, operator_norm(block))
    contained = s.complement_residual(w.basis) if w.dim else 0.0
    closure = invariant_closure(w, alpha, shifts)
    s_int = s.project_to_interior(margin)
    c_int = closure.project_to_interior(margin)
    return WanderingReport(
        orthogonality_residual=residual,
        closure_angle=largest_angle(s_int, c_int),
        interior_dim_s=s_int.dim,
        interior_dim_closure=c_int.dim,
        containment_residual=contained,
        depth=depth,
        residual_tol=residual_tol,
        angle_tol=angle_tol,
    )


@dataclass(frozen=True, eq=False)
class WoldSplit:
    closure_part: Subspace
    residual_part: Subspace
    orthogonality: float
    dim_s: int
    rounds: int

    @property
    def dims_add_up(self) -> bool:
        return self.closure_part.dim + self.residual_part.dim == self.dim_s

    def passed(self, tol: float = 1e-10) -> bool:
        return self.dims_add_up and self.orthogonality <= tol

    def to_dict(self) -> dict:
        return {
            "closure_dim": self.closure_part.dim,
            "residual_dim": self.residual_part.dim,
            "dim_s": self.dim_s,
            "orthogonality": self.orthogonality,
            "dims_add_up": self.dims_add_up,
            "rounds": self.rounds,
            "note": "compressed shifts are nilpotent, so an empty residual part is expected at truncation",
        }


def wold(s: Subspace, T: OperatorMatrix, tol: float = RANK_TOL) -> WoldSplit:
    """Split ``S`` into ``[S ⊖ TS]_T`` and ``∩_{m >= 1} T^m S``."""
    check_same_grid(s.grid, T.domain.grid)
    ts = image(T, s)
    wander = ominus(s, ts, tol)
    # single-operator closure
    current = wander
    for _ in range(s.grid.size + 1):
        if current.dim == 0:
            break
        nxt = from_generators(s.grid, np.hstack([current.basis, T.matrix @ current.basis]))
        if nxt.dim == current.dim:
            break
        current = nxt
    closure = current
    residual, rounds = s, 0
    while residual.dim:
        nxt = intersect(residual, image(T, residual), tol)
        rounds += 1
        if nxt.dim == residual.dim:
            break
        residual = nxt
    if closure.dim and residual.dim:
        orth = operator_norm(closure.basis.conj().T @ residual.basis)
    else:
        orth = 0.0
    return WoldSplit(closure, residual, orth, s.dim, rounds)


@dataclass(frozen=True)
class ReducingReport:
    invariance: float
    coinvariance: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.invariance <= self.tolerance and self.coinvariance <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "invariance": self.invariance,
            "coinvariance": self.coinvariance,
            "passed": self.passed,
        }


def reducing_check(w: Subspace, T: OperatorMatrix, tol: float = 1e-10, margin: int = 1) -> ReducingReport:
    """``||(I - P_W) T P_W||`` and ``||(I - P_W) T* P_W||`` on ``W ∩ F_{d - margin}``."""
    check_same_grid(w.grid, T.domain.grid)
    interior_positions(T.domain, margin)
    b = w.interior_part(margin).basis
    if b.shape[1] == 0:
        return ReducingReport(0.0, 0.0, tol)
    a = T.matrix
    return ReducingReport(w.complement_residual(a @ b), w.complement_residual(a.conj().T @ b), tol)
