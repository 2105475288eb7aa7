"""Shift operators on truncated spaces and certified operator-inequality checks.

Every operator is a dense matrix in isometric coordinates, so adjoints are
conjugate transposes and operator norms are largest singular values.

Truncation: the compressed shift ``C_i`` on ``F_d`` drops monomials pushed
past the cap ``d_i``.  It agrees with multiplication by ``z_i`` only on the
*interior* ``{k : k_i < d_i}``, so all inequality checks quantify over the
interior box ``F_{d - margin}`` where every shift application in the
inequality stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ArgumentError, ConfigurationError, GridMismatchError, NotApplicableError
from .spaces import SpaceModel, check_same_grid, from_isometric, to_isometric


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A linear map ``domain -> codomain`` stored in isometric coordinates."""

    domain: SpaceModel
    codomain: SpaceModel
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.codomain.size, self.domain.size):
            raise GridMismatchError(
                f"matrix shape {m.shape} does not match codomain x domain "
                f"({self.codomain.size}, {self.domain.size})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def H(self) -> OperatorMatrix:
        return adjoint(self)

    def is_square(self) -> bool:
        return self.domain.grid == self.codomain.grid

    def apply(self, f) -> np.ndarray:
        """Apply to a coefficient vector (natural, non-isometric coordinates)."""
        c = to_isometric(self.domain, f)
        return from_isometric(self.codomain, self.matrix @ c)

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        check_same_grid(self.domain.grid, other.codomain.grid)
        return OperatorMatrix(other.domain, self.codomain, self.matrix @ other.matrix)

    def _same_shape(self, other: OperatorMatrix) -> None:
        check_same_grid(self.domain.grid, other.domain.grid)
        check_same_grid(self.codomain.grid, other.codomain.grid)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._same_shape(other)
        return OperatorMatrix(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._same_shape(other)
        return OperatorMatrix(self.domain, self.codomain, self.matrix - other.matrix)

    def __mul__(self, c) -> OperatorMatrix:
        return OperatorMatrix(self.domain, self.codomain, complex(c) * self.matrix)

    __rmul__ = __mul__

    def power(self, m: int) -> OperatorMatrix:
        if not self.is_square():
            raise GridMismatchError("only square operators have powers")
        return OperatorMatrix(self.domain, self.codomain, np.linalg.matrix_power(self.matrix, m))


def adjoint(T: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(T.codomain, T.domain, T.matrix.conj().T)


def identity(model: SpaceModel) -> OperatorMatrix:
    return OperatorMatrix(model, model, np.eye(model.size))


def operator_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _check_variable(model: SpaceModel, i: int) -> None:
    if not 1 <= i <= model.n:
        raise ArgumentError(f"variable index {i} outside 1..{model.n}")


def _shift_entries(model: SpaceModel, i: int, target: SpaceModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source positions, target positions and isometric entries of ``z^k -> z^{k+e_i}``."""
    idx = model.grid.indices
    src = np.nonzero(idx[:, i - 1] < target.grid.caps[i - 1])[0]
    dst_k = idx[src].copy()
    dst_k[:, i - 1] += 1
    dst = np.array([target.grid.position(k) for k in dst_k], dtype=np.int64)
    m = idx[src, i - 1]
    ratio = np.asarray(model.omega(i, m + 1), dtype=float) / np.asarray(model.omega(i, m), dtype=float)
    return src, dst, np.sqrt(ratio)


def shift_exact(model: SpaceModel, i: int) -> OperatorMatrix:
    """Multiplication by ``z_i`` as a map ``F_d -> F_{d + e_i}`` (no truncation loss)."""
    _check_variable(model, i)
    target = model.with_caps(model.grid.shifted(i).caps)
    src, dst, vals = _shift_entries(model, i, target)
    m = np.zeros((target.size, model.size), dtype=complex)
    m[dst, src] = vals
    return OperatorMatrix(model, target, m)


def shift_compressed(model: SpaceModel, i: int) -> OperatorMatrix:
    """Multiplication by ``z_i`` on ``F_d`` with the overflow slice ``k_i = d_i + 1`` dropped."""
    _check_variable(model, i)
    src, dst, vals = _shift_entries(model, i, model)
    m = np.zeros((model.size, model.size), dtype=complex)
    m[dst, src] = vals
    return OperatorMatrix(model, model, m)


def interior_positions(model: SpaceModel, margin: int) -> np.ndarray:
    """Grid positions of ``F_{d - margin}``; raises if that box is empty."""
    if margin < 0:
        raise ConfigurationError(f"margin must be non-negative, got {margin}")
    if any(c - margin < 0 for c in model.grid.caps):
        raise ConfigurationError(f"margin {margin} leaves an empty interior for caps {model.grid.caps}")
    return np.nonzero(model.grid.interior_mask(margin))[0]


def interior_basis(model: SpaceModel, margin: int) -> np.ndarray:
    """Columns of the identity at interior positions (isometric coordinates)."""
    pos = interior_positions(model, margin)
    e = np.zeros((model.size, pos.size), dtype=complex)
    e[pos, np.arange(pos.size)] = 1.0
    return e


def min_eigenvalue(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of a Hermitian matrix and a unit eigenvector.

    The matrix is split into the connected components of its sparsity
    pattern first; eigenvalues of a block-diagonal matrix are the union of
    the blocks' eigenvalues, so this is still a certificate over all
    vectors, just cheaper.
    """
    h = np.asarray(h)
    n = h.shape[0]
    if n == 0:
        raise ConfigurationError("empty quadratic form")
    h = 0.5 * (h + h.conj().T)
    pattern = (np.abs(h) > 0).astype(np.int8)
    ncomp, labels = connected_components(pattern, directed=False)
    real = np.all(h.imag == 0)
    best, best_vec = np.inf, None
    for c in range(ncomp):
        members = np.nonzero(labels == c)[0]
        block = h[np.ix_(members, members)]
        if real:
            block = block.real
        vals, vecs = np.linalg.eigh(block)
        if vals[0] < best:
            best = float(vals[0])
            best_vec = np.zeros(n, dtype=complex)
            best_vec[members] = vecs[:, 0]
    return best, best_vec


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of a quadratic-form positivity certificate on the interior."""

    kind: str
    min_eigenvalue: float
    psd: bool
    tolerance: float
    margin: int
    witness: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "min_eigenvalue": self.min_eigenvalue,
            "psd": self.psd,
            "tolerance": self.tolerance,
            "margin": self.margin,
        }


def _square(T: OperatorMatrix) -> None:
    if not T.is_square():
        raise GridMismatchError("expected an operator F_d -> F_d")


def check_shimorin(T: OperatorMatrix, margin: int = 1, tol: float = 1e-12) -> InequalityReport:
    """Certify ``||Tx + y||^2 <= 2(||x||^2 + ||Ty||^2)`` for interior ``x, y``.

    The form ``2||x||^2 + 2||Ty||^2 - ||Tx + y||^2`` has the Hermitian
    block matrix ``[[2I - T*T, -T*], [-T, 2T*T - I]]`` once ``T`` is
    restricted to interior columns (and rows, for the cross term).
    """
    _square(T)
    if margin < 1:
        raise ConfigurationError("the Shimorin check needs margin >= 1 so that Tx and Ty are exact")
    pos = interior_positions(T.domain, margin)
    a = T.matrix
    tp = a[:, pos]
    g = tp.conj().T @ tp
    k = a[np.ix_(pos, pos)]
    eye = np.eye(pos.size)
    h = np.block([[2 * eye - g, -k.conj().T], [-k, 2 * g - eye]])
    lam, vec = min_eigenvalue(h)
    return InequalityReport("shimorin", lam, lam >= -tol, tol, margin, vec)


def check_concave(T: OperatorMatrix, margin: int = 2, tol: float = 1e-12) -> InequalityReport:
    """Certify ``||T^2 x||^2 + ||x||^2 <= 2||Tx||^2`` for interior ``x``."""
    _square(T)
    if margin < 2:
        raise ConfigurationError("the concavity check needs margin >= 2 so that T^2 x is exact")
    pos = interior_positions(T.domain, margin)
    a = T.matrix
    tp = a[:, pos]
    t2p = a @ tp
    h = 2 * (tp.conj().T @ tp) - t2p.conj().T @ t2p - np.eye(pos.size)
    lam, vec = min_eigenvalue(h)
    return InequalityReport("concave", lam, lam >= -tol, tol, margin, vec)


@dataclass(frozen=True, eq=False)
class ShiftTuple:
    """Compressed coordinate shifts ``(C_1, ..., C_n)`` on a truncated model."""

    model: SpaceModel
    ops: tuple[OperatorMatrix, ...]
    margin: int = 1

    @classmethod
    def for_model(cls, model: SpaceModel, margin: int = 1) -> ShiftTuple:
        return cls(model, tuple(shift_compressed(model, i) for i in range(1, model.n + 1)), margin)

    @property
    def n(self) -> int:
        return len(self.ops)

    def op(self, i: int) -> OperatorMatrix:
        """The ``i``-th shift, 1-based."""
        if not 1 <= i <= self.n:
            raise ArgumentError(f"variable index {i} outside 1..{self.n}")
        return self.ops[i - 1]

    def interior_basis(self, margin: int | None = None) -> np.ndarray:
        return interior_basis(self.model, self.margin if margin is None else margin)


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    passed: bool
    tolerance: float
    pairs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"residual": self.residual, "passed": self.passed, "tolerance": self.tolerance}


def check_doubly_commuting(tuple_, tol: float = 1e-10, margin: int | None = None) -> ResidualReport:
    """Max over ``i < j`` of ``||(T_i T_j* - T_j* T_i)|_interior||``.

    ``tuple_`` is a :class:`ShiftTuple` or a
    :class:`wandering.subspaces.ShiftRestriction`; both expose ``ops`` and
    ``interior_basis``.
    """
    ops = [t.matrix for t in tuple_.ops]
    if len(ops) < 2:
        raise NotApplicableError("double commutativity needs at least two operators")
    dom = tuple_.interior_basis(margin)
    pairs = {}
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            ti, tj = ops[i], ops[j]
            diff = ti @ tj.conj().T - tj.conj().T @ ti
            pairs[(i + 1, j + 1)] = operator_norm(diff @ dom)
    worst = max(pairs.values())
    return ResidualReport(worst, worst <= tol, tol, pairs)


def commutes_with_modulus(Ti: OperatorMatrix, Tj: OperatorMatrix, margin: int = 2) -> float:
    """``||(T_i T_j*T_j - T_j*T_j T_i)|_interior||``.

    ``T_j T_i`` applies two forward shifts, hence the default margin of 2.
    """
    check_same_grid(Ti.domain.grid, Tj.domain.grid)
    _square(Ti)
    _square(Tj)
    a, b = Ti.matrix, Tj.matrix
    mod = b.conj().T @ b
    diff = a @ mod - mod @ a
    return operator_norm(diff @ interior_basis(Ti.domain, margin))


@dataclass(frozen=True)
class AnalyticityProxy:
    """Rank decay of ``T^m``.

    This is a truncation proxy only: every compressed shift is nilpotent,
    so a vanishing rank cannot prove ``intersection T^m H = {0}`` for the
    untruncated operator.
    """

    ranks: tuple[int, ...]
    vanishes_at: int | None
    note: str = "truncation proxy: rank(T^m) decay, not a proof of analyticity"

    def to_dict(self) -> dict:
        return {"ranks": list(self.ranks), "vanishes_at": self.vanishes_at, "note": self.note}


def analyticity_proxy(T: OperatorMatrix, max_power: int | None = None, rank_tol: float = 1e-10) -> AnalyticityProxy:
    _square(T)
    if max_power is None:
        max_power = T.domain.size
    ranks = []
    p = np.eye(T.domain.size, dtype=complex)
    vanishes = None
    for m in range(1, max_power + 1):
        p = T.matrix @ p
        s = np.linalg.svd(p, compute_uv=False)
        r = int(np.sum(s > rank_tol * max(1.0, s[0] if s.size else 0.0)))
        ranks.append(r)
        if r == 0:
            vanishes = m
            break
    return AnalyticityProxy(tuple(ranks), vanishes)


def multi_power(ops: Sequence[OperatorMatrix], exponents: Sequence[int]) -> np.ndarray:
    """``T_1^{l_1} ... T_k^{l_k}`` as a matrix."""
    size = ops[0].domain.size
    out = np.eye(size, dtype=complex)
    for t, e in zip(ops, exponents):
        if e:
            out = np.linalg.matrix_power(t.matrix, e) @ out
    return out
