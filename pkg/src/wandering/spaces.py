"""Truncated weighted-monomial models of Hardy, Bergman and Dirichlet spaces.

A function on the polydisc is represented by its Taylor coefficients on a
box of multi-indices ``{k : 0 <= k_i <= d_i}``.  Each space is a diagonal
weight on monomials,

    ||z^k||^2 = w(k) = prod_i omega_i(k_i)

with ``omega(m) = 1`` (Hardy), ``1/(m+1)`` (Bergman) and ``m+1``
(Dirichlet).  Multiplying each coefficient by ``sqrt(w(k))`` turns the
weighted inner product into the Euclidean one; those are the *isometric
coordinates* every operator and subspace in this package is stored in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, GridMismatchError, IndexRangeError

HARDY = "hardy"
BERGMAN = "bergman"
DIRICHLET = "dirichlet"
CUSTOM = "custom"

SPACE_KINDS = (HARDY, BERGMAN, DIRICHLET, CUSTOM)

MultiIndex = tuple[int, ...]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TruncationGrid:
    """The box ``{k : 0 <= k_i <= caps[i]}`` in graded-lexicographic order."""

    caps: tuple[int, ...]

    def __post_init__(self):
        caps = tuple(int(c) for c in self.caps)
        if len(caps) < 1:
            raise ArgumentError("a grid needs at least one variable")
        if any(c < 0 for c in caps):
            raise ArgumentError(f"caps must be non-negative, got {caps}")
        object.__setattr__(self, "caps", caps)

    @property
    def n(self) -> int:
        return len(self.caps)

    @property
    def size(self) -> int:
        return int(np.prod([c + 1 for c in self.caps]))

    @cached_property
    def basis(self) -> tuple[MultiIndex, ...]:
        boxes = itertools.product(*(range(c + 1) for c in self.caps))
        return tuple(sorted(boxes, key=lambda k: (sum(k), k)))

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer array of shape ``(size, n)``; row ``p`` is the multi-index at position ``p``."""
        return _frozen(np.array(self.basis, dtype=np.int64).reshape(self.size, self.n))

    @cached_property
    def _positions(self) -> dict[MultiIndex, int]:
        return {k: p for p, k in enumerate(self.basis)}

    def contains(self, k: Sequence[int]) -> bool:
        return len(k) == self.n and all(0 <= ki <= c for ki, c in zip(k, self.caps))

    def position(self, k: Sequence[int]) -> int:
        k = tuple(int(x) for x in k)
        try:
            return self._positions[k]
        except KeyError:
            raise IndexRangeError(f"multi-index {k} is outside the grid with caps {self.caps}") from None

    def shifted(self, i: int, by: int = 1) -> TruncationGrid:
        """Grid with cap of variable ``i`` (1-based) raised by ``by``."""
        caps = list(self.caps)
        caps[i - 1] += by
        return TruncationGrid(tuple(caps))

    def reduced(self, margin: int) -> TruncationGrid:
        """The interior grid with every cap lowered by ``margin``."""
        return TruncationGrid(tuple(c - margin for c in self.caps))

    def interior_mask(self, margin: int) -> np.ndarray:
        """Boolean mask of positions with ``k_i <= d_i - margin`` for all ``i``."""
        return np.all(self.indices <= np.array(self.caps) - margin, axis=1)


def enumerate_basis(grid: TruncationGrid) -> list[MultiIndex]:
    """All multi-indices of ``grid`` in graded-lexicographic order."""
    return list(grid.basis)


def _named_omega(kind: str, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if kind == HARDY:
        return np.ones_like(m)
    if kind == BERGMAN:
        return 1.0 / (m + 1.0)
    if kind == DIRICHLET:
        return m + 1.0
    raise ArgumentError(f"unknown space kind {kind!r}")


@dataclass(frozen=True)
class SpaceModel:
    """A weighted truncated space on ``grid``.

    For ``kind == "custom"`` the per-variable weight sequences
    ``custom_weights[i][m]`` must be given for ``m = 0..caps[i]`` at least;
    supply one extra entry per variable if exact (non-compressed) shifts
    are needed.
    """

    kind: str
    grid: TruncationGrid
    custom_weights: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.kind not in SPACE_KINDS:
            raise ArgumentError(f"unknown space kind {self.kind!r}; expected one of {SPACE_KINDS}")
        if self.kind == CUSTOM:
            if self.custom_weights is None or len(self.custom_weights) != self.grid.n:
                raise ArgumentError("custom spaces need one weight sequence per variable")
            ws = tuple(tuple(float(x) for x in seq) for seq in self.custom_weights)
            for i, (seq, cap) in enumerate(zip(ws, self.grid.caps)):
                if len(seq) < cap + 1:
                    raise ArgumentError(f"weight sequence {i + 1} has {len(seq)} entries, needs {cap + 1}")
                if not all(np.isfinite(x) and x > 0 for x in seq):
                    raise ArgumentError(f"weight sequence {i + 1} must be strictly positive and finite")
            object.__setattr__(self, "custom_weights", ws)
        elif self.custom_weights is not None:
            raise ArgumentError("custom_weights only apply to kind='custom'")

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def size(self) -> int:
        return self.grid.size

    def omega(self, i: int, m) -> np.ndarray | float:
        """One-variable weight of variable ``i`` (1-based) at exponent(s) ``m``."""
        if self.kind != CUSTOM:
            out = _named_omega(self.kind, m)
            return float(out) if np.ndim(out) == 0 else out
        seq = self.custom_weights[i - 1]
        m_arr = np.asarray(m)
        if np.any(m_arr >= len(seq)) or np.any(m_arr < 0):
            raise IndexRangeError(f"custom weights of variable {i} stop at exponent {len(seq) - 1}")
        out = np.asarray(seq)[m_arr]
        return float(out) if np.ndim(out) == 0 else out

    @cached_property
    def weights(self) -> np.ndarray:
        """``w(k)`` for every grid position."""
        idx = self.grid.indices
        w = np.ones(self.size)
        for i in range(self.n):
            w = w * self.omega(i + 1, idx[:, i])
        return _frozen(w)

    @cached_property
    def sqrt_weights(self) -> np.ndarray:
        return _frozen(np.sqrt(self.weights))

    def with_caps(self, caps: Sequence[int]) -> SpaceModel:
        return SpaceModel(self.kind, TruncationGrid(tuple(caps)), self.custom_weights)

    def factor(self, i: int) -> SpaceModel:
        """The one-variable model of variable ``i`` (1-based)."""
        grid = TruncationGrid((self.grid.caps[i - 1],))
        cw = None if self.custom_weights is None else (self.custom_weights[i - 1],)
        return SpaceModel(self.kind, grid, cw)


def make_model(kind: str, caps: Sequence[int] | int, weights: Sequence[Sequence[float]] | None = None) -> SpaceModel:
    if isinstance(caps, (int, np.integer)):
        caps = (int(caps),)
    cw = None if weights is None else tuple(tuple(seq) for seq in weights)
    return SpaceModel(kind, TruncationGrid(tuple(caps)), cw)


def hardy(caps) -> SpaceModel:
    return make_model(HARDY, caps)


def bergman(caps) -> SpaceModel:
    return make_model(BERGMAN, caps)


def dirichlet(caps) -> SpaceModel:
    return make_model(DIRICHLET, caps)


def monomial_weight(model: SpaceModel, k: Sequence[int]) -> float:
    """Squared norm of ``z^k`` in ``model``."""
    return float(model.weights[model.grid.position(k)])


def _as_vector(model: SpaceModel, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape[0] != model.size:
        raise GridMismatchError(f"vector of length {f.shape[0]} does not match grid size {model.size}")
    return f


def inner_product(model: SpaceModel, f, g) -> complex:
    """``sum_k w(k) f_k conj(g_k)``."""
    f = _as_vector(model, f)
    g = _as_vector(model, g)
    if f.shape != g.shape:
        raise GridMismatchError(f"shape mismatch {f.shape} vs {g.shape}")
    return complex(np.sum(model.weights * f * np.conj(g)))


def norm(model: SpaceModel, f) -> float:
    return float(np.sqrt(max(inner_product(model, f, f).real, 0.0)))


def to_isometric(model: SpaceModel, f) -> np.ndarray:
    """Coefficients scaled by ``sqrt(w(k))``; works on vectors or column stacks."""
    f = _as_vector(model, f)
    scale = model.sqrt_weights if f.ndim == 1 else model.sqrt_weights[:, None]
    return f * scale


def from_isometric(model: SpaceModel, c) -> np.ndarray:
    c = _as_vector(model, c)
    scale = model.sqrt_weights if c.ndim == 1 else model.sqrt_weights[:, None]
    return c / scale


# -- polynomials ---------------------------------------------------------------

def monomial(grid: TruncationGrid, k: Sequence[int]) -> np.ndarray:
    v = np.zeros(grid.size, dtype=complex)
    v[grid.position(k)] = 1.0
    return v


def polynomial(grid: TruncationGrid, terms: Mapping[Sequence[int], complex] | Iterable[tuple[Sequence[int], complex]]) -> np.ndarray:
    """Coefficient vector from ``{multi-index: coefficient}`` or ``(multi-index, coefficient)`` pairs."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    v = np.zeros(grid.size, dtype=complex)
    for k, c in items:
        v[grid.position(tuple(k))] += complex(c)
    return v


def univariate(grid: TruncationGrid, coefficients: Sequence[complex], variable: int = 1) -> np.ndarray:
    """Embed ``sum_m c_m z_variable^m`` (ascending coefficients) into ``grid``."""
    v = np.zeros(grid.size, dtype=complex)
    for m, c in enumerate(coefficients):
        if c == 0:
            continue
        k = [0] * grid.n
        k[variable - 1] = m
        v[grid.position(k)] += complex(c)
    return v


def check_same_grid(a: TruncationGrid, b: TruncationGrid) -> None:
    if a != b:
        raise GridMismatchError(f"grids differ: caps {a.caps} vs {b.caps}")
