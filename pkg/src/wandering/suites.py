"""Named verification suites and generators of test subspaces.

Doubly commuting examples are tensor products of one-variable invariant
closures.  The negative example is the vanishing ideal ``[z_1, ..., z_n]``,
whose restricted tuple is not doubly commuting.

Every suite returns a :class:`VerificationReport`.  Its JSON payload is a
pure function of the inputs, so two runs with the same :class:`CaseSpec`
produce identical bytes; wall time is kept apart for that reason.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError
from .operators import (
    ShiftTuple,
    analyticity_proxy,
    check_concave,
    check_doubly_commuting,
    check_shimorin,
    commutes_with_modulus,
    shift_compressed,
)
from .spaces import (
    BERGMAN,
    DIRICHLET,
    HARDY,
    SpaceModel,
    from_isometric,
    inner_product,
    make_model,
    polynomial,
    to_isometric,
    univariate,
)
from .subspaces import (
    ShiftRestriction,
    Subspace,
    check_wandering,
    from_generators,
    full_space,
    invariant_closure,
    largest_angle,
    reducing_check,
    wandering_subspace,
    wandering_subspace_via_kernels,
    wold,
)

RESIDUAL_TOL = 1e-10
ANGLE_TOL = 1e-8
PSD_TOL = 1e-12

RECIPES = ("tensor", "explicit", "full", "vanishing")


# -- cases and reports -------------------------------------------------------------

def _coef(c) -> complex:
    if isinstance(c, (list, tuple)):
        re, im = c
        return complex(float(re), float(im))
    return complex(c)


def _plain(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


@dataclass(frozen=True)
class CaseSpec:
    """Inputs of one verification case.

    ``generators`` depends on ``recipe``: for ``"tensor"`` one list of
    ascending coefficient sequences per variable; for ``"explicit"`` a list
    of polynomials, each a list of ``(multi_index, coefficient)`` pairs.
    ``"full"`` and ``"vanishing"`` ignore it.
    """

    space: str = BERGMAN
    caps: tuple[int, ...] = (10, 10)
    alpha: tuple[int, ...] = (1, 2)
    recipe: str = "tensor"
    generators: tuple = ()
    margin: int = 1
    residual_tol: float = RESIDUAL_TOL
    angle_tol: float = ANGLE_TOL
    psd_tol: float = PSD_TOL
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        object.__setattr__(self, "alpha", tuple(sorted(set(int(a) for a in self.alpha))))
        if self.recipe not in RECIPES:
            raise ArgumentError(f"unknown subspace recipe {self.recipe!r}; expected one of {RECIPES}")
        if self.alpha and (self.alpha[0] < 1 or self.alpha[-1] > len(self.caps)):
            raise ArgumentError(f"alpha {self.alpha} is not a subset of 1..{len(self.caps)}")
        object.__setattr__(self, "generators", _freeze(self.generators))

    @property
    def n(self) -> int:
        return len(self.caps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["caps"] = list(self.caps)
        d["alpha"] = list(self.alpha)
        d["generators"] = _jsonable(self.generators)
        return d

    def digest(self) -> str:
        return digest(self.to_dict())


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(v) for v in x)
    return x


def _jsonable(x):
    if isinstance(x, complex):
        return _plain(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def digest(payload) -> str:
    text = json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class CaseResult:
    name: str
    inputs: dict
    passed: bool
    residuals: dict = field(default_factory=dict)
    angles: dict = field(default_factory=dict)
    min_eigenvalues: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def inputs_digest(self) -> str:
        return digest(self.inputs)

    @property
    def max_residual(self) -> float | None:
        return max(self.residuals.values()) if self.residuals else None

    @property
    def max_angle(self) -> float | None:
        return max(self.angles.values()) if self.angles else None

    @property
    def min_eigenvalue(self) -> float | None:
        return min(self.min_eigenvalues.values()) if self.min_eigenvalues else None

    def to_dict(self) -> dict:
        return _jsonable({
            "name": self.name,
            "inputs": self.inputs,
            "inputs_digest": self.inputs_digest,
            "residuals": self.residuals,
            "angles": self.angles,
            "min_eigenvalues": self.min_eigenvalues,
            "flags": self.flags,
            "details": self.details,
            "pass": bool(self.passed),
        })


@dataclass
class VerificationReport:
    suite: str
    anchor: str
    cases: list[CaseResult]
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.cases) and all(c.passed for c in self.cases)

    def case(self, name: str) -> CaseResult:
        for c in self.cases:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        """Deterministic payload; wall time is deliberately left out."""
        return {
            "suite": self.suite,
            "anchor": self.anchor,
            "cases": [c.to_dict() for c in self.cases],
            "pass": self.passed,
        }


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


# -- subspace generators -------------------------------------------------------------

def _closure_1d(model: SpaceModel, polys: Sequence[Sequence[complex]]) -> np.ndarray:
    shifts = ShiftTuple.for_model(model)
    vecs = []
    for coeffs in polys:
        coeffs = [_coef(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 > model.grid.caps[0]:
            raise ArgumentError(f"generator of degree {len(coeffs) - 1} exceeds cap {model.grid.caps[0]}")
        if coeffs:
            vecs.append(to_isometric(model, univariate(model.grid, coeffs)))
    if not vecs:
        raise ArgumentError("every variable needs at least one nonzero generator")
    return invariant_closure(vecs, [1], shifts).basis


def gen_tensor_invariant_subspace(model: SpaceModel, generators: Sequence[Sequence[Sequence[complex]]]) -> Subspace:
    """Tensor product of the one-variable closures ``[g_i]_{M_z}``."""
    if len(generators) != model.n:
        raise ArgumentError(f"need one generator list per variable ({model.n}), got {len(generators)}")
    factors = [_closure_1d(model.factor(i + 1), generators[i]) for i in range(model.n)]
    idx = model.grid.indices
    cols = []
    for combo in itertools.product(*(range(f.shape[1]) for f in factors)):
        col = np.ones(model.size, dtype=complex)
        for i, c in enumerate(combo):
            col = col * factors[i][idx[:, i], c]
        cols.append(col)
    return Subspace(model.grid, np.column_stack(cols))


def gen_explicit_subspace(model: SpaceModel, polys) -> Subspace:
    """Joint invariant closure of explicit polynomials ``[(multi_index, coeff), ...]``."""
    vecs = [to_isometric(model, polynomial(model.grid, [(k, _coef(c)) for k, c in p])) for p in polys]
    if not vecs or all(not np.any(v) for v in vecs):
        raise ArgumentError("explicit generators are all zero")
    return invariant_closure(vecs, range(1, model.n + 1), ShiftTuple.for_model(model))


def gen_vanishing_ideal_subspace(model: SpaceModel) -> Subspace:
    """``[z_1, ..., z_n]``: every truncated polynomial vanishing at the origin."""
    if model.n < 2:
        raise ArgumentError("in one variable [z] is a Beurling-type subspace, not a negative example")
    gens = []
    for i in range(model.n):
        k = [0] * model.n
        k[i] = 1
        gens.append(to_isometric(model, polynomial(model.grid, [(k, 1.0)])))
    return invariant_closure(gens, range(1, model.n + 1), ShiftTuple.for_model(model))


def default_generators(n: int) -> tuple:
    """``z - 1/2`` in the first variable, ``z^2`` in the second, ``z`` elsewhere."""
    choices = [((-0.5, 1.0),), ((0.0, 0.0, 1.0),)]
    return tuple(choices[i] if i < len(choices) else ((0.0, 1.0),) for i in range(n))


def build_case(case: CaseSpec) -> tuple[SpaceModel, ShiftTuple, Subspace]:
    model = make_model(case.space, case.caps)
    shifts = ShiftTuple.for_model(model, case.margin)
    if case.recipe == "full":
        s = full_space(model.grid)
    elif case.recipe == "vanishing":
        s = gen_vanishing_ideal_subspace(model)
    elif case.recipe == "explicit":
        s = gen_explicit_subspace(model, case.generators)
    else:
        gens = case.generators or default_generators(model.n)
        s = gen_tensor_invariant_subspace(model, gens)
    return model, shifts, s


# -- scalar inequality -------------------------------------------------------------

def _scalar_sides(z, w, k):
    lhs = np.abs(z + w) ** 2 / (k + 1)
    rhs = 2 * (np.abs(z) ** 2 / k + np.abs(w) ** 2 / (k + 2))
    return lhs, rhs


def scalar_inequality_suite(trials: int = 100_000, seed: int = 42, slack: float = PSD_TOL) -> VerificationReport:
    """``|z + w|^2/(k+1) <= 2(|z|^2/k + |w|^2/(k+2))`` on random complex samples."""
    if trials < 1:
        raise ArgumentError("trials must be >= 1")
    with _Timer() as t:
        inputs = {"trials": trials, "seed": seed, "slack": slack}
        cases = []
        for name, (z, w, k) in {"w-zero": (1, 0, 1), "equality": (1, 3, 1)}.items():
            lhs, rhs = _scalar_sides(complex(z), complex(w), k)
            gap = float(rhs - lhs)
            ok = gap >= -slack and (name != "equality" or gap == 0.0)
            cases.append(CaseResult(name, {"z": z, "w": w, "k": k}, ok,
                                    residuals={"violation": max(0.0, -gap)},
                                    details={"lhs": float(lhs), "rhs": float(rhs), "gap": gap}))

        rng = np.random.default_rng(seed)
        radius = 10 * np.sqrt(rng.random((2, trials)))
        phase = np.exp(2j * np.pi * rng.random((2, trials)))
        z, w = radius * phase
        k = rng.integers(1, 101, size=trials).astype(float)
        lhs, rhs = _scalar_sides(z, w, k)
        gap = rhs - lhs
        violations = int(np.sum(gap < -slack))
        cases.append(CaseResult("random", inputs, violations == 0,
                                residuals={"worst_violation": float(max(0.0, -gap.min()))},
                                details={"violations": violations, "min_gap": float(gap.min())}))

        # (k+2) z = k w makes the discarded square vanish
        w_eq = (k + 2) * z / k
        lhs, rhs = _scalar_sides(z, w_eq, k)
        rel = np.abs(rhs - lhs) / np.maximum(1.0, rhs)
        cases.append(CaseResult("random-equality", inputs, bool(rel.max() <= 1e-12),
                                residuals={"max_relative_gap": float(rel.max())}))
    return VerificationReport("scalar-inequality",
                              "|z+w|^2/(k+1) <= 2(|z|^2/k + |w|^2/(k+2)), equality iff (k+2)z = kw",
                              cases, t.elapsed)


# -- single shift: hypotheses and H ⊖ TH -----------------------------------------------

_HYPOTHESES = {HARDY: ("shimorin", "concave"), BERGMAN: ("shimorin",), DIRICHLET: ("concave",)}


def run_single_shift_suite(space: str, caps: Sequence[int], residual_tol: float = RESIDUAL_TOL,
                           angle_tol: float = ANGLE_TOL, psd_tol: float = PSD_TOL) -> VerificationReport:
    """For each coordinate shift: the applicable inequality, then ``F_d ⊖ C_i F_d`` wandering."""
    with _Timer() as t:
        model = make_model(space, caps)
        shifts = ShiftTuple.for_model(model)
        full = full_space(model.grid)
        expected = _HYPOTHESES.get(space, ("shimorin", "concave"))
        cases = []
        for i in range(1, model.n + 1):
            T = shifts.op(i)
            shim = check_shimorin(T, 1, psd_tol)
            conc = check_concave(T, 2, psd_tol)
            hyps = {"shimorin": shim.psd, "concave": conc.psd}
            if space in _HYPOTHESES:
                hyp_ok = all(hyps[h] for h in expected)
            else:
                hyp_ok = any(hyps.values())
            w = wandering_subspace(full, shifts, [i])
            rep = check_wandering(full, shifts, [i], w, residual_tol=residual_tol, angle_tol=angle_tol)
            inputs = {"space": space, "caps": list(model.grid.caps), "variable": i,
                      "tolerances": [residual_tol, angle_tol, psd_tol]}
            cases.append(CaseResult(
                f"shift-{i}", inputs, hyp_ok and rep.passed,
                residuals={"orthogonality": rep.orthogonality_residual},
                angles={"closure": rep.closure_angle},
                min_eigenvalues={"shimorin": shim.min_eigenvalue, "concave": conc.min_eigenvalue},
                flags={"shimorin": shim.psd, "concave": conc.psd, "required": list(expected),
                       "hypothesis": hyp_ok, "wandering": rep.passed},
                details={"wandering": rep.to_dict(), "dim_w": w.dim,
                         "analyticity": analyticity_proxy(T).to_dict()},
            ))
    return VerificationReport("theorem-2-1",
                              "analytic T with the Shimorin inequality or concavity: H = [H ⊖ TH]_T",
                              cases, t.elapsed)


# -- tuples: W_alpha, closure, inductive identity ---------------------------------------

def _interior_equal(a: Subspace, b: Subspace, margin: int) -> tuple[float, int, int]:
    ai, bi = a.project_to_interior(margin), b.project_to_interior(margin)
    return largest_angle(ai, bi), ai.dim, bi.dim


def _adjoint_duality(model: SpaceModel, shifts: ShiftTuple, seed: int, samples: int = 4) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for T in shifts.ops:
        Tstar = T.H
        for _ in range(samples):
            f = rng.standard_normal(model.size) + 1j * rng.standard_normal(model.size)
            g = rng.standard_normal(model.size) + 1j * rng.standard_normal(model.size)
            lhs = inner_product(model, T.apply(f), g)
            rhs = inner_product(model, f, Tstar.apply(g))
            scale = np.sqrt(inner_product(model, f, f).real * inner_product(model, g, g).real)
            worst = max(worst, abs(lhs - rhs) / scale)
    return float(worst)


def _wandering_checks(case: CaseSpec, model, shifts, s, alpha) -> tuple[bool, dict, dict, dict, dict]:
    """W_alpha, its wandering check, route agreement, inductive identity and reducing checks."""
    residuals, angles, flags, details = {}, {}, {}, {}
    tag = "".join(str(a) for a in alpha)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        w = wandering_subspace(s, shifts, alpha)
    w_ker = wandering_subspace_via_kernels(s, shifts, alpha)
    angles[f"routes[{tag}]"] = largest_angle(w, w_ker)
    routes_ok = w.dim == w_ker.dim and angles[f"routes[{tag}]"] <= case.angle_tol
    rep = check_wandering(s, shifts, alpha, w, residual_tol=case.residual_tol,
                          angle_tol=case.angle_tol, margin=case.margin)
    residuals[f"orthogonality[{tag}]"] = rep.orthogonality_residual
    angles[f"closure[{tag}]"] = rep.closure_angle
    details[f"wandering[{tag}]"] = rep.to_dict()
    details[f"dim_w[{tag}]"] = w.dim
    ok = routes_ok and rep.passed

    inductive_ok = True
    if len(alpha) >= 2:
        for ai in alpha:
            rest = tuple(a for a in alpha if a != ai)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                w_rest = wandering_subspace(s, shifts, rest)
            closure = invariant_closure(w, [ai], shifts)
            ang, d_rest, d_clo = _interior_equal(w_rest, closure, case.margin)
            key = f"inductive[{tag}->{ai}]"
            angles[key] = ang
            details[key] = {"interior_dim_w_rest": d_rest, "interior_dim_closure": d_clo}
            inductive_ok &= d_rest == d_clo and ang <= case.angle_tol
    flags[f"inductive[{tag}]"] = inductive_ok

    restriction = ShiftRestriction(shifts, s, case.margin)
    reducing_ok = True
    for j in range(1, model.n + 1):
        if j in alpha:
            continue
        red = reducing_check(w, restriction.ops[j - 1], case.residual_tol, case.margin)
        residuals[f"reducing[{tag};{j}]"] = max(red.invariance, red.coinvariance)
        reducing_ok &= red.passed
    flags[f"reducing[{tag}]"] = reducing_ok
    flags[f"wandering[{tag}]"] = rep.passed
    flags[f"routes[{tag}]"] = routes_ok
    return ok and inductive_ok and reducing_ok, residuals, angles, flags, details


def _tuple_case(case: CaseSpec, name: str) -> CaseResult:
    model, shifts, s = build_case(case)
    if not case.alpha:
        raise ArgumentError("alpha must be non-empty")
    restriction = ShiftRestriction(shifts, s, case.margin)
    residuals = {"invariance_defect": restriction.invariance_defect,
                 "adjoint_duality": _adjoint_duality(model, shifts, case.seed)}
    flags = {}
    if model.n >= 2:
        dc = check_doubly_commuting(restriction, case.residual_tol)
        residuals["doubly_commuting"] = dc.residual
        flags["doubly_commuting"] = dc.passed
    ok, r, a, f, d = _wandering_checks(case, model, shifts, s, case.alpha)
    residuals.update(r)
    flags.update(f)
    passed = ok and flags.get("doubly_commuting", True) and all(
        residuals[k] <= case.residual_tol for k in ("invariance_defect", "adjoint_duality"))
    d["dim_s"] = s.dim
    return CaseResult(name, case.to_dict(), passed, residuals, a, {}, flags, d)


def run_wandering_tuple_suite(cases: CaseSpec | Sequence[CaseSpec]) -> VerificationReport:
    """``W_alpha^S`` is wandering for ``M_alpha|_S`` and ``[W_alpha]_{T_ai} = W_{alpha minus ai}``."""
    if isinstance(cases, CaseSpec):
        cases = [cases]
    with _Timer() as t:
        results = [_tuple_case(c, f"case-{k}") for k, c in enumerate(cases)]
    return VerificationReport("theorem-2-3",
                              "doubly commuting S: ∩_i (S ⊖ z_{alpha_i} S) is wandering for M_alpha|_S",
                              results, t.elapsed)


def _subsets(n: int):
    for r in range(1, n + 1):
        yield from itertools.combinations(range(1, n + 1), r)


def _converse_case(case: CaseSpec, name: str) -> CaseResult:
    model, shifts, s = build_case(case)
    restriction = ShiftRestriction(shifts, s, case.margin)
    residuals, angles, flags, details = {}, {}, {}, {}
    dc = check_doubly_commuting(restriction, case.residual_tol)
    residuals["doubly_commuting"] = dc.residual

    cond_a = True
    for alpha in _subsets(model.n):
        ok, r, a, f, d = _wandering_checks(case, model, shifts, s, alpha)
        # reducing checks presuppose double commutativity; they are not part of condition (a)
        cond_a &= f[f"wandering[{''.join(map(str, alpha))}]"] and f[f"inductive[{''.join(map(str, alpha))}]"]
        residuals.update({k: v for k, v in r.items() if not k.startswith("reducing")})
        angles.update(a)
        details.update(d)

    cond_b = True
    for i, j in itertools.combinations(range(1, model.n + 1), 2):
        res = commutes_with_modulus(restriction.ops[i - 1], restriction.ops[j - 1], max(2, case.margin))
        residuals[f"modulus[{i},{j}]"] = res
        cond_b &= res <= case.residual_tol

    wold_ok = True
    for i in range(1, model.n + 1):
        split = wold(s, shifts.op(i))
        details[f"wold[{i}]"] = split.to_dict()
        wold_ok &= split.passed(case.residual_tol)

    flags.update({"doubly_commuting": dc.passed, "condition_a": cond_a, "condition_b": cond_b, "wold": wold_ok})
    details["dim_s"] = s.dim
    if case.recipe == "vanishing":
        # the equivalence predicts (a) and (b) cannot both hold once double commutativity fails
        passed = dc.residual > 0.1 and not cond_a
        flags["mode"] = "converse-probe"
    else:
        passed = dc.passed and cond_a and cond_b and wold_ok
        flags["mode"] = "forward"
    return CaseResult(name, case.to_dict(), passed, residuals, angles, {}, flags, details)


def run_converse_suite(cases: CaseSpec | Sequence[CaseSpec]) -> VerificationReport:
    """Forward direction on doubly commuting cases; converse probe on vanishing-ideal cases."""
    if isinstance(cases, CaseSpec):
        cases = [cases]
    with _Timer() as t:
        results = [_converse_case(c, f"case-{k}") for k, c in enumerate(cases)]
    return VerificationReport("theorem-2-5",
                              "doubly commuting + analytic <=> (a) wandering W_alpha with inductive identity, "
                              "(b) T_i commutes with T_j* T_j",
                              results, t.elapsed)


# -- one variable -------------------------------------------------------------------

def clean_coefficients(v: np.ndarray, tol: float = 1e-12) -> list:
    """Normalize so the largest coefficient is 1, round noise to zero, trim trailing zeros."""
    v = np.asarray(v, dtype=complex)
    v = v / v[np.argmax(np.abs(v))]
    out = []
    for c in v:
        re = 0.0 if abs(c.real) < tol else float(c.real)
        im = 0.0 if abs(c.imag) < tol else float(c.imag)
        out.append(re if im == 0.0 else [re, im])
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    return out


def run_beurling_1d(space: str, theta: Sequence[complex], cap: int, residual_tol: float = RESIDUAL_TOL,
                    angle_tol: float = ANGLE_TOL) -> VerificationReport:
    """``S = [theta]_{M_z}``, ``W = S ⊖ zS``; Hardy also checks ``W = span{theta}``.

    ``W = span{theta}`` presumes ``theta`` inner; the polynomial inner
    functions are the unimodular multiples of ``z^p``.  For any other
    ``theta`` the Hardy check compares ``W`` with ``span{z^v}``, ``v`` the
    order of vanishing of ``theta`` at the origin, and records the angle to
    ``theta``.
    """
    coeffs = [_coef(c) for c in theta]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ArgumentError("theta must be a nonzero polynomial")
    if len(coeffs) - 1 >= cap:
        raise ArgumentError(f"theta has degree {len(coeffs) - 1}; the cap must exceed it (got {cap})")
    with _Timer() as t:
        model = make_model(space, (cap,))
        shifts = ShiftTuple.for_model(model)
        th = to_isometric(model, univariate(model.grid, coeffs))
        s = invariant_closure([th], [1], shifts)
        w = wandering_subspace(s, shifts, [1])
        rep = check_wandering(s, shifts, [1], w, residual_tol=residual_tol, angle_tol=angle_tol)
        split = wold(s, shifts.op(1))
        residuals = {"orthogonality": rep.orthogonality_residual, "wold_orthogonality": split.orthogonality}
        angles = {"closure": rep.closure_angle}
        flags = {"wandering": rep.passed, "wold_residual_zero": split.residual_part.dim == 0}
        passed = rep.passed and split.passed(residual_tol) and split.residual_part.dim == 0
        nonzero = [m for m, c in enumerate(coeffs) if c != 0]
        inner = len(nonzero) == 1
        flags["theta_inner"] = inner
        if space == HARDY:
            span_theta = from_generators(model.grid, [th])
            theta_angle = largest_angle(w, span_theta)
            target = span_theta if inner else from_generators(
                model.grid, [to_isometric(model, univariate(model.grid, [0] * nonzero[0] + [1]))])
            angles["w_vs_inner_factor"] = largest_angle(w, target)
            flags["dim_w_is_1"] = w.dim == 1
            flags["w_is_inner_factor"] = angles["w_vs_inner_factor"] <= angle_tol
            passed = passed and w.dim == 1 and flags["w_is_inner_factor"]
        basis = [clean_coefficients(from_isometric(model, w.basis[:, c])) for c in range(w.dim)]
        inputs = {"space": space, "theta": [_plain(c) for c in coeffs], "cap": cap,
                  "tolerances": [residual_tol, angle_tol]}
        case = CaseResult("beurling", inputs, passed, residuals, angles, {}, flags,
                          {"dim_s": s.dim, "dim_w": w.dim, "w_basis": basis,
                           "w_vs_theta_angle": theta_angle if space == HARDY else None, "wold": split.to_dict(),
                           "wandering": rep.to_dict()})
    return VerificationReport("beurling-1d", "S = ⊕_m z^m W with W = S ⊖ zS",
                              [case], t.elapsed)


# -- negative example -------------------------------------------------------------------

def run_negative_examples(space: str = HARDY, caps: Sequence[int] = (8, 8), residual_tol: float = RESIDUAL_TOL,
                          angle_tol: float = ANGLE_TOL, margin: int = 1) -> VerificationReport:
    """The vanishing ideal must break double commutativity and the inductive identity.

    Passes when those expected failures occur.  The closure of
    ``W_{1..n}`` is recorded too; it is not expected to fall short, since
    ``span{z_1, ..., z_n}`` is already wandering and generating.
    """
    with _Timer() as t:
        case = CaseSpec(space=space, caps=tuple(caps), alpha=tuple(range(1, len(caps) + 1)), recipe="vanishing",
                        margin=margin, residual_tol=residual_tol, angle_tol=angle_tol)
        model, shifts, s = build_case(case)
        restriction = ShiftRestriction(shifts, s, margin)
        dc = check_doubly_commuting(restriction, residual_tol)
        ok, r, a, f, d = _wandering_checks(case, model, shifts, s, case.alpha)
        tag = "".join(map(str, case.alpha))
        wrep = d[f"wandering[{tag}]"]
        flags = {"doubly_commuting_violated": dc.residual > 0.1,
                 "inductive_identity_violated": not f[f"inductive[{tag}]"],
                 "closure_deficit": wrep["closure_deficit"] >= 1,
                 "wandering": f[f"wandering[{tag}]"]}
        passed = flags["doubly_commuting_violated"] and flags["inductive_identity_violated"]
        residuals = {"doubly_commuting": dc.residual, **{k: v for k, v in r.items() if not k.startswith("reducing")}}
        d["dim_s"] = s.dim
        res = CaseResult("vanishing-ideal", case.to_dict(), passed, residuals, a, {}, flags, d)
    return VerificationReport("negative-examples", "[z_1, ..., z_n] is not doubly commuting", [res], t.elapsed)


# -- reducing subspaces on the full space ----------------------------------------------

def run_reducing_suite(space: str, caps: Sequence[int], tol: float = RESIDUAL_TOL, margin: int = 1) -> VerificationReport:
    """``W_alpha`` reduces ``C_j`` for every non-empty ``alpha`` and ``j`` outside it."""
    with _Timer() as t:
        model = make_model(space, caps)
        shifts = ShiftTuple.for_model(model, margin)
        full = full_space(model.grid)
        cases = []
        for alpha in _subsets(model.n):
            others = [j for j in range(1, model.n + 1) if j not in alpha]
            if not others:
                continue
            w = wandering_subspace(full, shifts, alpha)
            for j in others:
                rep = reducing_check(w, shifts.op(j), tol, margin)
                cases.append(CaseResult(
                    f"alpha={list(alpha)};j={j}",
                    {"space": space, "caps": list(model.grid.caps), "alpha": list(alpha), "j": j, "tol": tol},
                    rep.passed,
                    residuals={"invariance": rep.invariance, "coinvariance": rep.coinvariance},
                    details={"dim_w": w.dim},
                ))
    return VerificationReport("reducing", "W_alpha reduces T_j for j outside alpha", cases, t.elapsed)


def tensor_case_family(space: str, caps: Sequence[int] = (10, 10), alpha: Sequence[int] = (1, 2), **kw) -> list[CaseSpec]:
    """Six two-variable tensor cases with assorted one-variable generators."""
    gens = [
        (((1.0,),), ((1.0,),)),
        (((0.0, 1.0),), ((0.0, 1.0),)),
        (((-0.5, 1.0),), ((0.0, 0.0, 1.0),)),
        (((0.0, 0.0, 1.0, 1.0),), ((0.0, 1.0),)),
        (((0.0, 0.0, 0.0, 1.0),), ((1.0, -1.0), (0.0, 0.0, 1.0))),
        (((0.0, 1.0, (0.0, 2.0)),), ((0.0, 0.0, 0.0, 0.0, 1.0),)),
    ]
    return [CaseSpec(space=space, caps=tuple(caps), alpha=tuple(alpha), recipe="tensor", generators=g, **kw)
            for g in gens]
