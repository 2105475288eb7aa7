import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import adjoint_natural, isometric, shift_natural
from wandering.errors import ConfigurationError, NotApplicableError
from wandering.operators import (
    OperatorMatrix,
    ShiftTuple,
    adjoint,
    analyticity_proxy,
    check_concave,
    check_doubly_commuting,
    check_shimorin,
    commutes_with_modulus,
    identity,
    min_eigenvalue,
    shift_compressed,
    shift_exact,
)
from wandering.spaces import BERGMAN, DIRICHLET, HARDY, inner_product, make_model, monomial, univariate
from wandering.subspaces import ShiftRestriction
from wandering.suites import gen_tensor_invariant_subspace, gen_vanishing_ideal_subspace

KINDS = (HARDY, BERGMAN, DIRICHLET)


# -- shifts ----------------------------------------------------------------------------

def test_hardy_exact_shift_is_isometry():
    T = shift_exact(make_model(HARDY, (6,)), 1)
    assert np.allclose(T.matrix.conj().T @ T.matrix, np.eye(7), atol=0)
    assert T.shape == (8, 7)


@pytest.mark.parametrize("kind, entry", [
    (BERGMAN, lambda k: np.sqrt((k + 1) / (k + 2))),
    (DIRICHLET, lambda k: np.sqrt((k + 2) / (k + 1))),
    (HARDY, lambda k: 1.0),
])
def test_exact_shift_entries(kind, entry):
    model = make_model(kind, (7,))
    T = shift_exact(model, 1)
    for k in range(8):
        assert T.matrix[k + 1, k] == pytest.approx(entry(k), rel=1e-15)
    mask = np.ones(T.shape, dtype=bool)
    mask[np.arange(1, 9), np.arange(8)] = False
    assert np.all(T.matrix[mask] == 0)


def test_bergman_shift_of_one():
    model = make_model(BERGMAN, (4,))
    T = shift_exact(model, 1)
    assert T.matrix[1, 0] == pytest.approx(np.sqrt(0.5))
    z = T.apply(univariate(model.grid, [1]))
    assert inner_product(T.codomain, z, z) == pytest.approx(0.5)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("caps, i", [((4,), 1), ((3, 2), 1), ((3, 2), 2), ((2, 2, 3), 3)])
def test_compressed_shift_matches_brute_force(kind, caps, i):
    model = make_model(kind, caps)
    C = shift_compressed(model, i)
    assert np.allclose(C.matrix, isometric(kind, caps, shift_natural(caps, i)), rtol=1e-14, atol=0)


def test_compressed_shift_hardy_examples():
    model = make_model(HARDY, (2,))
    C = shift_compressed(model, 1)
    assert np.all(C.apply(univariate(model.grid, [0, 0, 1])) == 0)
    assert np.array_equal(C.apply(univariate(model.grid, [0, 1])), univariate(model.grid, [0, 0, 1]))


def test_compressed_shift_two_variable_bergman():
    model = make_model(BERGMAN, (1, 1))
    C1 = shift_compressed(model, 1)
    g = model.grid
    assert np.all(C1.apply(monomial(g, (1, 0))) == 0)
    assert C1.matrix[g.position((1, 1)), g.position((0, 1))] == pytest.approx(np.sqrt(0.5), rel=1e-15)
    out = C1.apply(monomial(g, (0, 1)))
    assert np.allclose(out, monomial(g, (1, 1)))


@pytest.mark.parametrize("kind", KINDS)
def test_compressed_agrees_with_exact_on_interior(kind):
    model = make_model(kind, (4, 3))
    for i in (1, 2):
        E, C = shift_exact(model, i), shift_compressed(model, i)
        rows = [E.codomain.grid.position(k) for k in model.grid.basis]
        for p, k in enumerate(model.grid.basis):
            if k[i - 1] < model.grid.caps[i - 1]:
                assert np.array_equal(C.matrix[:, p], E.matrix[rows, p])


@pytest.mark.parametrize("kind", KINDS)
def test_shifts_commute_on_interior(kind):
    model = make_model(kind, (4, 5))
    tup = ShiftTuple.for_model(model)
    a, b = tup.op(1).matrix, tup.op(2).matrix
    assert np.allclose((a @ b - b @ a) @ tup.interior_basis(1), 0, atol=1e-14)


# -- adjoints ----------------------------------------------------------------------------

def test_adjoint_is_involution(rng):
    model = make_model(DIRICHLET, (3, 2))
    T = OperatorMatrix(model, model, rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12)))
    assert np.array_equal(adjoint(adjoint(T)).matrix, T.matrix)
    assert np.array_equal(T.H.matrix, T.matrix.conj().T)


@pytest.mark.parametrize("kind, ratio", [(BERGMAN, 2 / 3), (DIRICHLET, 3 / 2), (HARDY, 1.0)])
def test_backward_shift_of_z_squared(kind, ratio):
    model = make_model(kind, (4,))
    Ts = adjoint(shift_compressed(model, 1))
    out = Ts.apply(univariate(model.grid, [0, 0, 1]))
    assert np.allclose(out, univariate(model.grid, [0, ratio]), rtol=1e-14)
    assert np.all(Ts.apply(univariate(model.grid, [1])) == 0)


@pytest.mark.parametrize("kind", KINDS)
def test_adjoint_matches_weighted_formula(kind):
    caps = (3, 3)
    model = make_model(kind, caps)
    for i in (1, 2):
        expected = isometric(kind, caps, adjoint_natural(kind, caps, shift_natural(caps, i)))
        assert np.allclose(adjoint(shift_compressed(model, i)).matrix, expected, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
@given(seed=st.integers(0, 2**31), caps=st.lists(st.integers(1, 4), min_size=1, max_size=3).map(tuple))
def test_adjoint_duality(kind, seed, caps):
    r = np.random.default_rng(seed)
    model = make_model(kind, caps)
    ops = [shift_compressed(model, i) for i in range(1, model.n + 1)]
    ops.append(shift_exact(model, 1))
    for T in ops:
        f = r.standard_normal(T.domain.size) + 1j * r.standard_normal(T.domain.size)
        g = r.standard_normal(T.codomain.size) + 1j * r.standard_normal(T.codomain.size)
        lhs = inner_product(T.codomain, T.apply(f), g)
        rhs = inner_product(T.domain, f, adjoint(T).apply(g))
        scale = np.sqrt(inner_product(T.domain, f, f).real * inner_product(T.codomain, g, g).real)
        assert abs(lhs - rhs) <= 1e-12 * scale


# -- quadratic-form certificates ------------------------------------------------------------

def test_min_eigenvalue_block_split_matches_dense(rng):
    a = rng.standard_normal((9, 9))
    h = np.zeros((18, 18))
    h[:9, :9] = a + a.T
    h[9:, 9:] = np.diag(np.arange(9.0)) - 3
    lam, vec = min_eigenvalue(h)
    assert lam == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-12)
    assert np.linalg.norm(h @ vec - lam * vec) < 1e-10


def test_shimorin_bergman_one_variable():
    rep = check_shimorin(shift_compressed(make_model(BERGMAN, (12,)), 1), margin=1)
    assert rep.psd and rep.min_eigenvalue >= -1e-12
    assert rep.to_dict()["kind"] == "shimorin"


def test_shimorin_hardy_and_scaled():
    T = shift_compressed(make_model(HARDY, (8,)), 1)
    assert check_shimorin(T).psd
    bad = check_shimorin(2 * T)
    assert not bad.psd
    # the witness is a genuine violation of ||Tx + y||^2 <= 2(||x||^2 + ||Ty||^2)
    S = 2 * T.matrix
    x = np.zeros(9, complex)
    y = np.zeros(9, complex)
    x[:8], y[:8] = bad.witness[:8], bad.witness[8:]
    q = 2 * np.vdot(x, x) + 2 * np.vdot(S @ y, S @ y) - np.vdot(S @ x + y, S @ x + y)
    assert q.real == pytest.approx(bad.min_eigenvalue, abs=1e-12) and q.real < 0
    # and y = 0 already violates it
    x[:] = 0
    x[0] = 1
    assert np.vdot(S @ x, S @ x).real > 2


def test_shimorin_matches_sampled_form(rng):
    # independent check: the reported minimum is a lower bound for random (x, y)
    model = make_model(BERGMAN, (6,))
    T = shift_compressed(model, 1).matrix
    rep = check_shimorin(shift_compressed(model, 1))
    pos = np.arange(6)
    for _ in range(200):
        x = np.zeros(7, complex)
        y = np.zeros(7, complex)
        x[pos] = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        y[pos] = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        q = 2 * np.vdot(x, x) + 2 * np.vdot(T @ y, T @ y) - np.vdot(T @ x + y, T @ x + y)
        assert q.real >= rep.min_eigenvalue * (np.vdot(x, x) + np.vdot(y, y)).real - 1e-12


@pytest.mark.parametrize("kind", (DIRICHLET, HARDY))
@pytest.mark.parametrize("caps", [(12,), (6, 6)])
def test_concave_equality(kind, caps):
    model = make_model(kind, caps)
    for i in range(1, model.n + 1):
        T = shift_compressed(model, i)
        pos = np.nonzero(model.grid.interior_mask(2))[0]
        a = T.matrix[:, pos]
        form = 2 * a.conj().T @ a - (T.matrix @ a).conj().T @ (T.matrix @ a) - np.eye(pos.size)
        assert np.max(np.abs(np.linalg.eigvalsh(form))) <= 1e-12
        assert abs(check_concave(T).min_eigenvalue) <= 1e-12


def test_bergman_not_concave():
    model = make_model(BERGMAN, (8,))
    rep = check_concave(shift_compressed(model, 1))
    assert not rep.psd
    # witness x = 1: 2||z||^2 - ||z^2||^2 - ||1||^2 = 1 - 1/3 - 1
    T = shift_compressed(model, 1)
    one = univariate(model.grid, [1])
    z, z2 = T.apply(one), T.apply(T.apply(one))
    val = 2 * inner_product(model, z, z) - inner_product(model, z2, z2) - inner_product(model, one, one)
    assert val.real == pytest.approx(-1 / 3, abs=1e-12)
    assert rep.min_eigenvalue <= -1 / 3 + 1e-12


@pytest.mark.parametrize("n, caps_range", [(1, range(4, 17)), (2, range(4, 17)), (3, range(4, 9))])
def test_hypotheses_hold_across_truncations(n, caps_range):
    for d in caps_range:
        for kind, check in ((BERGMAN, check_shimorin), (DIRICHLET, check_concave), (HARDY, check_concave)):
            T = shift_compressed(make_model(kind, (d,) * n), n)
            assert check(T).psd, (kind, d, n)
        T = shift_compressed(make_model(BERGMAN, (d,) * n), 1)
        assert check_concave(T).min_eigenvalue <= -0.25


@given(c=st.floats(1.4143, 5.0), phase=st.floats(0, 2 * np.pi))
def test_scaling_breaks_shimorin(c, phase):
    T = shift_compressed(make_model(HARDY, (5,)), 1)
    assert not check_shimorin(c * np.exp(1j * phase) * T).psd


def test_margin_errors():
    T = shift_compressed(make_model(BERGMAN, (2,)), 1)
    with pytest.raises(ConfigurationError):
        check_shimorin(T, margin=3)
    with pytest.raises(ConfigurationError):
        check_concave(T, margin=1)
    with pytest.raises(ConfigurationError):
        check_concave(T, margin=3)


# -- commutation ------------------------------------------------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_full_tuple_doubly_commuting(kind):
    tup = ShiftTuple.for_model(make_model(kind, (6, 6)))
    rep = check_doubly_commuting(tup, tol=1e-12)
    assert rep.passed and rep.residual <= 1e-12
    # brute force: T_1 T_2* - T_2* T_1 on interior columns
    a, b = tup.op(1).matrix, tup.op(2).matrix
    D = tup.interior_basis(1)
    assert np.linalg.norm((a @ b.conj().T - b.conj().T @ a) @ D, 2) <= 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_tensor_restriction_doubly_commuting(kind):
    model = make_model(kind, (8, 8))
    tup = ShiftTuple.for_model(model)
    s = gen_tensor_invariant_subspace(model, [[[-0.5, 1.0]], [[0.0, 1.0]]])
    assert check_doubly_commuting(ShiftRestriction(tup, s, 1)).residual <= 1e-10


def test_vanishing_ideal_not_doubly_commuting():
    model = make_model(HARDY, (8, 8))
    tup = ShiftTuple.for_model(model)
    s = gen_vanishing_ideal_subspace(model)
    rep = check_doubly_commuting(ShiftRestriction(tup, s, 1))
    assert rep.residual > 0.1 and not rep.passed


def test_doubly_commuting_needs_two():
    with pytest.raises(NotApplicableError):
        check_doubly_commuting(ShiftTuple.for_model(make_model(HARDY, (4,))))


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("caps", [(6, 6), (4, 4, 4)])
def test_commutes_with_modulus_coordinate_pairs(kind, caps):
    tup = ShiftTuple.for_model(make_model(kind, caps))
    for i in range(1, tup.n + 1):
        for j in range(1, tup.n + 1):
            if i != j:
                assert commutes_with_modulus(tup.op(i), tup.op(j)) <= 1e-12


def test_commutes_with_modulus_same_shift_hardy():
    T = shift_compressed(make_model(HARDY, (6,)), 1)
    assert commutes_with_modulus(T, T) == 0.0


def test_commutes_with_modulus_perturbed():
    model = make_model(HARDY, (6,))
    T = shift_compressed(model, 1)
    e00 = np.zeros((7, 7))
    e00[0, 0] = 1.0
    P = T + OperatorMatrix(model, model, e00)
    assert commutes_with_modulus(T, P) > 0.1


# -- analyticity proxy ------------------------------------------------------------------

@pytest.mark.parametrize("kind", (HARDY, BERGMAN))
def test_rank_decay(kind):
    proxy = analyticity_proxy(shift_compressed(make_model(kind, (5,)), 1))
    assert proxy.ranks == (5, 4, 3, 2, 1, 0)
    assert proxy.vanishes_at == 6
    assert "proxy" in proxy.to_dict()["note"]


def test_identity_never_vanishes():
    proxy = analyticity_proxy(identity(make_model(HARDY, (4,))), max_power=5)
    assert proxy.ranks == (5,) * 5 and proxy.vanishes_at is None
