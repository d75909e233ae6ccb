import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellwronskian.errors import (
    BasepointMismatch,
    DomainViolation,
    NonSquare,
    OrderMismatch,
    ZeroOrderJet,
)
from bellwronskian.jets import (
    Jet,
    MatrixOfJets,
    det_jets,
    jet_add,
    jet_differentiate,
    jet_elementary,
    jet_mul,
    jet_scale,
    matrix_jet_derivative,
)

coef = st.floats(-3, 3, allow_nan=False)


def jets(order, t0=0.0):
    return st.lists(coef, min_size=order + 1, max_size=order + 1).map(lambda c: Jet(c, t0))


def jet_matrices(n, order):
    return st.lists(coef, min_size=n * n * (order + 1), max_size=n * n * (order + 1)).map(
        lambda c: MatrixOfJets(np.array(c).reshape(n, n, order + 1))
    )


def det_by_permutations(M):
    """Leibniz formula in the jet ring."""
    n = M.shape[0]
    total = Jet.constant(0.0, M.t0, M.order)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Jet.constant(1.0, M.t0, M.order)
        for i in range(n):
            term = term * M.entry(i, perm[i])
        total = total + term if inv % 2 == 0 else total - term
    return total


def test_square_of_one_plus_t():
    x = Jet([1.0, 1.0, 0.0])
    np.testing.assert_array_equal(jet_mul(x, x).coeffs, [1.0, 2.0, 1.0])


def test_additive_identity():
    x = Jet([0.3, -1.0, 2.0])
    assert jet_add(x, Jet.constant(0.0, 0.0, 2)).allclose(x)


def test_exp_times_exp_neg():
    t = Jet.variable(0.0, 3)
    prod = jet_elementary("exp", t) * jet_elementary("exp", -t)
    np.testing.assert_allclose(prod.coeffs, [1.0, 0.0, 0.0, 0.0], atol=1e-15)


def test_scale():
    np.testing.assert_array_equal(jet_scale(Jet([1.0, 2.0]), 3).coeffs, [3.0, 6.0])


def test_mismatch_errors():
    with pytest.raises(BasepointMismatch):
        Jet([1.0, 0.0], 0.0) + Jet([1.0, 0.0], 1.0)
    with pytest.raises(OrderMismatch):
        Jet([1.0, 0.0]) * Jet([1.0, 0.0, 0.0])


def test_differentiate_examples():
    t2 = Jet([0.0, 0.0, 1.0, 0.0])
    d = jet_differentiate(t2)
    assert d.order == 2
    np.testing.assert_array_equal(d.coeffs, [0.0, 2.0, 0.0])
    np.testing.assert_array_equal(jet_differentiate(Jet.constant(4.0, 0.0, 3)).coeffs, [0, 0, 0])
    with pytest.raises(ZeroOrderJet):
        jet_differentiate(Jet([1.0]))


def test_sin_derivative_is_cos():
    t = Jet.variable(0.0, 4)
    d = jet_differentiate(jet_elementary("sin", t))
    assert d.allclose(jet_elementary("cos", Jet.variable(0.0, 3)), atol=1e-15)


def test_elementary_examples():
    np.testing.assert_allclose(jet_elementary("exp", Jet([0.0, 2.0, 0.0])).coeffs, [1, 2, 2])
    np.testing.assert_allclose(jet_elementary("cos", Jet.constant(0.0, 0.0, 3)).coeffs, [1, 0, 0, 0])
    np.testing.assert_allclose(
        jet_elementary("log", Jet([1.0, 1.0, 0.0, 0.0])).coeffs, [0, 1, -0.5, 1 / 3], rtol=1e-15
    )
    with pytest.raises(DomainViolation):
        jet_elementary("log", Jet([0.0, 1.0]))
    with pytest.raises(DomainViolation):
        jet_elementary("pow", Jet([-1.0, 1.0]), 0.5)


def test_integer_pow_at_zero_base():
    t = Jet.variable(0.0, 4)
    np.testing.assert_array_equal((t ** 3).coeffs, [0, 0, 0, 1, 0])
    with pytest.raises(DomainViolation):
        t ** -1


def test_real_pow_matches_exp_log():
    u = Jet([2.0, 0.5, -0.25, 0.1])
    a = jet_elementary("pow", u, 1.5)
    b = jet_elementary("exp", 1.5 * jet_elementary("log", u))
    assert a.allclose(b, rtol=1e-13, atol=1e-13)


def test_division_inverts_multiplication():
    u = Jet([2.0, 1.0, -1.0, 0.5])
    v = Jet([1.5, -0.2, 0.3, 0.0])
    assert ((u * v) / v).allclose(u, rtol=1e-13, atol=1e-13)
    with pytest.raises(DomainViolation):
        u / Jet([0.0, 1.0, 0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(jets(5), jets(5))
def test_leibniz(x, y):
    lhs = jet_differentiate(x * y)
    rhs = jet_differentiate(x) * y.truncate(4) + x.truncate(4) * jet_differentiate(y)
    assert lhs.allclose(rhs, rtol=1e-12, atol=1e-12)


# Closed forms evaluated in 40-digit arithmetic so the h = 1e-5 central
# differences below are limited by truncation (O(h^2)), not by rounding.
CLOSED_FORMS = [
    ("exp", lambda t: mpmath.exp(t)),
    ("sin", lambda t: mpmath.sin(t)),
    ("cos", lambda t: mpmath.cos(t)),
    ("log", lambda t: mpmath.log(t)),
]


def central_difference(fn, t, order, h):
    with mpmath.workdps(40):
        t, h = mpmath.mpf(t), mpmath.mpf(h)
        stencil = {
            1: [(-1, -0.5), (1, 0.5)],
            2: [(-1, 1), (0, -2), (1, 1)],
            3: [(-2, -0.5), (-1, 1), (1, -1), (2, 0.5)],
        }[order]
        return float(sum(w * fn(t + s * h) for s, w in stencil) / h ** order)


@pytest.mark.parametrize("kind,fn", CLOSED_FORMS)
@pytest.mark.parametrize("t0", [0.4, 1.3, 2.2])
def test_finite_difference_round_trip(kind, fn, t0):
    jet = jet_elementary(kind, Jet.variable(t0, 3))
    for order in (1, 2, 3):
        fd = central_difference(fn, t0, order, 1e-5)
        assert abs(jet.derivative(order) - fd) <= 1e-6


def test_det_examples():
    assert det_jets(MatrixOfJets.identity(3, 0.0, 2)).allclose(Jet.constant(1.0, 0.0, 2))
    one = MatrixOfJets.from_jets([[Jet([2.0, 1.0])]])
    assert det_jets(one).allclose(Jet([2.0, 1.0]))
    m = MatrixOfJets.constant([[3.0, 1.0], [-2.0, 0.0]], 0.0, 1)
    assert det_jets(m).allclose(Jet.constant(2.0, 0.0, 1))
    with pytest.raises(NonSquare):
        det_jets(MatrixOfJets.constant([[1.0, 2.0]]))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_det_matches_permutation_expansion(n):
    rng = np.random.default_rng(n)
    M = MatrixOfJets(rng.uniform(-1, 1, size=(n, n, 4)) + 2 * np.eye(n)[..., None] * [1, 0, 0, 0])
    assert det_jets(M).allclose(det_by_permutations(M), rtol=1e-11, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.data())
def test_det_multiplicative(n, data):
    A = data.draw(jet_matrices(n, 3))
    B = data.draw(jet_matrices(n, 3))
    assert det_jets(A @ B).allclose(det_jets(A) * det_jets(B), rtol=1e-9, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.data())
def test_det_alternating(n, data):
    A = data.draw(jet_matrices(n, 2))
    swapped = MatrixOfJets(A.data[:, [1, 0] + list(range(2, n))])
    assert det_jets(swapped).allclose(-det_jets(A), rtol=1e-10, atol=1e-10)
    repeated = A.data.copy()
    repeated[:, 1] = repeated[:, 0]
    np.testing.assert_allclose(det_jets(MatrixOfJets(repeated)).coeffs, 0.0, atol=1e-10)


def test_bareiss_zero_column_and_bad_pivot():
    z = np.zeros((5, 5, 2))
    z[range(5), range(5), 0] = 1.0
    z[:, 0] = 0.0
    np.testing.assert_array_equal(det_jets(MatrixOfJets(z)).coeffs, [0.0, 0.0])
    z[0, 0, 1] = 1.0  # first column is t*e_1: no unit pivot available
    with pytest.raises(DomainViolation):
        det_jets(MatrixOfJets(z))


def test_matrix_derivative_examples():
    c = MatrixOfJets.constant([[3.0, 1.0], [-2.0, 0.0]], 0.0, 2)
    np.testing.assert_array_equal(matrix_jet_derivative(c).data, np.zeros((2, 2, 2)))
    t2 = MatrixOfJets.from_jets([[Jet([0.0, 0.0, 1.0])]])
    np.testing.assert_array_equal(matrix_jet_derivative(t2).data[0, 0], [0.0, 2.0])


def test_raw_derivative_conversion():
    j = Jet.from_derivatives([1.0, 2.0, 6.0, 24.0])
    np.testing.assert_allclose(j.coeffs, [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(j.derivatives(), [1.0, 2.0, 6.0, 24.0])
    assert j.derivative(3) == pytest.approx(24.0)
    assert math.isclose(Jet.variable(2.0, 1).value, 2.0)
