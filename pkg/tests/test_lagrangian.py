import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slhyper.lagrangian import (
    ConjugateSearchError,
    LagrangianModel,
    conjugate_model,
    hamiltonian_eval,
    legendre,
)

QUAD = LagrangianModel.quadratic()
QUARTIC = LagrangianModel.general(lambda p: 0.25 * np.sum(p ** 4, axis=-1))


def test_quadratic_lagrangian_at_unit_velocity():
    assert legendre(QUAD, 1.0) == 0.5


def test_quartic_conjugate():
    # L(q) = (3/4)|q|^{4/3}
    assert legendre(QUARTIC, 1.0) == pytest.approx(0.75, abs=1e-9)
    q = np.array([-2.0, -0.3, 0.0, 0.7, 3.0])
    assert np.allclose(legendre(QUARTIC, q[:, None]), 0.75 * np.abs(q) ** (4 / 3), atol=1e-9)


def test_conjugate_at_origin_is_minus_min_h():
    model = LagrangianModel.general(lambda p: np.cosh(p[..., 0]) - 1.0)
    assert legendre(model, 0.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p, expected", [((0.0, 0.0), 0.0), ((3.0, 4.0), 12.5)])
def test_quadratic_hamiltonian(p, expected):
    assert hamiltonian_eval(QUAD, p) == expected


def test_general_model_matches_quadratic_path():
    wrapped = LagrangianModel.general(lambda p: 0.5 * np.sum(p * p, axis=-1))
    assert hamiltonian_eval(wrapped, [1.0]) == 0.5
    q = np.linspace(-4, 4, 17)[:, None]
    assert np.allclose(legendre(wrapped, q), legendre(QUAD, q), atol=1e-10)


@pytest.mark.parametrize("dim", [1, 2])
def test_double_conjugation(dim):
    rng = np.random.default_rng(7)
    p = rng.uniform(-5, 5, size=(100, dim))
    back = legendre(conjugate_model(QUAD), p)
    assert np.max(np.abs(back - hamiltonian_eval(QUAD, p))) <= 1e-8


def test_radius_too_small_raises():
    model = LagrangianModel.general(lambda p: 0.5 * np.sum(p * p, axis=-1), search_radius=1.0)
    with pytest.raises(ConjugateSearchError, match="conjugate search radius exhausted"):
        legendre(model, 3.0)


def test_rejects_general_without_hamiltonian():
    with pytest.raises(ValueError):
        LagrangianModel("general")


finite = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(q=finite, p=finite)
def test_fenchel_young(q, p):
    assert legendre(QUARTIC, q) >= p * q - 0.25 * p ** 4 - 1e-10


@settings(max_examples=30, deadline=None)
@given(q=finite)
def test_lagrangian_bounded_below_by_minus_h0(q):
    assert legendre(QUARTIC, q) >= -hamiltonian_eval(QUARTIC, 0.0) - 1e-12


@settings(max_examples=30, deadline=None)
@given(q1=finite, q2=finite, t=st.floats(0, 1))
def test_lagrangian_convex(q1, q2, t):
    lhs = legendre(QUARTIC, t * q1 + (1 - t) * q2)
    assert lhs <= t * legendre(QUARTIC, q1) + (1 - t) * legendre(QUARTIC, q2) + 1e-10
