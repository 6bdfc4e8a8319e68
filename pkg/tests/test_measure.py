import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slhyper.gridfn import Grid, GridFunction
from slhyper.measure import (
    DomainTooSmall,
    MeasureSpec,
    domain_ok,
    entropy,
    log_lp_norm_exp,
    lsi_residual,
)

GAUSS = MeasureSpec.gaussian()
LEB = MeasureSpec.lebesgue()


@pytest.fixture(scope="module")
def wide():
    return Grid(1, 12.0, 4097)


def test_gaussian_mass_is_one(wide):
    q = GAUSS.quadrature(wide)
    assert abs(q.raw_mass - 1) <= 1e-8
    assert np.exp(np.logaddexp.reduce(q.log_weights)) == pytest.approx(1.0, abs=1e-15)


def test_truncated_box_rejected():
    with pytest.raises(DomainTooSmall):
        GAUSS.quadrature(Grid(1, 3.0, 301))


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, -1.0])
def test_zero_has_unit_norm(wide, p):
    zero = wide.sample(lambda x: np.zeros(x.shape[:-1]))
    assert log_lp_norm_exp(zero, p, GAUSS) == 0.0


def test_exponential_moment(wide):
    # int e^{2x} dmu = e^2
    assert log_lp_norm_exp(wide.sample(lambda x: x[..., 0]), 2.0, GAUSS) == pytest.approx(1.0,
                                                                                        abs=1e-12)


def test_lebesgue_gaussian_integral(wide):
    u = wide.sample(lambda x: -0.5 * x[..., 0] ** 2)
    assert log_lp_norm_exp(u, 1.0, LEB) == pytest.approx(0.5 * np.log(2 * np.pi), abs=1e-12)


def test_zero_exponent_rejected(wide):
    with pytest.raises(ValueError, match="exponent must be nonzero"):
        log_lp_norm_exp(wide.sample(lambda x: x[..., 0]), 0.0, GAUSS)


def test_no_overflow_for_large_exponents(wide):
    u = wide.sample(lambda x: 30 * np.abs(x[..., 0]))
    val = log_lp_norm_exp(u, 50.0, LEB)
    assert np.isfinite(val) and val > 300


def test_monotone_in_exponent(wide):
    u = wide.sample(lambda x: np.sin(2 * x[..., 0]) + 0.3 * x[..., 0])
    vals = [log_lp_norm_exp(u, p, GAUSS) for p in (0.5, 1, 2, 4)]
    assert np.all(np.diff(vals) >= 0)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(-50, 50))
def test_constant_shift(c):
    g = Grid(1, 12.0, 801)
    u = g.sample(lambda x: np.cos(x[..., 0]))
    assert log_lp_norm_exp(u + c, 1.5, GAUSS) == pytest.approx(
        log_lp_norm_exp(u, 1.5, GAUSS) + c, abs=1e-12)


def test_domain_check(wide):
    assert domain_ok(wide.sample(lambda x: -0.5 * x[..., 0] ** 2), 1.0, LEB)
    assert not domain_ok(wide.sample(lambda x: -0.01 * np.abs(x[..., 0])), 1.0, LEB)


def test_entropy_of_constant(wide):
    assert entropy(wide.sample(lambda x: np.full(x.shape[:-1], 3.0)), GAUSS) == pytest.approx(
        0.0, abs=1e-13)


def test_entropy_of_exponential(wide):
    assert entropy(wide.sample(lambda x: np.exp(x[..., 0])), GAUSS) == pytest.approx(
        0.5 * np.exp(0.5), abs=1e-10)


def test_entropy_of_bump_is_nonnegative(wide):
    bump = wide.sample(lambda x: np.where(np.abs(x[..., 0] - 0.5) < 0.3, 1.0, 0.0))
    mass = np.sum(GAUSS.quadrature(wide).weights * bump.values)
    assert entropy(bump.with_values(bump.values / mass), GAUSS) >= 0


def test_entropy_needs_nonnegative_data(wide):
    with pytest.raises(ValueError, match="nonnegative data required"):
        entropy(wide.sample(lambda x: x[..., 0]), GAUSS)


def test_entropy_needs_probability(wide):
    with pytest.raises(ValueError):
        entropy(wide.sample(lambda x: np.ones(x.shape[:-1])), LEB)


def test_lsi_constant(wide):
    assert lsi_residual(wide.sample(lambda x: np.full(x.shape[:-1], 2.0)), GAUSS) == pytest.approx(
        0.0, abs=1e-12)


def test_lsi_identity_function(wide):
    # 2 E[1] - Ent(x^2) = 2 - (2 - gamma - log 2)
    r = lsi_residual(wide.sample(lambda x: x[..., 0]), GAUSS)
    assert r >= 0
    assert r == pytest.approx(np.euler_gamma + np.log(2), abs=1e-4)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(-1, 1), w=st.floats(0.2, 2), c=st.floats(-1, 1))
def test_lsi_random_smooth(a, b, w, c):
    g = Grid(1, 12.0, 2049)
    u = g.sample(lambda x: a * np.sin(w * x[..., 0]) + b * np.tanh(x[..., 0]) + c)
    assert lsi_residual(u, GAUSS) >= -1e-6


def test_two_dimensional_norm():
    g = Grid(2, 10.0, 401)
    u = g.sample(lambda x: x[..., 0] + 0.5 * x[..., 1])
    # e^{p^2 |v|^2 / 2} with |v|^2 = 1.25
    assert log_lp_norm_exp(u, 2.0, GAUSS) == pytest.approx(1.25, abs=1e-10)


def test_measure_validation():
    with pytest.raises(ValueError):
        MeasureSpec("uniform")
    with pytest.raises(ValueError):
        MeasureSpec.gaussian(0.0)
