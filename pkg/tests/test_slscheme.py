import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slhyper.gridfn import Grid
from slhyper.hopflax import analytic_quadratic, hopf_lax
from slhyper.slscheme import (
    SchemeConfig,
    VelocitySearchError,
    evolve,
    interior_margin,
    property_report,
    sl_step,
    trajectory,
)


def quad(b, interp="cubic", g=None):
    g = Grid(1, 12.0, 4097) if g is None else g
    return g.sample(lambda x: -0.5 * b * x[..., 0] ** 2, interp=interp)


def test_constant_unchanged(small_line):
    f = small_line.sample(lambda x: np.full(x.shape[:-1], 2.5))
    assert np.array_equal(sl_step(f, SchemeConfig(0.1)).values, f.values)


def test_moreau_huber_envelope_of_abs():
    g = Grid(1, 3.0, 601)
    u = sl_step(g.sample(lambda x: np.abs(x[..., 0])), SchemeConfig(0.1))
    assert u(1.0) == pytest.approx(0.95, abs=1e-12)
    assert u(0.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n, coef", [(1, 0.5 / 0.95), (2, 0.5 / 0.9)])
def test_quadratic_profile_recursion(line, n, coef):
    f = quad(0.5, g=line)
    cfg = SchemeConfig(0.1).resolved(f)
    u = evolve(f, n, cfg)
    mask = line.interior(interior_margin(n, cfg))
    assert np.max(np.abs(u.values - (-coef * 0.5 * line.axis ** 2))[mask]) <= 1e-9


def test_zero_steps_returns_datum(small_line):
    f = small_line.sample(lambda x: np.sin(x[..., 0]))
    assert evolve(f, 0, SchemeConfig(0.1)) is f


def test_commutes_with_constants(small_line):
    f = small_line.sample(lambda x: -np.sqrt(1 + x[..., 0] ** 2))
    cfg = SchemeConfig(0.1).resolved(f)
    a = evolve(f + 3.7, 5, cfg)
    b = evolve(f, 5, cfg)
    assert np.allclose(a.values, b.values + 3.7, atol=1e-12)


def test_q_radius_too_small():
    g = Grid(1, 4.0, 401)
    with pytest.raises(VelocitySearchError, match="q search radius exhausted"):
        sl_step(g.sample(lambda x: 4 * x[..., 0]), SchemeConfig(0.1, q_radius=0.5))


def test_config_validation(small_line):
    with pytest.raises(ValueError):
        SchemeConfig(0.0)
    with pytest.raises(ValueError):
        SchemeConfig(0.1, q_radius=-1)
    other = Grid(1, 1.0, 11)
    with pytest.raises(ValueError):
        SchemeConfig(0.1, grid=other).resolved(small_line.sample(lambda x: x[..., 0]))


@pytest.mark.parametrize("name, func", [
    ("negabs", lambda x: -np.abs(x[..., 0])),
    ("sqrt1px2", lambda x: -np.sqrt(1 + x[..., 0] ** 2)),
    ("tanh", lambda x: -np.tanh(x[..., 0])),
])
def test_one_step_is_hopf_lax(small_line, name, func):
    f = small_line.sample(func)
    a = sl_step(f, SchemeConfig(0.1))
    b = hopf_lax(f, 0.1)
    mask = small_line.interior(0.5)
    assert np.max(np.abs(a.values - b.values)[mask]) <= 1e-6


def test_two_dimensional_step():
    g = Grid(2, 3.0, 61)
    f = g.sample(lambda x: -0.25 * np.sum(x * x, axis=-1), interp="cubic")
    u = evolve(f, 2, SchemeConfig(0.1))
    exact = analytic_quadratic(g, 0.5, (0.0, 0.0), 0.2)
    assert np.max(np.abs(u.values - exact.values)[g.interior(1.0)]) <= 1e-9


def test_nonincreasing_in_n(small_line):
    f = small_line.sample(lambda x: -np.sqrt(1 + x[..., 0] ** 2))
    traj = trajectory(f, 4, SchemeConfig(0.1))
    for a, b in zip(traj, traj[1:]):
        assert np.all(b.values <= a.values + 1e-12)


@settings(max_examples=15, deadline=None)
@given(amp=st.floats(0, 1), freq=st.floats(0.5, 3))
def test_monotone_in_data(amp, freq):
    g = Grid(1, 4.0, 161)
    f = g.sample(lambda x: -np.abs(x[..., 0]))
    h = g.sample(lambda x: -np.abs(x[..., 0]) + amp * np.sin(freq * x[..., 0]) ** 2)
    cfg = SchemeConfig(0.1, q_radius=1.0 + 1.0 + 2 * freq * amp)
    mask = g.interior(interior_margin(3, cfg))
    diff = evolve(h, 3, cfg).values - evolve(f, 3, cfg).values
    assert np.all(diff[mask] >= -1e-12)


def test_property_report_affine():
    g = Grid(1, 4.0, 201)
    rep = property_report(g.sample(lambda x: 0.5 * x[..., 0]), 5, SchemeConfig(0.1))
    assert np.allclose(rep.lipschitz, 0.5)
    assert max(rep.semiconcavity) <= 1e-9
    assert rep.increment_constant == pytest.approx(0.125)


def test_property_report_constant():
    g = Grid(1, 4.0, 201)
    rep = property_report(g.sample(lambda x: np.full(x.shape[:-1], -2.0)), 5, SchemeConfig(0.1))
    assert rep.sup_norm == [2.0] * 6
    assert rep.sup_growth_ok()


def test_property_report_sqrt_profile(small_line):
    f = small_line.sample(lambda x: -np.sqrt(1 + x[..., 0] ** 2))
    rep = property_report(f, 10, SchemeConfig(0.05))
    tol = 10 * small_line.spacing
    assert rep.sup_growth_ok(tol)
    assert rep.lipschitz_ok(tol)
    assert rep.semiconcavity_ok(tol)
    assert np.isfinite(rep.increment_constant)


def test_property_report_needs_a_step(small_line):
    with pytest.raises(ValueError):
        property_report(small_line.sample(lambda x: x[..., 0]), 0, SchemeConfig(0.1))
