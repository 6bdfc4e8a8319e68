"""Error between the discrete semigroup ``Q_n`` and the exact ``S_{nh}``.

The exact semigroup is approximated by a Hopf-Lax evaluation on a grid
refined four times with a tighter minimisation tolerance, restricted back to
the coarse nodes. Passing ``reference`` (a grid function on the coarse grid)
replaces it, e.g. by a closed form; ``reference="oracle"`` compares ``Q_n f``
with itself.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import brentq

from .gridfn import Grid, GridFunction
from .hopflax import hopf_lax
from .measure import MeasureSpec, log_lp_norm_exp
from .slscheme import SchemeConfig, evolve, interior_margin

ORACLE = "oracle"
REFINE = 4
FLOOR = 1e-11


def reference_solution(f, t, source=None, refine=REFINE, tol=1e-12, model=None):
    """``S_t f`` computed on a ``refine``-times finer grid, read back at the nodes of ``f``.

    ``source`` is the datum as a callable on points; without it the fine grid
    is filled from the interpolant of ``f``.
    """
    if t == 0:
        return f
    fine = f.grid.refined(refine)
    coords = fine.coords()
    vals = source(coords) if source is not None else f(coords)
    ff = GridFunction(fine, vals, f.extension, f.interp)
    st = hopf_lax(ff, t, model, tol=tol)
    return f.with_values(st.values[(slice(None, None, refine),) * f.grid.dim])


def _pair(f, n, cfg, reference, source, model):
    cfg = cfg.resolved(f)
    q = evolve(f, n, cfg, model)
    if isinstance(reference, str):
        if reference != ORACLE:
            raise ValueError(f"unknown reference {reference!r}")
        return q, q, cfg
    if reference is None:
        reference = reference_solution(f, n * cfg.h, source, tol=cfg.q_refine_tol / 100,
                                       model=model)
    if reference.grid != f.grid:
        raise ValueError("reference lives on a different grid")
    return q, reference, cfg


@dataclass(frozen=True)
class ExpErrorReport:
    """``log ||e^{S - Q}||``, ``log ||e^{Q - S}||`` in ``L^{lambda_n}`` and the fitted bound."""

    log_plus: float
    log_minus: float
    log_bound: float
    fitted_C: float

    def __iter__(self):
        yield self.log_plus
        yield self.log_minus
        yield self.log_bound


def error_product_log(C, lambdas, h):
    """``sum_k (1 / lambda_k) log(1 + C lambda_k^2 h^2)`` over ``k = 1..n``."""
    lam = np.asarray(lambdas, dtype=float)
    base = 1.0 + C * lam * lam * h * h
    if np.any(base <= 0):
        raise ValueError("invalid bound factor")
    return float(np.sum(np.log(base) / lam))


def fit_error_constant(target, lambdas, h):
    """Smallest ``C >= 0`` with :func:`error_product_log` at least ``target``."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0 or target <= 0:
        return 0.0
    if np.any(lam <= 0):
        raise ValueError("the error product needs positive exponents")
    hi = 1.0
    while error_product_log(hi, lam, h) < target:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("no finite constant reaches the target")
    return float(brentq(lambda c: error_product_log(c, lam, h) - target, 0.0, hi,
                        xtol=1e-14, rtol=1e-12))


def exp_error_norms(f, n, sched, cfg, mu=None, reference=None, source=None, model=None):
    """Exponential error norms between ``S_{nh} f`` and ``Q_n f`` with a fitted constant."""
    mu = MeasureSpec.gaussian(sched.rho) if mu is None else mu
    lam = sched.check_nonzero(n)
    q, s, cfg = _pair(f, n, cfg, reference, source, model)
    quad = mu.quadrature(f.grid)
    plus = log_lp_norm_exp(s - q, lam[n], mu, quad)
    minus = log_lp_norm_exp(q - s, lam[n], mu, quad)
    C = fit_error_constant(max(plus, minus), lam[1:], sched.h)
    return ExpErrorReport(plus, minus, error_product_log(C, lam[1:], sched.h), C)


def mean_error(f, n, h, cfg=None, mu=None, reference=None, source=None, model=None):
    """``(int (Q_n f - S_n f) dmu, int |Q_n f - S_n f| dmu)``.

    The integral with the roles exchanged is the negative of the first entry.
    """
    cfg = SchemeConfig(h) if cfg is None else cfg
    if cfg.h != h:
        raise ValueError("h does not match the scheme configuration")
    mu = MeasureSpec.gaussian() if mu is None else mu
    q, s, _ = _pair(f, n, cfg, reference, source, model)
    quad = mu.quadrature(f.grid)
    d = q.values - s.values
    return quad.integrate(d), quad.integrate(np.abs(d))


def tail_measure(f, n, h, p, cfg=None, mu=None, reference=None, source=None, model=None):
    """``mu{ |S_n f - Q_n f| >= h^p }`` as the quadrature mass of the nodal indicator."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    cfg = SchemeConfig(h) if cfg is None else cfg
    if cfg.h != h:
        raise ValueError("h does not match the scheme configuration")
    mu = MeasureSpec.gaussian() if mu is None else mu
    q, s, _ = _pair(f, n, cfg, reference, source, model)
    quad = mu.quadrature(f.grid)
    return quad.integrate((np.abs(s.values - q.values) >= h ** p).astype(float))


def steps_for(T, h, strict=True):
    """Step count ``T / h``; with ``strict=False`` the largest ``n`` with ``n h <= T``."""
    n = int(np.floor(T / h + 1e-9))
    if n < 1:
        raise ValueError("T shorter than one step")
    if strict and abs(n * h - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T not a multiple of h")
    return n


def fit_slope(xs, ys):
    """Least-squares slope of ``ys`` against ``xs``."""
    return float(np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)[0])


@dataclass
class OrderStudy:
    """Sup-norm errors on an ``h`` ladder and the fitted ``log err / log h`` slope."""

    hs: List[float]
    errors: List[float] = field(default_factory=list)
    spacings: List[float] = field(default_factory=list)
    order: float = float("nan")
    floor_reached: bool = False

    def ratios(self):
        """``err(h_i) / err(h_{i+1})`` for consecutive rungs."""
        e = self.errors
        return [e[i] / e[i + 1] if e[i + 1] > 0 else float("inf") for i in range(len(e) - 1)]


def convergence_order(source, T, hs, dim=1, half_width=3.0, scale=1.0, interp="linear",
                      reference=None, model=None, floor=FLOOR):
    """Fit the order of ``max |Q_{T/h} f - S_T f|`` in ``h`` with ``dx = scale h^2``.

    ``source`` is the datum as a callable; it is resampled on every rung.
    Errors are taken on the nodes whose domain of dependence stays inside
    the box. ``floor_reached`` is set when some error is below ``floor``,
    in which case the slope only measures roundoff.
    """
    hs = [float(h) for h in hs]
    if len(hs) < 3:
        raise ValueError("need at least three step sizes")
    steps = [steps_for(T, h) for h in hs]
    study = OrderStudy(hs)
    for h, n in zip(hs, steps):
        grid = Grid.with_spacing(dim, half_width, scale * h * h)
        f = grid.sample(source, interp=interp)
        cfg = SchemeConfig(h).resolved(f)
        q = evolve(f, n, cfg, model)
        if reference == ORACLE:
            s = q
        elif reference is not None:
            s = grid.sample(lambda x: reference(x, T), interp=interp)
        else:
            s = reference_solution(f, T, source, tol=cfg.q_refine_tol / 100, model=model)
        mask = grid.interior(interior_margin(n, cfg))
        study.spacings.append(grid.spacing)
        study.errors.append(float(np.max(np.abs(q.values - s.values)[mask])))
    err = np.asarray(study.errors)
    study.floor_reached = bool(np.any(err < floor))
    if np.all(err > 0):
        study.order = fit_slope(np.log(hs), np.log(err))
    return study


@dataclass
class LadderRow:
    h: float
    n: int
    p: float
    tail_mass: float
    mean_err: float
    sup_err: float
    fitted_order: float = float("nan")

    def as_dict(self):
        return {"h": self.h, "n": self.n, "p": self.p, "tailMass": self.tail_mass,
                "meanErr": self.mean_err, "supErr": self.sup_err,
                "fittedOrder": self.fitted_order}


def ladder_row(source, T, p, h, grid, interp="linear", mu=None, model=None):
    """One rung of :func:`concentration_ladder`."""
    mu = MeasureSpec.gaussian() if mu is None else mu
    quad = mu.quadrature(grid)
    f = grid.sample(source, interp=interp)
    n = steps_for(T, h, strict=False)
    q, s, cfg = _pair(f, n, SchemeConfig(h), None, source, model)
    d = q.values - s.values
    mask = grid.interior(interior_margin(n, cfg))
    return LadderRow(h, n, p, quad.integrate((np.abs(d) >= h ** p).astype(float)),
                     quad.integrate(d), float(np.max(np.abs(d)[mask])))


def with_fitted_order(rows):
    """Fill ``fitted_order`` with the slope of ``log supErr`` against ``log h``."""
    errs = np.array([r.sup_err for r in rows])
    if len(rows) >= 2 and np.all(errs > 0):
        order = fit_slope(np.log([r.h for r in rows]), np.log(errs))
        for r in rows:
            r.fitted_order = order
    return rows


def concentration_ladder(source, T, p, hs, grid, interp="linear", mu=None, model=None):
    """Tail mass, mean error and sup error of ``Q_{T/h} f`` for each ``h``.

    A step size that does not divide ``T`` runs ``floor(T / h)`` steps and
    is compared with the exact solution at that horizon.
    ``fitted_order`` in every row is the slope of ``log supErr`` against
    ``log h`` over the ladder (``nan`` if an error vanishes).
    """
    return with_fitted_order([ladder_row(source, T, p, h, grid, interp, mu, model) for h in hs])


def tail_decay_slope(hs, masses, p):
    """Slope of ``log mass`` against ``-1 / h^{1-p}`` over the nonzero masses.

    Returns ``(slope, used)``; ``slope`` is ``nan`` when fewer than two masses
    are nonzero.
    """
    used = [(h, m) for h, m in zip(hs, masses) if m > 0]
    if len(used) < 2:
        return float("nan"), used
    x = [-1.0 / h ** (1.0 - p) for h, _ in used]
    return fit_slope(x, [np.log(m) for _, m in used]), used
