"""Continuous Hamilton-Jacobi semigroup via the Hopf-Lax inf-convolution.

``S_t f(x) = inf_y { f(y) + t L((x - y) / t) }``

This is evaluated directly in ``y`` (the semi-Lagrangian stepper works in the
velocity variable instead), and doubles as the reference solution for the
scheme. Closed forms for affine and inverted-parabola data are provided for
exact comparisons.
"""

import numpy as np

from ._search import golden_section
from .gridfn import GridFunction, lipschitz_estimate
from .lagrangian import LagrangianModel


class SearchRadiusError(ValueError):
    pass


class BlowUpError(ValueError):
    pass


def search_radius_bound(f, t):
    """Radius ``t (Lip(f) + 1) + dx`` containing every Hopf-Lax minimiser."""
    return t * (lipschitz_estimate(f) + 1.0) + f.grid.spacing


def hopf_lax(f, t, model=None, radius=None, tol=1e-10):
    """Evaluate ``S_t f`` at every node of ``f.grid``.

    Parameters
    ----------
    f : GridFunction
        Initial datum; off-node values come from its interpolation rule.
    t : float
        Time, ``t >= 0``; ``t == 0`` returns ``f``.
    model : LagrangianModel, optional
        Defaults to the quadratic model.
    radius : float, optional
        Search radius for ``|x - y|``; defaults to :func:`search_radius_bound`.
    tol : float
        Golden-section tolerance on ``y``.

    Raises
    ------
    SearchRadiusError
        If a minimiser lands on the boundary of the search ball.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        return f
    model = LagrangianModel.quadratic() if model is None else model
    g = f.grid
    dx = g.spacing
    r = search_radius_bound(f, t) if radius is None else float(radius)
    k = int(np.ceil(r / dx)) + 1
    pad = f.padded(k)
    ypad = dx * np.arange(-k, g.points + k) - g.half_width
    x = g.coords()

    if model.is_quadratic:
        y_idx = _envelope_argmin(pad, ypad, g.axis, t)
    else:
        y_idx = _scan_argmin(pad, k, g, t, model, r)
    y = ypad[y_idx]
    y = np.moveaxis(y, 0, -1) if g.dim > 1 else y[..., None]
    if np.any(np.linalg.norm(x - y, axis=-1) > r - dx + 1e-12):
        raise SearchRadiusError("Hopf-Lax search radius exhausted")

    def objective(yy):
        return f(yy) + t * model.L((x - yy) / t)

    best = objective(y)
    for _sweep in range(1 if g.dim == 1 else 2):
        for a in range(g.dim):
            for lo_off, hi_off in ((-dx, 0.0), (0.0, dx)):
                def along(s, a=a):
                    trial = y.copy()
                    trial[..., a] = s
                    return objective(trial)
                s, val = golden_section(along, y[..., a] + lo_off, y[..., a] + hi_off, tol=tol)
                better = val < best
                y[..., a] = np.where(better, s, y[..., a])
                best = np.where(better, val, best)
    return f.with_values(best)


def _envelope_1d(vals, y, xq, t):
    """argmin_j vals[j] + (xq - y[j])^2 / (2t) via the lower envelope of parabolas."""
    key = 2.0 * t * vals + y * y
    n = len(y)
    v = np.zeros(n, dtype=np.intp)
    z = np.empty(n + 1)
    z[0], z[1] = -np.inf, np.inf
    kk = 0
    for q in range(1, n):
        s = (key[q] - key[v[kk]]) / (2.0 * (y[q] - y[v[kk]]))
        while s <= z[kk]:
            kk -= 1
            s = (key[q] - key[v[kk]]) / (2.0 * (y[q] - y[v[kk]]))
        kk += 1
        v[kk] = q
        z[kk] = s
        z[kk + 1] = np.inf
    seg = np.searchsorted(z[1:kk + 1], xq, side="left")
    return v[seg]


def _envelope_argmin(pad, ypad, xaxis, t):
    if pad.ndim == 1:
        return _envelope_1d(pad, ypad, xaxis, t)
    # separable for the quadratic cost: transform along axis 1, then axis 0
    n_pad, m = pad.shape[0], xaxis.size
    a2 = np.empty((n_pad, m), dtype=np.intp)
    inner = np.empty((n_pad, m))
    for j1 in range(n_pad):
        idx = _envelope_1d(pad[j1], ypad, xaxis, t)
        a2[j1] = idx
        inner[j1] = pad[j1, idx] + (xaxis - ypad[idx]) ** 2 / (2.0 * t)
    a1 = np.empty((m, m), dtype=np.intp)
    for i2 in range(m):
        a1[:, i2] = _envelope_1d(inner[:, i2], ypad, xaxis, t)
    return np.stack([a1, a2[a1, np.arange(m)[None, :]]])


def _scan_argmin(pad, k, g, t, model, r):
    """Brute-force scan of node displacements, nearest first."""
    dx = g.spacing
    offsets = [o for o in np.ndindex(*([2 * k + 1] * g.dim))]
    offsets = np.array(offsets) - k
    dist = np.linalg.norm(offsets, axis=1) * dx
    keep = dist <= r + 1e-12
    offsets, dist = offsets[keep], dist[keep]
    order = np.lexsort((*offsets.T[::-1], dist))
    offsets = offsets[order]
    costs = t * model.L(offsets * dx / t)
    best = np.full(g.shape, np.inf)
    arg = np.zeros((g.dim,) + g.shape, dtype=np.intp)
    base = np.indices(g.shape) + k
    for off, c in zip(offsets, costs):
        sl = tuple(slice(k - o, k - o + g.points) for o in off)
        cand = pad[sl] + c
        better = cand < best
        best = np.where(better, cand, best)
        for a in range(g.dim):
            arg[a] = np.where(better, base[a] - off[a], arg[a])
    return arg if g.dim > 1 else arg[0]


def analytic_quadratic(grid, b, xbar, t, **kwargs):
    """Exact ``S_t`` of ``-b L(x - xbar)``: ``-(b / (1 - t b)) L(x - xbar)``."""
    if t * b >= 1:
        raise BlowUpError("blow-up time reached")
    coef = b / (1.0 - t * b)
    xbar = np.broadcast_to(np.asarray(xbar, dtype=float), (grid.dim,))
    return grid.sample(lambda x: -coef * 0.5 * np.sum((x - xbar) ** 2, axis=-1), **kwargs)


def analytic_affine(grid, p, t, **kwargs):
    """Exact ``S_t`` of ``x -> p.x``: ``p.x - t |p|^2 / 2``."""
    p = np.broadcast_to(np.asarray(p, dtype=float), (grid.dim,))
    return grid.sample(lambda x: x @ p - 0.5 * t * float(p @ p), **kwargs)
