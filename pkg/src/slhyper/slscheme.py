"""Semi-Lagrangian discrete semigroup for ``u_t + H(Du) = 0``.

One step is ``u_{n+1}(x) = inf_q { u_n(x - h q) + h L(q) }`` and ``Q_n`` is its
n-fold composition. The minimisation scans velocities whose displacements
``h q`` land on grid nodes, then refines each axis by golden section over
the two cells adjacent to the best node.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._search import golden_section
from .gridfn import Grid, lipschitz_estimate, semiconcavity_estimate
from .lagrangian import LagrangianModel


class VelocitySearchError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    """Step size and velocity-search settings.

    ``q_radius=None`` means ``Lip(f) + 1`` computed once from the initial
    datum and kept for every step.
    """

    h: float
    q_radius: Optional[float] = None
    q_refine_tol: float = 1e-10
    grid: Optional[Grid] = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("time step h must be positive")
        if self.q_radius is not None and not self.q_radius > 0:
            raise ValueError("q_radius must be positive")
        if not self.q_refine_tol > 0:
            raise ValueError("q_refine_tol must be positive")

    def resolved(self, f):
        if self.grid is not None and self.grid != f.grid:
            raise ValueError("grid function does not live on the configured grid")
        if self.q_radius is not None:
            return self
        return SchemeConfig(self.h, lipschitz_estimate(f) + 1.0, self.q_refine_tol, f.grid)


def _velocity_offsets(dim, kmax):
    rng = np.arange(-kmax, kmax + 1)
    offs = np.stack(np.meshgrid(*([rng] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    norm = np.linalg.norm(offs, axis=1)
    offs, norm = offs[norm <= kmax], norm[norm <= kmax]
    # nearest first so that ties resolve to the smallest |q|
    order = np.lexsort((*offs.T[::-1], norm))
    return offs[order], norm[order]


def sl_step(u, cfg, model=None):
    """One step ``inf_q { u(x - h q) + h L(q) }`` at every node of ``u``.

    Raises
    ------
    VelocitySearchError
        If the best grid-aligned velocity lies in the outermost shell of the
        search ball, i.e. ``q_radius`` is too small for the data.
    """
    model = LagrangianModel.quadratic() if model is None else model
    cfg = cfg.resolved(u)
    g = u.grid
    h, dx = cfg.h, g.spacing
    kmax = max(1, int(np.ceil(h * cfg.q_radius / dx)))
    pad = u.padded(kmax)
    offs, norms = _velocity_offsets(g.dim, kmax)
    costs = h * model.L(offs * dx / h)

    best = np.full(g.shape, np.inf)
    arg = np.zeros(g.shape + (g.dim,), dtype=np.intp)
    for off, cost in zip(offs, costs):
        sl = tuple(slice(kmax - o, kmax - o + g.points) for o in off)
        cand = pad[sl] + cost
        better = cand < best
        best = np.where(better, cand, best)
        arg[better] = off
    if np.any(np.linalg.norm(arg, axis=-1) > kmax - 1 + 1e-9):
        raise VelocitySearchError("q search radius exhausted")

    x = g.coords()
    q = arg * (dx / h)
    dq = dx / h

    def objective(qq):
        return u(x - h * qq) + h * model.L(qq)

    for _sweep in range(1 if g.dim == 1 else 2):
        for a in range(g.dim):
            for lo_off, hi_off in ((-dq, 0.0), (0.0, dq)):
                def along(s, a=a):
                    trial = q.copy()
                    trial[..., a] = s
                    return objective(trial)
                s, val = golden_section(along, q[..., a] + lo_off, q[..., a] + hi_off,
                                        tol=cfg.q_refine_tol)
                better = val < best
                q[..., a] = np.where(better, s, q[..., a])
                best = np.where(better, val, best)
    return u.with_values(best)


def evolve(f, n, cfg, model=None):
    """``Q_n f``: ``n`` semi-Lagrangian steps; ``n == 0`` returns ``f``."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    cfg = cfg.resolved(f)
    u = f
    for _ in range(n):
        u = sl_step(u, cfg, model)
    return u


def trajectory(f, n, cfg, model=None):
    """``[Q_0 f, Q_1 f, ..., Q_n f]``."""
    cfg = cfg.resolved(f)
    out = [f]
    for _ in range(n):
        out.append(sl_step(out[-1], cfg, model))
    return out


def interior_margin(n, cfg):
    """Distance from the boundary beyond which ``n`` steps are unaffected by the extension."""
    return n * cfg.h * cfg.q_radius


@dataclass
class StructuralReport:
    """Per-step structural diagnostics of ``Q_k f`` for ``k = 0..n``.

    ``sup_norm``, ``lipschitz`` and ``semiconcavity`` are measured on the
    interior node set; ``increment[k]`` is ``max |Q_{k+1} f - Q_k f|`` there.
    ``lipschitz_datum`` is the estimate for ``f`` on the whole grid.
    """

    h: float
    sup_bound_rate: float
    lipschitz_datum: float
    sup_norm: List[float] = field(default_factory=list)
    lipschitz: List[float] = field(default_factory=list)
    increment: List[float] = field(default_factory=list)
    semiconcavity: List[float] = field(default_factory=list)

    @property
    def increment_constant(self):
        """Smallest ``C`` with ``max |Q_{k+1} f - Q_k f| <= C h`` over the run."""
        return max(self.increment) / self.h if self.increment else 0.0

    def sup_growth_ok(self, tol=0.0):
        s = self.sup_norm
        return all(s[k + 1] <= s[k] + self.h * self.sup_bound_rate + tol
                   for k in range(len(s) - 1))

    def lipschitz_ok(self, tol=0.0):
        return all(v <= self.lipschitz_datum + tol for v in self.lipschitz)

    def semiconcavity_ok(self, tol=0.0):
        c = self.semiconcavity
        return all(c[k + 1] <= c[k] + tol for k in range(len(c) - 1))


def property_report(f, n, cfg, model=None):
    """Track sup-norm, Lipschitz, increment and semiconcavity along ``Q_k f``."""
    if n < 1:
        raise ValueError("need at least one step")
    model = LagrangianModel.quadratic() if model is None else model
    cfg = cfg.resolved(f)
    traj = trajectory(f, n, cfg, model)
    mask = f.grid.interior(interior_margin(n, cfg))
    l0 = float(model.L(np.zeros(f.grid.dim)))
    h0 = float(model.H(np.zeros(f.grid.dim)))
    rep = StructuralReport(h=cfg.h, sup_bound_rate=max(-h0, l0),
                           lipschitz_datum=lipschitz_estimate(f))
    for k, u in enumerate(traj):
        sub = _restrict(u, mask)
        rep.sup_norm.append(float(np.max(np.abs(u.values[mask]))))
        rep.lipschitz.append(lipschitz_estimate(sub))
        rep.semiconcavity.append(semiconcavity_estimate(sub))
        if k > 0:
            rep.increment.append(float(np.max(np.abs(u.values - traj[k - 1].values)[mask])))
    return rep


def _restrict(u, mask):
    """The sub-grid function on the interior box selected by ``mask``."""
    g = u.grid
    idx = np.nonzero(mask.reshape(g.shape) if g.dim == 1 else mask[:, g.points // 2])[0]
    lo, hi = idx[0], idx[-1] + 1
    sub = Grid(g.dim, float(g.axis[hi - 1]), hi - lo)
    vals = u.values[(slice(lo, hi),) * g.dim]
    return u.__class__(sub, vals, u.extension, u.interp)
