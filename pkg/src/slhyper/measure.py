"""Reference measures, trapezoid quadrature and log-domain functionals.

All norms of exponentials are returned as logarithms: ``log ||e^u||_p``
with ``||e^u||_p = (int e^{p u} dmu)^{1/p}``. The Gaussian is the standard
one, ``(2 pi)^{-N/2} exp(-|x|^2 / 2)``, renormalised to unit mass on the
truncated box so that it stays a probability measure.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

GAUSSIAN = "gaussian"
LEBESGUE = "lebesgue"

GAUSSIAN_MASS_TOL = 1e-8


class DomainTooSmall(RuntimeError):
    pass


@dataclass(frozen=True)
class MeasureSpec:
    """Reference measure; ``rho`` is the log-Sobolev constant of the Gaussian."""

    kind: str = GAUSSIAN
    rho: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LEBESGUE):
            raise ValueError(f"unknown measure {self.kind!r}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @classmethod
    def gaussian(cls, rho=1.0):
        return cls(GAUSSIAN, rho)

    @classmethod
    def lebesgue(cls):
        return cls(LEBESGUE)

    @property
    def is_probability(self):
        return self.kind == GAUSSIAN

    def quadrature(self, grid):
        return QuadratureRule.build(grid, self)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor trapezoid rule on grid nodes, stored as log-weights.

    ``log_weights`` already include the density of the measure; ``raw_mass``
    is the quadrature mass before any renormalisation.
    """

    log_weights: np.ndarray
    raw_mass: float

    @classmethod
    def build(cls, grid, mu):
        w1 = np.full(grid.points, grid.spacing)
        w1[0] = w1[-1] = 0.5 * grid.spacing
        logw = np.log(w1)
        total = logw
        for _ in range(grid.dim - 1):
            total = np.add.outer(total, logw)
        if mu.kind == GAUSSIAN:
            r2 = np.sum(grid.coords() ** 2, axis=-1)
            total = total - 0.5 * r2 - 0.5 * grid.dim * np.log(2 * np.pi)
            log_mass = logsumexp(total)
            raw = float(np.exp(log_mass))
            if not (1 - GAUSSIAN_MASS_TOL <= raw <= 1 + 1e-12):
                raise DomainTooSmall(
                    f"Gaussian mass {raw!r} on the box is outside [1 - {GAUSSIAN_MASS_TOL}, 1]")
            total = total - log_mass
            return cls(total, raw)
        return cls(total, float(np.exp(logsumexp(total))))

    @property
    def weights(self):
        return np.exp(self.log_weights)

    def integrate(self, values):
        return float(np.sum(self.weights * values))


def _values(u):
    return np.asarray(u.values if hasattr(u, "values") else u, dtype=float)


def log_lp_norm_exp(u, p, mu, quad=None):
    """``log ||e^u||_p = (1/p) log int e^{p u} dmu`` computed by log-sum-exp."""
    if p == 0:
        raise ValueError("exponent must be nonzero")
    if quad is None:
        quad = mu.quadrature(u.grid)
    vals = _values(u)
    return float(logsumexp(p * vals + quad.log_weights) / p)


def boundary_share(u, p, mu, quad=None):
    """Fraction of ``int e^{p u} dmu`` carried by the boundary nodes."""
    if quad is None:
        quad = mu.quadrature(u.grid)
    terms = p * _values(u) + quad.log_weights
    edge = np.zeros(terms.shape, dtype=bool)
    for a in range(terms.ndim):
        idx = [slice(None)] * terms.ndim
        idx[a] = [0, -1]
        edge[tuple(idx)] = True
    return float(np.exp(logsumexp(terms[edge]) - logsumexp(terms)))


def domain_ok(u, p, mu, quad=None, tol=1e-12):
    """True when the truncated box captures the integrand to relative ``tol``."""
    return boundary_share(u, p, mu, quad) < tol


def entropy(usq, mu, quad=None):
    """``int g log g dmu - (int g dmu) log(int g dmu)`` for ``g = usq >= 0``."""
    if mu.kind != GAUSSIAN:
        raise ValueError("entropy is defined against the probability measure")
    if quad is None:
        quad = mu.quadrature(usq.grid)
    g = _values(usq)
    if np.any(g < -1e-12):
        raise ValueError("nonnegative data required")
    g = np.clip(g, 0.0, None)
    w = quad.weights
    glogg = np.where(g > 0, g * np.log(np.where(g > 0, g, 1.0)), 0.0)
    mass = float(np.sum(w * g))
    tail = mass * np.log(mass) if mass > 0 else 0.0
    return float(np.sum(w * glogg)) - tail


def gradient_sq(u):
    """``|Du|^2`` by centred differences, one-sided at the boundary."""
    vals = _values(u)
    grads = np.gradient(vals, u.grid.spacing)
    if u.grid.dim == 1:
        grads = [grads]
    return sum(gr * gr for gr in grads)


def lsi_residual(u, mu, quad=None):
    """``(2 / rho) int |Du|^2 dmu - Ent(u^2)``; the log-Sobolev inequality says >= 0."""
    if mu.kind != GAUSSIAN:
        raise ValueError("the log-Sobolev residual needs the Gaussian measure")
    if quad is None:
        quad = mu.quadrature(u.grid)
    energy = quad.integrate(gradient_sq(u))
    usq = u.with_values(_values(u) ** 2)
    return 2.0 / mu.rho * energy - entropy(usq, mu, quad)
