"""Hamiltonian / Lagrangian pairs linked by the Legendre transform.

Two kinds of model are supported:

* ``quadratic``: ``H(p) = |p|^2 / 2`` and ``L(q) = |q|^2 / 2``, evaluated in
  closed form. Every hypercontractivity and error experiment uses this one.
* ``general``: a user supplied convex, superlinear ``H``; ``L`` is obtained by
  maximising ``p.q - H(p)`` over a box of half-width ``search_radius``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._search import golden_section

QUADRATIC = "quadratic"
GENERAL = "general"


class ConjugateSearchError(ValueError):
    """Raised when the conjugate maximiser sits on the search boundary."""


@dataclass(frozen=True)
class LagrangianModel:
    """A convex-conjugate pair ``(H, L)``.

    Parameters
    ----------
    kind : {"quadratic", "general"}
    hamiltonian : callable, optional
        Required for ``general``. Takes an array ``p`` of shape ``(..., N)``
        and returns ``H(p)`` of shape ``(...)``.
    search_radius : float
        Half-width of the box searched for the conjugate maximiser.
    tol : float
        Absolute tolerance of the golden-section refinement.
    coarse_points : int
        Points per axis of the coarse scan preceding refinement.
    """

    kind: str = QUADRATIC
    hamiltonian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    search_radius: float = 10.0
    tol: float = 1e-10
    coarse_points: int = 401

    def __post_init__(self):
        if self.kind not in (QUADRATIC, GENERAL):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == GENERAL and self.hamiltonian is None:
            raise ValueError("a general model needs a Hamiltonian")
        if self.search_radius <= 0 or self.tol <= 0:
            raise ValueError("search_radius and tol must be positive")

    @classmethod
    def quadratic(cls):
        return cls(QUADRATIC)

    @classmethod
    def general(cls, hamiltonian, search_radius=10.0, tol=1e-10,
                coarse_points=401):
        return cls(GENERAL, hamiltonian, search_radius, tol, coarse_points)

    @property
    def is_quadratic(self):
        return self.kind == QUADRATIC

    def H(self, p):
        p = _as_points(p)
        if self.is_quadratic:
            return 0.5 * np.sum(p * p, axis=-1)
        return np.asarray(self.hamiltonian(p), dtype=float)

    def L(self, q):
        q = _as_points(q)
        if self.is_quadratic:
            return 0.5 * np.sum(q * q, axis=-1)
        return _numerical_conjugate(self, q)


def _as_points(x):
    x = np.asarray(x, dtype=float)
    return x[..., None] if x.ndim == 0 else x


def _coarse_axis_points(model, dim):
    if dim == 1:
        return model.coarse_points
    return max(41, int(np.sqrt(model.coarse_points) * 8) | 1)


def _numerical_conjugate(model, q):
    """sup_p {p.q - H(p)} for an array of points ``q`` of shape (..., N)."""
    shape, dim = q.shape[:-1], q.shape[-1]
    flat = q.reshape(-1, dim)
    chunk = max(1, 4_000_000 // _coarse_axis_points(model, dim) ** dim)
    out = np.empty(flat.shape[0])
    for start in range(0, flat.shape[0], chunk):
        out[start:start + chunk] = _conjugate_block(model, flat[start:start + chunk])
    return out.reshape(shape)


def _conjugate_block(model, q):
    r = model.search_radius
    dim = q.shape[1]
    m = _coarse_axis_points(model, dim)
    axis = np.linspace(-r, r, m)
    step = axis[1] - axis[0]
    mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    hvals = np.asarray(model.hamiltonian(mesh), dtype=float)
    scores = q @ mesh.T - hvals[None, :]
    best = np.argmax(scores, axis=1)
    p = mesh[best].copy()
    if np.any(np.abs(p) >= r - 0.5 * step):
        raise ConjugateSearchError("conjugate search radius exhausted")

    def objective(p_full):
        return model.hamiltonian(p_full) - np.sum(p_full * q, axis=-1)

    # per-axis golden refinement, two sweeps for the coupled case
    for _ in range(1 if dim == 1 else 3):
        for ax in range(dim):
            def along(s, ax=ax):
                trial = p.copy()
                trial[:, ax] = s
                return objective(trial)
            s, _ = golden_section(along, p[:, ax] - step, p[:, ax] + step, tol=model.tol)
            p[:, ax] = s
    return -objective(p)


def legendre(model, q):
    """Legendre transform ``L(q) = sup_p {p.q - H(p)}``.

    Exact for the quadratic model. For a general model the maximiser is
    located by a coarse scan of the search box followed by golden-section
    refinement per axis; :class:`ConjugateSearchError` is raised when the
    coarse maximiser touches the box boundary.
    """
    q_arr = np.asarray(q, dtype=float)
    value = model.L(q_arr)
    return float(value) if np.ndim(value) == 0 else value


def hamiltonian_eval(model, p):
    """Evaluate ``H(p)``; ``p`` may be a single point or an array of points."""
    value = model.H(np.asarray(p, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def conjugate_model(model, search_radius=None, tol=None):
    """A general model whose Hamiltonian is ``model``'s Lagrangian.

    Conjugating it again reproduces ``model``'s Hamiltonian, which gives a
    round-trip check of the numerical transform.
    """
    return LagrangianModel.general(
        model.L,
        search_radius=model.search_radius if search_radius is None else search_radius,
        tol=model.tol if tol is None else tol,
        coarse_points=model.coarse_points,
    )
