"""Scalar functions sampled on a uniform box grid in one or two dimensions."""

import csv
from dataclasses import dataclass, field

import numpy as np

LINEAR_EXTRAPOLATE = "linear"
CLAMP_TO_EDGE = "clamp"
EXTENSIONS = (LINEAR_EXTRAPOLATE, CLAMP_TO_EDGE)

MULTILINEAR = "linear"
CUBIC = "cubic"
INTERPOLATIONS = (MULTILINEAR, CUBIC)


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-R, R]^N`` with ``m`` nodes per axis."""

    dim: int
    half_width: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if self.points < 2:
            raise ValueError("need at least two points per axis")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @classmethod
    def with_spacing(cls, dim, half_width, spacing):
        """Grid whose spacing is the largest value not exceeding ``spacing``."""
        m = int(np.ceil(2 * half_width / spacing - 1e-9)) + 1
        return cls(dim, half_width, m)

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def axis(self):
        ax = np.linspace(-self.half_width, self.half_width, self.points)
        ax[0], ax[-1] = -self.half_width, self.half_width
        return ax

    @property
    def shape(self):
        return (self.points,) * self.dim

    def coords(self):
        """Node coordinates, shape ``shape + (dim,)``."""
        return np.stack(np.meshgrid(*([self.axis] * self.dim), indexing="ij"), axis=-1)

    def sample(self, func, **kwargs):
        """GridFunction with values ``func(x)``; ``x`` has shape ``(..., dim)``."""
        return GridFunction(self, np.asarray(func(self.coords()), dtype=float), **kwargs)

    def refined(self, factor):
        return Grid(self.dim, self.half_width, factor * (self.points - 1) + 1)

    def interior(self, margin):
        """Mask of nodes at distance at least ``margin`` from the boundary."""
        ok = np.abs(self.axis) <= self.half_width - margin + 1e-12 * self.half_width
        mask = ok
        for _ in range(self.dim - 1):
            mask = np.logical_and.outer(mask, ok)
        return mask


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on a :class:`Grid` plus evaluation rules off the nodes.

    ``interp`` selects multilinear (monotone in the data) or tensor-product
    four-point cubic interpolation (exact on quadratics). Outside the box the
    ``extension`` policy applies: linear extrapolation from the outermost
    cell, or clamping the point to the box.
    """

    grid: Grid
    values: np.ndarray
    extension: str = LINEAR_EXTRAPOLATE
    interp: str = MULTILINEAR
    _pad_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        if self.extension not in EXTENSIONS:
            raise ValueError(f"unknown extension {self.extension!r}")
        if self.interp not in INTERPOLATIONS:
            raise ValueError(f"unknown interpolation {self.interp!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, x):
        return interpolate(self, x)

    def with_values(self, values):
        return GridFunction(self.grid, values, self.extension, self.interp)

    def with_interp(self, interp):
        return GridFunction(self.grid, self.values, self.extension, interp)

    def __add__(self, c):
        if isinstance(c, GridFunction):
            return self.with_values(self.values + c.values)
        return self.with_values(self.values + c)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - other)

    def __neg__(self):
        return self.with_values(-self.values)

    def padded(self, k):
        """Nodal values extended by ``k`` nodes per side using the extension policy."""
        if k not in self._pad_cache:
            g = self.grid
            ax = g.spacing * np.arange(-k, g.points + k) - g.half_width
            pts = np.stack(np.meshgrid(*([ax] * g.dim), indexing="ij"), axis=-1)
            vals = np.array(interpolate(self, pts))
            sl = (slice(k, k + g.points),) * g.dim
            vals[sl] = self.values
            self._pad_cache[k] = vals
        return self._pad_cache[k]


def interpolate(gf, x):
    """Evaluate ``gf`` at points ``x`` of shape ``(..., N)``.

    A scalar ``x`` is accepted in one dimension. Nodal values are returned
    exactly.
    """
    g = gf.grid
    x = np.asarray(x, dtype=float)
    if g.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != g.dim:
        raise ValueError(f"points must have trailing dimension {g.dim}")
    if gf.extension == CLAMP_TO_EDGE:
        x = np.clip(x, -g.half_width, g.half_width)
    s = (x + g.half_width) / g.spacing
    if gf.interp == MULTILINEAR:
        out = _multilinear(gf.values, s)
    else:
        inside = np.all((s >= 0) & (s <= g.points - 1), axis=-1)
        out = _multilinear(gf.values, s)
        if np.any(inside):
            out[inside] = _cubic(gf.values, s[inside])
    return out if out.ndim else float(out)


def _multilinear(values, s):
    m = values.shape[0]
    dim = values.ndim
    idx = np.clip(np.floor(s), 0, m - 2).astype(np.intp)
    w = s - idx  # unclamped: weights outside [0, 1] extrapolate linearly
    out = np.zeros(s.shape[:-1])
    for corner in range(2 ** dim):
        bits = [(corner >> a) & 1 for a in range(dim)]
        weight = np.ones(s.shape[:-1])
        index = []
        for a, bit in enumerate(bits):
            weight = weight * (w[..., a] if bit else 1.0 - w[..., a])
            index.append(idx[..., a] + bit)
        out = out + weight * values[tuple(index)]
    return out


def _cubic_weights(t):
    # Lagrange basis on local nodes 0, 1, 2, 3 evaluated at t
    return np.stack([
        -(t - 1) * (t - 2) * (t - 3) / 6,
        t * (t - 2) * (t - 3) / 2,
        -t * (t - 1) * (t - 3) / 2,
        t * (t - 1) * (t - 2) / 6,
    ], axis=-1)


def _cubic(values, s):
    m = values.shape[0]
    dim = values.ndim
    if m < 4:
        return _multilinear(values, s)
    cell = np.clip(np.floor(s), 0, m - 2).astype(np.intp)
    start = np.clip(cell - 1, 0, m - 4)
    t = s - start
    weights = [_cubic_weights(t[..., a]) for a in range(dim)]
    out = np.zeros(s.shape[:-1])
    for offs in np.ndindex(*([4] * dim)):
        weight = np.ones(s.shape[:-1])
        index = []
        for a, o in enumerate(offs):
            weight = weight * weights[a][..., o]
            index.append(start[..., a] + o)
        out = out + weight * values[tuple(index)]
    return out


def lipschitz_estimate(gf):
    """Largest absolute first difference quotient over all axes."""
    h = gf.grid.spacing
    return max(float(np.max(np.abs(np.diff(gf.values, axis=a)))) / h
               for a in range(gf.grid.dim))


def semiconcavity_estimate(gf):
    """Positive part of the largest second difference quotient over all axes."""
    g = gf.grid
    if g.points < 3:
        raise ValueError("semiconcavity estimate needs at least three points per axis")
    worst = 0.0
    for a in range(g.dim):
        d2 = np.diff(gf.values, n=2, axis=a) / g.spacing ** 2
        worst = max(worst, float(np.max(d2)))
    return worst


def write_csv(gf, path):
    """Write ``x[,y],value`` rows in row-major node order."""
    coords = gf.grid.coords().reshape(-1, gf.grid.dim)
    header = ["x", "y"][: gf.grid.dim] + ["value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for c, v in zip(coords, gf.values.reshape(-1)):
            w.writerow([repr(float(ci)) for ci in c] + [repr(float(v))])


def read_csv(path, **kwargs):
    """Inverse of :func:`write_csv`. The grid is reconstructed from the node set."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    dim = len(header) - 1
    if header[-1] != "value" or dim not in (1, 2):
        raise ValueError(f"unrecognised grid function header {header}")
    axis = np.unique(body[:, 0])
    grid = Grid(dim, float(axis[-1]), len(axis))
    if body.shape[0] != grid.points ** dim:
        raise ValueError("node count does not match a square grid")
    return GridFunction(grid, body[:, -1].reshape(grid.shape), **kwargs)
