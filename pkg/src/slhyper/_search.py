"""Vectorised one-dimensional minimisation helpers."""

import numpy as np

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fun, lo, hi, tol=1e-10, max_iter=200):
    """Minimise ``fun`` independently on each bracket ``[lo, hi]``.

    ``lo`` and ``hi`` are arrays of equal shape; ``fun`` must accept an array
    of that shape and return objective values elementwise. The search stops
    once every bracket is narrower than ``tol``.

    Returns
    -------
    xmin, fmin : ndarray
        Best abscissa found per bracket (endpoints included) and its value.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = fun(c)
    fd = fun(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc < fd
        # left: keep [a, d]; else keep [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INVPHI * (b - a)
        new_d = a + INVPHI * (b - a)
        x_new = np.where(left, new_c, new_d)
        f_new = fun(x_new)
        c, fc, d, fd = (
            np.where(left, x_new, d),
            np.where(left, f_new, fd),
            np.where(left, c, x_new),
            np.where(left, fc, f_new),
        )
    lo = np.broadcast_to(np.asarray(lo, dtype=float), a.shape)
    hi = np.broadcast_to(np.asarray(hi, dtype=float), a.shape)
    xm = 0.5 * (a + b)
    # endpoints are legitimate candidates too (kinks sit at cell edges)
    xs = np.stack([xm, c, d, lo, hi])
    fs = np.stack([fun(xm), fc, fd, fun(lo), fun(hi)])
    k = np.argmin(fs, axis=0)[None]
    return (np.take_along_axis(xs, k, axis=0)[0],
            np.take_along_axis(fs, k, axis=0)[0])
