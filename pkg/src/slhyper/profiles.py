"""Named initial data, selectable by a short string such as ``quad:b=0.5``.

The set is closed on purpose so that every experiment can be reproduced
from its configuration alone:

=============  =====================================  ==================
name           formula                                parameters
=============  =====================================  ==================
``const``      ``c``                                  ``c`` (default 0)
``affine``     ``p . x``                              ``p`` (default 1)
``quad``       ``-b |x - xbar|^2 / 2``                ``b`` (0.5), ``xbar`` (0)
``abs``        ``|x|``
``negabs``     ``-|x|``
``sqrt1px2``   ``-sqrt(1 + |x|^2)``
``tanh``       ``-tanh(x_1)``
=============  =====================================  ==================
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np


def _norm(x):
    return np.sqrt(np.sum(x * x, axis=-1))


_FORMULAS = {
    "const": (lambda x, c: np.full(x.shape[:-1], c), {"c": 0.0}),
    "affine": (lambda x, p: p * np.sum(x, axis=-1), {"p": 1.0}),
    "quad": (lambda x, b, xbar: -0.5 * b * np.sum((x - xbar) ** 2, axis=-1),
             {"b": 0.5, "xbar": 0.0}),
    "abs": (lambda x: _norm(x), {}),
    "negabs": (lambda x: -_norm(x), {}),
    "sqrt1px2": (lambda x: -np.sqrt(1.0 + np.sum(x * x, axis=-1)), {}),
    "tanh": (lambda x: -np.tanh(x[..., 0]), {}),
}

NAMES = tuple(_FORMULAS)


@dataclass(frozen=True)
class Profile:
    """A named initial datum; call it on points of shape ``(..., N)``."""

    name: str
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in _FORMULAS:
            raise ValueError(f"unknown profile {self.name!r}; choose from {', '.join(NAMES)}")
        defaults = _FORMULAS[self.name][1]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"profile {self.name!r} takes no parameter {sorted(unknown)[0]!r}")
        object.__setattr__(self, "params", {**defaults, **self.params})

    def __call__(self, x):
        func = _FORMULAS[self.name][0]
        return np.asarray(func(np.asarray(x, dtype=float), **self.params), dtype=float)

    def sample(self, grid, **kwargs):
        return grid.sample(self, **kwargs)

    @property
    def label(self):
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{args}"


def parse_profile(text):
    """Parse ``name[:k=v[,k=v]]``; a bare value binds to the first parameter.

    >>> parse_profile("quad:b=1").params["b"]
    1.0
    >>> parse_profile("const:2").params["c"]
    2.0
    """
    name, _, rest = text.strip().partition(":")
    if name not in _FORMULAS:
        raise ValueError(f"unknown profile {name!r}; choose from {', '.join(NAMES)}")
    order = list(_FORMULAS[name][1])
    params = {}
    for i, item in enumerate(p for p in rest.split(",") if p.strip()):
        key, eq, val = item.partition("=")
        if not eq:
            if i >= len(order):
                raise ValueError(f"too many values for profile {name!r}")
            key, val = order[i], key
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"bad value {val!r} in profile {text!r}") from None
    return Profile(name, params)
