import numpy as np
import pytest

from slhyper.gridfn import Grid
from slhyper.profiles import NAMES, Profile, parse_profile


@pytest.mark.parametrize("text, x, expected", [
    ("const:c=2", 5.0, 2.0),
    ("const:2", 5.0, 2.0),
    ("affine:p=3", 2.0, 6.0),
    ("quad:b=0.5", 2.0, -1.0),
    ("quad:b=1,xbar=1", 3.0, -2.0),
    ("abs", -2.0, 2.0),
    ("negabs", -2.0, -2.0),
    ("sqrt1px2", 0.0, -1.0),
    ("tanh", 0.5, -np.tanh(0.5)),
])
def test_values(text, x, expected):
    assert parse_profile(text)(np.array([x])) == pytest.approx(expected)


def test_defaults():
    assert parse_profile("quad").params == {"b": 0.5, "xbar": 0.0}


@pytest.mark.parametrize("text", ["cube", "quad:c=1", "quad:b=x", "abs:1"])
def test_rejects(text):
    with pytest.raises(ValueError):
        parse_profile(text)


def test_sample_two_dimensional():
    gf = Profile("sqrt1px2").sample(Grid(2, 1.0, 3))
    assert gf.values[1, 1] == -1.0
    assert gf.values[0, 0] == pytest.approx(-np.sqrt(3.0))


def test_label_round_trip():
    for name in NAMES:
        p = Profile(name)
        assert parse_profile(p.label) == p
