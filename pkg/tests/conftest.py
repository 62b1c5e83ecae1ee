import cmath
import math

import pytest

from pvi_critical.elliptic import picard_closed_form
from pvi_critical.special import CoveringPoint

SQRT2 = math.sqrt(2)


def cp(r, arg=0.0):
    return CoveringPoint(r, arg)


def rational(a):
    """The mu = 1 rational solution y = a x / (1 - (1 - a) x) and its derivatives."""
    y = lambda x: a * x / (1 - (1 - a) * x)
    dy = lambda x: a / (1 - (1 - a) * x) ** 2
    d2y = lambda x: 2 * a * (1 - a) / (1 - (1 - a) * x) ** 3
    return y, dy, d2y


def picard(nu1=1.0, nu2=0.5):
    return lambda x: picard_closed_form(x, nu1, nu2)


@pytest.fixture
def picard_fn():
    return picard()


def generic_sample(rng, min_gap=0.05):
    """Random case-I data (sigma, a, mu), kept away from sigma = +-2mu + 2m."""
    while True:
        s = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.8, 0.8))
        a = rng.uniform(0.1, 10) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        mu = complex(rng.uniform(-1.5, 1.5), rng.uniform(-0.3, 0.3))
        if abs(mu) < 0.05:
            continue
        gap = min(abs((s - sg * 2 * mu) / 2 - round(((s - sg * 2 * mu) / 2).real)) for sg in (1, -1))
        if gap * 2 > min_gap:
            return s, a, mu
