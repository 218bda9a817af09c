import math

import numpy as np
import pytest

from solitonforge.immersion import Chart


@pytest.fixture
def unit_circle():
    return Chart(1, 1, ((0.0, 2 * math.pi),), lambda u: np.array([np.exp(1j * u[0])]),
                 name="circle")


def sphere_chart(n, radius=1.0):
    """Round sphere of the given radius in R^n viewed inside C^n."""
    margin = 0.35
    dom = [(margin, math.pi - margin)] * (n - 2) + [(margin, 2 * math.pi - margin)]

    def mapping(u):
        out = np.ones(n)
        for i, th in enumerate(u):
            out[i] *= math.cos(th)
            out[i + 1:] *= math.sin(th)
        return radius * out.astype(complex)

    return Chart(n - 1, n, tuple(dom), mapping, name=f"sphere_{n}")
