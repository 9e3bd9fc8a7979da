import math

import numpy as np
import pytest

from riemann_examples import Lambda, Normalization
from riemann_examples.curve import CurvePoint, principal_w
from riemann_examples.weierstrass import immerse_grid


def curve_samples(lam: Lambda, n: int, seed: int = 0, *, both_sheets: bool = True):
    """Random curve points clear of the branch set, the real axis, and the
    unit circle (so transformed partners stay routable at lam = 1)."""
    rng = np.random.default_rng(seed)
    lv = lam.value
    out = []
    while len(out) < n:
        z = math.exp(rng.uniform(-1.6, 1.6)) * np.exp(1j * rng.uniform(-2.9, 2.9))
        if min(abs(z - b) for b in (0.0, lv, -1.0 / lv)) < 0.05:
            continue
        if abs(z.imag) < 0.02 or abs(abs(z) - 1.0) < 0.03:
            continue
        w = principal_w(z, lam)
        if both_sheets and rng.random() < 0.5:
            w = -w
        out.append(CurvePoint(z, w, lam))
    return out


@pytest.fixture(scope="session")
def grids_lambda1():
    lam = Lambda(1.0)
    norm = Normalization.paper(lam)
    return [immerse_grid(lam, norm, r_min=0.1, r_max=10.0, n_rad=24, n_ang=48,
                         sheet_sign=s, closed=True) for s in (+1, -1)]
