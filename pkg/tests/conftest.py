"""Shared fixtures: worked examples, random samplers, conical factory.

EX1 is the three-category seller profile all pinned anchor values refer
to; EX2 is the two-category case with closed-form risks for every kind;
EX3 is built so the two-active regime of the n=3 closed form holds with
the zero category sitting first in the slope ordering, which makes its
threshold table have a genuinely covered cell.

``conical_instance`` constructs conically-regular layouts for squared
distance by chaining slab normals: the ``i``-th lower hyperplane must
pass through the vertex where slabs ``i-1`` and ``1`` peel off together,
which fixes each normal's direction, and the companion consistency
condition fixes its scale. Two seed degrees of freedom remain
(z1 normalized to (1,1), z2 free); requiring the difference vector to
sum to zero then pins z2's first coordinate to isolated roots, found by
bisection inside frozen brackets. Scale moves at the end (power-of-two
on the differences, rate normalization) preserve consistency exactly.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from privshare.model import Instance, validate_instance

EX1 = {
    "q": [0.620, 0.270, 0.110],
    "p": [0.259, 0.414, 0.327],
    "w": [0.404, 0.044, 0.552],
}
EX2 = {"q": [0.7, 0.3], "p": [0.4, 0.6], "w": [2.0, 1.0]}
EX3 = {
    "q": [0.35, 0.50, 0.15],
    "p": [0.30, 0.20, 0.50],
    "w": [0.5, 0.3, 1.4],
}


@pytest.fixture(scope="session")
def ex1() -> Instance:
    return validate_instance(EX1)


@pytest.fixture(scope="session")
def ex2() -> Instance:
    return validate_instance(EX2)


@pytest.fixture(scope="session")
def ex3() -> Instance:
    return validate_instance(EX3)


def random_strict_instance(rng: np.random.Generator, n: int, min_gap: float = 1e-3) -> Instance:
    """Sample a strict instance with well-separated profiles.

    Resamples until every |q_i - p_i| >= min_gap so that downstream slope
    statistics stay well-conditioned across the whole seeded suite.
    """
    for _ in range(1000):
        q = rng.dirichlet(np.ones(n))
        p = rng.dirichlet(np.ones(n))
        if np.min(np.abs(q - p)) < min_gap:
            continue
        if np.min(q) < 1e-3 or np.min(p) < 1e-3:
            continue
        w = rng.uniform(0.1, 2.0, size=n)
        return validate_instance({"q": q, "p": p, "w": w})
    raise AssertionError("sampler failed to produce a strict instance")


# --- conical-regular factory (squared-distance layouts) ---------------------


def _solve2(z1, b1, z2, b2):
    det = z1[0] * z2[1] - z1[1] * z2[0]
    return np.array(
        [(b1 * z2[1] - z1[1] * b2) / det, (z1[0] * b2 - b1 * z2[0]) / det]
    )


def _chain(a2: float, w2: float, n: int):
    """Slab normals z_i = (abar_i, w_i) of a conical layout, or None.

    Seeded by z1 = (1, 1) and z2 = (a2, w2); each later normal's direction
    is perpendicular to the running vertex on hyperplane 1, and its scale
    comes from requiring the previous slab's exit vertex to sit on lower
    hyperplane 1.
    """
    z = [np.array([1.0, 1.0]), np.array([a2, w2])]
    P = _solve2(z[0], 2 * z[0][0] ** 2, z[1], 2 * z[1][0] ** 2)
    for _ in range(n - 2):
        if abs(P[0]) < 1e-12:
            return None
        d = np.array([-P[1], P[0]]) * np.sign(P[0])  # keep the rate component positive
        d /= math.hypot(*d)
        zprev = z[-1]
        u = _solve2(d, 2 * d[0] ** 2, zprev, 0.0)
        v = _solve2(d, 0.0, zprev, 2 * zprev[0] ** 2)
        den = z[0] @ u
        if abs(den) < 1e-15:
            return None
        s = -(z[0] @ v) / den
        if s <= 1e-9:
            return None
        z.append(s * d)
        P = _solve2(z[-1], 2 * z[-1][0] ** 2, z[0], 2 * z[0][0] ** 2)
    zz = np.array(z)
    return zz[:, 0], zz[:, 1]


def _abar_sum(a2: float, w2: float, n: int):
    out = _chain(a2, w2, n)
    return None if out is None else float(out[0].sum())


def conical_instance(n: int, bracket: tuple[float, float], w2: float) -> Instance:
    """Deterministic conical-regular instance from a frozen root bracket."""
    lo, hi = bracket
    flo, fhi = _abar_sum(lo, w2, n), _abar_sum(hi, w2, n)
    assert flo is not None and fhi is not None and flo * fhi < 0, (n, bracket, w2)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _abar_sum(mid, w2, n)
        assert fm is not None
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    abar, w = _chain(0.5 * (lo + hi), w2, n)
    assert abs(abar.sum()) < 1e-10
    # power-of-two rescale keeps the difference vector exact in binary
    abar = abar * 2.0 ** math.floor(math.log2(0.2 / np.max(np.abs(abar))))
    p = 1.0 / n - abar / 2.0
    return validate_instance({"q": p + abar, "p": p, "w": w / w.sum()})


#: ten layouts across the realizable root families for n = 4 and 5
CONICAL_SPECS = (
    (4, (-0.46, -0.44), 0.7),
    (4, (-0.46, -0.44), 1.3),
    (4, (-0.46, -0.44), 2.0),
    (4, (0.58, 0.61), 1.0),
    (4, (0.58, 0.61), 2.5),
    (5, (-0.36, -0.35), 0.7),
    (5, (-0.36, -0.35), 1.5),
    (5, (0.365, 0.375), 0.7),
    (5, (0.365, 0.375), 1.5),
    (5, (0.615, 0.63), 1.5),
)


@pytest.fixture(scope="session")
def conical_instances() -> tuple[Instance, ...]:
    return tuple(conical_instance(n, br, w2) for n, br, w2 in CONICAL_SPECS)
