"""Dual-plane geometry.

Each category i contributes a slab {gamma : f'_i(0) <= z_i . gamma <=
f'_i(1)} with normal z_i = (abar_i, w_i). This module models that
arrangement: the common point of the lower boundaries, pairwise vertex
computation, detection of the "conical regular" layout in which all
vertices except one collapse onto lower boundaries, and the polar
parameterization of that layout (angle thresholds plus upper-boundary
crossing radii) together with the region classifiers built on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import Instance
from .privacy import get_kind, gradient_endpoints
from .solver import INTERIOR, ONE, ZERO, clamp_strategy

#: residual ceiling for the rank-2 consistency test and layout invariants
CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class Slab:
    index: int
    z: tuple[float, float]
    lower: float
    upper: float


@dataclass(frozen=True)
class ConicalReport:
    conical: bool
    order: tuple[int, ...]            # original indices, steepest normal first
    residuals: dict[int, tuple[float, float]]
    violating: tuple[int, ...]


def slabs(kind, instance: Instance) -> list[Slab]:
    f0, f1 = gradient_endpoints(get_kind(kind), instance)
    return [
        Slab(i, (float(instance.abar[i]), float(instance.w[i])), float(f0[i]), float(f1[i]))
        for i in range(instance.n)
    ]


def vertex(kind, instance: Instance, i: int, j: int, a: int, b: int) -> np.ndarray:
    """Intersection of boundary ``a`` of slab i with boundary ``b`` of slab j."""
    if i == j:
        raise InputError("vertex needs two distinct slab indices", code="INVALID_INPUT")
    if a not in (0, 1) or b not in (0, 1):
        raise InputError("boundary selectors must be 0 (lower) or 1 (upper)",
                         code="INVALID_INPUT")
    k = get_kind(kind)
    f0, f1 = gradient_endpoints(k, instance)
    ai, wi = instance.abar[i], instance.w[i]
    aj, wj = instance.abar[j], instance.w[j]
    det = ai * wj - aj * wi
    if det == 0.0:
        raise InputError(f"slabs {i} and {j} are parallel", code="PARALLEL")
    bi = f1[i] if a else f0[i]
    bj = f1[j] if b else f0[j]
    return np.array([(bi * wj - wi * bj) / det, (ai * bj - bi * aj) / det])


def origin(kind, instance: Instance) -> np.ndarray | None:
    """Common point of all lower slab boundaries, or None.

    The boundaries are concurrent exactly when abar_i f'_j(0) = abar_j
    f'_i(0) for every pair; for the three built-in kinds this holds
    bit-exactly, so the test is performed without tolerance.
    """
    k = get_kind(kind)
    f0, _ = gradient_endpoints(k, instance)
    a = instance.abar
    n = instance.n
    for i in range(n):
        for j in range(i + 1, n):
            if a[i] * f0[j] != a[j] * f0[i]:
                return None
    for j in range(1, n):
        if a[0] * instance.w[j] != a[j] * instance.w[0]:
            return vertex(k, instance, 0, j, 0, 0)
    # all normals parallel cannot happen: abar sums to zero with mixed signs
    raise InputError("all slabs parallel", code="DEGENERATE")


def def2_order(instance: Instance) -> tuple[int, ...]:
    """Original indices sorted by descending abar_i/w_i (steepest slab first)."""
    a, w = instance.abar, instance.w
    order = sorted(range(instance.n), key=lambda i: a[i] / w[i], reverse=True)
    for s, t in zip(order, order[1:]):
        if a[s] * w[t] == a[t] * w[s]:
            raise InputError(
                f"categories {s} and {t} have equal rate/difference slopes",
                code="TIED_SLOPES",
            )
    return tuple(order)


def is_conical_regular(kind, instance: Instance) -> ConicalReport:
    """Test the layout of Definition-style regularity: for every slab i >= 3
    (in steepness order) the triples (lower_i, upper_{i-1}, upper_1) and
    (upper_i, upper_{i-1}, lower_1) must each be concurrent."""
    if instance.n < 3:
        raise InputError("conical layout needs at least 3 categories", code="WRONG_ARITY")
    k = get_kind(kind)
    order = def2_order(instance)
    a = instance.abar[list(order)]
    w = instance.w[list(order)]
    f0, f1 = (v[list(order)] for v in gradient_endpoints(k, instance))

    residuals: dict[int, tuple[float, float]] = {}
    violating: list[int] = []
    for i in range(2, instance.n):       # slab i+1 in 1-based steepness order
        rows = np.array([[a[i], w[i]], [a[i - 1], w[i - 1]], [a[0], w[0]]])
        rhs_lo = np.array([f0[i], f1[i - 1], f1[0]])
        rhs_hi = np.array([f1[i], f1[i - 1], f0[0]])
        res = []
        for rhs in (rhs_lo, rhs_hi):
            sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
            res.append(float(np.linalg.norm(rows @ sol - rhs) / max(1.0, np.linalg.norm(rhs))))
        residuals[i] = (res[0], res[1])
        if max(res) > CONSISTENCY_TOL:
            violating.append(i)
    return ConicalReport(not violating, order, residuals, tuple(violating))


class PolarFrame:
    """Polar view of a conical layout, centred on the lower-boundary point.

    Angle thresholds: phi_k for k=1..n are the lower-boundary line angles
    (ascending), phi_{n+1} points at the one off-boundary vertex, and
    phi_{k} = phi_{k-n-1} + pi continues antipodally up to 2n+1. Slots are
    1-based; phi[0] is unused.
    """

    def __init__(self, kind, instance: Instance):
        k = get_kind(kind)
        report = is_conical_regular(k, instance)
        if not report.conical:
            raise InputError(
                f"slab layout is not conical regular (violations at {report.violating})",
                code="NOT_CONICAL",
            )
        o = origin(k, instance)
        if o is None:
            raise InputError("lower boundaries are not concurrent", code="NOT_CONICAL")
        self.order = report.order
        self.origin = o
        idx = list(report.order)
        self._a = instance.abar[idx]
        self._w = instance.w[idx]
        f0, f1 = gradient_endpoints(k, instance)
        self._f1 = f1[idx]
        self._span = self._f1 - f0[idx]   # f'(1) - f'(0) > 0
        n = instance.n
        self.n = n

        phi = np.full(2 * n + 2, np.nan)
        phi[1:n + 1] = np.arctan(-self._a / self._w)
        ref = vertex(k, instance, report.order[0], report.order[-1], 1, 1) - o
        raw = math.atan2(ref[1], ref[0])
        while raw <= phi[n]:
            raw += math.pi
        phi[n + 1] = raw
        if not phi[n + 1] < phi[1] + math.pi:
            raise InputError("reference vertex angle outside its cone", code="NOT_CONICAL")
        phi[n + 2:] = phi[1:n + 1] + math.pi
        self.phi = phi

    def r_upper(self, j: int, angle: float) -> float:
        """Radius at which the ray crosses upper boundary j (1-based,
        steepness order); +inf when the boundary lies behind the ray."""
        den = self._a[j - 1] * math.cos(angle) + self._w[j - 1] * math.sin(angle)
        if den <= 0.0:
            return math.inf
        return self._span[j - 1] / den

    def to_polar(self, gamma) -> tuple[float, float]:
        d = np.asarray(gamma, dtype=float) - self.origin
        r = float(np.hypot(d[0], d[1]))
        angle = math.atan2(d[1], d[0])
        while angle < self.phi[1]:
            angle += 2.0 * math.pi
        while angle >= self.phi[1] + 2.0 * math.pi:
            angle -= 2.0 * math.pi
        return r, angle

    def sector_of(self, angle: float) -> int:
        """Cone index k in 1..2n, or 0 for the all-zero wedge."""
        phi, n = self.phi, self.n
        if angle <= phi[1] or angle >= phi[2 * n + 1]:
            return 0
        for k in range(1, n + 1):
            if phi[k] < angle <= phi[k + 1]:
                return k
        if phi[n + 1] < angle < phi[n + 2]:
            return n + 1
        for k in range(n + 2, 2 * n + 1):
            if phi[k] <= angle < phi[k + 1]:
                return k
        raise AssertionError("angle normalization left a gap")

    def _crossing_sequence(self, k: int) -> list[int]:
        n = self.n
        if k <= n:
            return [1] if k == 1 else ([1, 2] if k == 2 else list(range(2, k)) + [1, k])
        if k == n + 1:
            return list(range(2, n + 1)) + [1]
        return list(range(n, k - n - 1, -1))

    def classify(self, gamma) -> tuple[str, ...]:
        """Component activity from the polar cases, in original order."""
        n = self.n
        r, angle = self.to_polar(gamma)
        labels = [ZERO] * n
        k = 0 if r == 0.0 else self.sector_of(angle)
        if k > 0:
            seq = self._crossing_sequence(k)
            ones = {t for t in seq if self.r_upper(t, angle) <= r}
            zeros = set(range(k + 1, n + 1)) if k <= n else set(range(1, k - n))
            for pos in range(1, n + 1):
                labels[pos - 1] = ONE if pos in ones else ZERO if pos in zeros else INTERIOR
        out = [""] * n
        for pos, lab in enumerate(labels):
            out[self.order[pos]] = lab
        return tuple(out)


def polar_thresholds(kind, instance: Instance) -> PolarFrame:
    return PolarFrame(kind, instance)


def classify_region(kind, instance: Instance, gamma) -> tuple[str, ...]:
    """Per-component {ZERO, INTERIOR, ONE} from the slab tests."""
    _, activity = clamp_strategy(kind, instance, gamma)
    return activity


@dataclass(frozen=True)
class LayoutReport:
    origin: np.ndarray | None
    conical: bool
    detail: ConicalReport | None
    vertices: dict[tuple[int, int, int, int], np.ndarray]
    polar: PolarFrame | None


def layout_report(kind, instance: Instance) -> LayoutReport:
    k = get_kind(kind)
    o = origin(k, instance)
    detail = None
    frame = None
    conical = False
    if instance.n >= 3:
        try:
            detail = is_conical_regular(k, instance)
        except InputError:
            detail = None
        if detail is not None and detail.conical:
            conical = True
            try:
                frame = PolarFrame(k, instance)
            except InputError:
                conical, frame = False, None
    verts: dict[tuple[int, int, int, int], np.ndarray] = {}
    for i in range(instance.n):
        for j in range(i + 1, instance.n):
            for a in (0, 1):
                for b in (0, 1):
                    try:
                        verts[(i, j, a, b)] = vertex(k, instance, i, j, a, b)
                    except InputError:
                        continue
    return LayoutReport(o, conical, detail, verts, frame)
