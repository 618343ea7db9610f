"""Closed-form solvers for small and structured instances.

Three families of exact solutions avoid the iterative dual search: two
categories (any privacy kind), three categories under squared-Euclidean
risk with its money thresholds, and the prefix-zero/suffix-one activity
cells of a conical-regular slab layout (squared Euclidean, any size).
Regime solvers return ``None`` when the offer falls outside their regime
so the dispatcher can fall back to the dual solver.

Threshold-table cells carry both the raw threshold formula value and an
exact validated offer interval.  The formula presumes the optimal path
actually crosses the cell; on instances where it does not (the formula's
j=1 column degenerates to 0 and inverted intervals appear for j ≥ 2),
only the validated interval decides whether the cell solver may claim an
offer.  A claimed cell is optimal by KKT sufficiency, so agreement with
the dual solver is guaranteed rather than hoped for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import def2_order, is_conical_regular
from .model import Instance, apparent_profile, mu_max
from .privacy import get_kind
from .solver import INTERIOR, ONE, ZERO, DualPoint, Solution, _check_offer

__all__ = [
    "SlopeStats",
    "ConicalCell",
    "ThresholdTable",
    "slope_stats",
    "solve_n2",
    "money_threshold_n3",
    "solve_n3_sed",
    "conical_thresholds",
    "solve_conical_sed",
    "threshold_table",
]

# Slack for the cell-validation inequalities: purely defensive, the bounds
# are computed in the same arithmetic the cell solver uses.
_CELL_TOL = 1e-12

_EMPTY = (math.inf, -math.inf)


@dataclass(frozen=True)
class SlopeStats:
    """Money-per-disclosure slopes m_i = w_i/ā_i with exclusion statistics.

    ``order`` maps descending-slope rank to original category index (the
    sorting the n=3 closed form is stated in).  The exclusion index ``j``
    is a 1-based rank; any value outside 1..n means "exclude nothing",
    which is how the j=2 case's out-of-range subindex 2j=4 is treated.
    """

    m: np.ndarray
    order: tuple[int, ...]

    @property
    def sorted_m(self) -> np.ndarray:
        return self.m[list(self.order)]

    def _kept(self, j: int) -> np.ndarray:
        ms = self.sorted_m
        if 1 <= j <= len(ms):
            return np.delete(ms, j - 1)
        return ms

    def mean_excluding(self, j: int) -> float:
        return float(np.mean(self._kept(j)))

    def var_excluding(self, j: int) -> float:
        kept = self._kept(j)
        return float(np.mean((kept - np.mean(kept)) ** 2))

    def v(self, i: int, j: int) -> float:
        """Relative coefficient of variation of slope rank i, excluding rank j."""
        return (float(self.sorted_m[i - 1]) - self.mean_excluding(j)) / self.var_excluding(j)


def slope_stats(instance: Instance) -> SlopeStats:
    if np.any(instance.abar == 0.0):
        raise InputError(
            "slope undefined where the profiles agree; absorb those categories first",
            code="ZERO_DIFFERENCE",
        )
    m = instance.w / instance.abar
    order = tuple(int(i) for i in np.argsort(-m, kind="stable"))
    return SlopeStats(m=m, order=order)


def _tagged(delta: np.ndarray) -> tuple[str, ...]:
    return tuple(ZERO if d == 0.0 else ONE if d == 1.0 else INTERIOR for d in delta)


def _assemble(
    instance: Instance, delta: np.ndarray, gamma: DualPoint, mu: float, method: str, risk: float | None = None, kind="sed"
) -> Solution:
    t = apparent_profile(instance, delta)
    k = get_kind(kind)
    return Solution(
        delta=delta,
        t=t,
        risk=k.risk(t, instance.p) if risk is None else risk,
        gamma=gamma,
        activity=_tagged(delta),
        mu=mu,
        method=method,
        residuals=(float(instance.abar @ delta), float(instance.w @ delta - mu)),
    )


def solve_n2(kind, instance: Instance, mu: float) -> Solution:
    """Two categories disclose uniformly: δ = (μ/μ_max)·1 for any kind."""
    if instance.n != 2:
        raise InputError(f"two-category solver got n={instance.n}", code="WRONG_ARITY")
    total = mu_max(instance)
    mu = _check_offer(mu, total)
    k = get_kind(kind)
    x = mu / total
    delta = np.full(2, x)
    a1 = float(instance.abar[0])
    if k.tag == "sed":
        risk = 2.0 * (a1 * x) ** 2
    elif k.tag == "kl":
        # sum (abar*x + p) * log(abar*x/p + 1), stable at x = 0
        risk = float(np.sum((instance.abar * x + instance.p) * np.log1p(instance.abar * x / instance.p)))
    else:
        risk = None
    # duals from interior stationarity; the 2x2 system is never singular
    # because abar_2 = -abar_1 and w > 0.
    y = k.deriv(instance, delta)
    a, w = instance.abar, instance.w
    det = a[0] * w[1] - a[1] * w[0]
    gamma = DualPoint(
        alpha=float((y[0] * w[1] - y[1] * w[0]) / det),
        beta=float((a[0] * y[1] - a[1] * y[0]) / det),
    )
    return _assemble(instance, delta, gamma, mu, "closed-n2", risk=risk, kind=kind)


def _n3_stats(instance: Instance) -> SlopeStats:
    if instance.n != 3:
        raise InputError(f"three-category solver got n={instance.n}", code="WRONG_ARITY")
    stats = slope_stats(instance)
    ms = stats.sorted_m
    if ms[0] == ms[1] or ms[1] == ms[2]:
        raise InputError(
            "equal slopes: the three-category closed form requires a strict ordering",
            code="DEGENERATE",
        )
    return stats


def money_threshold_n3(instance: Instance, j: int) -> float:
    """Offer level where the j-active-regime of the n=3 closed form ends."""
    if j not in (1, 2):
        raise InputError(f"threshold index j={j}; the closed form defines j in {{1, 2}}", code="INVALID_INPUT")
    stats = _n3_stats(instance)
    excl = 2 * j
    var = stats.var_excluding(excl)
    if var == 0.0:
        raise InputError("zero slope variance over the active pair", code="DEGENERATE")
    mbar = stats.mean_excluding(excl)
    a_sorted = instance.abar[list(stats.order)]
    candidates = []
    for i in range(1, 4):
        if i == excl:
            continue
        den = float(stats.sorted_m[i - 1]) - mbar
        if den == 0.0:
            raise InputError(f"slope rank {i} equals the excluded mean", code="DEGENERATE")
        candidates.append((j + 1) * float(a_sorted[i - 1]) * var / den)
    return min(candidates)


def solve_n3_sed(instance: Instance, mu: float, kind="sed") -> Solution | None:
    """Closed-form two/three-active solution for n=3 squared-Euclidean risk.

    Returns ``None`` past the money threshold (the regime boundary), or when
    the computed strategy leaves the box — the threshold formulas are
    evaluated literally, so outside their slope-ordering premises they can
    be meaningless and the caller must fall back to the dual solver.
    """
    k = get_kind(kind)
    if k.tag != "sed":
        raise InputError(f"closed form holds for squared-Euclidean risk only, got {k.tag}", code="WRONG_KIND")
    stats = _n3_stats(instance)
    mu = _check_offer(mu, mu_max(instance))
    a_sorted = instance.abar[list(stats.order)]
    w_sorted = instance.w[list(stats.order)]
    ms = stats.sorted_m
    two_active = (w_sorted[1] <= a_sorted[1] * stats.mean_excluding(2)) and ms[0] > ms[2]
    j = 1 if two_active else 2
    if mu > money_threshold_n3(instance, j):
        return None
    excl = 2 * j
    var = stats.var_excluding(excl)
    mbar = stats.mean_excluding(excl)
    delta_sorted = np.zeros(3)
    for i in range(1, 4):
        if i != excl:
            delta_sorted[i - 1] = stats.v(i, excl) * mu / ((j + 1) * float(a_sorted[i - 1]))
    if np.any(delta_sorted < -1e-9) or np.any(delta_sorted > 1.0 + 1e-9):
        return None
    delta = np.zeros(3)
    delta[list(stats.order)] = np.clip(delta_sorted, 0.0, 1.0)
    beta = 2.0 * mu / ((j + 1) * var)
    gamma = DualPoint(alpha=-mbar * beta, beta=beta)
    risk = mu**2 / ((j + 1) * var)
    return _assemble(instance, delta, gamma, mu, "closed-n3", risk=risk)


@dataclass(frozen=True)
class ConicalCell:
    """One (k, j) activity cell: prefix zeros, suffix ones, affine middle.

    Index sets are original category indices.  ``mu_formula`` is the raw
    threshold formula value (None where it degenerates); [mu_lo, mu_hi] is
    the validated offer interval, empty (lo > hi) when the optimal path
    never crosses the cell.
    """

    k: int
    j: int
    zeros: tuple[int, ...]
    ones: tuple[int, ...]
    interior: tuple[int, ...]
    mu_formula: float | None
    mu_lo: float
    mu_hi: float

    @property
    def covered(self) -> bool:
        return self.mu_lo < self.mu_hi


@dataclass(frozen=True)
class ThresholdTable:
    """Money thresholds: the n=3 pair plus the conical-layout cell map."""

    n3: tuple[float | None, float | None] | None
    conical: dict[tuple[int, int], ConicalCell]


def _cell_coefficients(a, w, m, zeros, ones, interior):
    """Affine-in-μ duals and interior strategy for one cell (sorted frame).

    beta(μ) = bs·μ + bc, alpha(μ) = as·μ + ac, delta_i(μ) = ds_i·μ + dc_i.
    Requires at least two interior components (positive slope variance).
    """
    nu = len(interior)
    A1 = float(np.sum(a[ones])) if ones else 0.0
    W1 = float(np.sum(w[ones])) if ones else 0.0
    mbar = float(np.mean(m[interior]))
    var = float(np.mean((m[interior] - mbar) ** 2))
    bs = 2.0 / (nu * var)
    bc = bs * (A1 * mbar - W1)
    a_s = -mbar * bs
    ac = -mbar * bc - 2.0 * A1 / nu
    v = (m[interior] - mbar) / var
    ds = v / (a[interior] * nu)
    dc = (v * (A1 * mbar - W1) - A1) / (a[interior] * nu)
    return (bs, bc), (a_s, ac), (ds, dc), (A1, W1, mbar, var)


def _cell_interval(a, w, cell_sets, total):
    """Intersect the cell's KKT inequalities; every one is affine in μ."""
    zeros, ones, interior = cell_sets
    m = w / a
    (bs, bc), (a_s, ac), (ds, dc), _ = _cell_coefficients(a, w, m, zeros, ones, interior)
    lo, hi = 0.0, total

    def bound(slope: float, icept: float):
        # constraint slope*mu + icept >= 0
        nonlocal lo, hi
        if slope > 0.0:
            lo = max(lo, -icept / slope)
        elif slope < 0.0:
            hi = min(hi, -icept / slope)
        elif icept < -_CELL_TOL:
            lo, hi = _EMPTY

    for s, c in zip(ds, dc):
        bound(s, c)            # delta_i >= 0
        bound(-s, 1.0 - c)     # delta_i <= 1
    for i in zeros:
        ys = a[i] * a_s + w[i] * bs
        yc = a[i] * ac + w[i] * bc
        bound(-ys, -yc)        # z_i . gamma <= f'_i(0) = 0
    for i in ones:
        ys = a[i] * a_s + w[i] * bs
        yc = a[i] * ac + w[i] * bc
        bound(ys, yc - 2.0 * a[i] ** 2)   # z_i . gamma >= f'_i(1)
    return lo, hi


def _cell_formula(a, w, n, k, j):
    zeros = list(range(0, k - n - 1))
    ones = list(range(n - j + 1, n))
    interior = [i for i in range(n) if i not in zeros and i not in ones]
    if not interior:
        return None
    m = w / a
    mbar = float(np.mean(m[interior]))
    var = float(np.mean((m[interior] - mbar) ** 2))
    pivot = float(m[k - n - 2])
    if mbar == pivot:
        return None
    A1 = float(np.sum(a[ones])) if ones else 0.0
    W1 = float(np.sum(w[ones])) if ones else 0.0
    return W1 - A1 * (mbar + var / (mbar - pivot))


def conical_thresholds(instance: Instance) -> dict[tuple[int, int], ConicalCell]:
    """Full (k, j) cell table in the slope-descending frame of Definition 2.

    Works on any strictly-ordered instance; conical regularity is the cell
    *solver's* precondition, not the table's.  Cells with fewer than two
    interior components are point-measure and reported uncovered.
    """
    order = def2_order(instance)
    n = instance.n
    if n < 3:
        raise InputError(f"cell table defined for n >= 3, got n={n}", code="WRONG_ARITY")
    a = instance.abar[list(order)]
    w = instance.w[list(order)]
    total = mu_max(instance)
    table: dict[tuple[int, int], ConicalCell] = {}
    for k in range(n + 2, 2 * n + 1):
        for j in range(1, 2 * (n + 1) - k + 1):
            zeros = list(range(0, k - n - 1))
            ones = list(range(n - j + 1, n))
            interior = [i for i in range(n) if i not in zeros and i not in ones]
            if len(interior) >= 2:
                lo, hi = _cell_interval(a, w, (zeros, ones, interior), total)
            else:
                lo, hi = _EMPTY
            table[(k, j)] = ConicalCell(
                k=k,
                j=j,
                zeros=tuple(order[i] for i in zeros),
                ones=tuple(order[i] for i in ones),
                interior=tuple(order[i] for i in interior),
                mu_formula=_cell_formula(a, w, n, k, j),
                mu_lo=lo,
                mu_hi=hi,
            )
    return table


def _cell_solution(instance: Instance, cell: ConicalCell, mu: float) -> Solution:
    order = def2_order(instance)
    pos = {orig: rank for rank, orig in enumerate(order)}
    a = instance.abar[list(order)]
    w = instance.w[list(order)]
    m = w / a
    zeros = [pos[i] for i in cell.zeros]
    ones = [pos[i] for i in cell.ones]
    interior = [pos[i] for i in cell.interior]
    (bs, bc), (a_s, ac), (ds, dc), _ = _cell_coefficients(a, w, m, zeros, ones, interior)
    delta_sorted = np.zeros(instance.n)
    delta_sorted[ones] = 1.0
    delta_sorted[interior] = np.clip(ds * mu + dc, 0.0, 1.0)
    delta = np.zeros(instance.n)
    delta[list(order)] = delta_sorted
    gamma = DualPoint(alpha=a_s * mu + ac, beta=bs * mu + bc)
    return _assemble(instance, delta, gamma, mu, "closed-conical")


def solve_conical_sed(instance: Instance, mu: float) -> Solution | None:
    """Cell solution on a conical-regular layout; ``None`` when no covered
    cell claims the offer (the dual solver handles those offers exactly)."""
    report = is_conical_regular("sed", instance)
    if not report.conical:
        worst = max((max(r) for r in report.residuals.values()), default=math.nan)
        raise InputError(
            f"layout is not conical regular (worst consistency residual {worst:.2e})",
            code="NOT_CONICAL",
        )
    total = mu_max(instance)
    mu = _check_offer(mu, total)
    for cell in conical_thresholds(instance).values():
        if cell.covered and cell.mu_lo < mu <= cell.mu_hi + _CELL_TOL * max(1.0, total):
            return _cell_solution(instance, cell, mu)
    return None


def threshold_table(instance: Instance) -> ThresholdTable:
    """Everything the thresholds endpoint reports: n=3 pair + cell map."""
    n3 = None
    if instance.n == 3:
        pair = []
        for j in (1, 2):
            try:
                pair.append(money_threshold_n3(instance, j))
            except InputError:
                pair.append(None)
        n3 = (pair[0], pair[1])
    conical: dict[tuple[int, int], ConicalCell] = {}
    if instance.n >= 3:
        try:
            conical = conical_thresholds(instance)
        except InputError:
            conical = {}
    return ThresholdTable(n3=n3, conical=conical)
