"""Generic dual solver: locate gamma = (alpha, beta) in the dual plane.

The optimum of the disclosure problem has the clamped form

    delta_i = max(0, min(inv_f'_i(abar_i * alpha + w_i * beta), 1))

for multipliers (alpha, beta) of the PMF constraint (sum abar_i delta_i
= 0) and the money constraint (sum w_i delta_i = mu). Both constraint
residuals are monotone in their own multiplier (each is a partial
derivative of a convex function of gamma), so the solver runs a nested
bracketing scheme: the inner level finds alpha*(beta) zeroing the PMF
residual, the outer level moves beta until the money residual vanishes
along beta -> r2(alpha*(beta), beta). Brackets are grown geometrically
until the residual signs straddle; scipy's brentq does the actual root
refinement with a plain-bisection fallback if its answer misses the
residual tolerances. For SED the inner residual is piecewise linear in
alpha, so that root is computed exactly from the sorted breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, NoConvergence, OfferOutOfRange
from .model import Instance, apparent_profile, mu_max
from .privacy import get_kind, gradient_endpoints

ZERO = "ZERO"
INTERIOR = "INTERIOR"
ONE = "ONE"

#: absolute tolerance on the PMF residual; money residual is relative to max(1, mu)
RESIDUAL_TOL = 1e-10
#: iteration cap per bisection level
MAX_BISECT = 200


class DualPoint(NamedTuple):
    alpha: float
    beta: float


@dataclass(frozen=True)
class Solution:
    delta: np.ndarray
    t: np.ndarray
    risk: float
    gamma: DualPoint
    activity: tuple[str, ...]
    mu: float
    method: str
    residuals: tuple[float, float]


def clamp_strategy(kind, instance: Instance, gamma) -> tuple[np.ndarray, tuple[str, ...]]:
    """Clamped inverse-derivative strategy plus per-component activity tags.

    Ties at the slab boundaries classify as ZERO/ONE (the slab tests use
    weak inequalities).
    """
    k = get_kind(kind)
    alpha, beta = gamma
    y = instance.abar * alpha + instance.w * beta
    f0, f1 = gradient_endpoints(k, instance)
    delta = np.clip(k.inv_deriv(instance, y), 0.0, 1.0)
    delta = np.where(y <= f0, 0.0, delta)
    delta = np.where(y >= f1, 1.0, delta)
    activity = tuple(
        ZERO if yi <= lo else ONE if yi >= hi else INTERIOR
        for yi, lo, hi in zip(y, f0, f1)
    )
    return delta, activity


def residual(kind, instance: Instance, gamma, mu: float) -> tuple[float, float]:
    """(sum abar_i delta_i, sum w_i delta_i - mu) at the clamped strategy."""
    delta, _ = clamp_strategy(kind, instance, gamma)
    return (
        float(instance.abar @ delta),
        float(instance.w @ delta - mu),
    )


def _check_offer(mu: float, total: float) -> float:
    tol = 1e-12 * max(1.0, total)
    if mu < -tol or mu > total + tol:
        raise OfferOutOfRange(
            f"offer {mu} outside [0, {total}]; the trade-off is undefined there"
        )
    return min(max(mu, 0.0), total)


class _DualProblem:
    """Per-solve context: precomputed arrays and the two residual maps."""

    def __init__(self, kind, instance: Instance, mu: float):
        self.kind = get_kind(kind)
        self.inst = instance
        self.mu = mu
        self.abar = instance.abar
        self.w = instance.w
        self.f0, self.f1 = gradient_endpoints(self.kind, instance)
        scale = min(np.min(np.abs(self.abar)), np.min(self.w))
        self.b0 = float(np.max(np.abs(self.f1) + np.abs(self.f0)) / scale)
        self.is_sed = self.kind.tag == "sed"
        self._alpha_prev: float | None = None
        # scalar copies: the residual maps run ~1e4 times per solve on
        # arrays of length <= 8, where numpy dispatch costs more than the
        # arithmetic; a float loop is several times faster
        self._a = [float(x) for x in self.abar]
        self._w = [float(x) for x in self.w]
        self._lo = [float(x) for x in self.f0]
        self._hi = [float(x) for x in self.f1]
        p = [float(x) for x in instance.p]
        tag = self.kind.tag
        if tag == "kl":

            def dinv(i: int, y: float) -> float:
                ai = self._a[i]
                return p[i] / ai * math.expm1(y / ai - 1.0)

        elif tag == "isd":

            def dinv(i: int, y: float) -> float:
                ai = self._a[i]
                t = ai / (ai / p[i] - y)
                return (t - p[i]) / ai

        else:

            def dinv(i: int, y: float) -> float:
                ai = self._a[i]
                return y / (2.0 * ai * ai)

        # inside the open band (f'(0), f'(1)) the inverse lies in (0, 1),
        # so no overflow or pole handling is needed on this path
        self._dinv = dinv

    def delta_at(self, alpha: float, beta: float) -> np.ndarray:
        y = self.abar * alpha + self.w * beta
        d = np.clip(self.kind.inv_deriv(self.inst, y), 0.0, 1.0)
        d = np.where(y <= self.f0, 0.0, d)
        return np.where(y >= self.f1, 1.0, d)

    def _delta_i(self, i: int, alpha: float, beta: float) -> float:
        y = self._a[i] * alpha + self._w[i] * beta
        if y <= self._lo[i]:
            return 0.0
        if y >= self._hi[i]:
            return 1.0
        d = self._dinv(i, y)
        return 0.0 if d < 0.0 else 1.0 if d > 1.0 else d

    def r1(self, alpha: float, beta: float) -> float:
        return sum(
            self._a[i] * self._delta_i(i, alpha, beta) for i in range(len(self._a))
        )

    def r2(self, alpha: float, beta: float) -> float:
        return (
            sum(self._w[i] * self._delta_i(i, alpha, beta) for i in range(len(self._a)))
            - self.mu
        )

    # --- inner level: alpha*(beta) ------------------------------------------
    def alpha_star(self, beta: float) -> float:
        if self.is_sed:
            return self._alpha_star_sed(beta)
        f = lambda a: self.r1(a, beta)
        try:
            if self._alpha_prev is None:
                lo, hi = _grow_bracket(f, self.b0)
            else:
                lo, hi = _grow_bracket(f, self.b0 * 1e-3, center=self._alpha_prev)
        except _NonMonotone as nm:
            return _golden_min_abs(f, nm.lo, nm.hi)
        a = brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        if abs(f(a)) > RESIDUAL_TOL:
            a = _bisect(f, lo, hi, RESIDUAL_TOL)
        self._alpha_prev = a
        return a

    def _alpha_star_sed(self, beta: float) -> float:
        # r1 is piecewise linear in alpha: every interior component adds
        # slope 1/2, so the root is exact linear interpolation between the
        # two breakpoints where the residual changes sign.
        a, w = self.abar, self.w
        lo_bp = -w * beta / a  # alpha where component i leaves delta=0
        hi_bp = (2.0 * a * a - w * beta) / a  # where it reaches delta=1
        bps = np.sort(np.concatenate([lo_bp, hi_bp]))
        vals = a @ np.clip(
            (np.outer(a, bps) + (w * beta)[:, None]) / (2.0 * a * a)[:, None], 0.0, 1.0
        )
        k = int(np.argmax(vals >= 0.0))
        if k == 0:
            return float(bps[0])
        v0, v1 = vals[k - 1], vals[k]
        if v1 <= v0:  # flat zero plateau: any point works
            return float(bps[k])
        return float(bps[k - 1] - v0 * (bps[k] - bps[k - 1]) / (v1 - v0))

    def g(self, beta: float) -> float:
        return self.r2(self.alpha_star(beta), beta)


def _grow_bracket(f, b0: float, center: float = 0.0, max_grow: int = 60):
    """Expand [center-h, center+h] by x4 until f straddles zero (f nondecreasing)."""
    h = b0
    for _ in range(max_grow):
        lo, hi = center - h, center + h
        flo, fhi = f(lo), f(hi)
        if flo <= 0.0 <= fhi:
            return lo, hi
        if flo > fhi + 1e-9:  # monotonicity violated: caller falls back
            raise _NonMonotone(lo, hi)
        h *= 4.0
    raise NoConvergence(f"no sign change within bracket half-width {h}")


class _NonMonotone(Exception):
    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    best, fbest = lo, abs(flo)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) < fbest:
            best, fbest = mid, abs(fmid)
        if abs(fmid) <= tol or hi - lo < 1e-16 * max(1.0, abs(mid)):
            return mid if abs(fmid) <= fbest else best
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return best


def _golden_min_abs(f, lo: float, hi: float, iters: int = 200) -> float:
    """|f| minimizer; defensive fallback if outer monotonicity ever fails."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = abs(f(c)), abs(f(d))
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = abs(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = abs(f(d))
    return c if fc <= fd else d


def _endpoint_gamma(kind, instance: Instance, at_max: bool) -> DualPoint:
    """A feasible (not unique) dual pair for mu = 0 or mu = mu_max."""
    f0, f1 = gradient_endpoints(kind, instance)
    if at_max:
        return DualPoint(0.0, float(np.max(f1 / instance.w)))
    # mu = 0: all three implemented kinds share a lower-hyperplane origin
    if get_kind(kind).tag == "kl":
        return DualPoint(1.0, 0.0)
    return DualPoint(0.0, 0.0)


def solve(kind, instance: Instance, mu: float, beta_hint: float | None = None) -> Solution:
    """Solve the disclosure problem for one offer via the dual scheme.

    ``beta_hint`` warm-starts the outer bracket (used by curve sweeps).
    """
    if np.any(np.abs(instance.abar) < 1e-12):
        raise InputError(
            "instance has zero-difference categories; validate in lenient "
            "mode and preprocess with absorb_zero_difference",
            code="ZERO_DIFFERENCE",
        )
    total = mu_max(instance)
    mu = _check_offer(mu, total)

    if mu == 0.0 or mu == total:
        at_max = mu == total and total > 0
        gamma = _endpoint_gamma(kind, instance, at_max)
        return _finish(kind, instance, gamma, mu, "dual-endpoint")

    prob = _DualProblem(kind, instance, mu)
    tol2 = RESIDUAL_TOL * max(1.0, mu)
    try:
        if beta_hint is None:
            lo, hi = _grow_bracket(prob.g, prob.b0)
        else:
            lo, hi = _grow_bracket(prob.g, max(prob.b0 * 1e-3, 1e-6), center=beta_hint)
        beta = brentq(prob.g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        if abs(prob.g(beta)) > tol2:
            beta = _bisect(prob.g, lo, hi, tol2)
    except _NonMonotone as nm:
        beta = _golden_min_abs(prob.g, nm.lo, nm.hi)

    alpha = prob.alpha_star(beta)
    sol = _finish(kind, instance, DualPoint(alpha, beta), mu, "dual-bisection")
    r1, r2 = sol.residuals
    if abs(r1) > RESIDUAL_TOL or abs(r2) > tol2:
        raise NoConvergence(
            f"residuals ({r1:.3e}, {r2:.3e}) above tolerance at mu={mu}",
            residuals=(r1, r2),
        )
    return sol


def _finish(kind, instance: Instance, gamma: DualPoint, mu: float, method: str) -> Solution:
    delta, activity = clamp_strategy(kind, instance, gamma)
    t = apparent_profile(instance, delta)
    k = get_kind(kind)
    return Solution(
        delta=delta,
        t=t,
        risk=k.risk(t, instance.p),
        gamma=gamma,
        activity=activity,
        mu=mu,
        method=method,
        residuals=(
            float(instance.abar @ delta),
            float(instance.w @ delta - mu),
        ),
    )


def kkt_check(kind, instance: Instance, solution: Solution, tol: float = 1e-8) -> dict:
    """Verify the three exclusive per-component optimality cases plus
    primal feasibility. Returns a report dict; never raises."""
    k = get_kind(kind)
    alpha, beta = solution.gamma
    y = instance.abar * alpha + instance.w * beta
    f0, f1 = gradient_endpoints(k, instance)
    fd = k.deriv(instance, solution.delta)

    comps = []
    worst = 0.0
    for i, (di, tag) in enumerate(zip(solution.delta, solution.activity)):
        if tag == ZERO:
            res = max(abs(di), y[i] - f0[i])
        elif tag == ONE:
            res = max(abs(di - 1.0), f1[i] - y[i])
        else:
            res = abs(fd[i] - y[i])
        res = max(res, 0.0)
        worst = max(worst, res)
        comps.append({"index": i, "activity": tag, "residual": res})

    r1, r2 = solution.residuals
    primal_ok = abs(r1) <= tol and abs(r2) <= tol * max(1.0, solution.mu)
    ok = primal_ok and worst <= tol
    return {
        "pass": bool(ok),
        "primal": (r1, r2),
        "worst_dual_residual": float(worst),
        "components": comps,
    }
