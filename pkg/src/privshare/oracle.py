"""Brute-force verifier, deliberately free of any KKT machinery.

Solves the primal problem directly on small instances so the dual
solver's outputs can be certified against an independent computation:

* n=2 — the feasible set is a single point, evaluated directly;
* n=3 — the feasible set is a segment; scanned on a grid, then refined
  with golden-section search around the best sample;
* n>=4 — projected descent from 16 random feasible starts: gradient
  step, exact projection onto the two-constraint affine set, box clamp,
  and re-projection, with backtracking step halving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InputError
from .model import Instance, apparent_profile, mu_max
from .privacy import get_kind
from .solver import Solution, kkt_check

FEAS_TOL = 1e-8


@dataclass(frozen=True)
class OracleResult:
    delta_best: np.ndarray
    risk_best: float
    method: str
    resolution: int


def _objective_rows(kind, inst: Instance, deltas: np.ndarray) -> np.ndarray:
    """Vectorized objective over rows of ``deltas``; +inf outside the domain."""
    k = get_kind(kind)
    with np.errstate(all="ignore"):
        vals = k.value(inst, deltas)
        out = vals.sum(axis=-1)
    t = inst.p + inst.abar * deltas
    bad = np.any(t <= 0, axis=-1) | ~np.isfinite(out)
    if np.any(bad):
        out = np.where(bad, np.inf, out)
    return out


def brute_force(kind, instance: Instance, mu: float, resolution: int = 100_000) -> OracleResult:
    total = mu_max(instance)
    if mu < -1e-12 or mu > total * (1 + 1e-12) + 1e-12:
        raise InputError(f"offer {mu} outside [0, {total}]", code="INFEASIBLE")
    mu = min(max(mu, 0.0), total)
    n = instance.n

    if mu == 0.0:
        d = np.zeros(n)
        return OracleResult(d, get_kind(kind).risk(instance.p, instance.p), "exact-point", 1)
    if mu == total:
        d = np.ones(n)
        return OracleResult(d, get_kind(kind).risk(instance.q, instance.p), "exact-point", 1)

    if n == 2:
        d = np.full(2, mu / total)
        t = apparent_profile(instance, d)
        return OracleResult(d, get_kind(kind).risk(t, instance.p), "exact-point", 1)
    if n == 3:
        return _segment_scan(kind, instance, mu, resolution)
    return _projected_descent(kind, instance, mu, resolution)


def _segment_scan(kind, inst: Instance, mu: float, resolution: int) -> OracleResult:
    # pivot pair with the largest 2x2 determinant for numeric stability
    a, w = inst.abar, inst.w
    pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
    i, j, c = max(pairs, key=lambda t: abs(a[t[0]] * w[t[1]] - a[t[1]] * w[t[0]]))
    det = a[i] * w[j] - a[j] * w[i]

    # solve the equalities for (delta_i, delta_j) affine in s = delta_c:
    #   a_i d_i + a_j d_j = -a_c s,  w_i d_i + w_j d_j = mu - w_c s
    def endpoint(s):
        rhs1, rhs2 = -a[c] * s, mu - w[c] * s
        di = (rhs1 * w[j] - rhs2 * a[j]) / det
        dj = (a[i] * rhs2 - w[i] * rhs1) / det
        return di, dj

    # clip the s interval so all three coordinates stay in the box
    lo, hi = 0.0, 1.0
    d0_i, d0_j = endpoint(0.0)
    d1_i, d1_j = endpoint(1.0)
    for v0, v1 in ((d0_i, d1_i), (d0_j, d1_j)):
        slope = v1 - v0
        if abs(slope) < 1e-15:
            if not -FEAS_TOL <= v0 <= 1 + FEAS_TOL:
                lo, hi = 1.0, 0.0
                break
            continue
        s_at_0 = -v0 / slope
        s_at_1 = (1.0 - v0) / slope
        s_lo, s_hi = min(s_at_0, s_at_1), max(s_at_0, s_at_1)
        lo, hi = max(lo, s_lo), min(hi, s_hi)
    if lo > hi + 1e-12:
        raise InputError("empty feasible segment after clamping", code="INFEASIBLE")
    lo, hi = max(lo, 0.0), min(hi, 1.0)

    def delta_of(svals: np.ndarray) -> np.ndarray:
        rhs1 = -a[c] * svals
        rhs2 = mu - w[c] * svals
        out = np.empty((len(svals), 3))
        out[:, i] = (rhs1 * w[j] - rhs2 * a[j]) / det
        out[:, j] = (a[i] * rhs2 - w[i] * rhs1) / det
        out[:, c] = svals
        return out

    svals = np.linspace(lo, hi, resolution)
    objs = _objective_rows(kind, inst, np.clip(delta_of(svals), 0.0, 1.0))
    kbest = int(np.argmin(objs))

    # golden-section refinement on the bracketing neighbours
    gl = svals[max(kbest - 1, 0)]
    gh = svals[min(kbest + 1, resolution - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    aa, bb = gl, gh
    for _ in range(80):
        c1 = bb - invphi * (bb - aa)
        c2 = aa + invphi * (bb - aa)
        f1, f2 = _objective_rows(kind, inst, np.clip(delta_of(np.array([c1, c2])), 0.0, 1.0))
        if f1 < f2:
            bb = c2
        else:
            aa = c1
    sbest = 0.5 * (aa + bb)
    dbest = np.clip(delta_of(np.array([sbest]))[0], 0.0, 1.0)
    risk = float(_objective_rows(kind, inst, dbest[None, :])[0])
    return OracleResult(dbest, risk, "segment-grid", resolution)


def _projected_descent(kind, inst: Instance, mu: float, resolution: int) -> OracleResult:
    n = inst.n
    nstarts = 16
    A = np.vstack([inst.abar, inst.w])  # (2, n)
    b = np.array([0.0, mu])
    AAT_inv = np.linalg.inv(A @ A.T)

    def project_affine(d: np.ndarray) -> np.ndarray:
        return d - (A.T @ (AAT_inv @ (A @ d.T - b[:, None]))).T

    null = linalg.null_space(A)  # (n, n-2)

    # always-feasible seed: the proportional strategy
    base = np.full(n, mu / mu_max(inst))
    rng = np.random.default_rng(0)
    starts = base[None, :] + (rng.standard_normal((nstarts, null.shape[1])) * 0.5) @ null.T
    # pull random starts into the box while staying on the affine set
    for _ in range(200):
        clipped = np.clip(starts, 0.0, 1.0)
        if np.allclose(clipped, starts, atol=1e-12):
            break
        starts = project_affine(clipped)
    starts[0] = base  # keep one guaranteed-feasible start
    infeas = np.any((starts < -FEAS_TOL) | (starts > 1 + FEAS_TOL), axis=1)
    starts[infeas] = base

    d = starts
    step = np.ones(nstarts)
    obj = _objective_rows(kind, inst, np.clip(d, 0.0, 1.0))
    k = get_kind(kind)
    for _ in range(10_000):
        grad = k.deriv(inst, np.clip(d, 0.0, 1.0))
        cand = project_affine(np.clip(project_affine(d - step[:, None] * grad), 0.0, 1.0))
        cobj = _objective_rows(kind, inst, np.clip(cand, 0.0, 1.0))
        better = cobj <= obj
        moved = np.linalg.norm(np.where(better[:, None], cand - d, 0.0), axis=1)
        d = np.where(better[:, None], cand, d)
        obj = np.where(better, cobj, obj)
        step = np.where(better, np.minimum(step * 1.3, 1.0), step * 0.5)
        if np.all((moved < 1e-12) | (step < 1e-14)):
            break

    d = _repair_feasibility(A, b, d)
    feas = (np.abs(A @ d.T - b[:, None]) <= FEAS_TOL * np.maximum(1.0, np.abs(b))[:, None]).all(axis=0)
    obj = np.where(feas, _objective_rows(kind, inst, d), np.inf)
    best = int(np.argmin(obj))
    return OracleResult(d[best], float(obj[best]), "projected-descent", 10_000)


def _repair_feasibility(A: np.ndarray, b: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Pull iterates into box ∩ affine exactly.

    Descent iterates can stall a few 1e-5 outside the box while satisfying
    the two equality constraints; clipping alone would break those. Clip,
    then push the equality residual onto the coordinates strictly inside
    the box (the correction cannot reactivate a clipped bound unless the
    active set was wrong, in which case the next pass redoes it).
    """
    d = np.clip(d, 0.0, 1.0)
    for _ in range(50):
        resid = A @ d.T - b[:, None]
        if np.all(np.abs(resid) <= 1e-13):
            break
        for row in range(d.shape[0]):
            free = (d[row] > 1e-12) & (d[row] < 1.0 - 1e-12)
            if free.sum() < 2:
                free = np.ones(d.shape[1], dtype=bool)
            Af = A[:, free]
            resid_row = A @ d[row] - b
            d[row, free] -= Af.T @ np.linalg.lstsq(Af @ Af.T, resid_row, rcond=None)[0]
        d = np.clip(d, 0.0, 1.0)
    return d


def certify(kind, instance: Instance, mu: float, solution: Solution,
            resolution: int = 100_000) -> dict:
    """Compare a solver output against the oracle; PASS iff the solver is
    no worse than the oracle within tolerance and its KKT report passes."""
    oracle = brute_force(kind, instance, mu, resolution)
    gap = solution.risk - oracle.risk_best
    kkt = kkt_check(kind, instance, solution)
    # a non-finite oracle risk means no feasible witness was found; that
    # certifies nothing, so it must fail rather than pass vacuously
    ok = (
        np.isfinite(oracle.risk_best)
        and gap <= 1e-6 + 1e-6 * oracle.risk_best
        and kkt["pass"]
    )
    return {
        "pass": bool(ok),
        "gap": float(gap),
        "oracle_risk": float(oracle.risk_best),
        "solver_risk": float(solution.risk),
        "oracle_method": oracle.method,
        "kkt": kkt,
    }
