"""Privacy-money curve: offer sweeps, shape checks, dual path, CSV export.

A sweep samples the offer range uniformly, locates every activity-pattern
change between adjacent samples by bisection (to 1e-9 in the offer), and
splices the refined breakpoints into the point list. Points carry an
``inserted`` flag because the convexity check needs the uniform subgrid:
second differences are only meaningful at equal spacing.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .dispatch import solve_auto
from .errors import InputError
from .jsonio import format_float
from .model import Instance, mu_max
from .privacy import get_kind
from .solver import INTERIOR, ONE, ZERO, DualPoint, Solution

#: offer-axis width to which activity changes are localized
BREAKPOINT_TOL = 1e-9

_ACTIVITY_CHAR = {ZERO: "0", INTERIOR: "i", ONE: "1"}


@dataclass(frozen=True)
class CurvePoint:
    mu: float
    risk: float
    delta: np.ndarray
    gamma: DualPoint
    activity: tuple[str, ...]
    method: str
    inserted: bool = False  # True for breakpoint refinements off the uniform grid


@dataclass(frozen=True)
class TradeoffCurve:
    kind: str
    instance: Instance
    points: tuple[CurvePoint, ...]
    breakpoints: tuple[float, ...]

    @property
    def uniform_points(self) -> tuple[CurvePoint, ...]:
        return tuple(p for p in self.points if not p.inserted)


def _point(sol: Solution, inserted: bool = False) -> CurvePoint:
    return CurvePoint(
        mu=sol.mu,
        risk=sol.risk,
        delta=sol.delta,
        gamma=sol.gamma,
        activity=sol.activity,
        method=sol.method,
        inserted=inserted,
    )


def sweep(kind, instance: Instance, n_points: int = 200) -> TradeoffCurve:
    """Solve ``n_points`` uniform offers plus every refined breakpoint."""
    k = get_kind(kind)
    if n_points < 2:
        raise InputError("a sweep needs at least 2 points", code="INVALID_INPUT")
    total = mu_max(instance)
    grid = np.linspace(0.0, total, n_points)

    points: list[CurvePoint] = []
    hint = None
    for mu in grid:
        sol = solve_auto(k, instance, float(mu), beta_hint=hint)
        if sol.method.startswith("dual") and sol.gamma.beta != 0.0:
            hint = sol.gamma.beta
        points.append(_point(sol))

    breakpoints: list[float] = []
    inserted: list[CurvePoint] = []
    for left, right in zip(points, points[1:]):
        # one grid gap can hold several pattern changes; walk them all
        lo, lo_act = left.mu, left.activity
        while lo_act != right.activity and right.mu - lo > BREAKPOINT_TOL:
            hi = right.mu
            while hi - lo > BREAKPOINT_TOL:
                mid = 0.5 * (lo + hi)
                if solve_auto(k, instance, mid, beta_hint=hint).activity == lo_act:
                    lo = mid
                else:
                    hi = mid
            refined = solve_auto(k, instance, hi, beta_hint=hint)
            # the pattern flips at exactly 0 and mu_max on every instance;
            # only strictly interior changes are regime boundaries
            if BREAKPOINT_TOL < hi < total - BREAKPOINT_TOL:
                breakpoints.append(hi)
                if hi not in (left.mu, right.mu):
                    inserted.append(_point(refined, inserted=True))
            lo, lo_act = hi, refined.activity

    merged = sorted(points + inserted, key=lambda p: p.mu)
    return TradeoffCurve(
        kind=k.tag,
        instance=instance,
        points=tuple(merged),
        breakpoints=tuple(breakpoints),
    )


def check_monotone(curve: TradeoffCurve, slack: float = 1e-10) -> dict:
    """Risk must be nondecreasing along the offer axis."""
    violations = [
        (a.mu, b.mu, b.risk - a.risk)
        for a, b in zip(curve.points, curve.points[1:])
        if b.risk - a.risk < -slack
    ]
    return {
        "pass": not violations,
        "violations": violations,
        "slack": slack,
        "points": len(curve.points),
    }


def check_convex(curve: TradeoffCurve, tol: float = 1e-9) -> dict:
    """Discrete second differences on the uniform subgrid must be >= -tol."""
    pts = curve.uniform_points
    risks = np.array([p.risk for p in pts])
    second = risks[2:] - 2.0 * risks[1:-1] + risks[:-2]
    violations = [
        (pts[i + 1].mu, float(d)) for i, d in enumerate(second) if d < -tol
    ]
    return {
        "pass": not violations,
        "violations": violations,
        "min_second_difference": float(second.min()) if len(second) else 0.0,
        "tol": tol,
    }


def gamma_path(curve: TradeoffCurve) -> list[tuple[float, float, float]]:
    """(mu, alpha, beta) per point, for plotting the dual trajectory."""
    return [(p.mu, p.gamma.alpha, p.gamma.beta) for p in curve.points]


def write_csv(curve: TradeoffCurve, target) -> None:
    """Write the curve; ``target`` is a path or a text file object.

    Columns: mu, risk, delta_1..delta_n, alpha, beta, activity. The
    activity column compresses the pattern to one character per category
    (0, i, 1). Floats use the canonical 17-significant-digit form.
    """
    n = curve.instance.n
    header = ["mu", "risk", *(f"delta_{i + 1}" for i in range(n)), "alpha", "beta", "activity"]
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", encoding="ascii", newline="") as fh:
            _write_rows(curve, header, fh)
    else:
        _write_rows(curve, header, target)


def _write_rows(curve: TradeoffCurve, header: list[str], fh: io.TextIOBase) -> None:
    fh.write(",".join(header) + "\n")
    for p in curve.points:
        row = [
            format_float(p.mu),
            format_float(p.risk),
            *(format_float(d) for d in p.delta),
            format_float(p.gamma.alpha),
            format_float(p.gamma.beta),
            "".join(_ACTIVITY_CHAR[a] for a in p.activity),
        ]
        fh.write(",".join(row) + "\n")


def csv_text(curve: TradeoffCurve) -> str:
    buf = io.StringIO()
    write_csv(curve, buf)
    return buf.getvalue()
