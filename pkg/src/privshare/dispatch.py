"""Method dispatch: closed forms first, dual solver as the general path.

``solve_auto`` is the single entry point the curve sweep, the CLI and
the HTTP service use. The ladder is fastest-first and every rung agrees
with the dual solver wherever it applies, so the choice is a pure
performance detail that callers can observe through ``Solution.method``.
"""

from __future__ import annotations

import numpy as np

from .closed_forms import solve_conical_sed, solve_n2, solve_n3_sed
from .errors import InputError
from .model import (
    Instance,
    absorb_zero_difference,
    apparent_profile,
    validate_instance,
)
from .privacy import get_kind, risk
from .solver import INTERIOR, ONE, ZERO, DualPoint, Solution, solve


def solve_auto(kind, instance: Instance, mu: float, beta_hint: float | None = None) -> Solution:
    """Solve one offer on a strict instance, preferring closed forms.

    Order: two-category closed form, then the three-category squared
    distance form (inside its threshold), then the conical-layout cells,
    then the dual solver. Rungs bow out via None or a structural
    InputError (DEGENERATE ties, NOT_CONICAL); offer-range errors are not
    InputErrors and propagate, since no other rung could accept the offer
    either.
    """
    k = get_kind(kind)
    if instance.n == 2:
        return solve_n2(k, instance, mu)
    if k.tag == "sed":
        for rung in (solve_n3_sed, solve_conical_sed) if instance.n == 3 else (solve_conical_sed,):
            try:
                sol = rung(instance, mu)
            except InputError:
                sol = None
            if sol is not None:
                return sol
    return solve(k, instance, mu, beta_hint=beta_hint)


def risk_ratio(kind, instance: Instance, solution: Solution) -> float:
    """risk / R(mu_max); 0.0 on the degenerate all-zero-difference case."""
    full = risk(kind, instance.q, instance.p)
    if full == 0.0:
        return 0.0
    return float(solution.risk / full)


def _tag(value: float) -> str:
    return ZERO if value == 0.0 else ONE if value == 1.0 else INTERIOR


def solve_request(raw, kind, mu: float, mode: str = "strict") -> tuple[Instance, Solution]:
    """Validate ``raw`` and solve; the boundary entry used by CLI and HTTP.

    Lenient mode absorbs zero-difference categories greedily before the
    core solve and reassembles a full-length strategy; strict mode
    rejects such instances outright.
    """
    if mode not in ("strict", "lenient"):
        raise InputError(f"unknown mode {mode!r}; expected strict or lenient")
    if mode == "strict":
        instance = validate_instance(raw, mode="strict")
        return instance, solve_auto(kind, instance, mu)

    instance, zero = validate_instance(raw, mode="lenient")
    if not zero:
        return instance, solve_auto(kind, instance, mu)
    restricted, prefilled, residual = absorb_zero_difference(instance, zero, mu)

    k = get_kind(kind)
    if restricted.n >= 2:
        sub = solve_auto(k, restricted, residual)
        gamma = sub.gamma
        method = sub.method + "+absorb"
        sub_delta = dict(zip((i for i in range(instance.n) if i not in zero), sub.delta))
    elif residual <= 1e-12:
        # everything absorbed at zero privacy cost
        gamma = DualPoint(1.0, 0.0) if k.tag == "kl" else DualPoint(0.0, 0.0)
        method = "absorb-only"
        sub_delta = {i: 0.0 for i in range(instance.n) if i not in zero}
    else:
        # one moving category cannot earn anything alone: its PMF
        # constraint pins it at zero disclosure
        raise InputError(
            f"offer {mu} is unreachable: residual {residual} requires moving "
            "a single category whose disclosure is pinned by the PMF constraint",
            code="INFEASIBLE",
        )

    delta = np.empty(instance.n)
    for i in range(instance.n):
        delta[i] = prefilled.get(i, sub_delta.get(i, 0.0))
    t = apparent_profile(instance, delta)
    solution = Solution(
        delta=delta,
        t=t,
        risk=k.risk(t, instance.p),
        gamma=gamma,
        activity=tuple(_tag(float(d)) for d in delta),
        mu=mu,
        method=method,
        residuals=(
            float(instance.abar @ delta),
            float(instance.w @ delta - mu),
        ),
    )
    return instance, solution


__all__ = ["risk_ratio", "solve_auto", "solve_request"]
