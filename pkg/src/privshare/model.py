"""Problem instance: profiles, rates, disclosure vectors, apparent profile.

An instance is one seller's problem: the actual profile ``q`` (a PMF over
``n`` interest categories), the initial decoy profile ``p``, and the
per-category rates ``w`` (money units for full disclosure). Everything
downstream works off the difference vector ``abar = q - p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, OfferExceedsMax

#: below accumulated rounding of PMF arithmetic
EPS_ZERO = 1e-12
#: PMF sums accepted within this on input, then renormalized
PMF_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Instance:
    """Validated problem instance. Construct via :func:`validate_instance`.

    ``normalized`` is False for restricted sub-instances produced by
    :func:`absorb_zero_difference`, whose q and p keep their original
    entries verbatim and no longer sum to 1.
    """

    categories: tuple[str, ...]
    q: np.ndarray
    p: np.ndarray
    w: np.ndarray
    normalized: bool = True
    abar: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("q", "p", "w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        abar = self.q - self.p
        abar.setflags(write=False)
        object.__setattr__(self, "abar", abar)

    @property
    def n(self) -> int:
        return len(self.w)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.categories == other.categories
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.w, other.w)
        )


def _as_vector(raw, name: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a numeric vector", code="DIMENSION_MISMATCH")
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional", code="DIMENSION_MISMATCH")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries", code="NON_POSITIVE_ENTRY")
    return arr


def validate_instance(
    raw, mode: str = "strict"
) -> Instance | tuple[Instance, frozenset[int]]:
    """Validate a candidate instance.

    ``raw`` may be a mapping with keys categories/q/p/w, an Instance, or a
    (categories, q, p, w) tuple. Strict mode additionally rejects any
    category with q_i = p_i. Lenient mode returns ``(instance, Z)`` where
    Z is the set of zero-difference indices for downstream preprocessing.

    Validating an already-validated instance returns an equal instance
    (idempotence).
    """
    if mode not in ("strict", "lenient"):
        raise InputError(f"unknown mode {mode!r}", code="INVALID_INPUT")

    if isinstance(raw, Instance):
        categories, q, p, w = raw.categories, raw.q, raw.p, raw.w
    elif isinstance(raw, dict):
        missing = [k for k in ("q", "p", "w") if k not in raw]
        if missing:
            raise InputError(f"missing fields: {missing}", code="DIMENSION_MISMATCH")
        categories = raw.get("categories")
        q, p, w = raw["q"], raw["p"], raw["w"]
    else:
        try:
            categories, q, p, w = raw
        except (TypeError, ValueError):
            raise InputError(
                "expected mapping with categories/q/p/w", code="DIMENSION_MISMATCH"
            )

    q = _as_vector(q, "q")
    p = _as_vector(p, "p")
    w = _as_vector(w, "w")
    n = len(q)
    if categories is None:
        categories = tuple(f"c{i + 1}" for i in range(n))
    else:
        categories = tuple(str(c) for c in categories)
    if not (len(p) == len(w) == len(categories) == n):
        raise InputError(
            f"length mismatch: categories={len(categories)} q={n} p={len(p)} w={len(w)}",
            code="DIMENSION_MISMATCH",
        )
    if n < 2:
        raise InputError("need at least 2 categories", code="DIMENSION_MISMATCH")

    for name, vec in (("q", q), ("p", p)):
        if np.any(vec <= 0):
            raise InputError(
                f"{name} has non-positive entries", code="NON_POSITIVE_ENTRY"
            )
        s = vec.sum()
        if abs(s - 1.0) > PMF_SUM_TOL:
            raise InputError(
                f"{name} sums to {float(s):.12g}, not a PMF", code="NON_PMF"
            )
    if np.any(w <= 0):
        raise InputError("rates must be positive", code="NON_POSITIVE_RATE")

    # tolerate JSON round-tripping: renormalize within the sum tolerance;
    # skip when already at machine precision so revalidation is bit-exact
    if abs(q.sum() - 1.0) > 1e-13:
        q = q / q.sum()
    if abs(p.sum() - 1.0) > 1e-13:
        p = p / p.sum()

    abar = q - p
    zero = np.flatnonzero(np.abs(abar) < EPS_ZERO)
    if mode == "strict":
        if len(zero):
            raise InputError(
                f"q and p agree at categories {zero.tolist()}", code="EQUAL_PROFILES"
            )
        return Instance(categories, q, p, w)
    inst = Instance(categories, q, p, w)
    return inst, frozenset(int(i) for i in zero)


def apparent_profile(instance: Instance, delta) -> np.ndarray:
    """t = (1 - delta) * p + delta * q, componentwise."""
    delta = np.asarray(delta, dtype=float)
    return instance.p + instance.abar * delta


def mu_max(instance: Instance) -> float:
    return float(instance.w.sum())


def absorb_zero_difference(
    instance: Instance, zero_set: frozenset[int] | set[int], mu: float
) -> tuple[Instance, dict[int, float], float]:
    """Saturate zero-difference categories greedily, highest rate first.

    Categories with q_i = p_i earn money at exactly zero privacy cost, so
    they absorb the offer before the restricted problem is solved. Returns
    (restricted instance, prefilled delta entries by original index,
    residual mu). The restricted instance keeps q, p, w verbatim — no
    renormalization — because the constraints use abar and w directly.
    """
    if mu < 0:
        raise OfferExceedsMax(f"offer {mu} is negative")
    if mu > mu_max(instance) * (1 + 1e-12) + 1e-12:
        raise OfferExceedsMax(
            f"offer {mu} exceeds mu_max {mu_max(instance)}"
        )
    if not zero_set:
        return instance, {}, mu

    prefilled: dict[int, float] = {}
    residual = mu
    order = sorted(zero_set, key=lambda i: -instance.w[i])
    for i in order:
        wi = float(instance.w[i])
        take = min(1.0, residual / wi)
        prefilled[i] = take
        residual -= take * wi
    residual = max(residual, 0.0)

    keep = np.array([i for i in range(instance.n) if i not in zero_set], dtype=int)
    restricted = Instance(
        tuple(instance.categories[i] for i in keep),
        # not PMFs any more; solver-facing constraints only use abar, w, p
        instance.q[keep],
        instance.p[keep],
        instance.w[keep],
        normalized=False,
    )
    return restricted, prefilled, residual
