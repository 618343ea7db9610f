"""The three separable privacy functions: SED, KL divergence, Itakura-Saito.

Each kind exposes, per category i of a bound instance, the component
value f_i(delta), its derivative f'_i(delta) (strictly increasing on
[0,1]), and the extended-real-valued inverse of the derivative. The
whole-profile risk f(t, p) is also provided.

All component operations are vectorized over categories: ``delta`` (or
``y`` for the inverse) is broadcast against the instance's difference
vector. The inverse returns ±inf outside the derivative's range — the
solver's clamp consumes those.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .model import Instance

_NEGINF = float("-inf")
_POSINF = float("inf")


class _Kind:
    tag: str

    def __repr__(self):
        return f"<privacy function {self.tag}>"

    # --- whole-profile risk -------------------------------------------------
    def risk(self, t, p) -> float:
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        if np.any(t <= 0) or np.any(p <= 0):
            raise InputError("profiles must be strictly positive", code="DOMAIN")
        return float(self._risk(t, p))

    # --- per-component triple, vectorized over i ----------------------------
    def value(self, inst: Instance, delta) -> np.ndarray:
        raise NotImplementedError

    def deriv(self, inst: Instance, delta) -> np.ndarray:
        raise NotImplementedError

    def inv_deriv(self, inst: Instance, y) -> np.ndarray:
        raise NotImplementedError


class _Sed(_Kind):
    tag = "sed"

    def _risk(self, t, p):
        return np.sum((t - p) ** 2)

    def value(self, inst, delta):
        return (inst.abar * delta) ** 2

    def deriv(self, inst, delta):
        return 2.0 * inst.abar**2 * delta

    def inv_deriv(self, inst, y):
        return y / (2.0 * inst.abar**2)


class _Kl(_Kind):
    tag = "kl"

    def _risk(self, t, p):
        return np.sum(t * np.log(t / p))

    def value(self, inst, delta):
        t = inst.p + inst.abar * delta
        return t * np.log(t / inst.p)

    def deriv(self, inst, delta):
        t = inst.p + inst.abar * delta
        return inst.abar * (np.log(t / inst.p) + 1.0)

    def inv_deriv(self, inst, y):
        # exp overflow saturates to ±inf, which the clamp maps to the box edge
        with np.errstate(over="ignore"):
            return (inst.p / inst.abar) * np.expm1(y / inst.abar - 1.0)


class _Isd(_Kind):
    tag = "isd"

    def _risk(self, t, p):
        r = t / p
        return np.sum(r - np.log(r) - 1.0)

    def value(self, inst, delta):
        r = (inst.p + inst.abar * delta) / inst.p
        return r - np.log(r) - 1.0

    def deriv(self, inst, delta):
        return inst.abar / inst.p - inst.abar / (inst.p + inst.abar * delta)

    def inv_deriv(self, inst, y):
        a, p = inst.abar, inst.p
        den = a - y * p
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (a * p / den - p) / a
        # pole conventions: past the vertical asymptote the inverse keeps the
        # sign of its one-sided limit (+inf for abar>0, -inf for abar<0)
        pole_hi = (a > 0) & (y >= a / p)
        pole_lo = (a < 0) & (y <= a / p)
        if np.any(pole_hi) or np.any(pole_lo):
            x = np.where(pole_hi, _POSINF, x)
            x = np.where(pole_lo, _NEGINF, x)
        return x


SED = _Sed()
KL = _Kl()
ISD = _Isd()

KINDS = {"sed": SED, "kl": KL, "isd": ISD}


def get_kind(tag) -> _Kind:
    if isinstance(tag, _Kind):
        return tag
    try:
        return KINDS[str(tag).lower()]
    except KeyError:
        raise InputError(
            f"unknown privacy function {tag!r}; expected sed, kl or isd",
            code="WRONG_KIND",
        )


def risk(kind, t, p) -> float:
    return get_kind(kind).risk(t, p)


class ComponentTriple:
    """Scalar view (f_i, f'_i, (f'_i)^-1) for one category."""

    def __init__(self, kind, instance: Instance, i: int):
        self._kind = get_kind(kind)
        self._inst = instance
        self.i = i

    def value(self, delta: float) -> float:
        return float(self._kind.value(self._inst, np.full(self._inst.n, delta))[self.i])

    def deriv(self, delta: float) -> float:
        return float(self._kind.deriv(self._inst, np.full(self._inst.n, delta))[self.i])

    def inv_deriv(self, y: float) -> float:
        return float(self._kind.inv_deriv(self._inst, np.full(self._inst.n, y))[self.i])


def component(kind, instance: Instance, i: int) -> ComponentTriple:
    """The (f_i, f'_i, inverse) triple for category ``i``; abar_i must be nonzero."""
    if abs(instance.abar[i]) < 1e-12:
        raise InputError(
            f"category {i} has q_i = p_i; component not strictly convex",
            code="ZERO_DIFFERENCE",
        )
    return ComponentTriple(kind, instance, i)


def gradient_endpoints(kind, instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    """(f'_i(0))_i and (f'_i(1))_i — the slab bounds in the dual plane."""
    k = get_kind(kind)
    zeros = np.zeros(instance.n)
    ones = np.ones(instance.n)
    return k.deriv(instance, zeros), k.deriv(instance, ones)
