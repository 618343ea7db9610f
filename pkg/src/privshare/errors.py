"""Semantic error hierarchy with machine-readable codes.

Every error carries a stable ``code`` string (what scripts and the HTTP
layer match on), a CLI exit code and an HTTP status. Subclasses pin the
transport attributes; the code varies per failure.
"""

from __future__ import annotations


class PrivshareError(Exception):
    """Base class; code "ERROR", exit 1, HTTP 400."""

    code = "ERROR"
    exit_code = 1
    http_status = 400

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return str(self)


class InputError(PrivshareError):
    """Invalid instance or request content (exit 2, HTTP 422).

    Codes: NON_PMF, NON_POSITIVE_ENTRY, NON_POSITIVE_RATE, EQUAL_PROFILES,
    DIMENSION_MISMATCH, ZERO_DIFFERENCE, WRONG_ARITY, WRONG_KIND, DOMAIN,
    DEGENERATE, TIED_SLOPES, NOT_CONICAL, PARALLEL, NO_CLOSED_FORM,
    INFEASIBLE.
    """

    code = "INVALID_INPUT"
    exit_code = 2
    http_status = 422


class OfferOutOfRange(PrivshareError):
    code = "OFFER_OUT_OF_RANGE"
    exit_code = 3
    http_status = 400


class OfferExceedsMax(OfferOutOfRange):
    code = "OFFER_EXCEEDS_MAX"


class NoConvergence(PrivshareError):
    """Iteration budget exhausted; carries the best residuals seen."""

    code = "NO_CONVERGENCE"
    exit_code = 4
    http_status = 400

    def __init__(self, message: str, residuals: tuple[float, float] | None = None):
        super().__init__(message)
        self.residuals = residuals
