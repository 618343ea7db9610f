"""Dual solver: pinned anchors on EX1, conventions, and oracle agreement."""

import numpy as np
import pytest

from conftest import random_strict_instance
from privshare.errors import InputError, OfferOutOfRange
from privshare.model import mu_max, validate_instance
from privshare.oracle import certify
from privshare.privacy import risk
from privshare.solver import (
    RESIDUAL_TOL,
    DualPoint,
    clamp_strategy,
    kkt_check,
    residual,
    solve,
)

ALL_KINDS = ["sed", "kl", "isd"]

# regime change on EX1: below this offer category 2 stays undisclosed,
# above it category 3 is pinned at full disclosure
MU1 = 0.794847645429363


class TestEx1Anchors:
    def test_low_regime_strategy(self, ex1):
        sol = solve("sed", ex1, 0.5)
        # delta_i = (v_i / abar_i) * mu / 2 on the two active categories
        np.testing.assert_allclose(
            sol.delta,
            [1.5125113264097 * 0.25, 0.0, 2.5162054784972 * 0.25],
            atol=1e-10,
        )
        assert sol.activity == ("INTERIOR", "ZERO", "INTERIOR")
        assert sol.risk == pytest.approx(0.5**2 * 0.29813411528181 / 2, abs=1e-12)

    def test_high_regime_strategy(self, ex1):
        sol = solve("sed", ex1, 0.8974)
        np.testing.assert_allclose(
            sol.delta,
            [0.8005076964623279, 0.499883877936808, 1.0],
            atol=1e-9,
        )
        assert sol.activity == ("INTERIOR", "INTERIOR", "ONE")
        assert sol.risk == pytest.approx(0.13578192758055632, abs=1e-12)
        np.testing.assert_allclose(sol.t, ex1.p + ex1.abar * sol.delta, atol=1e-15)
        assert sol.t[2] == pytest.approx(0.110, abs=1e-12)

    def test_duals_affine_in_low_regime(self, ex1):
        for mu in (0.2, 0.5, 0.7):
            sol = solve("sed", ex1, mu)
            assert sol.gamma.alpha == pytest.approx(0.21237065372628 * mu, abs=1e-9)
            assert sol.gamma.beta == pytest.approx(0.29813411528181 * mu, abs=1e-9)

    def test_endpoints(self, ex1):
        lo = solve("sed", ex1, 0.0)
        np.testing.assert_array_equal(lo.delta, 0.0)
        assert lo.risk == 0.0
        assert lo.activity == ("ZERO",) * 3
        assert lo.method == "dual-endpoint"

        hi = solve("sed", ex1, mu_max(ex1))
        np.testing.assert_array_equal(hi.delta, 1.0)
        assert hi.activity == ("ONE",) * 3
        assert hi.risk == pytest.approx(risk("sed", ex1.q, ex1.p), abs=1e-15)

    def test_residuals_tiny(self, ex1):
        for kind in ALL_KINDS:
            for mu in (0.1, MU1, 0.97):
                r1, r2 = solve(kind, ex1, mu).residuals
                assert abs(r1) <= RESIDUAL_TOL
                assert abs(r2) <= RESIDUAL_TOL * max(1.0, mu)


class TestOfferValidation:
    def test_above_max(self, ex1):
        with pytest.raises(OfferOutOfRange) as ei:
            solve("sed", ex1, 1.2)
        assert ei.value.code == "OFFER_OUT_OF_RANGE"

    def test_negative(self, ex1):
        with pytest.raises(OfferOutOfRange):
            solve("sed", ex1, -0.01)

    def test_tolerance_clamps_roundoff(self, ex1):
        total = mu_max(ex1)
        sol = solve("sed", ex1, total * (1 + 1e-13))
        np.testing.assert_array_equal(sol.delta, 1.0)

    def test_zero_difference_rejected(self):
        inst, _ = validate_instance(
            {"q": [0.4, 0.35, 0.25], "p": [0.4, 0.25, 0.35], "w": [1, 1, 1]},
            mode="lenient",
        )
        with pytest.raises(InputError) as ei:
            solve("sed", inst, 0.5)
        assert ei.value.code == "ZERO_DIFFERENCE"


class TestClampConventions:
    def test_origin_is_all_zero_sed(self, ex1):
        delta, tags = clamp_strategy("sed", ex1, DualPoint(0.0, 0.0))
        np.testing.assert_array_equal(delta, 0.0)
        assert tags == ("ZERO",) * 3  # boundary ties resolve to the bound

    def test_kl_origin_all_zero(self, ex1):
        delta, tags = clamp_strategy("kl", ex1, DualPoint(1.0, 0.0))
        np.testing.assert_array_equal(delta, 0.0)
        assert tags == ("ZERO",) * 3

    def test_far_gamma_saturates(self, ex1):
        delta, tags = clamp_strategy("sed", ex1, DualPoint(0.0, 1e6))
        np.testing.assert_array_equal(delta, 1.0)
        assert tags == ("ONE",) * 3

    def test_residual_helper_matches_clamp(self, ex1):
        g = DualPoint(0.1, 0.2)
        delta, _ = clamp_strategy("sed", ex1, g)
        r1, r2 = residual("sed", ex1, g, 0.5)
        assert r1 == pytest.approx(float(ex1.abar @ delta), abs=1e-15)
        assert r2 == pytest.approx(float(ex1.w @ delta) - 0.5, abs=1e-15)


class TestProportionalTwoCategories:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_matches_unique_feasible_point(self, kind, ex2):
        for mu in (0.3, 1.5, 2.9):
            sol = solve(kind, ex2, mu)
            np.testing.assert_allclose(sol.delta, mu / 3.0, atol=1e-10)


class TestOracleAgreement:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_ex1_certifies(self, kind, ex1):
        for mu in (0.25, 0.8974):
            rep = certify(kind, ex1, mu, solve(kind, ex1, mu), resolution=20_000)
            assert rep["pass"], rep

    def test_random_instances_certify(self):
        rng = np.random.default_rng(21)
        for _ in range(6):
            n = int(rng.integers(3, 6))
            inst = random_strict_instance(rng, n)
            mu = float(rng.uniform(0.05, 0.95)) * mu_max(inst)
            kind = ALL_KINDS[int(rng.integers(3))]
            rep = certify(kind, inst, mu, solve(kind, inst, mu), resolution=20_000)
            assert rep["pass"], (kind, n, rep)


class TestKktCheck:
    def test_passes_on_solver_output(self, ex1):
        for kind in ALL_KINDS:
            sol = solve(kind, ex1, 0.6)
            assert kkt_check(kind, ex1, sol)["pass"]

    def test_fails_on_corrupted_delta(self, ex1):
        sol = solve("sed", ex1, 0.6)
        bad = np.array(sol.delta)
        bad[0], bad[2] = bad[2], bad[0]
        from dataclasses import replace

        corrupted = replace(sol, delta=bad)
        assert not kkt_check("sed", ex1, corrupted)["pass"]


class TestWarmStart:
    def test_hint_reproduces_cold_solve(self, ex1):
        cold = solve("sed", ex1, 0.9)
        warm = solve("sed", ex1, 0.9, beta_hint=cold.gamma.beta * 1.05)
        np.testing.assert_allclose(warm.delta, cold.delta, atol=1e-10)

    def test_bad_hint_still_converges(self, ex1):
        sol = solve("kl", ex1, 0.4, beta_hint=50.0)
        assert abs(sol.residuals[1]) <= RESIDUAL_TOL


def test_rate_scaling_invariance(ex1):
    base = solve("sed", ex1, 0.6)
    for c in (0.1, 3.0, 100.0):
        scaled = validate_instance({"q": ex1.q, "p": ex1.p, "w": ex1.w * c})
        sol = solve("sed", scaled, 0.6 * c)
        np.testing.assert_allclose(sol.delta, base.delta, atol=1e-9)


def test_activity_matches_value_positions(ex1):
    rng = np.random.default_rng(5)
    for _ in range(10):
        mu = float(rng.uniform(0.02, 0.98))
        sol = solve("sed", ex1, mu)
        for d, tag in zip(sol.delta, sol.activity):
            if tag == "ZERO":
                assert d == 0.0
            elif tag == "ONE":
                assert d == 1.0
            else:
                assert 0.0 < d < 1.0
