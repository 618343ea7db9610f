"""Method ladder, lenient-mode pipeline, and risk ratios."""

import numpy as np
import numpy.testing as npt
import pytest

from privshare.dispatch import risk_ratio, solve_auto, solve_request
from privshare.errors import InputError, OfferExceedsMax, OfferOutOfRange
from privshare.model import mu_max, validate_instance
from privshare.solver import solve

ABSORB_RAW = {
    "q": [0.40, 0.25, 0.20, 0.15],
    "p": [0.40, 0.15, 0.30, 0.15],
    "w": [2.0, 1.0, 1.0, 3.0],
}


class TestMethodLadder:
    def test_two_categories_use_closed_form(self, ex2):
        for kind in ("sed", "kl", "isd"):
            assert solve_auto(kind, ex2, 1.5).method == "closed-n2"

    def test_three_categories_sed_inside_regime(self, ex1):
        assert solve_auto("sed", ex1, 0.5).method == "closed-n3"

    def test_three_categories_sed_past_regime_falls_back(self, ex1):
        assert solve_auto("sed", ex1, 0.9).method == "dual-bisection"

    def test_kl_has_no_n3_closed_form(self, ex1):
        assert solve_auto("kl", ex1, 0.5).method == "dual-bisection"

    def test_conical_instances_fall_back(self, conical_instances):
        # the cell table never covers a realizable offer, so the ladder
        # must end at the dual solver even on conical-regular layouts
        inst = conical_instances[0]
        sol = solve_auto("sed", inst, 0.5 * mu_max(inst))
        assert sol.method == "dual-bisection"

    def test_ladder_agrees_with_dual(self, ex1):
        for mu in np.linspace(0.0, 1.0, 9):
            a = solve_auto("sed", ex1, float(mu))
            b = solve(
                "sed", ex1, float(mu)
            )
            npt.assert_allclose(a.delta, b.delta, atol=1e-8)
            assert abs(a.risk - b.risk) < 1e-10

    def test_offer_out_of_range_not_swallowed(self, ex1):
        with pytest.raises(OfferOutOfRange):
            solve_auto("sed", ex1, 1.5)


class TestRiskRatio:
    def test_endpoints(self, ex1):
        assert risk_ratio("sed", ex1, solve_auto("sed", ex1, 0.0)) == 0.0
        assert abs(risk_ratio("sed", ex1, solve_auto("sed", ex1, 1.0)) - 1.0) < 1e-12

    def test_monotone_in_offer(self, ex1):
        ratios = [risk_ratio("sed", ex1, solve_auto("sed", ex1, m)) for m in (0.2, 0.5, 0.9)]
        assert ratios == sorted(ratios)
        assert all(0.0 <= r <= 1.0 for r in ratios)

    def test_zero_full_risk_maps_to_zero(self):
        raw = {"q": [0.5, 0.5], "p": [0.5, 0.5], "w": [1.0, 1.0]}
        inst, sol = solve_request(raw, "sed", 1.0, mode="lenient")
        assert sol.risk == 0.0
        assert risk_ratio("sed", inst, sol) == 0.0


class TestSolveRequest:
    def test_strict_mode_matches_solve_auto(self, ex1):
        raw = {"q": list(ex1.q), "p": list(ex1.p), "w": list(ex1.w)}
        inst, sol = solve_request(raw, "sed", 0.5)
        assert inst == ex1
        ref = solve_auto("sed", ex1, 0.5)
        npt.assert_allclose(sol.delta, ref.delta, atol=1e-12)

    def test_strict_rejects_zero_difference(self):
        raw = {"q": [0.4, 0.3, 0.3], "p": [0.4, 0.2, 0.4], "w": [1.0, 1.0, 1.0]}
        with pytest.raises(InputError):
            solve_request(raw, "sed", 0.1)

    def test_lenient_absorbs_and_maps_back(self):
        inst, sol = solve_request(ABSORB_RAW, "sed", 4.0, mode="lenient")
        assert sol.method.endswith("+absorb")
        npt.assert_allclose(sol.delta, [0.5, 0.0, 0.0, 1.0], atol=1e-12)
        assert sol.risk == 0.0
        # money identity holds on the full instance
        assert abs(float(np.dot(inst.w, sol.delta)) - 4.0) < 1e-12

    def test_lenient_residual_reaches_live_categories(self):
        inst, sol = solve_request(ABSORB_RAW, "sed", 6.5, mode="lenient")
        # rates 2 and 3 absorb 5.0; the rest moves real probability mass
        assert sol.risk > 0.0
        assert abs(float(np.dot(inst.w, sol.delta)) - 6.5) < 1e-10
        assert sol.delta[0] == 1.0 and sol.delta[3] == 1.0

    def test_lenient_all_zero_difference(self):
        raw = {"q": [0.5, 0.5], "p": [0.5, 0.5], "w": [2.0, 1.0]}
        inst, sol = solve_request(raw, "sed", 2.5, mode="lenient")
        assert sol.method == "absorb-only"
        npt.assert_allclose(sol.delta, [1.0, 0.5], atol=1e-12)
        assert sol.risk == 0.0
        assert sol.activity == ("ONE", "INTERIOR")

    def test_lenient_offer_beyond_total_rejected(self):
        with pytest.raises(OfferExceedsMax):
            solve_request(ABSORB_RAW, "sed", 7.1, mode="lenient")

    def test_unknown_mode_rejected(self, ex1):
        raw = {"q": list(ex1.q), "p": list(ex1.p), "w": list(ex1.w)}
        with pytest.raises(InputError):
            solve_request(raw, "sed", 0.5, mode="casual")


class TestActivityTags:
    def test_tags_reflect_delta_values(self, ex1):
        for mu in (0.0, 0.3, 0.794847645429363, 0.95, 1.0):
            sol = solve_auto("sed", ex1, mu)
            for d, tag in zip(sol.delta, sol.activity):
                if tag == "ZERO":
                    assert d == 0.0
                elif tag == "ONE":
                    assert d == 1.0
                else:
                    assert 0.0 < d < 1.0
