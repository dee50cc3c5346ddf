from __future__ import annotations

import pytest

from waylimit.services.verification_service import SUITES, VerificationService


@pytest.fixture
def verifier(bloch, bounds, channel, models) -> VerificationService:
    return VerificationService(bloch, bounds, channel, models)


class TestSuites:
    @pytest.mark.parametrize("suite", SUITES)
    def test_small_run_passes(self, verifier, suite):
        report = verifier.run(suite, 6, seed=1)
        failures = [check for check in report.checks if not check.passed]
        assert report.passed, failures
        assert all(check.samples == 6 for check in report.checks)

    def test_report_shape(self, verifier):
        report = verifier.run("normformula", 3, seed=5)
        assert report.suite == "normformula"
        assert report.seed == 5
        assert [check.name for check in report.checks] == [
            "commutator_norm_formula",
            "gamma_identity",
            "rotated_law_vector",
            "alt_simplified_below_alt",
        ]

    def test_same_seed_same_report(self, verifier):
        assert verifier.run("robertson", 4, seed=9) == verifier.run("robertson", 4, seed=9)

    def test_tolerance_override_is_reported(self, verifier):
        report = verifier.run("dominance", 2, seed=0, tol_bound=1e-5)
        assert report.checks[0].tolerance == 1e-5

    def test_unknown_suite(self, verifier):
        with pytest.raises(ValueError, match="unknown_suite"):
            verifier.run("nonsense", 5, seed=0)

    def test_needs_samples(self, verifier):
        with pytest.raises(ValueError, match="points_too_small"):
            verifier.run("normformula", 0, seed=0)


@pytest.mark.slow
class TestAcceptanceSizes:
    def test_normformula(self, verifier):
        assert verifier.run("normformula", 1000, seed=0).passed

    def test_robertson(self, verifier):
        assert verifier.run("robertson", 200, seed=0).passed

    def test_deviation(self, verifier):
        assert verifier.run("deviation", 200, seed=0).passed

    def test_purification(self, verifier):
        assert verifier.run("appendix", 100, seed=0).passed

    def test_dominance(self, verifier):
        assert verifier.run("dominance", 500, seed=0).passed
