"""Benchmark harness shape and reconciliation checks (small counts)."""

import pytest

from taas.bench import BenchReport, compare_kernels, render_bench, run_bench
from taas.sim import ScenarioSpec
from taas.timing import PHASES, PILLARS


@pytest.fixture(scope="module")
def reports(cfg=None):
    from taas.model import ModelConfig

    template = ScenarioSpec(seed=13, num_providers=5)
    return run_bench([20, 40], ModelConfig(), template=template)


class TestRunBench:
    def test_report_count_and_modes(self, reports):
        assert len(reports) == 4
        assert [(r.offers, r.cold_start) for r in reports] == [
            (20, True), (20, False), (40, True), (40, False),
        ]

    def test_phase_sums_reconcile(self, reports):
        for r in reports:
            assert r.phase_sum() == pytest.approx(r.total_seconds, rel=0.02)

    def test_pillar_sums_reconcile(self, reports):
        for r in reports:
            assert r.pillar_sum() == pytest.approx(r.phase_seconds["compute"], rel=0.02)

    def test_cold_at_least_warm(self, reports):
        by_count = {}
        for r in reports:
            by_count.setdefault(r.offers, {})["cold" if r.cold_start else "warm"] = r
        for count, pair in by_count.items():
            assert pair["cold"].total_seconds >= pair["warm"].total_seconds

    def test_warm_monotone_in_count(self, reports):
        warm = [r for r in reports if not r.cold_start]
        assert warm[0].total_seconds <= warm[1].total_seconds

    def test_report_serialization(self, reports):
        doc = reports[0].to_dict()
        assert set(doc) == {"offers", "total_seconds", "phase_seconds",
                            "pillar_seconds", "cold_start"}
        assert set(doc["phase_seconds"]) == set(PHASES)
        assert set(doc["pillar_seconds"]) == set(PILLARS)

    def test_render(self, reports):
        table = render_bench(reports)
        assert "cold" in table and "warm" in table


class TestKernelComparison:
    def test_compare_kernels_smoke(self):
        doc = compare_kernels(iterations=2000)
        assert doc["kernels"]
        if len(doc["backends"]) == 2:
            for row in doc["kernels"].values():
                assert row["bit_identical"]
