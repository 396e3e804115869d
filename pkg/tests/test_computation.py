"""Assessor operation examples and invariants."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from taas.computation import (
    PeerTrustAssessor,
    SatisfactionBreakdown,
    aggregate_recommendations,
    community_context_factor,
    final_trust,
    make_assessor,
    offer_satisfaction,
    provider_reputation,
    provider_satisfaction,
    satisfaction,
    similarity_credibility,
    transaction_context_factor,
)
from taas.gathering import TrustContext
from taas.model import (
    ConfigError,
    EmptyAggregationError,
    ModelConfig,
    OfferType,
    ProductOffer,
    ProviderStats,
    Recommendation,
    StakeholderId,
    TimeWindowWeights,
    WindowMismatchError,
)

EVAL = StakeholderId("consumer-0", "domain-0")
PROV = StakeholderId("prov-000", "domain-1")
OFFER = ProductOffer("offer-0", PROV, OfferType.RAN, "north", 1_600_000_000)
NOW = 1_700_000_000


def make_ctx(**overrides):
    base = dict(
        evaluator=EVAL,
        target=PROV,
        offer=OFFER,
        now=NOW,
        feedback_counts=(0, 0, 0),
    )
    base.update(overrides)
    return TrustContext(**base)


def rec(rid, rating, offer_type=None):
    return Recommendation(
        recommender=StakeholderId(rid),
        target=PROV,
        rating=rating,
        issued_at=NOW - 100,
        offer_type=offer_type,
    )


class TestProviderReputation:
    def test_perfect_single_window(self, single_window_cfg, perfect_stats):
        assert provider_reputation([perfect_stats], single_window_cfg.window_weights) == 1.0

    def test_worst_single_window(self, single_window_cfg, worst_stats):
        assert provider_reputation([worst_stats], single_window_cfg.window_weights) == 0.0

    def test_mixed_single_window(self, single_window_cfg, mixed_stats):
        got = provider_reputation([mixed_stats], single_window_cfg.window_weights)
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_window_mismatch(self, cfg, mixed_stats):
        with pytest.raises(WindowMismatchError):
            provider_reputation([mixed_stats], cfg.window_weights)

    def test_permuting_windows_with_weights_invariant(self, mixed_stats, perfect_stats, worst_stats):
        # moving stats between windows while moving their weights identically
        # must leave the weighted sum unchanged
        stats = [mixed_stats, perfect_stats, worst_stats]
        eps = (0.6, 0.3, 0.1)
        one = TimeWindowWeights((1.0,))
        base = sum(eps[i] * provider_reputation([stats[i]], one) for i in range(3))
        assert provider_reputation(stats, TimeWindowWeights(eps)) == pytest.approx(base, abs=1e-12)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0), (0, 2, 1)):
            got = sum(eps[i] * provider_reputation([stats[i]], one) for i in perm)
            assert got == pytest.approx(base, abs=1e-12)


class TestAggregation:
    def test_single_term(self):
        assert aggregate_recommendations([(0.9, 1.0)]) == pytest.approx(0.9)

    def test_two_terms_hand_value(self):
        # (0.8*0.5 + 0.6*1.0) / 2 = 0.5
        assert aggregate_recommendations([(0.8, 0.5), (0.6, 1.0)]) == pytest.approx(0.5)

    def test_empty_is_error(self):
        with pytest.raises(EmptyAggregationError):
            aggregate_recommendations([])


class TestSatisfactionSides:
    def test_provider_satisfaction_product_with_identity(self, single_window_cfg, perfect_stats):
        ctx = make_ctx(
            provider_stats=(perfect_stats,),
            recommendations=(rec("r1", 0.9),),
            recommender_trust={"r1": 1.0},
            feedback_counts=(0,),
        )
        assert provider_satisfaction(ctx, single_window_cfg) == pytest.approx(0.9)

    def test_provider_satisfaction_hand_value(self, single_window_cfg, mixed_stats):
        ctx = make_ctx(
            provider_stats=(mixed_stats,),
            recommendations=(rec("r1", 0.8), rec("r2", 0.6)),
            recommender_trust={"r1": 0.5, "r2": 1.0},
            feedback_counts=(0,),
        )
        # 0.5 * ((0.8*0.5 + 0.6*1.0)/2) = 0.25
        assert provider_satisfaction(ctx, single_window_cfg) == pytest.approx(0.25)

    def test_no_recommendations_identity_convention(self, single_window_cfg):
        stats = ProviderStats(10, 10, 4, 4, 10, 6, 4, 1)  # window value 0.7
        ctx = make_ctx(provider_stats=(stats,), feedback_counts=(0,))
        assert provider_satisfaction(ctx, single_window_cfg) == pytest.approx(0.7, abs=1e-9)

    def test_offer_satisfaction_equals_provider_on_same_inputs(self, single_window_cfg, mixed_stats):
        ctx = make_ctx(
            provider_stats=(mixed_stats,),
            offer_stats=(mixed_stats,),
            recommendations=(rec("r1", 0.8),),
            offer_recommendations=(rec("r1", 0.8, OfferType.RAN),),
            recommender_trust={"r1": 0.5},
            feedback_counts=(0,),
        )
        assert offer_satisfaction(ctx, single_window_cfg) == provider_satisfaction(
            ctx, single_window_cfg
        )

    def test_offer_satisfaction_perfect(self, single_window_cfg, perfect_stats):
        ctx = make_ctx(
            offer_stats=(perfect_stats,),
            offer_recommendations=(rec("r1", 1.0, OfferType.RAN),),
            recommender_trust={"r1": 1.0},
            feedback_counts=(0,),
        )
        assert offer_satisfaction(ctx, single_window_cfg) == pytest.approx(1.0)

    def test_offer_satisfaction_mixed_no_typed_recs(self, single_window_cfg, mixed_stats):
        ctx = make_ctx(offer_stats=(mixed_stats,), feedback_counts=(0,))
        assert offer_satisfaction(ctx, single_window_cfg) == pytest.approx(0.5, abs=1e-12)


class TestSatisfactionBlend:
    def test_midpoint(self, cfg):
        assert satisfaction(0.8, 0.6, cfg).combined == pytest.approx(0.7)

    def test_degenerate_weight(self):
        cfg = ModelConfig(psi=1.0, phi=0.0)
        assert satisfaction(0.3, 0.9, cfg).combined == pytest.approx(0.3)

    def test_hand_blend(self):
        cfg = ModelConfig(psi=0.7, phi=0.3)
        assert satisfaction(0.5, 1.0, cfg).combined == pytest.approx(0.65)


class TestSimilarityCredibility:
    def test_identical_histories(self):
        hist = (("a", 0.4), ("b", 0.9))
        assert similarity_credibility(hist, hist, 0.5) == 1.0

    def test_max_distance(self):
        assert similarity_credibility((("a", 1.0),), (("a", 0.0),), 0.5) == 0.0

    def test_hand_value(self):
        mine = (("a", 0.8), ("b", 0.6))
        theirs = (("a", 0.6), ("b", 0.6))
        expected = 1.0 - math.sqrt(((0.8 - 0.6) ** 2 + 0.0) / 2)
        got = similarity_credibility(mine, theirs, 0.5)
        assert got == pytest.approx(expected, abs=1e-6)
        assert got == pytest.approx(0.8586, abs=1e-4)

    def test_disjoint_histories_get_prior(self):
        assert similarity_credibility((("a", 1.0),), (("b", 0.0),), 0.5) == 0.5

    @given(
        st.dictionaries(st.text(min_size=1, max_size=4), st.floats(0, 1), max_size=8),
        st.dictionaries(st.text(min_size=1, max_size=4), st.floats(0, 1), max_size=8),
    )
    def test_symmetry(self, a, b):
        ha, hb = tuple(a.items()), tuple(b.items())
        assert similarity_credibility(ha, hb, 0.5) == similarity_credibility(hb, ha, 0.5)


class TestContextFactors:
    def test_tf_zero_counts(self, cfg):
        assert transaction_context_factor((0, 0, 0), cfg) == 0.5

    def test_tf_saturation(self, cfg):
        assert transaction_context_factor((20, 30, 40), cfg) == 1.0

    def test_tf_hand_value(self, single_window_cfg):
        assert transaction_context_factor((10,), single_window_cfg) == pytest.approx(0.75)

    def test_cf_single_rec(self, cfg):
        got = community_context_factor((rec("r1", 1.0),), {"r1": 1.0}, cfg)
        assert got == pytest.approx(0.1)

    def test_cf_saturated(self, cfg):
        recs = tuple(rec(f"r{i}", 1.0) for i in range(10))
        creds = {f"r{i}": 1.0 for i in range(10)}
        assert community_context_factor(recs, creds, cfg) == pytest.approx(1.0)

    def test_cf_empty_prior(self, cfg):
        assert community_context_factor((), {}, cfg) == 0.5

    def test_cf_zero_credibility_mass_prior(self, cfg):
        assert community_context_factor((rec("r1", 1.0),), {"r1": 0.0}, cfg) == 0.5


class TestFinalTrust:
    def test_all_ones(self, cfg):
        sat = SatisfactionBreakdown(1.0, 1.0, 1.0)
        assert final_trust(sat, 1.0, 1.0, 1.0, cfg) == 1.0

    def test_all_zeros(self, cfg):
        sat = SatisfactionBreakdown(0.0, 0.0, 0.0)
        assert final_trust(sat, 0.0, 0.0, 0.0, cfg) == 0.0

    def test_hand_chain(self, cfg):
        cr = 1.0 - math.sqrt(0.02)
        sat = SatisfactionBreakdown(0.8, 0.6, 0.7)
        got = final_trust(sat, cr, 0.75, 0.5, cfg)
        assert got == pytest.approx(0.7 * (0.7 * cr * 0.75) + 0.3 * 0.5, abs=1e-12)
        assert got == pytest.approx(0.4655, abs=1e-4)


def random_stats(rng):
    ia = rng.randint(0, 60)
    aa = rng.randint(0, ia) if ia else 0
    ial = rng.randint(0, 20)
    aal = rng.randint(0, ial) if ial else 0
    pv = rng.randint(0, 15)
    mv = rng.randint(0, pv) if pv else 0
    ev = rng.randint(0, pv - mv) if pv - mv > 0 else 0
    npv = rng.randint(0, 8)
    return ProviderStats(aa, ia, aal, ial, pv, mv, ev, npv)


def random_ctx(rng, cfg):
    n = cfg.num_windows
    n_recs = rng.randint(0, 4)
    recs = tuple(rec(f"r{i}", rng.random()) for i in range(n_recs))
    typed = tuple(
        rec(f"r{i}", rng.random(), OfferType.RAN) for i in range(rng.randint(0, n_recs))
    )
    histories = {
        f"r{i}": tuple((f"t{j}", rng.random()) for j in range(rng.randint(0, 5)))
        for i in range(n_recs)
    }
    return make_ctx(
        provider_stats=tuple(random_stats(rng) for _ in range(n)),
        offer_stats=tuple(random_stats(rng) for _ in range(n)),
        recommendations=recs,
        offer_recommendations=typed,
        recommender_histories=histories,
        recommender_trust={f"r{i}": rng.random() for i in range(n_recs)},
        evaluator_history=tuple((f"t{j}", rng.random()) for j in range(4)),
        feedback_counts=tuple(rng.randint(0, 50) for _ in range(n)),
    )


class TestAssessor:
    def test_pure_and_deterministic(self, cfg):
        rng = random.Random(1)
        ctx = random_ctx(rng, cfg)
        assessor = PeerTrustAssessor()
        a = assessor.assess(ctx, cfg)
        b = assessor.assess(ctx, cfg)
        assert a == b
        assert a.to_dict() == b.to_dict()

    def test_all_components_in_range_fuzzed(self, cfg):
        rng = random.Random(7)
        assessor = PeerTrustAssessor()
        for _ in range(2000):
            score = assessor.assess(random_ctx(rng, cfg), cfg)
            for value in (
                score.score,
                score.satisfaction,
                score.credibility,
                score.transaction_factor,
                score.community_factor,
            ):
                assert 0.0 <= value <= 1.0

    def test_reputation_monotonicity(self, single_window_cfg):
        eps = single_window_cfg.window_weights
        base = ProviderStats(5, 10, 2, 4, 8, 3, 2, 1)
        rep = provider_reputation([base], eps)
        more_managed = ProviderStats(5, 10, 2, 4, 8, 5, 2, 1)
        assert provider_reputation([more_managed], eps) >= rep
        more_unmanaged = ProviderStats(5, 10, 2, 4, 8, 3, 4, 1)
        assert provider_reputation([more_unmanaged], eps) <= rep
        more_unpredicted = ProviderStats(5, 10, 2, 4, 8, 3, 2, 5)
        assert provider_reputation([more_unpredicted], eps) <= rep
        more_available = ProviderStats(8, 10, 2, 4, 8, 3, 2, 1)
        assert provider_reputation([more_available], eps) >= rep

    def test_zero_trust_domains_ignored(self, cfg):
        rng = random.Random(11)
        ctx = random_ctx(rng, cfg)
        relabeled = make_ctx(
            evaluator=StakeholderId(ctx.evaluator.id, "elsewhere"),
            target=StakeholderId(ctx.target.id, "elsewhere-too"),
            provider_stats=ctx.provider_stats,
            offer_stats=ctx.offer_stats,
            recommendations=ctx.recommendations,
            offer_recommendations=ctx.offer_recommendations,
            recommender_histories=ctx.recommender_histories,
            recommender_trust=ctx.recommender_trust,
            evaluator_history=ctx.evaluator_history,
            feedback_counts=ctx.feedback_counts,
        )
        assessor = PeerTrustAssessor()
        assert assessor.assess(ctx, cfg).to_dict() == assessor.assess(relabeled, cfg).to_dict()

    def test_make_assessor(self):
        assert make_assessor("peertrust").name == "peertrust"
        with pytest.raises(ConfigError):
            make_assessor("powertrust")
