import json

import pytest
from hypothesis import given, strategies as st

from taas.model import (
    ConfigError,
    DeltaMode,
    EventKind,
    ModelConfig,
    OfferType,
    PolicyRule,
    ProductOffer,
    ProviderStats,
    Recommendation,
    StakeholderId,
    StatsError,
    TimeWindowWeights,
    TrustEvent,
    TrustScore,
    validate_config,
    validate_stats,
    window_for_age,
)

OFFER_TOKENS = {"RAN", "SPECTRUM", "VNF_CNF", "SLICE", "EDGE"}


class TestStakeholderId:
    def test_equality_is_id_only(self):
        assert StakeholderId("a", "dom-1") == StakeholderId("a", "dom-2")
        assert StakeholderId("a") != StakeholderId("b")
        assert hash(StakeholderId("a", "x")) == hash(StakeholderId("a", "y"))

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            StakeholderId("")

    def test_round_trip(self):
        sid = StakeholderId("a", "dom-1")
        assert StakeholderId.from_dict(sid.to_dict()) == sid
        assert StakeholderId.from_dict(sid.to_dict()).domain == "dom-1"


class TestOfferType:
    @pytest.mark.parametrize("token", sorted(OFFER_TOKENS))
    def test_accepts_exactly_five_tokens(self, token):
        assert OfferType.parse(token).value == token

    @given(st.text(max_size=12).filter(lambda s: s not in OFFER_TOKENS))
    def test_fuzzed_tokens_fail(self, token):
        with pytest.raises(ValueError):
            OfferType.parse(token)


class TestValidateConfig:
    def test_accepts_documented_example(self):
        cfg = ModelConfig(
            psi=0.5, phi=0.5, alpha=0.7, beta=0.3,
            window_weights=TimeWindowWeights((0.6, 0.3, 0.1)),
        )
        assert validate_config(cfg) is cfg

    def test_weight_sum_violation(self):
        with pytest.raises(ConfigError) as err:
            validate_config(ModelConfig(psi=0.7, phi=0.7))
        assert err.value.code == "WEIGHT_SUM"

    def test_alpha_beta_sum(self):
        with pytest.raises(ConfigError) as err:
            validate_config(ModelConfig(alpha=0.5, beta=0.3))
        assert err.value.code == "WEIGHT_SUM"

    def test_increasing_window_weights_rejected(self):
        with pytest.raises(ConfigError) as err:
            TimeWindowWeights((0.2, 0.3, 0.5))
        assert err.value.code == "WINDOW_WEIGHTS"

    def test_unnormalized_window_weights_rejected(self):
        with pytest.raises(ConfigError) as err:
            TimeWindowWeights((0.6, 0.3))
        assert err.value.code == "WINDOW_WEIGHTS"

    def test_out_of_range_fraction(self):
        with pytest.raises(ConfigError) as err:
            validate_config(ModelConfig(tf_floor=1.4))
        assert err.value.code == "RANGE"

    def test_bad_half_life(self):
        with pytest.raises(ConfigError) as err:
            validate_config(ModelConfig(decay_half_life=0))
        assert err.value.code == "RANGE"

    def test_unknown_assessor(self):
        with pytest.raises(ConfigError):
            validate_config(ModelConfig(assessor="bayes"))

    def test_field_order_independent(self):
        doc = ModelConfig().to_dict()
        reordered = dict(reversed(list(doc.items())))
        assert ModelConfig.from_dict(reordered) == ModelConfig.from_dict(doc)

    def test_unknown_keys_rejected(self):
        doc = ModelConfig().to_dict()
        doc["surprise"] = 1
        with pytest.raises(ConfigError):
            ModelConfig.from_dict(doc)


class TestValidateStats:
    def test_accepts_mixed_tuple(self, mixed_stats):
        assert validate_stats(mixed_stats) is mixed_stats

    def test_available_exceeds_total(self):
        with pytest.raises(StatsError) as err:
            validate_stats(ProviderStats(11, 10, 0, 0, 0, 0, 0, 0))
        assert err.value.code == "COUNTS"

    def test_violations_exceed_predicted(self):
        with pytest.raises(StatsError) as err:
            validate_stats(ProviderStats(1, 2, 1, 2, 4, 3, 2, 0))
        assert err.value.code == "COUNTS"

    def test_negative_count(self):
        with pytest.raises(StatsError):
            validate_stats(ProviderStats(-1, 2, 0, 0, 0, 0, 0, 0))


ids = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd")), min_size=1, max_size=8
)
fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
timestamps = st.integers(min_value=1, max_value=2_000_000_000)


class TestRoundTrips:
    @given(ids, st.sampled_from(sorted(OFFER_TOKENS)), ids, timestamps)
    def test_product_offer(self, offer_id, token, provider, ts):
        offer = ProductOffer(offer_id, StakeholderId(provider, "d1"), OfferType.parse(token), "loc", ts)
        parsed = ProductOffer.from_dict(json.loads(json.dumps(offer.to_dict())))
        assert parsed == offer

    @given(st.lists(st.integers(min_value=0, max_value=100), min_size=8, max_size=8))
    def test_provider_stats(self, counts):
        stats = ProviderStats(*counts, window_index=2)
        assert ProviderStats.from_dict(stats.to_dict()) == stats

    @given(ids, ids, fractions, timestamps)
    def test_recommendation(self, a, b, rating, ts):
        if a == b:
            b = a + "x"
        rec = Recommendation(StakeholderId(a), StakeholderId(b), rating, ts)
        assert Recommendation.from_dict(rec.to_dict()) == rec

    @given(ids, ids, fractions, fractions, fractions, fractions, fractions, timestamps)
    def test_trust_score(self, e, t, s, sat, cr, tf, cf, ts):
        score = TrustScore(
            evaluator=StakeholderId(e, "left"),
            target=StakeholderId(t, "right"),
            score=s, satisfaction=sat, credibility=cr,
            transaction_factor=tf, community_factor=cf,
            version=3, computed_at=ts, offer_id="o-1", cold_start=True,
        )
        assert TrustScore.from_dict(score.to_dict()) == score

    @given(st.sampled_from(list(EventKind)), ids, timestamps, fractions)
    def test_trust_event(self, kind, target, ts, mag):
        event = TrustEvent(kind, StakeholderId(target), ts, mag)
        assert TrustEvent.from_dict(event.to_dict()) == event

    def test_policy_rule(self):
        rule = PolicyRule(EventKind.SLA_VIOLATION, DeltaMode.PUNISH, 0.5)
        assert PolicyRule.from_dict(rule.to_dict()) == rule

    def test_config_round_trip(self):
        cfg = ModelConfig(psi=0.6, phi=0.4, window_weights=TimeWindowWeights((0.7, 0.3)))
        assert ModelConfig.from_dict(cfg.to_dict()) == cfg


class TestInvariants:
    def test_score_fraction_bounds_enforced(self, evaluator, provider):
        with pytest.raises(ValueError):
            TrustScore(
                evaluator=evaluator, target=provider, score=1.2,
                satisfaction=0.5, credibility=0.5, transaction_factor=0.5,
                community_factor=0.5, version=1, computed_at=1,
            )

    def test_self_recommendation_rejected(self):
        with pytest.raises(ValueError):
            Recommendation(StakeholderId("x"), StakeholderId("x"), 0.5, 1)

    def test_event_magnitude_bounds(self, provider):
        with pytest.raises(ValueError):
            TrustEvent(EventKind.SLA_VIOLATION, provider, 10, 1.5)


class TestWindowAssignment:
    @pytest.mark.parametrize(
        "age,expected",
        [(0, 1), (1, 1), (86400, 1), (86401, 2), (172800, 2), (172801, 3)],
    )
    def test_boundaries(self, age, expected):
        assert window_for_age(age, 86400) == expected
