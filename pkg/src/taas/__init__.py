"""Trust-as-a-Service: reputation-based trust scoring for marketplace offers.

The package scores resource/service providers and their product offers from
direct interaction history, community recommendations weighted by recommender
credibility, and context factors, then keeps the scores alive through an
event-driven reward/punishment engine with time decay.
"""

from taas.model import (
    EventKind,
    ModelConfig,
    OfferType,
    PolicyRule,
    ProductOffer,
    ProviderStats,
    Recommendation,
    StakeholderId,
    TimeWindowWeights,
    TrustError,
    TrustEvent,
    TrustScore,
    validate_config,
    validate_stats,
)

__version__ = "0.1.0"

__all__ = [
    "EventKind",
    "ModelConfig",
    "OfferType",
    "PolicyRule",
    "ProductOffer",
    "ProviderStats",
    "Recommendation",
    "StakeholderId",
    "TimeWindowWeights",
    "TrustError",
    "TrustEvent",
    "TrustScore",
    "validate_config",
    "validate_stats",
    "__version__",
]
