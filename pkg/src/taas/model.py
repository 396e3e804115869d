"""Shared domain types, their validation, and the model configuration.

All types are immutable values and safe to share across threads. Timestamps
are integer seconds UTC everywhere; time windows are always derived from
stored timestamps, never from the wall clock at read time, so every
computation is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Mapping, Optional

WEIGHT_SUM_TOLERANCE = 1e-9


class TrustError(Exception):
    """Base error carrying a stable machine-readable ``code``."""

    code = "INTERNAL"

    def __init__(self, message: str, *, code: str | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class ConfigError(TrustError):
    code = "CONFIG_INVALID"


class StatsError(TrustError):
    code = "COUNTS"


class WindowMismatchError(TrustError):
    code = "WINDOW_MISMATCH"


class EmptyAggregationError(TrustError):
    code = "EMPTY"


class SourceUnavailableError(TrustError):
    code = "SOURCE_UNAVAILABLE"

    def __init__(self, source: str, message: str = "") -> None:
        super().__init__(message or f"source not reachable: {source}")
        self.source = source


class NoRecommendersError(TrustError):
    code = "NO_RECOMMENDERS"


class VersionConflictError(TrustError):
    code = "VERSION_CONFLICT"


class SensitiveFieldError(TrustError):
    code = "SENSITIVE_FIELD"


class NoScoreError(TrustError):
    code = "NO_SCORE"


class NoRuleError(TrustError):
    code = "NO_RULE"


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(frozen=True, eq=False)
class StakeholderId:
    """Opaque stakeholder identity.

    ``domain`` is a deployment label carried for audit fixtures only; it is
    never read by any scoring path and is excluded from equality, so two ids
    with the same ``id`` string are the same stakeholder regardless of where
    they live.
    """

    id: str
    domain: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("stakeholder id must be non-empty")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StakeholderId) and self.id == other.id

    def __hash__(self) -> int:
        return hash(self.id)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "domain": self.domain}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "StakeholderId":
        return cls(id=str(doc["id"]), domain=str(doc.get("domain", "")))


class OfferType(Enum):
    """The five marketplace offer categories. The set is closed."""

    RAN = "RAN"
    SPECTRUM = "SPECTRUM"
    VNF_CNF = "VNF_CNF"
    SLICE = "SLICE"
    EDGE = "EDGE"

    @classmethod
    def parse(cls, token: str) -> "OfferType":
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown offer type: {token!r}") from None


class EventKind(Enum):
    SECURITY_THREAT = "SECURITY_THREAT"
    POLICY_CHANGE = "POLICY_CHANGE"
    SLA_VIOLATION = "SLA_VIOLATION"
    EXECUTION_FAILURE = "EXECUTION_FAILURE"
    SUCCESSFUL_INTERACTION = "SUCCESSFUL_INTERACTION"
    DECAY_TICK = "DECAY_TICK"

    @classmethod
    def parse(cls, token: str) -> "EventKind":
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown event kind: {token!r}") from None


class DeltaMode(Enum):
    REWARD = "REWARD"
    PUNISH = "PUNISH"


@dataclass(frozen=True)
class PolicyRule:
    """How one event kind moves a stored trust score."""

    event_kind: EventKind
    delta_mode: DeltaMode
    weight: float

    def __post_init__(self) -> None:
        _check_fraction("policy weight", self.weight)

    def to_dict(self) -> dict[str, Any]:
        return {
            "event_kind": self.event_kind.value,
            "delta_mode": self.delta_mode.value,
            "weight": self.weight,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PolicyRule":
        return cls(
            event_kind=EventKind.parse(doc["event_kind"]),
            delta_mode=DeltaMode(doc["delta_mode"]),
            weight=float(doc["weight"]),
        )


@dataclass(frozen=True)
class ProductOffer:
    """A marketplace offer listed by a provider."""

    offer_id: str
    provider: StakeholderId
    offer_type: OfferType
    location: str
    created_at: int

    def __post_init__(self) -> None:
        if not self.offer_id:
            raise ValueError("offer_id must be non-empty")
        if self.created_at <= 0:
            raise ValueError("created_at must be > 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "offer_id": self.offer_id,
            "provider": self.provider.id,
            "provider_domain": self.provider.domain,
            "offer_type": self.offer_type.value,
            "location": self.location,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ProductOffer":
        return cls(
            offer_id=str(doc["offer_id"]),
            provider=StakeholderId(str(doc["provider"]), str(doc.get("provider_domain", ""))),
            offer_type=OfferType.parse(doc["offer_type"]),
            location=str(doc.get("location", "")),
            created_at=int(doc["created_at"]),
        )


# ProviderStats field order used by serialization and by the scoring kernels.
STAT_FIELDS = (
    "available_assets",
    "total_assets",
    "available_assets_location",
    "total_assets_location",
    "predicted_violations",
    "managed_violations",
    "unmanaged_violations",
    "unpredicted_violations",
)


@dataclass(frozen=True, slots=True)
class ProviderStats:
    """Per-window asset and SLA counters for one provider.

    window_index is 1 for the newest window and grows with age. Counters may
    be constructed unvalidated (raw ingest); run validate_stats before
    scoring.
    """

    available_assets: int
    total_assets: int
    available_assets_location: int
    total_assets_location: int
    predicted_violations: int
    managed_violations: int
    unmanaged_violations: int
    unpredicted_violations: int
    window_index: int = 1

    def as_tuple(self) -> tuple[int, int, int, int, int, int, int, int]:
        return (
            self.available_assets,
            self.total_assets,
            self.available_assets_location,
            self.total_assets_location,
            self.predicted_violations,
            self.managed_violations,
            self.unmanaged_violations,
            self.unpredicted_violations,
        )

    def to_dict(self) -> dict[str, Any]:
        doc = {name: getattr(self, name) for name in STAT_FIELDS}
        doc["window_index"] = self.window_index
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ProviderStats":
        return cls(
            **{name: int(doc[name]) for name in STAT_FIELDS},
            window_index=int(doc.get("window_index", 1)),
        )


def validate_stats(s: ProviderStats) -> ProviderStats:
    """Check the counter invariants; return the stats unchanged when sound."""
    for name in STAT_FIELDS:
        if getattr(s, name) < 0:
            raise StatsError(f"{name} must be >= 0", code="COUNTS")
    if s.window_index < 1:
        raise StatsError("window_index must be >= 1", code="COUNTS")
    if s.available_assets > s.total_assets:
        raise StatsError("available_assets exceeds total_assets", code="COUNTS")
    if s.available_assets_location > s.total_assets_location:
        raise StatsError(
            "available_assets_location exceeds total_assets_location", code="COUNTS"
        )
    if s.managed_violations + s.unmanaged_violations > s.predicted_violations:
        raise StatsError(
            "managed + unmanaged violations exceed predicted_violations", code="COUNTS"
        )
    return s


@dataclass(frozen=True)
class TimeWindowWeights:
    """Relevance weights per time window, newest first and summing to 1."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        self.validate()

    def validate(self) -> "TimeWindowWeights":
        if not self.weights:
            raise ConfigError("at least one window weight required", code="WINDOW_WEIGHTS")
        for w in self.weights:
            if not 0.0 < w <= 1.0:
                raise ConfigError(
                    f"window weight {w!r} outside (0, 1]", code="WINDOW_WEIGHTS"
                )
        if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ConfigError("window weights must sum to 1", code="WINDOW_WEIGHTS")
        for older, newer in zip(self.weights[1:], self.weights):
            if older > newer + 1e-12:
                raise ConfigError(
                    "window weights must not increase with age", code="WINDOW_WEIGHTS"
                )
        return self

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class Recommendation:
    """A third-party rating of a target stakeholder."""

    recommender: StakeholderId
    target: StakeholderId
    rating: float
    issued_at: int
    offer_type: Optional[OfferType] = None

    def __post_init__(self) -> None:
        _check_fraction("rating", self.rating)
        if self.recommender == self.target:
            raise ValueError("recommender must differ from target")

    def to_dict(self) -> dict[str, Any]:
        return {
            "recommender": self.recommender.id,
            "target": self.target.id,
            "rating": self.rating,
            "issued_at": self.issued_at,
            "offer_type": self.offer_type.value if self.offer_type else None,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Recommendation":
        raw_type = doc.get("offer_type")
        return cls(
            recommender=StakeholderId(str(doc["recommender"])),
            target=StakeholderId(str(doc["target"])),
            rating=float(doc["rating"]),
            issued_at=int(doc["issued_at"]),
            offer_type=OfferType.parse(raw_type) if raw_type else None,
        )


@dataclass(frozen=True, slots=True)
class TrustScore:
    """A versioned trust assessment of a target by an evaluator.

    Serialized scores carry bare stakeholder ids only; domain labels never
    enter a score record.
    """

    evaluator: StakeholderId
    target: StakeholderId
    score: float
    satisfaction: float
    credibility: float
    transaction_factor: float
    community_factor: float
    version: int
    computed_at: int
    offer_id: Optional[str] = None
    cold_start: bool = False

    def __post_init__(self) -> None:
        # constructed in the scoring hot loop; validate without reflection
        if not (
            0.0 <= self.score <= 1.0
            and 0.0 <= self.satisfaction <= 1.0
            and 0.0 <= self.credibility <= 1.0
            and 0.0 <= self.transaction_factor <= 1.0
            and 0.0 <= self.community_factor <= 1.0
        ):
            raise ValueError(f"score components must be in [0, 1]: {self}")
        if self.version < 1:
            raise ValueError("version must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "evaluator": self.evaluator.id,
            "target": self.target.id,
            "offer_id": self.offer_id,
            "score": self.score,
            "satisfaction": self.satisfaction,
            "credibility": self.credibility,
            "transaction_factor": self.transaction_factor,
            "community_factor": self.community_factor,
            "version": self.version,
            "computed_at": self.computed_at,
            "cold_start": self.cold_start,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrustScore":
        return cls(
            evaluator=StakeholderId(str(doc["evaluator"])),
            target=StakeholderId(str(doc["target"])),
            offer_id=doc.get("offer_id"),
            score=float(doc["score"]),
            satisfaction=float(doc["satisfaction"]),
            credibility=float(doc["credibility"]),
            transaction_factor=float(doc["transaction_factor"]),
            community_factor=float(doc["community_factor"]),
            version=int(doc["version"]),
            computed_at=int(doc["computed_at"]),
            cold_start=bool(doc.get("cold_start", False)),
        )


@dataclass(frozen=True)
class TrustEvent:
    """A runtime trigger that rewards, punishes, or decays a stored score."""

    kind: EventKind
    target: StakeholderId
    occurred_at: int
    magnitude: float
    offer_id: Optional[str] = None

    def __post_init__(self) -> None:
        _check_fraction("magnitude", self.magnitude)
        if self.occurred_at <= 0:
            raise ValueError("occurred_at must be > 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "target": self.target.id,
            "offer_id": self.offer_id,
            "occurred_at": self.occurred_at,
            "magnitude": self.magnitude,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrustEvent":
        return cls(
            kind=EventKind.parse(doc["kind"]),
            target=StakeholderId(str(doc["target"])),
            offer_id=doc.get("offer_id"),
            occurred_at=int(doc["occurred_at"]),
            magnitude=float(doc["magnitude"]),
        )


@dataclass(frozen=True)
class ModelConfig:
    """Every tunable weight of the scoring model.

    psi/phi blend provider versus offer satisfaction; alpha/beta blend the
    direct-experience term against the community factor. window_seconds is
    the width W of each relevance window: window k covers the half-open age
    interval ((k-1)*W, k*W] before "now".
    """

    psi: float = 0.5
    phi: float = 0.5
    alpha: float = 0.7
    beta: float = 0.3
    window_weights: TimeWindowWeights = field(
        default_factory=lambda: TimeWindowWeights((0.6, 0.3, 0.1))
    )
    decay_half_life: float = 7 * 86400.0
    recommender_threshold: float = 0.6
    recommender_list_size: int = 10
    tf_floor: float = 0.5
    tf_reference_count: int = 20
    cold_start_prior: float = 0.5
    window_seconds: float = 86400.0
    assessor: str = "peertrust"

    @property
    def num_windows(self) -> int:
        return len(self.window_weights)

    def to_dict(self) -> dict[str, Any]:
        return {
            "psi": self.psi,
            "phi": self.phi,
            "alpha": self.alpha,
            "beta": self.beta,
            "window_weights": list(self.window_weights.weights),
            "decay_half_life": self.decay_half_life,
            "recommender_threshold": self.recommender_threshold,
            "recommender_list_size": self.recommender_list_size,
            "tf_floor": self.tf_floor,
            "tf_reference_count": self.tf_reference_count,
            "cold_start_prior": self.cold_start_prior,
            "window_seconds": self.window_seconds,
            "assessor": self.assessor,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs: dict[str, Any] = dict(doc)
        if "window_weights" in kwargs:
            kwargs["window_weights"] = TimeWindowWeights(tuple(kwargs["window_weights"]))
        return cls(**kwargs)


def validate_config(cfg: ModelConfig) -> ModelConfig:
    """Check every model invariant; return the config unchanged when sound.

    Validation is a pure function of the config value, so it is deterministic
    and independent of how the fields arrived.
    """
    for name in (
        "psi",
        "phi",
        "alpha",
        "beta",
        "recommender_threshold",
        "tf_floor",
        "cold_start_prior",
    ):
        value = getattr(cfg, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name} must be in [0, 1], got {value!r}", code="RANGE")
    if abs(cfg.psi + cfg.phi - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ConfigError("psi + phi must equal 1", code="WEIGHT_SUM")
    if abs(cfg.alpha + cfg.beta - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ConfigError("alpha + beta must equal 1", code="WEIGHT_SUM")
    cfg.window_weights.validate()
    if cfg.decay_half_life <= 0:
        raise ConfigError("decay_half_life must be > 0", code="RANGE")
    if cfg.window_seconds <= 0:
        raise ConfigError("window_seconds must be > 0", code="RANGE")
    if cfg.recommender_list_size < 1:
        raise ConfigError("recommender_list_size must be >= 1", code="RANGE")
    if cfg.tf_reference_count < 1:
        raise ConfigError("tf_reference_count must be >= 1", code="RANGE")
    if cfg.assessor != "peertrust":
        raise ConfigError(f"unknown assessor: {cfg.assessor!r}")
    return cfg


DEFAULT_POLICIES: dict[EventKind, PolicyRule] = {
    EventKind.SECURITY_THREAT: PolicyRule(EventKind.SECURITY_THREAT, DeltaMode.PUNISH, 0.8),
    EventKind.SLA_VIOLATION: PolicyRule(EventKind.SLA_VIOLATION, DeltaMode.PUNISH, 0.5),
    EventKind.EXECUTION_FAILURE: PolicyRule(EventKind.EXECUTION_FAILURE, DeltaMode.PUNISH, 0.4),
    EventKind.POLICY_CHANGE: PolicyRule(EventKind.POLICY_CHANGE, DeltaMode.PUNISH, 0.2),
    EventKind.SUCCESSFUL_INTERACTION: PolicyRule(
        EventKind.SUCCESSFUL_INTERACTION, DeltaMode.REWARD, 0.3
    ),
}


def window_for_age(age_seconds: float, window_seconds: float) -> int:
    """Map an age to its 1-based window index; ages <= 0 land in window 1."""
    if age_seconds <= window_seconds:
        return 1
    full = int(age_seconds // window_seconds)
    if age_seconds == full * window_seconds:
        return full
    return full + 1
