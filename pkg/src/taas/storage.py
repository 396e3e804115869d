"""Dual persistence: a private versioned store and a shared Data Lake log.

The private store keeps full trust-score records (and policy rules) per
instance under optimistic versioning; nothing in it is ever exposed through
Data Lake queries. The Data Lake is an append-only newline-delimited JSON
log of non-sensitive feedback entries; the log file is the source of truth
and the in-memory index is rebuilt from it on open.

Data Lake line format (bit-exact): one UTF-8 JSON object per line with keys
exactly {"seq","reporter","target","offer_type","rating","interaction_id",
"recorded_at"}; offer_type is null for provider-level feedback; rating is a
decimal with at most 4 fraction digits.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional, Sequence

from taas.model import (
    EventKind,
    OfferType,
    PolicyRule,
    SensitiveFieldError,
    StakeholderId,
    TrustScore,
    VersionConflictError,
)

DATALAKE_KEYS = (
    "seq",
    "reporter",
    "target",
    "offer_type",
    "rating",
    "interaction_id",
    "recorded_at",
)


@dataclass(frozen=True)
class DataLakeEntry:
    """One non-sensitive feedback record in the shared log."""

    reporter: StakeholderId
    target: StakeholderId
    rating: float
    interaction_id: str
    recorded_at: int
    offer_type: Optional[OfferType] = None
    sequence: int = 0

    def to_line(self) -> str:
        return json.dumps(
            {
                "seq": self.sequence,
                "reporter": self.reporter.id,
                "target": self.target.id,
                "offer_type": self.offer_type.value if self.offer_type else None,
                "rating": self.rating,
                "interaction_id": self.interaction_id,
                "recorded_at": self.recorded_at,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_line(cls, line: str) -> "DataLakeEntry":
        doc = json.loads(line)
        return cls.from_record(doc, sequence=int(doc["seq"]))

    @classmethod
    def from_record(cls, doc: Mapping[str, Any], sequence: int) -> "DataLakeEntry":
        raw_type = doc.get("offer_type")
        return cls(
            reporter=StakeholderId(str(doc["reporter"])),
            target=StakeholderId(str(doc["target"])),
            offer_type=OfferType.parse(raw_type) if raw_type else None,
            rating=round(float(doc["rating"]), 4),
            interaction_id=str(doc["interaction_id"]),
            recorded_at=int(doc["recorded_at"]),
            sequence=sequence,
        )


def _score_key(evaluator: StakeholderId, target: StakeholderId, offer_id: str | None) -> str:
    return f"{evaluator.id}/{target.id}/{offer_id or '_'}"


class PrivateStore:
    """Embedded versioned key-value store for one engine instance.

    Keys are "(evaluator)/(target)/(offer_id|_)"; each key holds its full
    version history. Writes use optimistic versioning: a put must carry
    exactly latest+1 or it fails with VERSION_CONFLICT and the caller
    retries. When a path is given, every accepted write is appended to a
    JSON-lines journal that is replayed on open.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self._scores: dict[str, list[TrustScore]] = {}
        self._policies: dict[EventKind, PolicyRule] = {}
        self._lock = threading.Lock()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self._path is not None
        with self._path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                if doc.get("kind") == "policy":
                    rule = PolicyRule.from_dict(doc["value"])
                    self._policies[rule.event_kind] = rule
                else:
                    score = TrustScore.from_dict(doc["value"])
                    self._scores.setdefault(
                        _score_key(score.evaluator, score.target, score.offer_id), []
                    ).append(score)

    def _journal(self, kind: str, value: dict[str, Any]) -> None:
        if self._path is None:
            return
        with self._path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"kind": kind, "value": value}, separators=(",", ":")) + "\n")

    def put_trust_score(self, score: TrustScore) -> int:
        """Persist a score at exactly the next version; returns the version."""
        key = _score_key(score.evaluator, score.target, score.offer_id)
        with self._lock:
            history = self._scores.setdefault(key, [])
            expected = history[-1].version + 1 if history else 1
            if score.version != expected:
                raise VersionConflictError(
                    f"version {score.version} stale for {key}, expected {expected}"
                )
            history.append(score)
            self._journal("score", score.to_dict())
            return score.version

    def get_latest_score(
        self,
        evaluator: StakeholderId,
        target: StakeholderId,
        offer_id: str | None = None,
    ) -> TrustScore | None:
        history = self._scores.get(_score_key(evaluator, target, offer_id))
        return history[-1] if history else None

    def get_score_history(
        self,
        evaluator: StakeholderId,
        target: StakeholderId,
        offer_id: str | None = None,
    ) -> tuple[TrustScore, ...]:
        return tuple(self._scores.get(_score_key(evaluator, target, offer_id), ()))

    def next_version(
        self,
        evaluator: StakeholderId,
        target: StakeholderId,
        offer_id: str | None = None,
    ) -> int:
        history = self._scores.get(_score_key(evaluator, target, offer_id))
        return history[-1].version + 1 if history else 1

    def put_policies(self, rules: Mapping[EventKind, PolicyRule]) -> None:
        with self._lock:
            for rule in rules.values():
                self._policies[rule.event_kind] = rule
                self._journal("policy", rule.to_dict())

    def get_policies(self) -> dict[EventKind, PolicyRule]:
        return dict(self._policies)

    def score_keys(self) -> tuple[str, ...]:
        return tuple(self._scores.keys())


class DataLakeView:
    """Read-only snapshot of the Data Lake bounded at a sequence number.

    Reads are lock-free: entries are only ever appended, so capturing the
    newest sequence is a consistent cut. Targeted queries go through the
    lake's indexes; scan() is the deliberately exhaustive full pass used by
    the cold-start path.
    """

    def __init__(self, lake: "DataLake", max_seq: int) -> None:
        self._lake = lake
        self._max_seq = max_seq

    @property
    def max_sequence(self) -> int:
        return self._max_seq

    def _cut(self, entries: Sequence[DataLakeEntry]) -> list[DataLakeEntry]:
        out = []
        for entry in entries:
            if entry.sequence > self._max_seq:
                break
            out.append(entry)
        return out

    def scan(self) -> Iterator[DataLakeEntry]:
        """Full pass over the log in sequence order (cold-start path)."""
        for entry in self._lake._entries:
            if entry.sequence > self._max_seq:
                break
            yield entry

    def query(
        self,
        target: StakeholderId,
        offer_type: OfferType | None = None,
        since: int | None = None,
    ) -> list[DataLakeEntry]:
        """Matching entries about a target, in sequence order."""
        return [
            e
            for e in self._cut(self._lake._by_target.get(target.id, ()))
            if (offer_type is None or e.offer_type == offer_type)
            and (since is None or e.recorded_at >= since)
        ]

    def entries_by_reporter(self, reporter: StakeholderId) -> list[DataLakeEntry]:
        return self._cut(self._lake._by_reporter.get(reporter.id, ()))

    def reporters_for(self, target: StakeholderId) -> list[StakeholderId]:
        """Distinct reporters about a target, most recent opinion first."""
        latest: dict[str, tuple[int, int]] = {}
        for entry in self.query(target):
            latest[entry.reporter.id] = (entry.recorded_at, entry.sequence)
        ordered = sorted(latest.items(), key=lambda kv: (-kv[1][0], kv[0]))
        return [StakeholderId(rid) for rid, _ in ordered]

    def __len__(self) -> int:
        return sum(1 for _ in self.scan())


class DataLake:
    """Shared append-only feedback log with indexed snapshot reads."""

    def __init__(self, path: str | Path | None = None) -> None:
        self._entries: list[DataLakeEntry] = []
        self._by_target: dict[str, list[DataLakeEntry]] = {}
        self._by_reporter: dict[str, list[DataLakeEntry]] = {}
        self._append_lock = threading.Lock()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            with self._path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._index(DataLakeEntry.from_line(line))

    def _index(self, entry: DataLakeEntry) -> None:
        self._entries.append(entry)
        self._by_target.setdefault(entry.target.id, []).append(entry)
        self._by_reporter.setdefault(entry.reporter.id, []).append(entry)

    def append(
        self,
        reporter: StakeholderId,
        target: StakeholderId,
        rating: float,
        interaction_id: str,
        recorded_at: int,
        offer_type: OfferType | None = None,
    ) -> int:
        """Durably append one entry; returns its assigned sequence number."""
        with self._append_lock:
            entry = DataLakeEntry(
                reporter=reporter,
                target=target,
                offer_type=offer_type,
                rating=round(float(rating), 4),
                interaction_id=interaction_id,
                recorded_at=recorded_at,
                sequence=self._entries[-1].sequence + 1 if self._entries else 1,
            )
            if self._path is not None:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(entry.to_line() + "\n")
            self._index(entry)
            return entry.sequence

    def append_record(self, record: Mapping[str, Any]) -> int:
        """Append from a wire-format mapping, enforcing the exact schema.

        Any key outside the public schema is rejected: extra fields are how
        sensitive payloads would leak into the shared log.
        """
        allowed = set(DATALAKE_KEYS) - {"seq"}
        extra = sorted(set(record) - allowed)
        if extra:
            raise SensitiveFieldError(
                f"fields not in the public schema: {', '.join(extra)}"
            )
        missing = sorted(allowed - set(record))
        if missing:
            raise SensitiveFieldError(f"missing required fields: {', '.join(missing)}")
        entry = DataLakeEntry.from_record(record, sequence=0)
        return self.append(
            reporter=entry.reporter,
            target=entry.target,
            rating=entry.rating,
            interaction_id=entry.interaction_id,
            recorded_at=entry.recorded_at,
            offer_type=entry.offer_type,
        )

    def snapshot(self) -> DataLakeView:
        entries = self._entries
        max_seq = entries[-1].sequence if entries else 0
        return DataLakeView(self, max_seq)

    # Convenience pass-throughs over a fresh snapshot.
    def query(
        self,
        target: StakeholderId,
        offer_type: OfferType | None = None,
        since: int | None = None,
    ) -> list[DataLakeEntry]:
        out = self._by_target.get(target.id, ())
        return [
            e
            for e in out
            if (offer_type is None or e.offer_type == offer_type)
            and (since is None or e.recorded_at >= since)
        ]

    def scan(self) -> Iterator[DataLakeEntry]:
        return self.snapshot().scan()

    def entries_by_reporter(self, reporter: StakeholderId) -> list[DataLakeEntry]:
        return list(self._by_reporter.get(reporter.id, ()))

    def reporters_for(self, target: StakeholderId) -> list[StakeholderId]:
        return self.snapshot().reporters_for(target)

    def __len__(self) -> int:
        return len(self._entries)
