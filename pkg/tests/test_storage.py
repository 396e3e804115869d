"""Private store versioning and Data Lake contracts."""

import json
import threading

import pytest

from taas.model import (
    OfferType,
    SensitiveFieldError,
    StakeholderId,
    TrustScore,
    VersionConflictError,
)
from taas.storage import DataLake, DataLakeEntry, PrivateStore

EVAL = StakeholderId("consumer-0")
PROV = StakeholderId("prov-000")


def score(version, value=0.8, offer_id=None):
    return TrustScore(
        evaluator=EVAL, target=PROV, score=value, satisfaction=value,
        credibility=0.5, transaction_factor=0.5, community_factor=0.5,
        version=version, computed_at=1_700_000_000 + version, offer_id=offer_id,
    )


class TestPrivateStore:
    def test_first_put_is_version_one(self):
        store = PrivateStore()
        assert store.put_trust_score(score(1)) == 1
        assert store.get_latest_score(EVAL, PROV).version == 1

    def test_history_retained(self):
        store = PrivateStore()
        store.put_trust_score(score(1, 0.8))
        store.put_trust_score(score(2, 0.6))
        assert store.get_latest_score(EVAL, PROV).score == 0.6
        history = store.get_score_history(EVAL, PROV)
        assert [s.version for s in history] == [1, 2]
        assert history[0].score == 0.8

    def test_version_gap_rejected(self):
        store = PrivateStore()
        store.put_trust_score(score(1))
        with pytest.raises(VersionConflictError):
            store.put_trust_score(score(3))

    def test_concurrent_writers_exactly_one_winner(self):
        store = PrivateStore()
        barrier = threading.Barrier(2)
        outcomes = []

        def writer():
            contender = score(store.next_version(EVAL, PROV))
            barrier.wait()
            try:
                store.put_trust_score(contender)
                outcomes.append("ok")
            except VersionConflictError:
                outcomes.append("conflict")

        threads = [threading.Thread(target=writer) for _ in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(outcomes) == ["conflict", "ok"]
        assert store.get_latest_score(EVAL, PROV).version == 1

    def test_unknown_pair_absent(self):
        assert PrivateStore().get_latest_score(EVAL, PROV) is None

    def test_offer_scope_distinct_from_provider_scope(self):
        store = PrivateStore()
        store.put_trust_score(score(1))  # provider-level only
        assert store.get_latest_score(EVAL, PROV, "offer-1") is None
        assert store.get_latest_score(EVAL, PROV) is not None

    def test_round_trip_bit_identical(self):
        store = PrivateStore()
        original = score(1, 0.123456789)
        store.put_trust_score(original)
        fetched = store.get_latest_score(EVAL, PROV)
        assert fetched == original
        assert fetched.to_dict() == original.to_dict()

    def test_journal_replay(self, tmp_path):
        path = tmp_path / "store.jsonl"
        store = PrivateStore(path)
        store.put_trust_score(score(1, 0.8))
        store.put_trust_score(score(2, 0.6))
        reopened = PrivateStore(path)
        assert reopened.get_latest_score(EVAL, PROV).to_dict() == score(2, 0.6).to_dict()
        assert len(reopened.get_score_history(EVAL, PROV)) == 2


class TestDataLakeAppend:
    def test_first_sequence_is_one(self):
        lake = DataLake()
        assert lake.append(reporter=EVAL, target=PROV, rating=0.5,
                           interaction_id="i1", recorded_at=100) == 1

    def test_thousand_appends(self, tmp_path):
        path = tmp_path / "lake.jsonl"
        lake = DataLake(path)
        seqs = [
            lake.append(reporter=EVAL, target=PROV, rating=0.5,
                        interaction_id=f"i{n}", recorded_at=100 + n)
            for n in range(1000)
        ]
        assert seqs == list(range(1, 1001))
        assert len(path.read_text(encoding="utf-8").splitlines()) == 1000

    def test_extra_field_rejected(self):
        lake = DataLake()
        record = {
            "reporter": "consumer-0", "target": "prov-000", "offer_type": None,
            "rating": 0.5, "interaction_id": "x", "recorded_at": 100,
            "sla_details": {"secret": True},
        }
        with pytest.raises(SensitiveFieldError):
            lake.append_record(record)
        assert len(lake) == 0

    def test_missing_field_rejected(self):
        with pytest.raises(SensitiveFieldError):
            DataLake().append_record({"reporter": "a", "target": "b"})

    def test_well_formed_record_accepted(self):
        lake = DataLake()
        seq = lake.append_record({
            "reporter": "consumer-0", "target": "prov-000", "offer_type": "RAN",
            "rating": 0.5, "interaction_id": "x", "recorded_at": 100,
        })
        assert seq == 1

    def test_rating_normalized_to_four_digits(self):
        lake = DataLake()
        lake.append(reporter=EVAL, target=PROV, rating=0.123456789,
                    interaction_id="x", recorded_at=1)
        assert lake.query(PROV)[0].rating == 0.1235


class TestDataLakeQuery:
    def fill(self, lake):
        other = StakeholderId("prov-zzz")
        lake.append(reporter=EVAL, target=PROV, rating=0.1, interaction_id="a",
                    recorded_at=100)
        lake.append(reporter=EVAL, target=PROV, rating=0.2, interaction_id="b",
                    recorded_at=200, offer_type=OfferType.SPECTRUM)
        lake.append(reporter=EVAL, target=other, rating=0.3, interaction_id="c",
                    recorded_at=300)
        lake.append(reporter=EVAL, target=PROV, rating=0.4, interaction_id="d",
                    recorded_at=400, offer_type=OfferType.SPECTRUM)
        lake.append(reporter=EVAL, target=PROV, rating=0.5, interaction_id="e",
                    recorded_at=500, offer_type=OfferType.EDGE)

    def test_target_filter_in_sequence_order(self):
        lake = DataLake()
        self.fill(lake)
        got = lake.query(PROV)
        assert [e.interaction_id for e in got] == ["a", "b", "d", "e"]

    def test_future_since_is_empty(self):
        lake = DataLake()
        self.fill(lake)
        assert lake.query(PROV, since=10_000) == []

    def test_offer_type_filter(self):
        lake = DataLake()
        self.fill(lake)
        got = lake.query(PROV, offer_type=OfferType.SPECTRUM)
        assert [e.interaction_id for e in got] == ["b", "d"]

    def test_snapshot_isolation(self):
        lake = DataLake()
        self.fill(lake)
        snap = lake.snapshot()
        lake.append(reporter=EVAL, target=PROV, rating=0.9, interaction_id="late",
                    recorded_at=600)
        assert [e.interaction_id for e in snap.query(PROV)] == ["a", "b", "d", "e"]
        assert len(list(snap.scan())) == 5
        assert len(lake) == 6


class TestDataLakeLog:
    def test_replay_reproduces_queries(self, tmp_path):
        path = tmp_path / "lake.jsonl"
        lake = DataLake(path)
        TestDataLakeQuery().fill(lake)
        reopened = DataLake(path)
        assert [e.to_line() for e in reopened.scan()] == [e.to_line() for e in lake.scan()]
        assert [e.interaction_id for e in reopened.query(PROV, offer_type=OfferType.SPECTRUM)] == ["b", "d"]

    def test_file_format_round_trips_bit_exactly(self, tmp_path):
        path = tmp_path / "lake.jsonl"
        lake = DataLake(path)
        TestDataLakeQuery().fill(lake)
        raw = path.read_bytes()
        reserialized = "".join(
            DataLakeEntry.from_line(line).to_line() + "\n"
            for line in raw.decode("utf-8").splitlines()
        ).encode("utf-8")
        assert reserialized == raw

    def test_line_schema_keys_exact(self, tmp_path):
        path = tmp_path / "lake.jsonl"
        lake = DataLake(path)
        lake.append(reporter=EVAL, target=PROV, rating=0.25, interaction_id="x",
                    recorded_at=7, offer_type=OfferType.RAN)
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert list(doc) == ["seq", "reporter", "target", "offer_type", "rating",
                             "interaction_id", "recorded_at"]
        assert doc["offer_type"] == "RAN"

    def test_provider_level_offer_type_is_null(self, tmp_path):
        path = tmp_path / "lake.jsonl"
        DataLake(path).append(reporter=EVAL, target=PROV, rating=1.0,
                              interaction_id="x", recorded_at=7)
        assert json.loads(path.read_text(encoding="utf-8"))["offer_type"] is None


class TestSensitivitySeparation:
    def test_private_records_never_reachable_via_lake(self):
        """Key-space audit: nothing written only to the private store shows up
        in any Data Lake read."""
        store = PrivateStore()
        lake = DataLake()
        secret_eval = StakeholderId("secret-evaluator")
        secret_target = StakeholderId("secret-target")
        store.put_trust_score(TrustScore(
            evaluator=secret_eval, target=secret_target, score=0.42,
            satisfaction=0.42, credibility=0.42, transaction_factor=0.5,
            community_factor=0.42, version=1, computed_at=123,
        ))
        lake.append(reporter=EVAL, target=PROV, rating=0.5, interaction_id="x",
                    recorded_at=1)

        seen_ids = set()
        for entry in lake.scan():
            seen_ids.add(entry.reporter.id)
            seen_ids.add(entry.target.id)
        assert "secret-evaluator" not in seen_ids
        assert "secret-target" not in seen_ids
        assert lake.query(secret_target) == []
        # the lake's wire schema has no field that could carry score payloads
        line = json.loads(next(iter(lake.scan())).to_line())
        assert not {"score", "credibility", "version"} & set(line)
