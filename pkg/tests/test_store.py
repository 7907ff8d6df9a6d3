from __future__ import annotations

import pytest

from alertgate.errors import SerializationError
from alertgate.store import FileStore, MemoryStore, Record
from tests.conftest import T0


def test_record_line_round_trip():
    record = Record(7, "event", T0, {"b": 1, "a": [2, 3]})
    assert Record.from_line(record.to_line()) == record


def test_record_line_is_canonical():
    line = Record(1, "event", T0, {"b": 1, "a": 2}).to_line()
    assert line == '{"at":"2024-01-01T09:00:00.000Z","data":{"a":2,"b":1},"kind":"event","seq":1}'


def test_unserializable_data_rejected_before_write():
    store = MemoryStore()
    with pytest.raises(SerializationError):
        store.append("event", T0, {"bad": object()})
    assert store.last_seq == 0


def test_memory_store_sequences_from_one():
    store = MemoryStore()
    assert store.last_seq == 0
    first = store.append("event", T0, {})
    assert first.seq == 1
    second = store.append("decision", T0, {"x": 1})
    assert second.seq == 2
    assert [r.seq for r in store.records()] == [1, 2]
    assert [r.seq for r in store.records(after_seq=1)] == [2]


def test_memory_store_truncate_drops_suffix():
    store = MemoryStore()
    for _ in range(5):
        store.append("event", T0, {})
    store.truncate_to(3)
    assert store.last_seq == 3
    assert [r.seq for r in store.records()] == [1, 2, 3]


def test_memory_snapshot_round_trip_detaches_state():
    store = MemoryStore()
    state = {"users": {"u1": {"n": 1}}}
    store.write_snapshot(state, 4, T0)
    state["users"]["u1"]["n"] = 99
    seq, loaded = store.read_snapshot()
    assert seq == 4
    assert loaded == {"users": {"u1": {"n": 1}}}


def test_file_store_appends_and_reads(tmp_path):
    store = FileStore(tmp_path)
    store.append("event", T0, {"a": 1})
    store.append("event", T0, {"a": 2})
    assert [r.data["a"] for r in store.records()] == [1, 2]
    store.close()


def test_file_store_reopen_continues_sequence(tmp_path):
    store = FileStore(tmp_path)
    store.append("event", T0, {})
    store.append("event", T0, {})
    store.close()

    reopened = FileStore(tmp_path)
    assert reopened.last_seq == 2
    third = reopened.append("event", T0, {})
    assert third.seq == 3
    assert [r.seq for r in reopened.records()] == [1, 2, 3]
    reopened.close()


def test_file_store_snapshot_round_trip(tmp_path):
    store = FileStore(tmp_path)
    store.write_snapshot({"k": "v"}, 9, T0)
    assert store.read_snapshot() == (9, {"k": "v"})
    store.close()

    reopened = FileStore(tmp_path)
    assert reopened.read_snapshot() == (9, {"k": "v"})
    reopened.close()


def test_file_store_rejects_unknown_snapshot_version(tmp_path):
    store = FileStore(tmp_path)
    store.write_snapshot({}, 1, T0)
    store.close()
    snapshot_path = tmp_path / "snapshot.json"
    snapshot_path.write_text(
        snapshot_path.read_text(encoding="utf-8").replace('"version": 1', '"version": 99'),
        encoding="utf-8",
    )
    reopened = FileStore(tmp_path)
    with pytest.raises(SerializationError):
        reopened.read_snapshot()
    reopened.close()


def test_file_store_seq_resumes_from_snapshot_without_log(tmp_path):
    store = FileStore(tmp_path)
    store.write_snapshot({"k": 1}, 5, T0)
    store.close()
    (tmp_path / "wal.jsonl").unlink()

    reopened = FileStore(tmp_path)
    assert reopened.last_seq == 5
    assert reopened.append("event", T0, {}).seq == 6
    reopened.close()
