from __future__ import annotations

import json
from datetime import timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alertgate.clock import format_ts
from alertgate.errors import NonPositiveWindow, UnsortedInput
from alertgate.ingestion import (
    RateEstimate,
    WatcherConfig,
    WatcherKind,
    poll_interval,
    read_replay_file,
    update_rate,
)
from tests.conftest import T0


def make_estimate(rate: float = 0.0, beta: float = 0.2) -> RateEstimate:
    return RateEstimate(source_id="s1", ewma_rate=rate, last_updated=T0, beta=beta)


def test_watcher_config_validation():
    WatcherConfig("w1", WatcherKind.WEBHOOK)
    WatcherConfig("w2", WatcherKind.POLL, endpoint="http://example.test/events", base_interval=timedelta(seconds=30))
    WatcherConfig("w3", WatcherKind.REPLAY, path="events.jsonl")
    with pytest.raises(ValueError):
        WatcherConfig("w4", "carrier-pigeon")
    with pytest.raises(ValueError):
        WatcherConfig("w5", WatcherKind.POLL, endpoint="http://example.test")
    with pytest.raises(ValueError):
        WatcherConfig("w6", WatcherKind.REPLAY)


def test_watcher_config_round_trip():
    cfg = WatcherConfig("w2", WatcherKind.POLL, endpoint="http://example.test/e", base_interval=timedelta(seconds=30))
    assert WatcherConfig.from_dict(cfg.to_dict()) == cfg


def test_update_rate_zero_fixed_point():
    updated = update_rate(make_estimate(0.0), 0, timedelta(seconds=10), T0)
    assert updated.ewma_rate == 0.0


def test_update_rate_blends_observation():
    # (1-0.2)*0 + 0.2*(10/10) = 0.2
    updated = update_rate(make_estimate(0.0), 10, timedelta(seconds=10), T0)
    assert updated.ewma_rate == pytest.approx(0.2)
    # (1-0.2)*1 + 0.2*0 = 0.8
    updated = update_rate(make_estimate(1.0), 0, timedelta(seconds=10), T0)
    assert updated.ewma_rate == pytest.approx(0.8)


def test_update_rate_rejects_bad_window():
    with pytest.raises(NonPositiveWindow):
        update_rate(make_estimate(), 1, timedelta(0), T0)
    with pytest.raises(ValueError):
        update_rate(make_estimate(), -1, timedelta(seconds=1), T0)


@given(
    st.floats(min_value=0.0, max_value=100.0),
    st.integers(min_value=0, max_value=1000),
    st.integers(min_value=0, max_value=1000),
)
def test_update_rate_is_monotone_in_count(rate, low, extra):
    window = timedelta(seconds=10)
    a = update_rate(make_estimate(rate), low, window, T0)
    b = update_rate(make_estimate(rate), low + extra, window, T0)
    assert b.ewma_rate >= a.ewma_rate


def test_poll_interval_clamps():
    assert poll_interval(make_estimate(0.0)) == timedelta(seconds=3600)
    assert poll_interval(make_estimate(1.0)) == timedelta(seconds=1)
    assert poll_interval(make_estimate(0.01)) == timedelta(seconds=100)


@given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=0.0, max_value=10.0))
def test_poll_interval_is_antitone_and_bounded(r1, r2):
    lo, hi = sorted((r1, r2))
    fast = poll_interval(make_estimate(hi))
    slow = poll_interval(make_estimate(lo))
    assert fast <= slow
    for interval in (fast, slow):
        assert timedelta(seconds=1) <= interval <= timedelta(seconds=3600)


def test_rate_estimate_round_trip():
    estimate = make_estimate(0.25)
    assert RateEstimate.from_dict(estimate.to_dict()) == estimate


# ------------------------------------------------------------- replay files


def write_lines(path, docs):
    path.write_text("\n".join(json.dumps(d) for d in docs) + "\n", encoding="utf-8")


def event_doc(offset_s: int, source: str = "s1") -> dict:
    return {
        "source": source,
        "type": "tick",
        "occurred_at": format_ts(T0 + timedelta(seconds=offset_s)),
    }


def test_replay_reads_sorted_lines(tmp_path):
    path = tmp_path / "events.jsonl"
    write_lines(path, [event_doc(0), event_doc(5), event_doc(9)])
    rows = list(read_replay_file(path))
    assert [r[0] for r in rows] == [1, 2, 3]
    assert all(r[1] is not None for r in rows)


def test_replay_empty_file(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text("", encoding="utf-8")
    assert list(read_replay_file(path)) == []


def test_replay_flags_unparseable_line_but_continues(tmp_path):
    path = tmp_path / "events.jsonl"
    lines = [json.dumps(event_doc(i)) for i in range(10)]
    lines[3] = "{broken json"
    path.write_text("\n".join(lines), encoding="utf-8")
    rows = list(read_replay_file(path))
    assert len(rows) == 10
    assert rows[3][1] is None
    assert sum(1 for r in rows if r[1] is not None) == 9


def test_replay_rejects_out_of_order_input(tmp_path):
    path = tmp_path / "events.jsonl"
    write_lines(path, [event_doc(10), event_doc(5)])
    with pytest.raises(UnsortedInput) as err:
        list(read_replay_file(path))
    assert err.value.line_no == 2


def test_replay_missing_file():
    with pytest.raises(FileNotFoundError):
        list(read_replay_file("/nonexistent/events.jsonl"))
