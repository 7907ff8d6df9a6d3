from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from alertgate.clock import (
    SystemClock,
    VirtualClock,
    floor_ms,
    format_ts,
    parse_ts,
    utcnow_ms,
)

T = datetime(2024, 1, 1, 9, 30, 15, 123000, tzinfo=timezone.utc)


def test_format_is_fixed_width_with_milliseconds():
    assert format_ts(T) == "2024-01-01T09:30:15.123Z"


def test_parse_round_trips_format():
    assert parse_ts(format_ts(T)) == T


def test_parse_accepts_offset_form():
    assert parse_ts("2024-01-01T11:30:15.123+02:00") == T


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_ts("not a timestamp")


def test_floor_ms_drops_sub_millisecond_digits():
    fuzzy = T.replace(microsecond=123456)
    assert floor_ms(fuzzy) == T


def test_utcnow_is_timezone_aware_and_ms_floored():
    now = utcnow_ms()
    assert now.tzinfo is not None
    assert now.microsecond % 1000 == 0


def test_virtual_clock_advances_only_on_request():
    clock = VirtualClock(T)
    assert clock.now() == T
    clock.advance(timedelta(minutes=5))
    assert clock.now() == T + timedelta(minutes=5)
    clock.advance_to(T + timedelta(hours=1))
    assert clock.now() == T + timedelta(hours=1)


def test_system_clock_reads_wall_time():
    clock = SystemClock()
    a = clock.now()
    b = clock.now()
    assert b >= a
