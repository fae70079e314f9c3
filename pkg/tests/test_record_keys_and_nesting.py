import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridcast.store import RecordKey, longterm_key, nest_records, realtime_key, sweep_key


_PARTS = st.lists(st.from_regex(r"[A-Za-z0-9_+-]{1,12}", fullmatch=True), min_size=1, max_size=4)


def test_record_key_conventions() -> None:
    assert str(longterm_key("demand", 1, "i1-j2-k1-clear")) == "longterm:demand:q1:i1-j2-k1-clear"
    assert str(realtime_key("generation", 3)) == "realtime:generation:q3"
    assert str(sweep_key(12)) == "sweep:seed12"


def test_record_key_parse_and_prefix_tests() -> None:
    key = RecordKey.parse("longterm:demand:q1:i1-j2-k1-clear")
    assert key == RecordKey("longterm", ("demand", "q1", "i1-j2-k1-clear"))
    assert key.startswith("longterm")
    assert key.startswith("longterm", "demand", "q1")
    assert not key.startswith("longterm", "demandx")
    assert not key.startswith("realtime", "demand")


@given(_PARTS)
def test_record_key_parse_inverts_str(parts: list[str]) -> None:
    key = RecordKey("ns", tuple(parts))
    assert RecordKey.parse(str(key)) == key


@pytest.mark.parametrize("text", ["", "ns", "ns:", "ns::a", "ns:a b", "ns:a/b", "ns:..", "ns:a:."])
def test_record_key_rejects_malformed_text(text: str) -> None:
    with pytest.raises(ValueError, match="unsupported key part|needs at least one part"):
        _ = RecordKey.parse(text)


def test_nest_records_builds_tree() -> None:
    data = [(("demand", "q1"), {"a": 2}), (("demand", "q2"), {"a": 1}), (("generation", "q1"), [1, 2])]
    assert nest_records(data) == {"demand": {"q1": {"a": 2}, "q2": {"a": 1}}, "generation": {"q1": [1, 2]}}


def test_nest_records_root_record_alone_is_returned() -> None:
    assert nest_records([((), {"beta": [1.0]})]) == {"beta": [1.0]}


def test_nest_records_rejects_conflicts_and_empty_input() -> None:
    with pytest.raises(ValueError, match="cannot nest an empty record set"):
        _ = nest_records([])
    with pytest.raises(ValueError, match="root path holds a record and child records"):
        _ = nest_records([((), 1), (("sub",), 2)])
    with pytest.raises(ValueError, match="demand holds a record and child records"):
        _ = nest_records([(("demand",), 1), (("demand", "q1"), 2)])
