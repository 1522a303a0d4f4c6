"""Append-only command log durability and filtering."""

import json

import pytest

from covote.logstore import CommandLog, CommandLogEntry


def test_sequence_is_gapless(tmp_path):
    log = CommandLog(str(tmp_path / "log.jsonl"))
    for i in range(5):
        e = log.append("REQUEST", f"e{i}", {"i": i})
        assert e.seq == i + 1
    log.close()


def test_version_header_written(tmp_path):
    path = tmp_path / "log.jsonl"
    log = CommandLog(str(path))
    log.append("REQUEST", "e1", {})
    log.close()
    lines = path.read_text().splitlines()
    assert json.loads(lines[0]) == {"log_version": 1}


def test_reopen_resumes_numbering(tmp_path):
    path = str(tmp_path / "log.jsonl")
    log = CommandLog(path)
    log.append("REQUEST", "e1", {"a": 1})
    log.append("DECISION", "e1", {"approved": True})
    log.close()
    # crash-restart: everything written before is still there
    again = CommandLog(path)
    entries = again.read()
    assert [e.seq for e in entries] == [1, 2]
    assert entries[1].payload == {"approved": True}
    e = again.append("AUDIT", "e1", {})
    assert e.seq == 3
    again.close()


def test_filters(tmp_path):
    log = CommandLog(str(tmp_path / "log.jsonl"))
    log.append("REQUEST", "a", {})
    log.append("PARTIAL_TALLY", "a", {"sender": 1})
    log.append("PARTIAL_TALLY", "b", {"sender": 2})
    log.append("DECISION", "a", {})
    assert [e.seq for e in log.read()] == [1, 2, 3, 4]
    assert [e.seq for e in log.read(election_id="a")] == [1, 2, 4]
    assert [e.seq for e in log.read(kind="PARTIAL_TALLY")] == [2, 3]
    assert [e.seq for e in log.read(after=2)] == [3, 4]
    log.close()


def test_unknown_kind_rejected(tmp_path):
    log = CommandLog(str(tmp_path / "log.jsonl"))
    with pytest.raises(ValueError):
        log.append("NOPE", "e", {})
    log.close()


def test_tampered_log_detected(tmp_path):
    path = tmp_path / "log.jsonl"
    log = CommandLog(str(path))
    log.append("REQUEST", "e1", {})
    log.append("REQUEST", "e2", {})
    log.close()
    lines = path.read_text().splitlines()
    del lines[1]  # remove the first entry: creates a gap
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        CommandLog(str(path))


def test_entry_roundtrip():
    e = CommandLogEntry(3, 12.5, "DECISION", "e9", {"approved": False})
    assert CommandLogEntry.from_dict(e.to_dict()) == e
