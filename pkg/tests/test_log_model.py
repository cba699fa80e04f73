import json

import pytest

from apifk.log_model import (
    ApiCallRecord,
    ApiSpec,
    EmptyLine,
    LogReader,
    MalformedRecord,
    OutcomeLabel,
    RIGHT,
    load_log,
    parse_record,
    read_log,
    serialize_record,
    write_log,
)


def test_outcome_right_flag():
    assert OutcomeLabel.right().is_right
    assert not OutcomeLabel("isv.X").is_right
    assert OutcomeLabel(RIGHT).is_right


def test_outcome_error_rejects_reserved_label():
    with pytest.raises(ValueError):
        OutcomeLabel.error(RIGHT)
    with pytest.raises(ValueError):
        OutcomeLabel("")


def test_api_spec_rejects_duplicate_params():
    with pytest.raises(ValueError):
        ApiSpec.make("A", inputs=["x", "x"])
    spec = ApiSpec.make("A", inputs=["x", "y"], outputs=["z"])
    assert spec.input_names == ["x", "y"]
    assert spec.output_names == ["z"]


def test_record_preserves_param_order_and_rejects_duplicates():
    rec = ApiCallRecord.make("A", [("b", "1"), ("a", "2")])
    assert rec.param_names == ["b", "a"]
    assert rec.value("a") == "2"
    assert rec.value("missing") is None
    with pytest.raises(ValueError):
        ApiCallRecord.make("A", [("a", "1"), ("a", "2")])


def test_parse_record_happy_path():
    line = '{"api":"SendSms","params":{"SignName":"Acme"},"outcome":"Right","session":"s1","ts":5}'
    rec = parse_record(line)
    assert rec.api == "SendSms"
    assert rec.param_map == {"SignName": "Acme"}
    assert rec.outcome.is_right
    assert rec.session_id == "s1"
    assert rec.timestamp == 5


def test_parse_record_ignores_unknown_fields():
    line = '{"api":"A","params":{},"outcome":"Right","session":"","ts":0,"extra":1}'
    assert parse_record(line).api == "A"


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1,2]",
        '{"params":{},"outcome":"Right","session":"","ts":0}',
        '{"api":"","params":{},"outcome":"Right","session":"","ts":0}',
        '{"api":"A","params":[],"outcome":"Right","session":"","ts":0}',
        '{"api":"A","params":{"k":1},"outcome":"Right","session":"","ts":0}',
        '{"api":"A","params":{},"outcome":"","session":"","ts":0}',
        '{"api":"A","params":{},"outcome":"Right","session":null,"ts":0}',
        '{"api":"A","params":{},"outcome":"Right","session":"","ts":-1}',
        '{"api":"A","params":{},"outcome":"Right","session":"","ts":true}',
        '{"api":"A","params":{},"outcome":"Right","session":"","ts":1.5}',
    ],
)
def test_parse_record_rejects_schema_violations(line):
    with pytest.raises(MalformedRecord):
        parse_record(line)


def test_parse_record_blank_line_signals_empty():
    with pytest.raises(EmptyLine):
        parse_record("   \n")


def test_malformed_record_carries_line_number():
    with pytest.raises(MalformedRecord) as exc:
        parse_record("junk", line_no=17)
    assert exc.value.line_no == 17
    assert "line 17" in str(exc.value)


def test_serialize_parse_round_trip():
    rec = ApiCallRecord.make(
        "SendSms",
        [("PhoneNumbers", "13012345678"), ("SignName", "Acme")],
        outcome="isv.X",
        session_id="s9",
        timestamp=42,
    )
    again = parse_record(serialize_record(rec))
    assert again == rec
    # canonical form is a single line of ASCII
    assert "\n" not in serialize_record(rec)
    assert serialize_record(rec).isascii()


def test_write_and_read_log(tmp_path):
    records = [
        ApiCallRecord.make("A", {"x": str(i)}, session_id=f"s{i}", timestamp=i)
        for i in range(5)
    ]
    path = tmp_path / "log.jsonl"
    assert write_log(records, path) == 5
    back, skipped = read_log(path)
    assert back == records
    assert skipped == 0


def test_reader_skips_malformed_lines_and_counts_them(tmp_path):
    path = tmp_path / "log.jsonl"
    good = serialize_record(ApiCallRecord.make("A", {"x": "1"}))
    path.write_text(good + "\n\nbroken\n" + good + "\n", encoding="utf-8")
    reader = LogReader(path)
    records = list(reader)
    assert len(records) == 2
    assert reader.skipped == 1
    assert reader.errors[0].line_no == 3


def test_load_log_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_log(tmp_path / "absent.jsonl")


def test_non_ascii_values_survive_round_trip(tmp_path):
    rec = ApiCallRecord.make("SendSms", {"SignName": "阿里云"})
    path = tmp_path / "log.jsonl"
    write_log([rec], path)
    back, _ = read_log(path)
    assert back[0].value("SignName") == "阿里云"
    # file stays pure ASCII regardless of value content
    assert path.read_bytes().isascii()
