"""Canonical data model for API specs and call logs, plus log-file ingestion.

The log format is one JSON object per line:

    {"api": str, "params": {str: str}, "outcome": str, "session": str, "ts": int}

``"Right"`` is the reserved success outcome; any other outcome string is an
error-code class label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

RIGHT = "Right"


class MalformedRecord(ValueError):
    """A log line violates the record schema."""

    def __init__(self, reason: str, line_no: int | None = None):
        self.reason = reason
        self.line_no = line_no
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"malformed record{where}: {reason}")


class EmptyLine(Exception):
    """Signals a blank line that the caller should skip silently."""


@dataclass(frozen=True)
class OutcomeLabel:
    """Either the reserved success class or an error code."""

    code: str

    def __post_init__(self):
        if not self.code:
            raise ValueError("outcome code must be nonempty")

    @property
    def is_right(self) -> bool:
        return self.code == RIGHT

    @classmethod
    def right(cls) -> "OutcomeLabel":
        return cls(RIGHT)

    @classmethod
    def error(cls, code: str) -> "OutcomeLabel":
        if code == RIGHT:
            raise ValueError("error code may not be the reserved success label")
        return cls(code)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    declared_required: bool | None = None
    declared_type: str = "unknown"  # string | integer | decimal | unknown

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if self.declared_type not in ("string", "integer", "decimal", "unknown"):
            raise ValueError(f"unknown declared_type {self.declared_type!r}")


@dataclass(frozen=True)
class ApiSpec:
    """Declared input/output parameters of one API (names unique per list)."""

    name: str
    input_params: tuple[ParamSpec, ...] = ()
    output_params: tuple[ParamSpec, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("api name must be nonempty")
        for side, params in (("input", self.input_params), ("output", self.output_params)):
            names = [p.name for p in params]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate {side} parameter names in {self.name}")

    @classmethod
    def make(cls, name: str, inputs: Iterable[str] = (), outputs: Iterable[str] = ()) -> "ApiSpec":
        return cls(
            name=name,
            input_params=tuple(ParamSpec(n) for n in inputs),
            output_params=tuple(ParamSpec(n) for n in outputs),
        )

    @property
    def input_names(self) -> list[str]:
        return [p.name for p in self.input_params]

    @property
    def output_names(self) -> list[str]:
        return [p.name for p in self.output_params]


@dataclass(frozen=True)
class ApiCallRecord:
    """One logged request. Parameter order is preserved as logged."""

    api: str
    params: tuple[tuple[str, str], ...]
    outcome: OutcomeLabel
    session_id: str
    timestamp: int

    def __post_init__(self):
        if not self.api:
            raise ValueError("api must be nonempty")
        names = [k for k, _ in self.params]
        if len(names) != len(set(names)):
            raise ValueError("duplicate parameter names in record")
        if self.timestamp < 0:
            raise ValueError("timestamp must be >= 0")

    @classmethod
    def make(
        cls,
        api: str,
        params: dict[str, str] | Iterable[tuple[str, str]],
        outcome: str = RIGHT,
        session_id: str = "",
        timestamp: int = 0,
    ) -> "ApiCallRecord":
        items = tuple(params.items()) if isinstance(params, dict) else tuple(params)
        return cls(api, items, OutcomeLabel(outcome), session_id, timestamp)

    @property
    def param_names(self) -> list[str]:
        return [k for k, _ in self.params]

    @property
    def param_map(self) -> dict[str, str]:
        return dict(self.params)

    def value(self, name: str) -> str | None:
        for k, v in self.params:
            if k == name:
                return v
        return None


def parse_record(line: str, line_no: int | None = None) -> ApiCallRecord:
    """Parse one log line into a validated record.

    Raises MalformedRecord on schema violations and EmptyLine for blank lines.
    Unknown top-level fields are ignored.
    """
    if not line.strip():
        raise EmptyLine()
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"invalid JSON: {e.msg}", line_no) from e
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not a JSON object", line_no)

    api = obj.get("api")
    if not isinstance(api, str) or not api:
        raise MalformedRecord("field 'api' must be a nonempty string", line_no)

    params = obj.get("params")
    if not isinstance(params, dict):
        raise MalformedRecord("field 'params' must be an object", line_no)
    items = []
    for k, v in params.items():
        if not isinstance(k, str) or not k:
            raise MalformedRecord("parameter names must be nonempty strings", line_no)
        if not isinstance(v, str):
            raise MalformedRecord(f"parameter {k!r} value must be a string", line_no)
        items.append((k, v))

    outcome = obj.get("outcome")
    if not isinstance(outcome, str) or not outcome:
        raise MalformedRecord("field 'outcome' must be a nonempty string", line_no)

    session = obj.get("session")
    if not isinstance(session, str):
        raise MalformedRecord("field 'session' must be a string", line_no)

    ts = obj.get("ts")
    if not isinstance(ts, int) or isinstance(ts, bool) or ts < 0:
        raise MalformedRecord("field 'ts' must be a non-negative integer", line_no)

    return ApiCallRecord(api, tuple(items), OutcomeLabel(outcome), session, ts)


def serialize_record(record: ApiCallRecord) -> str:
    """Render a record back into the canonical one-line JSON form."""
    obj = {
        "api": record.api,
        "params": {k: v for k, v in record.params},
        "outcome": record.outcome.code,
        "session": record.session_id,
        "ts": record.timestamp,
    }
    return json.dumps(obj, ensure_ascii=True, separators=(",", ":"))


@dataclass
class LogReader:
    """Streams records from a log file, counting skipped malformed lines."""

    path: Path
    skipped: int = 0
    errors: list[MalformedRecord] = field(default_factory=list)

    def __iter__(self) -> Iterator[ApiCallRecord]:
        with open(self.path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                try:
                    yield parse_record(line, line_no)
                except EmptyLine:
                    continue
                except MalformedRecord as e:
                    self.skipped += 1
                    self.errors.append(e)


def load_log(path: str | Path) -> LogReader:
    """Open a call log for streaming. Raises OSError if the file is unreadable."""
    p = Path(path)
    # fail fast on unreadable paths instead of at first iteration
    with open(p, encoding="utf-8"):
        pass
    return LogReader(p)


def read_log(path: str | Path) -> tuple[list[ApiCallRecord], int]:
    """Eagerly read a log; returns (records, skipped_count)."""
    reader = load_log(path)
    records = list(reader)
    return records, reader.skipped


def write_log(records: Iterable[ApiCallRecord], path: str | Path) -> int:
    """Write records in the canonical line format; returns the line count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(serialize_record(rec))
            fh.write("\n")
            n += 1
    return n
