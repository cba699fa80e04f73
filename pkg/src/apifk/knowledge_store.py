"""Versioned per-API knowledge documents.

Each API gets one JSON document holding everything the miners produced:
per-parameter abstraction profiles and constraints, parameter-sequence
rows, and ranked producer dependencies. Documents are written atomically
(temp file + rename) with sorted keys and ASCII escapes so identical
knowledge always serializes to identical bytes. A schema file ships with
the package and every load validates against it.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import jsonschema

from .dependency_graph import DependencyEdge
from .enum_miner import (
    ENUMERABLE,
    NOT_ENUMERABLE,
    EnumState,
    NumericRange,
    RequirednessStat,
    merge_enum_states,
)
from .param_abstraction import (
    OTHER_BUCKET,
    AbstractionProfile,
    abstract_pattern,
    common_subsequence,
)

SCHEMA_VERSION = 1

_DOC_SCHEMA: dict | None = None


class SchemaVersionMismatch(ValueError):
    """Document written under a schema version this code does not speak."""


class MalformedDocument(ValueError):
    """Document is unreadable or violates the published schema."""


class ApiMismatch(ValueError):
    """Knowledge for different APIs cannot be merged."""


def document_schema() -> dict:
    """The published JSON schema, loaded once from package data."""
    global _DOC_SCHEMA
    if _DOC_SCHEMA is None:
        text = resources.files("apifk").joinpath("schemas/knowledge.schema.json").read_text("utf-8")
        _DOC_SCHEMA = json.loads(text)
    return _DOC_SCHEMA


@dataclass(frozen=True)
class SequenceRow:
    """One observed parameter-name combination with its count and rate."""

    params: tuple[str, ...]
    count: int
    rate: float


@dataclass
class ParamKnowledge:
    """Everything mined for a single parameter of one API."""

    name: str
    profile: AbstractionProfile
    enum: EnumState
    numeric: NumericRange
    requiredness: RequirednessStat
    examples: list[str] = field(default_factory=list)
    unspecified_param: bool = False

    @property
    def enum_values(self) -> list[str] | None:
        """Sorted enum pool, or None once the parameter is non-enumerable."""
        return sorted(self.enum.values) if self.enum.enumerable else None

    @property
    def numeric_range(self) -> tuple[float, float] | None:
        if not self.numeric.reportable:
            return None
        return (self.numeric.min, self.numeric.max)

    @property
    def required(self) -> bool:
        return self.requiredness.inferred_required


@dataclass
class ApiKnowledge:
    """Mined knowledge for one API, the unit of persistence."""

    api: str
    params: dict[str, ParamKnowledge] = field(default_factory=dict)
    sequences: list[SequenceRow] = field(default_factory=list)
    dependencies: dict[str, list[DependencyEdge]] = field(default_factory=dict)
    relevance: dict[str, float] = field(default_factory=dict)
    spec_inputs: list[str] | None = None
    spec_outputs: list[str] | None = None
    record_count: int = 0
    sequence_total: int = 0
    generated_at: int = 0
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def empty(cls, api: str) -> "ApiKnowledge":
        return cls(api=api)


def _param_to_doc(p: ParamKnowledge) -> dict:
    rng = p.numeric_range
    return {
        "profile": {
            "common_subsequence": p.profile.common_subsequence,
            "patterns": [[pat, n] for pat, n in p.profile.patterns],
            "lengths": {str(k): v for k, v in sorted(p.profile.lengths.items())},
            "values_seen": p.profile.values_seen,
            "truncated": p.profile.truncated,
        },
        "examples": list(p.examples),
        "enum": {
            "status": p.enum.status,
            "threshold": p.enum.threshold,
            "values": sorted(p.enum.values),
        },
        "enum_values": p.enum_values,
        "numeric_stats": {
            "min": p.numeric.min,
            "max": p.numeric.max,
            "samples": p.numeric.sample_count,
            "non_numeric": p.numeric.non_numeric_count,
        },
        "numeric_range": None if rng is None else {"min": rng[0], "max": rng[1]},
        "requiredness": {
            "present": p.requiredness.present_count,
            "successes": p.requiredness.total_success_count,
        },
        "required": p.required,
        "unspecified_param": p.unspecified_param,
    }


def to_doc(knowledge: ApiKnowledge) -> dict:
    """Plain-JSON form of the knowledge (the on-disk document)."""
    spec = None
    if knowledge.spec_inputs is not None or knowledge.spec_outputs is not None:
        spec = {
            "inputs": list(knowledge.spec_inputs or []),
            "outputs": list(knowledge.spec_outputs or []),
        }
    return {
        "schema_version": knowledge.schema_version,
        "api": knowledge.api,
        "generated_at": knowledge.generated_at,
        "record_count": knowledge.record_count,
        "sequence_total": knowledge.sequence_total,
        "spec": spec,
        "params": {name: _param_to_doc(p) for name, p in sorted(knowledge.params.items())},
        "sequences": [
            {"params": list(row.params), "count": row.count, "rate": row.rate}
            for row in knowledge.sequences
        ],
        "dependencies": {
            param: [{"producer": e.producer_api, "score": e.score} for e in edges]
            for param, edges in sorted(knowledge.dependencies.items())
        },
        "relevance": dict(sorted(knowledge.relevance.items())),
    }


def _param_from_doc(api: str, name: str, doc: dict) -> ParamKnowledge:
    prof = doc["profile"]
    enum_doc = doc["enum"]
    num = doc["numeric_stats"]
    req = doc["requiredness"]
    return ParamKnowledge(
        name=name,
        profile=AbstractionProfile(
            common_subsequence=prof["common_subsequence"],
            patterns=[(pat, n) for pat, n in prof["patterns"]],
            lengths={int(k): v for k, v in prof["lengths"].items()},
            values_seen=prof["values_seen"],
            truncated=prof["truncated"],
        ),
        enum=EnumState(
            param_key=(api, name),
            threshold=enum_doc["threshold"],
            values=set(enum_doc["values"]),
            status=enum_doc["status"],
        ),
        numeric=NumericRange(
            min=num["min"],
            max=num["max"],
            sample_count=num["samples"],
            non_numeric_count=num["non_numeric"],
        ),
        requiredness=RequirednessStat(req["present"], req["successes"]),
        examples=list(doc["examples"]),
        unspecified_param=doc["unspecified_param"],
    )


def _check_invariants(knowledge: ApiKnowledge) -> None:
    declared = set(knowledge.spec_inputs or []) | set(knowledge.spec_outputs or [])
    for name, p in knowledge.params.items():
        if not p.unspecified_param and name not in declared:
            raise MalformedDocument(
                f"parameter {name!r} is neither declared by {knowledge.api} "
                "nor flagged unspecified_param"
            )
        top = p.profile.top_pattern
        for ex in p.examples:
            if abstract_pattern(ex) != top:
                raise MalformedDocument(
                    f"example {ex!r} of {name!r} does not match top pattern {top!r}"
                )


def from_doc(doc: dict) -> ApiKnowledge:
    """Validate a document against the schema and rebuild the knowledge."""
    try:
        jsonschema.validate(doc, document_schema())
    except jsonschema.ValidationError as e:
        raise MalformedDocument(e.message) from e
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"document schema_version {doc['schema_version']}, expected {SCHEMA_VERSION}"
        )
    api = doc["api"]
    spec = doc["spec"]
    knowledge = ApiKnowledge(
        api=api,
        params={
            name: _param_from_doc(api, name, p) for name, p in doc["params"].items()
        },
        sequences=[
            SequenceRow(tuple(row["params"]), row["count"], row["rate"])
            for row in doc["sequences"]
        ],
        dependencies={
            param: [
                DependencyEdge(api, param, e["producer"], e["score"]) for e in edges
            ]
            for param, edges in doc["dependencies"].items()
        },
        relevance=dict(doc["relevance"]),
        spec_inputs=None if spec is None else list(spec["inputs"]),
        spec_outputs=None if spec is None else list(spec["outputs"]),
        record_count=doc["record_count"],
        sequence_total=doc["sequence_total"],
        generated_at=doc["generated_at"],
        schema_version=doc["schema_version"],
    )
    _check_invariants(knowledge)
    return knowledge


def save(knowledge: ApiKnowledge, path: str | Path) -> None:
    """Write one document atomically; bytes are a pure function of content."""
    doc = to_doc(knowledge)
    blob = json.dumps(doc, ensure_ascii=True, sort_keys=True, indent=2) + "\n"
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path: str | Path) -> ApiKnowledge:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedDocument(f"not a JSON document: {e}") from e
    if not isinstance(doc, dict):
        raise MalformedDocument("document root must be a JSON object")
    # Version-gate before full validation so future-version documents fail
    # with the specific error rather than a generic schema message.
    version = doc.get("schema_version")
    if isinstance(version, int) and version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"document schema_version {version}, expected {SCHEMA_VERSION}"
        )
    return from_doc(doc)


def document_name(api: str) -> str:
    """File name for one API's document (API names are [A-Za-z0-9_.-])."""
    safe = "".join(ch if ch.isalnum() or ch in "_.-" else "_" for ch in api)
    return f"{safe}.json"


def save_all(knowledge_map: Mapping[str, ApiKnowledge], out_dir: str | Path) -> list[Path]:
    """One document per API under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for api in sorted(knowledge_map):
        p = out / document_name(api)
        save(knowledge_map[api], p)
        paths.append(p)
    return paths


def load_all(knowledge_dir: str | Path) -> dict[str, ApiKnowledge]:
    """Load every ``*.json`` document in a directory, keyed by API name."""
    out: dict[str, ApiKnowledge] = {}
    for p in sorted(Path(knowledge_dir).glob("*.json")):
        k = load(p)
        out[k.api] = k
    return out


def _merge_patterns(
    a: list[tuple[str, int]], b: list[tuple[str, int]], cap: int = 256
) -> list[tuple[str, int]]:
    counts = Counter(dict(a)) + Counter(dict(b))
    other = counts.pop(OTHER_BUCKET, 0)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) > cap:
        other += sum(n for _, n in ranked[cap:])
        ranked = ranked[:cap]
    if other:
        ranked.append((OTHER_BUCKET, other))
        ranked.sort(key=lambda kv: (-kv[1], kv[0]))
    return ranked


def _merge_param(a: ParamKnowledge, b: ParamKnowledge) -> ParamKnowledge:
    # Patterns, lengths, and counts merge exactly; the subsequence is
    # re-folded from the two stored partials.
    lengths = Counter(a.profile.lengths) + Counter(b.profile.lengths)
    profile = AbstractionProfile(
        common_subsequence=common_subsequence(
            [a.profile.common_subsequence, b.profile.common_subsequence]
        ),
        patterns=_merge_patterns(a.profile.patterns, b.profile.patterns),
        lengths=dict(lengths),
        values_seen=a.profile.values_seen + b.profile.values_seen,
        truncated=a.profile.truncated + b.profile.truncated,
    )
    # Example frequencies are not stored, so exact re-ranking is impossible;
    # keep newer-batch examples first and drop any that no longer match the
    # merged top pattern (preserves the document invariant).
    top = profile.top_pattern
    limit = max(len(a.examples), len(b.examples))
    examples: list[str] = []
    for ex in list(b.examples) + list(a.examples):
        if abstract_pattern(ex) == top and ex not in examples:
            examples.append(ex)
    return ParamKnowledge(
        name=a.name,
        profile=profile,
        enum=merge_enum_states(a.enum, b.enum),
        numeric=a.numeric.widen(b.numeric),
        requiredness=a.requiredness.merge(b.requiredness),
        examples=examples[:limit],
        unspecified_param=a.unspecified_param and b.unspecified_param,
    )


def merge_daily(existing: ApiKnowledge, new_batch: ApiKnowledge) -> ApiKnowledge:
    """Fold a later mining batch into existing knowledge for the same API.

    Pattern counts, length histograms, sequence counts, enum states, numeric
    stats, and requiredness merge exactly (equal to a recompute over the
    concatenated logs). The common subsequence is re-folded from the stored
    per-batch subsequences. Dependency edges union by producer, preferring
    the newer batch's score, and are re-sorted.
    """
    if existing.api != new_batch.api:
        raise ApiMismatch(f"cannot merge {existing.api!r} with {new_batch.api!r}")

    params: dict[str, ParamKnowledge] = {}
    for name in sorted(set(existing.params) | set(new_batch.params)):
        a, b = existing.params.get(name), new_batch.params.get(name)
        if a is None:
            params[name] = b
        elif b is None:
            params[name] = a
        else:
            params[name] = _merge_param(a, b)

    seq_counts: dict[tuple[str, ...], int] = {}
    for row in list(existing.sequences) + list(new_batch.sequences):
        seq_counts[row.params] = seq_counts.get(row.params, 0) + row.count
    total = existing.sequence_total + new_batch.sequence_total
    sequences = [
        SequenceRow(p, c, c / total if total else 0.0) for p, c in seq_counts.items()
    ]
    sequences.sort(key=lambda r: (-r.rate, r.params))

    dependencies: dict[str, list[DependencyEdge]] = {}
    for param in sorted(set(existing.dependencies) | set(new_batch.dependencies)):
        by_producer: dict[str, DependencyEdge] = {}
        for e in existing.dependencies.get(param, []):
            by_producer[e.producer_api] = e
        for e in new_batch.dependencies.get(param, []):
            by_producer[e.producer_api] = e  # newer score wins
        edges = sorted(by_producer.values(), key=lambda e: (-e.score, e.producer_api))
        dependencies[param] = edges

    relevance = dict(existing.relevance)
    relevance.update(new_batch.relevance)

    return ApiKnowledge(
        api=existing.api,
        params=params,
        sequences=sequences,
        dependencies=dependencies,
        relevance=relevance,
        spec_inputs=new_batch.spec_inputs if new_batch.spec_inputs is not None else existing.spec_inputs,
        spec_outputs=new_batch.spec_outputs if new_batch.spec_outputs is not None else existing.spec_outputs,
        record_count=existing.record_count + new_batch.record_count,
        sequence_total=total,
        generated_at=max(existing.generated_at, new_batch.generated_at),
        schema_version=SCHEMA_VERSION,
    )
