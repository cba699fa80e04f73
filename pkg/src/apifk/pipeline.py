"""End-to-end mining: call records in, per-API knowledge documents out.

Glue over the individual miners. Constraint-bearing fields (profiles,
enums, numeric ranges, examples) are mined from successful calls only, so
injected bad values never pollute the published constraints; requiredness
is defined over successful calls anyway, and sequence statistics follow
their own filter config.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import param_abstraction as pa
from .dependency_graph import (
    ApiCatalog,
    RankWeights,
    RelevanceTable,
    rank,
    relevance_row,
    session_relevance,
)
from .enum_miner import (
    DEFAULT_ENUM_THRESHOLD,
    mine_enum,
    mine_numeric_range,
    mine_requiredness,
)
from .knowledge_store import ApiKnowledge, ParamKnowledge, SequenceRow
from .log_model import ApiCallRecord
from .param_sequences import FilterConfig, mine_sequences


@dataclass(frozen=True)
class MiningConfig:
    filters: FilterConfig = FilterConfig()
    enum_threshold: int = DEFAULT_ENUM_THRESHOLD
    weights: RankWeights = RankWeights()
    top_producers: int = 5
    example_count: int = 3
    pattern_cap: int = pa.DEFAULT_PATTERN_CAP
    # Values from failing calls carry injected junk; keep them out of the
    # published constraints unless explicitly asked for.
    constraints_from_successes: bool = True


def _param_values(records: Sequence[ApiCallRecord], prefer_success: bool) -> dict[str, list[str]]:
    success: dict[str, list[str]] = {}
    everything: dict[str, list[str]] = {}
    for rec in records:
        use_success = prefer_success and rec.outcome.is_right
        for name, value in rec.params:
            everything.setdefault(name, []).append(value)
            if use_success:
                success.setdefault(name, []).append(value)
    # A parameter sent only on failing calls still gets profiled, from the
    # only values that exist for it.
    out = {}
    for name in everything:
        out[name] = success.get(name) or everything[name]
    return out


def mine_knowledge(
    records: Iterable[ApiCallRecord],
    catalog: ApiCatalog | None = None,
    config: MiningConfig = MiningConfig(),
) -> dict[str, ApiKnowledge]:
    """Run every miner and assemble one ApiKnowledge per observed API."""
    records = list(records)
    by_api: dict[str, list[ApiCallRecord]] = {}
    for rec in records:
        by_api.setdefault(rec.api, []).append(rec)

    relevance: RelevanceTable | None = None
    if any(rec.session_id for rec in records):
        relevance = session_relevance(records)
    stats = mine_sequences(records, config.filters)

    out: dict[str, ApiKnowledge] = {}
    for api in sorted(by_api):
        recs = by_api[api]
        spec = catalog.specs.get(api) if catalog is not None else None
        declared_inputs = set(spec.input_names) if spec else set()

        requiredness = mine_requiredness(recs)
        values_by_param = _param_values(recs, config.constraints_from_successes)
        params: dict[str, ParamKnowledge] = {}
        for name in sorted(values_by_param):
            values = values_by_param[name]
            profile = pa.abstract_values(values, pattern_cap=config.pattern_cap)
            params[name] = ParamKnowledge(
                name=name,
                profile=profile,
                enum=mine_enum(values, config.enum_threshold, param_key=(api, name)),
                numeric=mine_numeric_range(values),
                requiredness=requiredness[name],
                examples=pa.representative_examples(values, profile, k=config.example_count),
                unspecified_param=name not in declared_inputs,
            )

        dependencies = {}
        if catalog is not None and spec is not None:
            for p in spec.input_params:
                edges = rank(
                    api,
                    p.name,
                    catalog,
                    k=config.top_producers,
                    weights=config.weights,
                    relevance=relevance,
                )
                if edges:
                    dependencies[p.name] = edges

        out[api] = ApiKnowledge(
            api=api,
            params=params,
            sequences=[
                SequenceRow(key.params, count, rate)
                for key, count, rate in stats.rows(api)
            ],
            dependencies=dependencies,
            relevance=relevance_row(relevance, api) if relevance is not None else {},
            spec_inputs=list(spec.input_names) if spec else None,
            spec_outputs=list(spec.output_names) if spec else None,
            record_count=len(recs),
            sequence_total=stats.api_totals.get(api, 0),
            generated_at=max((r.timestamp for r in recs), default=0),
        )
    return out
