"""Per-API parameter-sequence mining: distinct sorted name sets with rates."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .log_model import ApiCallRecord

# Gateway/system parameters present on nearly every request; they carry no
# signal about the API itself. Config-driven because deployments differ.
DEFAULT_FILTERED_NAMES = frozenset(
    {"Signature", "AccessKeyId", "Timestamp", "SignatureNonce", "Format", "Version", "Action"}
)


@dataclass(frozen=True)
class FilterConfig:
    names: frozenset[str] = DEFAULT_FILTERED_NAMES
    prefixes: tuple[str, ...] = ()
    successful_only: bool = False

    @classmethod
    def none(cls) -> "FilterConfig":
        return cls(names=frozenset(), prefixes=())


@dataclass(frozen=True)
class SequenceKey:
    """(api, strictly ascending parameter names)."""

    api: str
    params: tuple[str, ...]

    def __post_init__(self):
        if list(self.params) != sorted(set(self.params)):
            raise ValueError("params must be strictly sorted and unique")


@dataclass
class SequenceStats:
    """Counts and per-API rates for every observed parameter sequence."""

    counts: dict[SequenceKey, int] = field(default_factory=dict)
    api_totals: dict[str, int] = field(default_factory=dict)

    def rate(self, key: SequenceKey) -> float:
        total = self.api_totals.get(key.api, 0)
        return self.counts[key] / total if total else 0.0

    def rows(self, api: str | None = None) -> list[tuple[SequenceKey, int, float]]:
        """(key, count, rate) sorted by rate descending, params ascending."""
        items = [
            (k, c, self.rate(k))
            for k, c in self.counts.items()
            if api is None or k.api == api
        ]
        items.sort(key=lambda t: (t[0].api, -t[2], t[0].params))
        return items

    def merge(self, other: "SequenceStats") -> "SequenceStats":
        out = SequenceStats(dict(self.counts), dict(self.api_totals))
        for k, c in other.counts.items():
            out.counts[k] = out.counts.get(k, 0) + c
        for api, t in other.api_totals.items():
            out.api_totals[api] = out.api_totals.get(api, 0) + t
        return out


def extract_parameters(record: ApiCallRecord) -> list[str]:
    """All parameter names present in the request, in log order."""
    return record.param_names


def filter_parameters(names: Iterable[str], config: FilterConfig) -> list[str]:
    """Drop names matching the config's exact names or prefixes."""
    return [
        n
        for n in names
        if n not in config.names and not any(n.startswith(p) for p in config.prefixes)
    ]


def sequence_key(record: ApiCallRecord, config: FilterConfig) -> SequenceKey:
    kept = filter_parameters(extract_parameters(record), config)
    return SequenceKey(record.api, tuple(sorted(set(kept))))


def mine_sequences(
    records: Iterable[ApiCallRecord], config: FilterConfig | None = None
) -> SequenceStats:
    """Count each record under its sorted, filtered parameter-name key.

    Rates are count / per-API total. Chunked mining merged with
    ``SequenceStats.merge`` equals unchunked mining exactly.
    """
    config = config or FilterConfig()
    counts: Counter = Counter()
    totals: Counter = Counter()
    for rec in records:
        if config.successful_only and not rec.outcome.is_right:
            continue
        counts[sequence_key(rec, config)] += 1
        totals[rec.api] += 1
    return SequenceStats(dict(counts), dict(totals))
