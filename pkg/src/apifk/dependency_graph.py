"""Fine-grained API dependency ranking.

An input parameter of one API is often the output parameter of another;
candidates are every API that produces the parameter as output, ranked by

    score = (alpha * sim(api, c)) * (beta * sim(param, c)) * (sigma * rel(api, c))
            / (inputs(c) + outputs(c))

where sim is normalized edit-distance similarity and rel is session-level
Jaccard co-occurrence. The weights scale every candidate uniformly, so
rescaling any of them never changes the ranking order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .log_model import ApiCallRecord, ApiSpec


class DegenerateCandidate(ValueError):
    """Candidate API with zero declared parameters cannot be normalized."""


@dataclass(frozen=True)
class RankWeights:
    alpha: float = 1.0
    beta: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if min(self.alpha, self.beta, self.sigma) <= 0:
            raise ValueError("rank weights must be strictly positive")


@dataclass(frozen=True)
class DependencyEdge:
    consumer_api: str
    input_param: str
    producer_api: str
    score: float


@dataclass
class ApiCatalog:
    """API specs plus a reverse index from output parameter to producers."""

    specs: dict[str, ApiSpec] = field(default_factory=dict)
    producers: dict[str, set[str]] = field(default_factory=dict)

    @classmethod
    def from_specs(cls, specs: Iterable[ApiSpec]) -> "ApiCatalog":
        catalog = cls()
        for spec in specs:
            catalog.add(spec)
        return catalog

    def add(self, spec: ApiSpec) -> None:
        self.specs[spec.name] = spec
        for p in spec.output_params:
            self.producers.setdefault(p.name, set()).add(spec.name)

    def __contains__(self, api: str) -> bool:
        return api in self.specs

    def __len__(self) -> int:
        return len(self.specs)


def generate_candidates(catalog: ApiCatalog, param: str) -> set[str]:
    """APIs whose output parameters contain ``param`` (exact name match)."""
    return set(catalog.producers.get(param, ()))


def edit_distance(x: str, y: str) -> int:
    """Levenshtein distance, two-row DP."""
    if x == y:
        return 0
    if not x:
        return len(y)
    if not y:
        return len(x)
    prev = list(range(len(y) + 1))
    for i, cx in enumerate(x, start=1):
        cur = [i]
        for j, cy in enumerate(y, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (cx != cy)))
        prev = cur
    return prev[-1]


def string_similarity(x: str, y: str) -> float:
    """1 - editDistance/max(len); 1.0 when both strings are empty."""
    longest = max(len(x), len(y))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(x, y) / longest


@dataclass
class RelevanceTable:
    """Symmetric session co-occurrence map with values in [0, 1]."""

    pairs: dict[tuple[str, str], float] = field(default_factory=dict)

    @staticmethod
    def _key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    def set(self, a: str, b: str, value: float) -> None:
        self.pairs[self._key(a, b)] = value

    def value(self, a: str, b: str) -> float:
        return self.pairs.get(self._key(a, b), 0.0)


def session_relevance(records: Iterable[ApiCallRecord]) -> RelevanceTable:
    """Jaccard overlap of the session sets of every co-observed API pair."""
    sessions: dict[str, set[str]] = {}
    for rec in records:
        sessions.setdefault(rec.api, set()).add(rec.session_id)
    table = RelevanceTable()
    apis = sorted(sessions)
    for i, a in enumerate(apis):
        for b in apis[i:]:
            union = sessions[a] | sessions[b]
            if union:
                table.set(a, b, len(sessions[a] & sessions[b]) / len(union))
    return table


def score(
    api: str,
    param: str,
    candidate: str,
    catalog: ApiCatalog,
    weights: RankWeights = RankWeights(),
    relevance: RelevanceTable | None = None,
    param_sim_vs_output_param: bool = False,
) -> float:
    """Ranking score of one producer candidate.

    With no session data (``relevance=None``) the relevance factor defaults
    to 1 and the ranking rests on name similarity and size normalization.
    """
    spec = catalog.specs[candidate]
    size = len(spec.input_params) + len(spec.output_params)
    if size == 0:
        raise DegenerateCandidate(f"{candidate} declares no parameters")
    rel = 1.0 if relevance is None else relevance.value(api, candidate)
    # The formula's literal second factor compares the parameter name against
    # the candidate API name; the alternate mode compares against the matching
    # output parameter instead.
    param_target = param if param_sim_vs_output_param else candidate
    return (
        (weights.alpha * string_similarity(api, candidate))
        * (weights.beta * string_similarity(param, param_target))
        * (weights.sigma * rel)
    ) / size


def rank(
    api: str,
    param: str,
    catalog: ApiCatalog,
    k: int = 5,
    weights: RankWeights = RankWeights(),
    relevance: RelevanceTable | None = None,
    param_sim_vs_output_param: bool = False,
) -> list[DependencyEdge]:
    """Top-k producers of ``param`` for ``api``, best first.

    Ties break by producer name ascending.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = [
        (
            score(api, param, c, catalog, weights, relevance, param_sim_vs_output_param),
            c,
        )
        for c in generate_candidates(catalog, param)
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [
        DependencyEdge(consumer_api=api, input_param=param, producer_api=c, score=s)
        for s, c in scored[:k]
    ]


def rank_all(
    catalog: ApiCatalog,
    k: int = 5,
    weights: RankWeights = RankWeights(),
    relevance: RelevanceTable | None = None,
) -> dict[str, dict[str, list[DependencyEdge]]]:
    """Edges for every (api, input parameter) with at least one producer."""
    out: dict[str, dict[str, list[DependencyEdge]]] = {}
    for name, spec in sorted(catalog.specs.items()):
        per_param: dict[str, list[DependencyEdge]] = {}
        for p in spec.input_params:
            edges = rank(name, p.name, catalog, k=k, weights=weights, relevance=relevance)
            if edges:
                per_param[p.name] = edges
        if per_param:
            out[name] = per_param
    return out


def relevance_row(table: RelevanceTable, api: str) -> dict[str, float]:
    """All stored relevance values touching ``api`` (including itself)."""
    row: dict[str, float] = {}
    for (a, b), v in table.pairs.items():
        if a == api:
            row[b] = v
        elif b == api:
            row[a] = v
    return dict(sorted(row.items()))
