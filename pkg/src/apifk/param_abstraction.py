"""Parameter abstraction: common subsequences, class patterns, length stats.

Raw parameter values are abstracted character by character (CJK ideograph
-> 'z', ASCII lowercase -> 'x', ASCII uppercase -> 'X', ASCII digit -> 'd',
anything else kept verbatim), run-compressed ("ddd" -> "d"), and counted.
A map stage summarizes disjoint value chunks; a reduce stage merges the
summaries into one profile per parameter. Pattern and length merges are
exact (multiset sums), so chunking never changes those results. The common
subsequence is a canonical fold of pairwise LCS: inputs are sorted
lexicographically and folded left, and each pairwise LCS resolves ties by
choosing the lexicographically smallest string of maximal length.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence

# Values longer than this are truncated before LCS (cost is O(n*m) per pair);
# transform/compress/length always see the full value.
LCS_TRUNCATION = 4096

# Distinct patterns kept per profile; spill is summed under OTHER_BUCKET.
DEFAULT_PATTERN_CAP = 256
OTHER_BUCKET = "<other>"

_CJK_LO, _CJK_HI = "一", "鿿"


class EmptyInput(ValueError):
    """Raised when an operation that needs at least one value gets none."""


def transform(value: str) -> str:
    """Map each character to its class letter; other characters are kept.

    The output always has the same character count as the input.
    """
    out = []
    for ch in value:
        if "a" <= ch <= "z":
            out.append("x")
        elif "A" <= ch <= "Z":
            out.append("X")
        elif "0" <= ch <= "9":
            out.append("d")
        elif _CJK_LO <= ch <= _CJK_HI:
            out.append("z")
        else:
            out.append(ch)
    return "".join(out)


def compress(abstract: str) -> str:
    """Collapse maximal runs of the same character to one occurrence."""
    return "".join(ch for ch, _ in groupby(abstract))


def abstract_pattern(value: str) -> str:
    """Compressed class pattern of a raw value."""
    return compress(transform(value))


def _strip_common_ends(a: str, b: str) -> tuple[str, str, str, str]:
    """Split off the shared prefix and suffix of a and b.

    Every maximal-length LCS of two strings sharing a first (last) character
    starts (ends) with it, so stripping preserves both LCS length and the
    lexicographically smallest LCS.
    """
    n = min(len(a), len(b))
    p = 0
    while p < n and a[p] == b[p]:
        p += 1
    s = 0
    while s < n - p and a[len(a) - 1 - s] == b[len(b) - 1 - s]:
        s += 1
    return a[:p], a[p : len(a) - s], b[p : len(b) - s], a[len(a) - s :]


def _lcs_pair(a: str, b: str) -> str:
    """Lexicographically smallest longest common subsequence of a and b."""
    if a == b:
        return a
    prefix, a, b, suffix = _strip_common_ends(a, b)
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return prefix + suffix

    # Suffix LCS lengths: length[i][j] = LCS length of a[i:], b[j:].
    length = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(la - 1, -1, -1):
        row, below = length[i], length[i + 1]
        ai = a[i]
        for j in range(lb - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                down, right = below[j], row[j + 1]
                row[j] = down if down >= right else right

    # best[j] holds the smallest maximal-length LCS of a[i:], b[j:] for the
    # row being filled; computed bottom-up so no recursion depth limits apply.
    best_below = [""] * (lb + 1)
    best_row = [""] * (lb + 1)
    for i in range(la - 1, -1, -1):
        ai = a[i]
        for j in range(lb - 1, -1, -1):
            target = length[i][j]
            if target == 0:
                best_row[j] = ""
                continue
            cand = None
            if ai == b[j] and length[i + 1][j + 1] + 1 == target:
                cand = ai + best_below[j + 1]
            if length[i + 1][j] == target:
                alt = best_below[j]
                if cand is None or alt < cand:
                    cand = alt
            if length[i][j + 1] == target:
                alt = best_row[j + 1]
                if cand is None or alt < cand:
                    cand = alt
            best_row[j] = cand
        best_below, best_row = best_row, best_below

    return prefix + best_below[0] + suffix


def common_subsequence(values: Sequence[str]) -> str:
    """Canonical-fold LCS over a value list (sorted, then folded pairwise).

    The result is a subsequence of every input. Empty string means no common
    subsequence exists.
    """
    if not values:
        raise EmptyInput("common_subsequence needs at least one value")
    ordered = sorted(v[:LCS_TRUNCATION] for v in values)
    acc = ordered[0]
    for v in ordered[1:]:
        if not acc:
            break
        acc = _lcs_pair(acc, v)
    return acc


def is_subsequence(needle: str, haystack: str) -> bool:
    """Two-pointer subsequence check."""
    it = iter(haystack)
    return all(ch in it for ch in needle)


def length_histogram(values: Iterable[str]) -> dict[int, int]:
    """Histogram of raw character counts."""
    return dict(Counter(len(v) for v in values))


@dataclass
class PartialAbstraction:
    """Mapper output for one chunk of values."""

    subsequence: str
    patterns: Counter
    lengths: dict[int, int]
    values_seen: int
    truncated: int = 0


@dataclass
class AbstractionProfile:
    """Reduced global profile for one parameter.

    ``patterns`` is sorted by count descending (ties by pattern ascending).
    """

    common_subsequence: str
    patterns: list[tuple[str, int]]
    lengths: dict[int, int]
    values_seen: int = 0
    truncated: int = 0

    @property
    def top_pattern(self) -> str | None:
        for pattern, _ in self.patterns:
            if pattern != OTHER_BUCKET:
                return pattern
        return None


def map_chunk(values: Sequence[str]) -> PartialAbstraction:
    """Summarize one chunk: fold LCS, count compressed patterns and lengths."""
    if not values:
        raise EmptyInput("map_chunk needs at least one value")
    truncated = sum(1 for v in values if len(v) > LCS_TRUNCATION)
    return PartialAbstraction(
        subsequence=common_subsequence(values),
        patterns=Counter(abstract_pattern(v) for v in values),
        lengths=length_histogram(values),
        values_seen=len(values),
        truncated=truncated,
    )


def merge_partials(partials: Sequence[PartialAbstraction]) -> PartialAbstraction:
    """Exact merge of mapper outputs (no pattern cap applied).

    Pattern and length merges are commutative and associative; the merged
    subsequence re-folds the partial subsequences canonically, so hierarchical
    merging should group partials consistently if reproducibility matters.
    """
    if not partials:
        raise EmptyInput("merge_partials needs at least one partial")
    patterns: Counter = Counter()
    lengths: Counter = Counter()
    for p in partials:
        patterns.update(p.patterns)
        lengths.update(p.lengths)
    return PartialAbstraction(
        subsequence=common_subsequence([p.subsequence for p in partials]),
        patterns=patterns,
        lengths=dict(lengths),
        values_seen=sum(p.values_seen for p in partials),
        truncated=sum(p.truncated for p in partials),
    )


def _sorted_patterns(patterns: Counter) -> list[tuple[str, int]]:
    return sorted(patterns.items(), key=lambda kv: (-kv[1], kv[0]))


def reduce_partials(
    partials: Sequence[PartialAbstraction], pattern_cap: int = DEFAULT_PATTERN_CAP
) -> AbstractionProfile:
    """Reducer: merge all partials and emit the profile.

    At most ``pattern_cap`` distinct patterns are kept; any spill is summed
    under the reserved ``<other>`` bucket so counts still total values_seen.
    """
    merged = merge_partials(partials)
    ranked = _sorted_patterns(merged.patterns)
    if pattern_cap and len(ranked) > pattern_cap:
        kept = ranked[:pattern_cap]
        spill = sum(count for _, count in ranked[pattern_cap:])
        kept.append((OTHER_BUCKET, spill))
        ranked = sorted(kept, key=lambda kv: (-kv[1], kv[0]))
    return AbstractionProfile(
        common_subsequence=merged.subsequence,
        patterns=ranked,
        lengths=merged.lengths,
        values_seen=merged.values_seen,
        truncated=merged.truncated,
    )


def abstract_values(
    values: Sequence[str], pattern_cap: int = DEFAULT_PATTERN_CAP
) -> AbstractionProfile:
    """Single-chunk convenience: map then reduce."""
    return reduce_partials([map_chunk(values)], pattern_cap=pattern_cap)


def representative_examples(
    values: Sequence[str], profile: AbstractionProfile, k: int = 3
) -> list[str]:
    """Example values drawn only from the profile's highest-count pattern.

    Candidates are ranked by frequency (descending) then value, so examples
    are universal rather than arbitrary picks.
    """
    top = profile.top_pattern
    if top is None:
        return []
    freq = Counter(v for v in values if abstract_pattern(v) == top)
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    return [v for v, _ in ranked[:k]]
