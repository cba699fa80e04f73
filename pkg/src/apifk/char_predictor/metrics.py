"""Prediction quality measures."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PrecisionReport:
    overall: float
    per_class: dict[str, float]
    macro: float
    total: int


def precision(predicted: Sequence[str], actual: Sequence[str]) -> PrecisionReport:
    """Fraction of predictions that matched, overall and per predicted class.

    Per-class precision divides correct-in-class by the number of times the
    class was *predicted*, so classes never predicted are absent from the
    report rather than scored zero.
    """
    if len(predicted) != len(actual):
        raise LengthMismatch(
            f"{len(predicted)} predictions vs {len(actual)} outcomes"
        )
    if not predicted:
        raise LengthMismatch("empty input")
    hits = Counter()
    seen = Counter()
    correct = 0
    for p, a in zip(predicted, actual):
        seen[p] += 1
        if p == a:
            hits[p] += 1
            correct += 1
    per_class = {cls: hits[cls] / n for cls, n in sorted(seen.items())}
    macro = sum(per_class.values()) / len(per_class)
    return PrecisionReport(
        overall=correct / len(predicted),
        per_class=per_class,
        macro=macro,
        total=len(predicted),
    )
