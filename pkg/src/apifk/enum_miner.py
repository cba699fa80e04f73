"""Parameter-level constraint mining: enums, numeric ranges, requiredness.

A parameter is enumerable while its global distinct-value count stays
strictly below the threshold (default 20). Batches mined on different days
merge by set union; once a parameter tips over the bound it stays
non-enumerable forever.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .log_model import ApiCallRecord

DEFAULT_ENUM_THRESHOLD = 20

# Fraction of unparseable values tolerated before a numeric range is withheld.
NUMERIC_JUNK_TOLERANCE = 0.01

# Support floor for the 100%-presence requiredness rule.
REQUIRED_MIN_SUPPORT = 30

# Optional sign and decimal point, no exponents.
_NUMERIC_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


class KeyMismatch(ValueError):
    """Enum states for different parameters cannot be merged."""


ENUMERABLE = "Enumerable"
NOT_ENUMERABLE = "NotEnumerable"


@dataclass
class EnumState:
    param_key: tuple[str, str]  # (api, parameter name)
    threshold: int = DEFAULT_ENUM_THRESHOLD
    values: set[str] = field(default_factory=set)
    status: str = ENUMERABLE

    @property
    def enumerable(self) -> bool:
        return self.status == ENUMERABLE

    def add(self, value: str) -> None:
        if self.status == NOT_ENUMERABLE:
            return
        if len(self.values) < self.threshold:
            self.values.add(value)
        if len(self.values) >= self.threshold:
            self.status = NOT_ENUMERABLE


def mine_enum(
    values: Iterable[str],
    threshold: int = DEFAULT_ENUM_THRESHOLD,
    param_key: tuple[str, str] = ("", ""),
) -> EnumState:
    """Enumerable with the full value set iff distinct count < threshold."""
    if threshold < 2:
        raise ValueError("enum threshold must be >= 2")
    state = EnumState(param_key=param_key, threshold=threshold)
    for v in values:
        state.add(v)
    return state


def merge_enum(state: EnumState, batch_values: Iterable[str]) -> EnumState:
    """Union a later batch into an existing state; NotEnumerable absorbs."""
    merged = EnumState(
        param_key=state.param_key,
        threshold=state.threshold,
        values=set(state.values),
        status=state.status,
    )
    for v in batch_values:
        merged.add(v)
    return merged


def merge_enum_states(a: EnumState, b: EnumState) -> EnumState:
    """Merge two mined states for the same parameter."""
    if a.param_key != b.param_key:
        raise KeyMismatch(f"cannot merge {a.param_key} with {b.param_key}")
    if a.threshold != b.threshold:
        raise KeyMismatch("enum thresholds differ")
    if a.status == NOT_ENUMERABLE or b.status == NOT_ENUMERABLE:
        merged = merge_enum(a, b.values)
        merged.status = NOT_ENUMERABLE
        return merged
    return merge_enum(a, b.values)


@dataclass
class NumericRange:
    min: float | None = None
    max: float | None = None
    sample_count: int = 0
    non_numeric_count: int = 0

    @property
    def reportable(self) -> bool:
        """True when numeric samples exist and junk stays within tolerance."""
        total = self.sample_count + self.non_numeric_count
        if total == 0 or self.sample_count == 0:
            return False
        return self.non_numeric_count / total <= NUMERIC_JUNK_TOLERANCE

    def widen(self, other: "NumericRange") -> "NumericRange":
        mins = [m for m in (self.min, other.min) if m is not None]
        maxs = [m for m in (self.max, other.max) if m is not None]
        return NumericRange(
            min=min(mins) if mins else None,
            max=max(maxs) if maxs else None,
            sample_count=self.sample_count + other.sample_count,
            non_numeric_count=self.non_numeric_count + other.non_numeric_count,
        )


def parse_numeric(value: str) -> float | None:
    return float(value) if _NUMERIC_RE.match(value) else None


def mine_numeric_range(values: Iterable[str]) -> NumericRange:
    """Min/max over parseable values; junk beyond 1% makes it unreportable."""
    rng = NumericRange()
    for v in values:
        num = parse_numeric(v)
        if num is None:
            rng.non_numeric_count += 1
            continue
        rng.sample_count += 1
        rng.min = num if rng.min is None or num < rng.min else rng.min
        rng.max = num if rng.max is None or num > rng.max else rng.max
    return rng


@dataclass
class RequirednessStat:
    present_count: int = 0
    total_success_count: int = 0

    @property
    def inferred_required(self) -> bool:
        """Present in 100% of successful calls, with enough of them to trust."""
        return (
            self.total_success_count >= REQUIRED_MIN_SUPPORT
            and self.present_count == self.total_success_count
        )

    def merge(self, other: "RequirednessStat") -> "RequirednessStat":
        return RequirednessStat(
            self.present_count + other.present_count,
            self.total_success_count + other.total_success_count,
        )


def mine_requiredness(records: Iterable[ApiCallRecord]) -> dict[str, RequirednessStat]:
    """Per-parameter presence over one API's successful calls.

    The parameter universe is everything seen in any of the API's records,
    so a parameter only ever sent on failing calls still gets a stat.
    """
    records = list(records)
    universe: set[str] = set()
    for rec in records:
        universe.update(rec.param_names)
    stats = {name: RequirednessStat() for name in sorted(universe)}
    for rec in records:
        if not rec.outcome.is_right:
            continue
        present = set(rec.param_names)
        for name, stat in stats.items():
            stat.total_success_count += 1
            if name in present:
                stat.present_count += 1
    return stats
