"""Deterministic synthetic call-log generator with rule-based errors.

Counts are exact, not sampled: API mix, per-API sequence mix, and fault
blocks are allocated by largest-remainder quotas, so a 0.7/0.3 mix over
1000 records is exactly 700/300 every time. Each record draws randomness
from its own seed stream keyed by (scenario seed, api index, record
index), which makes generation order-independent and reproducible.

Faults mutate already-generated parameters in disjoint blocks anchored at
the end of each API's records; outcomes are then computed by evaluating
the scenario's ordered error rules against the final parameters, so the
rules, not the injection bookkeeping, decide every label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dependency_graph import ApiCatalog
from .log_model import RIGHT, ApiCallRecord, ApiSpec, OutcomeLabel

_WORDS = (
    "alert", "batch", "daily", "promo", "queue", "retry", "sign", "trace",
)


class ScenarioError(ValueError):
    """Scenario config violates an invariant (rates, names, kinds)."""


def largest_remainder(rates: Sequence[float], n: int) -> list[int]:
    """Integer quotas summing to n, proportional to rates (which sum to 1).

    Floor first, then hand out the shortfall by descending fractional part,
    ties broken by earlier index, so the result is deterministic.
    """
    if n < 0:
        raise ScenarioError("n must be >= 0")
    if rates and abs(sum(rates) - 1.0) > 1e-9:
        raise ScenarioError(f"rates must sum to 1, got {sum(rates)}")
    exact = [n * r for r in rates]
    counts = [int(e) for e in exact]
    shortfall = n - sum(counts)
    order = sorted(range(len(rates)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:shortfall]:
        counts[i] += 1
    return counts


def _digit_string(rng: np.random.Generator, k: int) -> str:
    return "".join(str(d) for d in rng.integers(0, 10, size=k))


@dataclass(frozen=True)
class ParamGen:
    """One parameter's value generator.

    kinds: digits (prefix + random digits), enum (round-robin pool),
    prefixed_id (prefix + random digits), int_range (min at first
    occurrence, max at second, uniform after), json_kv (single-key JSON
    with a random digit value), text (random words).
    """

    name: str
    kind: str
    length: int = 0
    prefix: str = ""
    values: tuple[str, ...] = ()
    min: int = 0
    max: int = 0
    key: str = "code"

    def __post_init__(self):
        if self.kind not in ("digits", "enum", "prefixed_id", "int_range", "json_kv", "text"):
            raise ScenarioError(f"unknown generator kind {self.kind!r}")
        if self.kind == "enum" and not self.values:
            raise ScenarioError(f"enum generator {self.name!r} needs values")
        if self.kind == "int_range" and self.min > self.max:
            raise ScenarioError(f"int_range {self.name!r} has min > max")

    def value(self, occurrence: int, rng: np.random.Generator) -> str:
        if self.kind == "digits":
            return self.prefix + _digit_string(rng, self.length)
        if self.kind == "enum":
            return self.values[occurrence % len(self.values)]
        if self.kind == "prefixed_id":
            return self.prefix + _digit_string(rng, self.length)
        if self.kind == "int_range":
            # Emit both endpoints up front so the mined range is exact.
            if occurrence == 0:
                return str(self.min)
            if occurrence == 1:
                return str(self.max)
            return str(int(rng.integers(self.min, self.max + 1)))
        if self.kind == "json_kv":
            return '{"%s":"%s"}' % (self.key, _digit_string(rng, self.length))
        count = int(rng.integers(2, 5))
        picks = rng.integers(0, len(_WORDS), size=count)
        return " ".join(_WORDS[i] for i in picks)


@dataclass(frozen=True)
class ErrorRule:
    """First matching rule decides a record's outcome.

    when: missing | equals | prefix | not_digits | longer_than. An empty
    ``api`` applies the rule to every API; otherwise only to that one
    (a "missing X" rule must not fire on APIs that never take X).
    """

    code: str
    when: str
    param: str
    value: str = ""
    length: int = 0
    api: str = ""

    def __post_init__(self):
        if self.when not in ("missing", "equals", "prefix", "not_digits", "longer_than"):
            raise ScenarioError(f"unknown rule predicate {self.when!r}")
        if self.code == RIGHT:
            raise ScenarioError("error rules may not emit the success label")

    def matches(self, params: dict[str, str]) -> bool:
        if self.when == "missing":
            return self.param not in params
        got = params.get(self.param)
        if got is None:
            return False
        if self.when == "equals":
            return got == self.value
        if self.when == "prefix":
            return got.startswith(self.value)
        if self.when == "not_digits":
            return not got.isdigit()
        return len(got) > self.length


@dataclass(frozen=True)
class FaultSpec:
    """Deterministic parameter mutation applied to a block of records.

    ops: drop (remove the param), set (fixed value, added if absent),
    set_prefix (prepend), letters (randomize the last `length` chars to
    lowercase letters), digits (replace with a random digit string).
    """

    rate: float
    op: str
    param: str
    value: str = ""
    length: int = 0

    def __post_init__(self):
        if self.op not in ("drop", "set", "set_prefix", "letters", "digits"):
            raise ScenarioError(f"unknown fault op {self.op!r}")
        if not 0 < self.rate <= 1:
            raise ScenarioError("fault rate must be in (0, 1]")

    def apply(self, params: dict[str, str], rng: np.random.Generator) -> None:
        if self.op == "drop":
            params.pop(self.param, None)
        elif self.op == "set":
            params[self.param] = self.value
        elif self.op == "set_prefix":
            params[self.param] = self.value + params.get(self.param, "")
        elif self.op == "letters":
            old = params.get(self.param, "")
            k = min(self.length, len(old))
            tail = "".join(chr(ord("a") + int(c)) for c in rng.integers(0, 26, size=k))
            params[self.param] = old[: len(old) - k] + tail
        else:
            params[self.param] = _digit_string(rng, self.length)


@dataclass(frozen=True)
class SequenceMix:
    params: tuple[str, ...]
    rate: float


@dataclass
class ApiScenario:
    """Generation plan for one API."""

    api: str
    params: list[ParamGen]
    sequences: list[SequenceMix]
    outputs: list[str] = field(default_factory=list)
    faults: list[FaultSpec] = field(default_factory=list)

    def __post_init__(self):
        declared = {p.name for p in self.params}
        if len(declared) != len(self.params):
            raise ScenarioError(f"duplicate parameter generators in {self.api}")
        if not self.sequences:
            raise ScenarioError(f"{self.api} needs at least one sequence")
        if abs(sum(s.rate for s in self.sequences) - 1.0) > 1e-9:
            raise ScenarioError(f"{self.api} sequence rates must sum to 1")
        for s in self.sequences:
            missing = set(s.params) - declared
            if missing:
                raise ScenarioError(f"{self.api} sequence uses undeclared {sorted(missing)}")
        if sum(f.rate for f in self.faults) > 1 + 1e-9:
            raise ScenarioError(f"{self.api} fault rates exceed 1")

    def spec(self) -> ApiSpec:
        return ApiSpec.make(self.api, [p.name for p in self.params], self.outputs)


@dataclass
class SimScenario:
    apis: list[ApiScenario]
    mix: dict[str, float]
    error_rules: list[ErrorRule]
    seed: int = 0
    session_size: int = 4
    base_ts: int = 1_700_000_000

    def __post_init__(self):
        names = [a.api for a in self.apis]
        if len(names) != len(set(names)):
            raise ScenarioError("duplicate API scenarios")
        if set(self.mix) != set(names):
            raise ScenarioError("mix keys must match scenario APIs")
        if abs(sum(self.mix.values()) - 1.0) > 1e-9:
            raise ScenarioError("api mix must sum to 1")
        if self.seed < 0:
            raise ScenarioError("seed must be >= 0")
        if self.session_size < 1:
            raise ScenarioError("session_size must be >= 1")

    @property
    def catalog(self) -> ApiCatalog:
        return ApiCatalog.from_specs(a.spec() for a in self.apis)


def _api_records(scenario: SimScenario, api_index: int, n_api: int) -> list[tuple[str, dict[str, str], str]]:
    plan = scenario.apis[api_index]
    seq_counts = largest_remainder([s.rate for s in plan.sequences], n_api)
    seq_bounds = np.cumsum(seq_counts)

    # Fault blocks sit at the tail so early records keep the generators'
    # endpoint emissions (int_range occurrences 0 and 1) intact. The clean
    # share joins the quota so fault counts are exact, like everything else.
    if plan.faults:
        clean = 1.0 - sum(f.rate for f in plan.faults)
        fault_counts = largest_remainder([f.rate for f in plan.faults] + [clean], n_api)[:-1]
        fault_start = n_api - sum(fault_counts)
        fault_bounds = fault_start + np.cumsum(fault_counts)
    else:
        fault_start, fault_bounds = n_api, None

    occurrences = {p.name: 0 for p in plan.params}
    seq_idx = 0
    out = []
    for i in range(n_api):
        while i >= seq_bounds[seq_idx]:
            seq_idx += 1
        include = set(plan.sequences[seq_idx].params)
        rng = np.random.default_rng(np.random.SeedSequence([scenario.seed, api_index, i]))
        params: dict[str, str] = {}
        for gen in plan.params:
            if gen.name not in include:
                continue
            params[gen.name] = gen.value(occurrences[gen.name], rng)
            occurrences[gen.name] += 1
        if fault_bounds is not None and i >= fault_start:
            j = int(np.searchsorted(fault_bounds, i, side="right"))
            if j < len(plan.faults):
                plan.faults[j].apply(params, rng)
        outcome = RIGHT
        for rule in scenario.error_rules:
            if rule.api and rule.api != plan.api:
                continue
            if rule.matches(params):
                outcome = rule.code
                break
        out.append((plan.api, params, outcome))
    return out


def generate(scenario: SimScenario, n: int) -> list[ApiCallRecord]:
    """Produce exactly n records; a pure function of (scenario, n)."""
    api_rates = [scenario.mix[a.api] for a in scenario.apis]
    api_counts = largest_remainder(api_rates, n)

    raw: list[tuple[str, dict[str, str], str]] = []
    for api_index, n_api in enumerate(api_counts):
        raw.extend(_api_records(scenario, api_index, n_api))

    order = np.random.default_rng(np.random.SeedSequence([scenario.seed])).permutation(len(raw))
    records = []
    for position, src in enumerate(order):
        api, params, outcome = raw[src]
        records.append(
            ApiCallRecord(
                api=api,
                params=tuple(params.items()),
                outcome=OutcomeLabel(outcome),
                session_id=f"s{position // scenario.session_size:06d}",
                timestamp=scenario.base_ts + position,
            )
        )
    return records


# --- scenario config files ---------------------------------------------


def scenario_to_config(scenario: SimScenario) -> dict:
    def gen_doc(g: ParamGen) -> dict:
        doc = {"name": g.name, "kind": g.kind}
        if g.kind in ("digits", "prefixed_id"):
            doc["length"] = g.length
        if g.prefix:
            doc["prefix"] = g.prefix
        if g.kind == "enum":
            doc["values"] = list(g.values)
        if g.kind == "int_range":
            doc["min"], doc["max"] = g.min, g.max
        if g.kind == "json_kv":
            doc["key"] = g.key
            doc["length"] = g.length
        return doc

    return {
        "seed": scenario.seed,
        "session_size": scenario.session_size,
        "base_ts": scenario.base_ts,
        "mix": dict(scenario.mix),
        "error_rules": [
            {
                "code": r.code,
                "when": r.when,
                "param": r.param,
                "value": r.value,
                "length": r.length,
                "api": r.api,
            }
            for r in scenario.error_rules
        ],
        "apis": [
            {
                "api": a.api,
                "params": [gen_doc(g) for g in a.params],
                "outputs": list(a.outputs),
                "sequences": [{"params": list(s.params), "rate": s.rate} for s in a.sequences],
                "faults": [
                    {"rate": f.rate, "op": f.op, "param": f.param, "value": f.value, "length": f.length}
                    for f in a.faults
                ],
            }
            for a in scenario.apis
        ],
    }


def scenario_from_config(config: dict) -> SimScenario:
    try:
        apis = [
            ApiScenario(
                api=a["api"],
                params=[
                    ParamGen(
                        name=g["name"],
                        kind=g["kind"],
                        length=g.get("length", 0),
                        prefix=g.get("prefix", ""),
                        values=tuple(g.get("values", ())),
                        min=g.get("min", 0),
                        max=g.get("max", 0),
                        key=g.get("key", "code"),
                    )
                    for g in a["params"]
                ],
                sequences=[SequenceMix(tuple(s["params"]), s["rate"]) for s in a["sequences"]],
                outputs=list(a.get("outputs", [])),
                faults=[
                    FaultSpec(
                        rate=f["rate"],
                        op=f["op"],
                        param=f["param"],
                        value=f.get("value", ""),
                        length=f.get("length", 0),
                    )
                    for f in a.get("faults", [])
                ],
            )
            for a in config["apis"]
        ]
        return SimScenario(
            apis=apis,
            mix=dict(config["mix"]),
            error_rules=[
                ErrorRule(
                    code=r["code"],
                    when=r["when"],
                    param=r["param"],
                    value=r.get("value", ""),
                    length=r.get("length", 0),
                    api=r.get("api", ""),
                )
                for r in config["error_rules"]
            ],
            seed=config.get("seed", 0),
            session_size=config.get("session_size", 4),
            base_ts=config.get("base_ts", 1_700_000_000),
        )
    except (KeyError, TypeError) as e:
        raise ScenarioError(f"bad scenario config: {e}") from e


def load_scenario(path: str | Path) -> SimScenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_config(json.load(fh))


def dump_scenario(scenario: SimScenario, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_config(scenario), fh, ensure_ascii=True, indent=2, sort_keys=True)
        fh.write("\n")


# --- stock scenarios ----------------------------------------------------

SMS_SIGN_POOL = ("AcmeCorp", "BulkNotify", "CloudPing", "DailyDeal", "OpsAlert")
TEMPLATE_POOL = tuple(f"SMS_10000{i}" for i in range(6))


def _send_sms(faults: bool) -> ApiScenario:
    fault_list = [
        FaultSpec(rate=0.10, op="drop", param="SignName"),
        FaultSpec(rate=0.10, op="letters", param="PhoneNumbers", length=4),
        FaultSpec(rate=0.10, op="set_prefix", param="TemplateCode", value="BAD_"),
        FaultSpec(rate=0.10, op="digits", param="OutId", length=12),
        FaultSpec(rate=0.10, op="set", param="SignName", value="forbidden"),
    ]
    return ApiScenario(
        api="SendSms",
        params=[
            ParamGen("PhoneNumbers", "digits", length=9, prefix="13"),
            ParamGen("SignName", "enum", values=SMS_SIGN_POOL),
            ParamGen("TemplateCode", "enum", values=TEMPLATE_POOL),
            ParamGen("TemplateParam", "json_kv", key="code", length=6),
        ],
        # The triple block comes first so it stays clear of the fault blocks
        # at the tail: successful traffic then spans both sequences and
        # TemplateParam is genuinely optional among successes.
        sequences=[
            SequenceMix(("PhoneNumbers", "SignName", "TemplateCode"), 0.3),
            SequenceMix(("PhoneNumbers", "SignName", "TemplateCode", "TemplateParam"), 0.7),
        ],
        outputs=["BizId", "RequestId"],
        faults=fault_list if faults else [],
    )


def _add_sms_sign() -> ApiScenario:
    return ApiScenario(
        api="AddSmsSign",
        params=[
            ParamGen("SignName", "enum", values=SMS_SIGN_POOL),
            ParamGen("SignSource", "enum", values=("0", "1", "2", "3")),
            ParamGen("Remark", "text"),
        ],
        sequences=[SequenceMix(("SignName", "SignSource", "Remark"), 1.0)],
        outputs=["SignName", "RequestId"],
    )


def _query_send_details() -> ApiScenario:
    return ApiScenario(
        api="QuerySendDetails",
        params=[
            ParamGen("PhoneNumber", "digits", length=9, prefix="13"),
            ParamGen("BizId", "prefixed_id", prefix="900", length=12),
            ParamGen("SendDate", "digits", length=8, prefix=""),
            ParamGen("PageSize", "int_range", min=1, max=50),
            ParamGen("CurrentPage", "int_range", min=1, max=100),
        ],
        sequences=[
            SequenceMix(("PhoneNumber", "BizId", "SendDate", "PageSize", "CurrentPage"), 0.6),
            SequenceMix(("PhoneNumber", "SendDate", "PageSize", "CurrentPage"), 0.4),
        ],
        outputs=["TotalCount", "RequestId"],
    )


DEFAULT_ERROR_RULES = [
    ErrorRule(code="isv.SMS_SIGNATURE_ILLEGAL", when="missing", param="SignName", api="SendSms"),
    ErrorRule(code="isv.SIGN_NAME_FORBIDDEN", when="equals", param="SignName", value="forbidden", api="SendSms"),
    ErrorRule(code="isv.MOBILE_NUMBER_ILLEGAL", when="not_digits", param="PhoneNumbers", api="SendSms"),
    ErrorRule(code="isv.SMS_TEMPLATE_ILLEGAL", when="prefix", param="TemplateCode", value="BAD_", api="SendSms"),
    ErrorRule(code="isv.OUT_ID_ILLEGAL", when="longer_than", param="OutId", length=8, api="SendSms"),
]


def sms_scenario(seed: int = 7, faults: bool = True) -> SimScenario:
    """Messaging trio with the SignName producer/consumer dependency.

    With faults on, half of SendSms traffic is split evenly across five
    injected error classes; everything else succeeds.
    """
    return SimScenario(
        apis=[_send_sms(faults), _add_sms_sign(), _query_send_details()],
        mix={"SendSms": 0.6, "AddSmsSign": 0.2, "QuerySendDetails": 0.2},
        error_rules=list(DEFAULT_ERROR_RULES),
        seed=seed,
    )


def table3_scenario(seed: int = 7) -> SimScenario:
    """SendSms only, fault-free: the exact 0.7/0.3 sequence-mix fixture."""
    return SimScenario(
        apis=[_send_sms(faults=False)],
        mix={"SendSms": 1.0},
        error_rules=list(DEFAULT_ERROR_RULES),
        seed=seed,
    )


STOCK_SCENARIOS = {"sms": sms_scenario, "table3": table3_scenario}
