"""CLI and HTTP facade over the miners, the simulator, and the predictor.

The HTTP layer serves mined knowledge documents as immutable snapshots: a
rebuild mines the ingested records, folds them into the current snapshot,
and swaps the whole dict in one assignment, so concurrent readers always
see a consistent set. /predict never mutates state; /ingest only appends.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .char_predictor import load_checkpoint, predict, save_checkpoint, train, TrainCfg
from .dependency_graph import RankWeights
from .enum_miner import DEFAULT_ENUM_THRESHOLD, parse_numeric
from .knowledge_store import ApiKnowledge, load_all, merge_daily, save_all, to_doc
from .log_model import (
    ApiCallRecord,
    MalformedRecord,
    RIGHT,
    parse_record,
    read_log,
    write_log,
)
from .pipeline import MiningConfig, mine_knowledge
from .simulator import STOCK_SCENARIOS, SimScenario, generate, load_scenario, sms_scenario

KNOWLEDGE_DIR_ENV = "APIFK_KNOWLEDGE_DIR"


@dataclass(frozen=True)
class SuccessRateReport:
    call_number: int
    call_success: int

    @property
    def sr(self) -> float:
        """call_success / call_number; 0 for an empty history by convention."""
        return self.call_success / self.call_number if self.call_number else 0.0


def compute_sr(records: Iterable[ApiCallRecord]) -> SuccessRateReport:
    number = success = 0
    for rec in records:
        number += 1
        if rec.outcome.is_right:
            success += 1
    return SuccessRateReport(call_number=number, call_success=success)


def constraint_violations(knowledge: ApiKnowledge, params: dict[str, str]) -> list[dict]:
    """Rule-level checks of a request against mined knowledge.

    Kinds: missing_required, not_in_enum, out_of_range. Parameters the
    knowledge has never seen are not flagged; absence of evidence is not a
    violation.
    """
    out = []
    for name, pk in sorted(knowledge.params.items()):
        if pk.required and name not in params:
            out.append(
                {
                    "param": name,
                    "kind": "missing_required",
                    "detail": f"{name} was present in all observed successful calls",
                }
            )
    for name in sorted(params):
        pk = knowledge.params.get(name)
        if pk is None:
            continue
        value = params[name]
        enum_values = pk.enum_values
        if enum_values is not None and value not in enum_values:
            out.append(
                {
                    "param": name,
                    "kind": "not_in_enum",
                    "detail": f"{value!r} not among {enum_values}",
                }
            )
        rng = pk.numeric_range
        if rng is not None:
            num = parse_numeric(value)
            if num is not None and not rng[0] <= num <= rng[1]:
                out.append(
                    {
                        "param": name,
                        "kind": "out_of_range",
                        "detail": f"{value} outside [{rng[0]}, {rng[1]}]",
                    }
                )
    return out


class ServiceState:
    """Mutable serve-time state; knowledge swaps are single assignments."""

    def __init__(
        self,
        knowledge_dir: str | Path | None = None,
        model_path: str | Path | None = None,
        scenario: SimScenario | None = None,
    ):
        self.knowledge_dir = Path(knowledge_dir) if knowledge_dir else None
        self.snapshot: dict[str, ApiKnowledge] = {}
        if self.knowledge_dir and self.knowledge_dir.is_dir():
            self.snapshot = load_all(self.knowledge_dir)
        self.model = load_checkpoint(model_path) if model_path else None
        self.scenario = scenario or sms_scenario()
        self.history: list[ApiCallRecord] = []
        self.ingested: list[ApiCallRecord] = []
        self.rebuilding = False
        self.lock = threading.Lock()
        self._next_ts = 1_900_000_000

    def known(self, api: str) -> bool:
        return api in self.snapshot or api in self.scenario.catalog

    def next_ts(self) -> int:
        self._next_ts += 1
        return self._next_ts


def _request_body(body: dict) -> tuple[str, dict[str, str]]:
    if not isinstance(body, dict):
        raise HTTPException(400, "body must be a JSON object")
    api = body.get("api")
    params = body.get("params")
    if not isinstance(api, str) or not api:
        raise HTTPException(400, "field 'api' must be a nonempty string")
    if not isinstance(params, dict) or not all(
        isinstance(k, str) and k and isinstance(v, str) for k, v in params.items()
    ):
        raise HTTPException(400, "field 'params' must map strings to strings")
    return api, params


def create_app(
    knowledge_dir: str | Path | None = None,
    model_path: str | Path | None = None,
    scenario: SimScenario | None = None,
) -> FastAPI:
    if knowledge_dir is None:
        knowledge_dir = os.environ.get(KNOWLEDGE_DIR_ENV) or None
    state = ServiceState(knowledge_dir, model_path, scenario)
    app = FastAPI(title="API knowledge service", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = state

    def knowledge_or_404(name: str) -> ApiKnowledge:
        k = state.snapshot.get(name)
        if k is None:
            raise HTTPException(404, f"no knowledge for API {name!r}")
        return k

    @app.get("/v1/apis")
    def list_apis():
        names = set(state.snapshot) | set(state.scenario.catalog.specs)
        return {"apis": sorted(names)}

    @app.get("/v1/apis/{name}/knowledge")
    def get_knowledge(name: str):
        return to_doc(knowledge_or_404(name))

    @app.get("/v1/apis/{name}/params/{param}/producers")
    def get_producers(name: str, param: str, k: int = 5):
        if k < 1:
            raise HTTPException(400, "k must be >= 1")
        knowledge = knowledge_or_404(name)
        known_param = (
            param in knowledge.params
            or param in knowledge.dependencies
            or param in (knowledge.spec_inputs or [])
        )
        if not known_param:
            raise HTTPException(404, f"API {name!r} has no parameter {param!r}")
        edges = knowledge.dependencies.get(param, [])[:k]
        return {
            "api": name,
            "param": param,
            "producers": [{"producer": e.producer_api, "score": e.score} for e in edges],
        }

    @app.post("/v1/predict")
    def post_predict(body: dict = Body(...)):
        api, params = _request_body(body)
        if not state.known(api):
            raise HTTPException(404, f"unknown API {api!r}")
        knowledge = state.snapshot.get(api)
        violations = constraint_violations(knowledge, params) if knowledge else []
        prediction = None
        if state.model is not None:
            record = ApiCallRecord.make(api, params)
            label, p = predict(state.model, record)
            prediction = {"label": label.code, "probability": p}
        return {
            "api": api,
            "prediction": prediction,
            "violations": violations,
            "knowledge_available": knowledge is not None,
        }

    @app.post("/v1/call")
    def post_call(body: dict = Body(...)):
        api, params = _request_body(body)
        if not state.known(api):
            raise HTTPException(404, f"unknown API {api!r}")
        outcome = RIGHT
        for rule in state.scenario.error_rules:
            if rule.api and rule.api != api:
                continue
            if rule.matches(params):
                outcome = rule.code
                break
        session = body.get("session")
        record = ApiCallRecord.make(
            api,
            params,
            outcome=outcome,
            session_id=session if isinstance(session, str) else "live",
            timestamp=state.next_ts(),
        )
        state.history.append(record)
        return {"api": api, "outcome": outcome, "right": outcome == RIGHT}

    @app.post("/v1/ingest")
    def post_ingest(body: dict = Body(...)):
        if not isinstance(body, dict) or not isinstance(body.get("records"), list):
            raise HTTPException(400, "body must carry a 'records' array")
        with state.lock:
            if state.rebuilding:
                raise HTTPException(409, "knowledge rebuild in progress")
            batch = []
            for i, obj in enumerate(body["records"]):
                try:
                    batch.append(parse_record(json.dumps(obj)))
                except (MalformedRecord, TypeError) as e:
                    raise HTTPException(400, f"records[{i}]: {e}") from e
            state.ingested.extend(batch)  # all-or-nothing, append-only
            return {"accepted": len(batch), "pending": len(state.ingested)}

    @app.post("/v1/rebuild")
    def post_rebuild():
        with state.lock:
            if state.rebuilding:
                raise HTTPException(409, "knowledge rebuild in progress")
            state.rebuilding = True
            pending, state.ingested = state.ingested, []
        try:
            mined = mine_knowledge(pending, state.scenario.catalog)
            merged = dict(state.snapshot)
            for api, batch in mined.items():
                merged[api] = (
                    merge_daily(merged[api], batch) if api in merged else batch
                )
            if state.knowledge_dir:
                save_all(merged, state.knowledge_dir)
            state.snapshot = merged  # atomic swap
        finally:
            with state.lock:
                state.rebuilding = False
        return {"merged_records": len(pending), "apis": sorted(state.snapshot)}

    @app.get("/v1/metrics/sr")
    def get_sr():
        report = compute_sr(state.history)
        return {
            "call_number": report.call_number,
            "call_success": report.call_success,
            "sr": report.sr,
        }

    return app


# --- command line --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; argparse's default of 2 is reserved for runtime
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_scenario(name_or_path: str, seed: int | None) -> SimScenario:
    if name_or_path in STOCK_SCENARIOS:
        return STOCK_SCENARIOS[name_or_path](seed) if seed is not None else STOCK_SCENARIOS[name_or_path]()
    scenario = load_scenario(name_or_path)
    if seed is not None:
        scenario.seed = seed
    return scenario


def cmd_simulate(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    records = generate(scenario, args.n)
    count = write_log(records, args.out)
    report = compute_sr(records)
    print(f"wrote {count} records to {args.out} (sr={report.sr:.4f})")
    return 0


def cmd_mine(args) -> int:
    records, skipped = read_log(args.log)
    catalog = _resolve_scenario(args.scenario, None).catalog if args.scenario else None
    config = MiningConfig(
        enum_threshold=args.threshold,
        weights=RankWeights(args.alpha, args.beta, args.sigma),
    )
    knowledge = mine_knowledge(records, catalog, config)
    paths = save_all(knowledge, args.out)
    for p in paths:
        print(f"wrote {p}")
    if skipped:
        print(f"skipped {skipped} malformed lines", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    records, _ = read_log(args.log)
    cfg = TrainCfg(seed=args.seed, epochs=args.epochs)
    model, metrics = train(records=records, variant=args.variant, cfg=cfg)
    for row in metrics:
        print(
            f"epoch={row['epoch']} lr={row['lr']:.6f} "
            f"loss={row['train_loss']:.4f} acc={row['train_accuracy']:.4f}"
        )
    save_checkpoint(model, args.model)
    print(f"saved model to {args.model}")
    return 0


def cmd_predict(args) -> int:
    model = load_checkpoint(args.model)
    with open(args.request, encoding="utf-8") as fh:
        request = json.load(fh)
    record = ApiCallRecord.make(request["api"], request["params"])
    label, p = predict(model, record)
    print(f"{label.code}\t{p:.4f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    app = create_app(
        knowledge_dir=args.knowledge,
        model_path=args.model,
        scenario=_resolve_scenario(args.scenario, args.seed) if args.scenario else None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_sr(args) -> int:
    records, _ = read_log(args.log)
    report = compute_sr(records)
    print(
        f"call_number={report.call_number} call_success={report.call_success} "
        f"sr={report.sr:.4f}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apifk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic call log")
    p.add_argument("--scenario", default="sms", help="stock name (sms, table3) or config path")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mine", help="mine knowledge documents from a log")
    p.add_argument("--log", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario", default=None, help="scenario providing the API catalog")
    p.add_argument("--threshold", type=int, default=DEFAULT_ENUM_THRESHOLD)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("train", help="train the outcome predictor on a log")
    p.add_argument("--log", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--variant", choices=["large", "small", "tiny"], default="tiny")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=30)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict one request's outcome")
    p.add_argument("--model", required=True)
    p.add_argument("--request", required=True, help="JSON file with api and params")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="serve knowledge and predictions over HTTP")
    p.add_argument("--knowledge", default=None, help=f"knowledge dir (or ${KNOWLEDGE_DIR_ENV})")
    p.add_argument("--model", default=None)
    p.add_argument("--scenario", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("sr", help="success rate of a call log")
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_sr)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # runtime failures map to exit 2 by contract
        print(f"apifk: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
