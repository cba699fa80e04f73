"""
One full round trip over the HTTP surface
=========================================

Mine knowledge from a simulated log, mount the service, and walk the /v1
endpoints the way the browser console does: read constraints, check a
request before sending, execute calls, watch the success rate, then feed
the day's calls back in and rebuild.

Uses the in-process test client, so no port is bound; install the dev
extras (httpx) to run this one. `apifk serve` exposes the same app on a
real socket.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from apifk.knowledge_store import save_all
from apifk.pipeline import mine_knowledge
from apifk.service import create_app
from apifk.simulator import generate, sms_scenario

scenario = sms_scenario(seed=7)
records = generate(scenario, 2000)
knowledge = mine_knowledge(records, catalog=scenario.catalog)

workdir = Path(tempfile.mkdtemp(prefix="apifk_demo_"))
save_all(knowledge, workdir)
print("knowledge documents:", sorted(p.name for p in workdir.glob("*.json")))

client = TestClient(create_app(knowledge_dir=workdir, scenario=scenario))

print("APIs:", client.get("/v1/apis").json()["apis"])

doc = client.get("/v1/apis/SendSms/knowledge").json()
sign = doc["params"]["SignName"]
print("SignName enum:", sign["enum"]["values"])

producers = client.get("/v1/apis/SendSms/params/SignName/producers").json()
print("SignName producers:", [p["producer"] for p in producers["producers"]])

# pre-call check: the signature below was never mined, so it gets flagged
check = client.post("/v1/predict", json={
    "api": "SendSms",
    "params": {"PhoneNumbers": "13812345678", "SignName": "Mallory",
               "TemplateCode": "SMS_100001"},
}).json()
print("violations for SignName=Mallory:", check["violations"])

# a scripted session: three good calls, one that drops the signature
good = {"PhoneNumbers": "13812345678", "SignName": "AcmeCorp",
        "TemplateCode": "SMS_100001"}
bad = {"PhoneNumbers": "13812345678", "TemplateCode": "SMS_100001"}
for params in (good, good, good, bad):
    result = client.post("/v1/call", json={"api": "SendSms", "params": params}).json()
    print("  call ->", result["outcome"])
print("session sr:", client.get("/v1/metrics/sr").json())

# close the loop: ingest a fresh day of traffic and rebuild the knowledge
import json

from apifk.log_model import serialize_record

fresh = generate(sms_scenario(seed=8), 500)
payload = [json.loads(serialize_record(r)) for r in fresh]
print("ingest:", client.post("/v1/ingest", json={"records": payload}).json())
print("rebuild:", client.post("/v1/rebuild").json())
merged = client.get("/v1/apis/SendSms/knowledge").json()
print("SendSms record_count after merge:", merged["record_count"])
