"""
Ranking producer APIs for an input parameter
============================================

SendSms.SignName values are not free text: a signature has to exist before
it can be used, and the API that creates one (AddSmsSign) returns SignName
as an output. Candidates are every API whose outputs contain the parameter,
scored by name similarity, session co-occurrence, and candidate size.
"""

from apifk.dependency_graph import (
    edit_distance,
    rank,
    session_relevance,
    string_similarity,
)
from apifk.simulator import generate, sms_scenario

scenario = sms_scenario(seed=7)
records = generate(scenario, 2000)

# similarity is normalized edit distance; note the degenerate pair below
for a, b in [("SendSms", "QuerySendDetails"), ("SignName", "AddSmsSign"),
             ("SendSms", "AddSmsSign")]:
    d = edit_distance(a, b)
    print(f"dist({a!r}, {b!r}) = {d:2d}   sim = {string_similarity(a, b):.3f}")

# sessions that call two APIs together raise the pair's relevance
relevance = session_relevance(records)
print()
print("session relevance SendSms <-> AddSmsSign:",
      round(relevance.value("SendSms", "AddSmsSign"), 3))

edges = rank("SendSms", "SignName", scenario.catalog, relevance=relevance)
print()
print("producers of SendSms.SignName, best first:")
for edge in edges:
    print(f"  {edge.producer_api:12s} score={edge.score:.6f}")

# The similarity factor for ("SignName", "AddSmsSign") is exactly zero (the
# edit distance equals the longer length), so the multiplicative score
# bottoms out at 0 here; the edge still ranks first because AddSmsSign is
# the only producer. With several producers the graded factors decide.
