"""Knowledge document tests.

The central oracle: merging two day-batches must equal a recompute over the
concatenated logs on every exactly-mergeable field (pattern counts, length
histograms, enum states, numeric stats, requiredness, sequence rows, record
counts). Fields with documented newer-wins or re-fold semantics are tested
against those rules instead.
"""

import json
from collections import Counter

import pytest

from apifk.dependency_graph import DependencyEdge
from apifk.enum_miner import ENUMERABLE, NOT_ENUMERABLE
from apifk.knowledge_store import (
    SCHEMA_VERSION,
    ApiKnowledge,
    ApiMismatch,
    MalformedDocument,
    SchemaVersionMismatch,
    SequenceRow,
    document_name,
    document_schema,
    from_doc,
    load,
    load_all,
    merge_daily,
    save,
    save_all,
    to_doc,
)
from apifk.param_abstraction import OTHER_BUCKET, abstract_pattern, common_subsequence
from apifk.pipeline import MiningConfig, mine_knowledge
from apifk.simulator import generate, sms_scenario


@pytest.fixture(scope="module")
def sms_records():
    return generate(sms_scenario(seed=7), 2000)


@pytest.fixture(scope="module")
def sms_knowledge(sms_records):
    scenario = sms_scenario(seed=7)
    return mine_knowledge(sms_records, catalog=scenario.catalog)


class TestDocumentRoundTrip:
    def test_mined_knowledge_survives_save_and_load(self, sms_knowledge, tmp_path):
        for api, knowledge in sms_knowledge.items():
            path = tmp_path / document_name(api)
            save(knowledge, path)
            loaded = load(path)
            assert to_doc(loaded) == to_doc(knowledge)

    def test_save_is_byte_deterministic(self, sms_knowledge, tmp_path):
        k = sms_knowledge["SendSms"]
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save(k, p1)
        save(k, p2)
        assert p1.read_bytes() == p2.read_bytes()
        # loading and re-saving canonicalizes to the same bytes
        save(load(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_documents_are_ascii(self, tmp_path):
        k = ApiKnowledge.empty("QuerySendDetails")
        k.relevance = {"查询": 0.5}
        path = tmp_path / "doc.json"
        save(k, path)
        raw = path.read_bytes()
        raw.decode("ascii")

    def test_empty_knowledge_round_trips(self, tmp_path):
        k = ApiKnowledge.empty("Bare")
        path = tmp_path / "bare.json"
        save(k, path)
        loaded = load(path)
        assert loaded.api == "Bare"
        assert loaded.params == {}
        assert loaded.sequences == []
        assert loaded.record_count == 0

    def test_save_replaces_existing_atomically(self, sms_knowledge, tmp_path):
        path = tmp_path / "doc.json"
        save(ApiKnowledge.empty("SendSms"), path)
        save(sms_knowledge["SendSms"], path)
        assert load(path).record_count > 0
        leftovers = [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]
        assert leftovers == []

    def test_schema_is_draft_2020(self):
        schema = document_schema()
        assert schema["$schema"].endswith("2020-12/schema")


class TestDocumentContent:
    def test_published_constraint_fields(self, sms_knowledge):
        doc = to_doc(sms_knowledge["SendSms"])
        sign = doc["params"]["SignName"]
        assert sorted(sign["enum_values"]) == sign["enum_values"]
        assert set(sign["enum_values"]) == {
            "AcmeCorp", "BulkNotify", "CloudPing", "DailyDeal", "OpsAlert"
        }
        # dropping SignName makes the call fail, so every *successful* call
        # carries it: the miner must call it required
        assert sign["required"] is True
        phone = doc["params"]["PhoneNumbers"]
        assert phone["required"] is True
        # the 30% sequence omits TemplateParam and still succeeds
        assert doc["params"]["TemplateParam"]["required"] is False

    def test_numeric_range_published(self, sms_knowledge):
        doc = to_doc(sms_knowledge["QuerySendDetails"])
        page = doc["params"]["PageSize"]
        assert page["numeric_range"] == {"min": 1.0, "max": 50.0}
        current = doc["params"]["CurrentPage"]
        assert current["numeric_range"] == {"min": 1.0, "max": 100.0}

    def test_sequence_rows_rates_sum_to_one(self, sms_knowledge):
        for knowledge in sms_knowledge.values():
            total = sum(row.rate for row in knowledge.sequences)
            assert abs(total - 1.0) < 1e-9

    def test_unspecified_param_flagged(self, sms_knowledge):
        # OutId is injected by a fault and never declared by the API
        out_id = sms_knowledge["SendSms"].params["OutId"]
        assert out_id.unspecified_param is True
        assert sms_knowledge["SendSms"].params["SignName"].unspecified_param is False

    def test_dependency_points_to_producer(self, sms_knowledge):
        edges = sms_knowledge["SendSms"].dependencies["SignName"]
        assert edges[0].producer_api == "AddSmsSign"

    def test_examples_match_top_pattern(self, sms_knowledge):
        for knowledge in sms_knowledge.values():
            for p in knowledge.params.values():
                top = p.profile.top_pattern
                for ex in p.examples:
                    assert abstract_pattern(ex) == top


class TestValidation:
    def test_future_schema_version_rejected(self, tmp_path):
        k = ApiKnowledge.empty("Api")
        path = tmp_path / "doc.json"
        save(k, path)
        doc = json.loads(path.read_text())
        doc["schema_version"] = SCHEMA_VERSION + 1
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaVersionMismatch):
            load(path)
        with pytest.raises(SchemaVersionMismatch):
            from_doc(doc)

    def test_truncated_file_rejected(self, sms_knowledge, tmp_path):
        path = tmp_path / "doc.json"
        save(sms_knowledge["SendSms"], path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(MalformedDocument):
            load(path)

    def test_non_object_root_rejected(self, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(MalformedDocument):
            load(path)

    def test_missing_required_key_rejected(self, tmp_path):
        k = ApiKnowledge.empty("Api")
        doc = to_doc(k)
        del doc["sequences"]
        with pytest.raises(MalformedDocument):
            from_doc(doc)

    def test_example_not_matching_top_pattern_rejected(self, sms_knowledge):
        doc = to_doc(sms_knowledge["SendSms"])
        doc["params"]["SignName"]["examples"] = ["12345"]
        with pytest.raises(MalformedDocument, match="top pattern"):
            from_doc(doc)

    def test_undeclared_param_needs_unspecified_flag(self, sms_knowledge):
        doc = to_doc(sms_knowledge["SendSms"])
        doc["params"]["OutId"]["unspecified_param"] = False
        with pytest.raises(MalformedDocument, match="unspecified"):
            from_doc(doc)

    def test_wrong_type_rejected_by_schema(self, tmp_path):
        doc = to_doc(ApiKnowledge.empty("Api"))
        doc["record_count"] = "many"
        with pytest.raises(MalformedDocument):
            from_doc(doc)


class TestDirectoryLayout:
    def test_one_document_per_api(self, sms_knowledge, tmp_path):
        paths = save_all(sms_knowledge, tmp_path)
        assert [p.name for p in paths] == [
            "AddSmsSign.json", "QuerySendDetails.json", "SendSms.json"
        ]
        loaded = load_all(tmp_path)
        assert set(loaded) == set(sms_knowledge)
        for api in sms_knowledge:
            assert to_doc(loaded[api]) == to_doc(sms_knowledge[api])

    def test_document_name_sanitized(self):
        assert document_name("My/Api") == "My_Api.json"
        assert document_name("v2.SendSms") == "v2.SendSms.json"

    def test_load_all_empty_dir(self, tmp_path):
        assert load_all(tmp_path) == {}


@pytest.fixture(scope="module")
def halves():
    scenario = sms_scenario(seed=7)
    records = generate(scenario, 2000)
    day1, day2 = records[:1000], records[1000:]
    k1 = mine_knowledge(day1, catalog=scenario.catalog)
    k2 = mine_knowledge(day2, catalog=scenario.catalog)
    full = mine_knowledge(records, catalog=scenario.catalog)
    merged = {api: merge_daily(k1[api], k2[api]) for api in k1 if api in k2}
    return k1, k2, full, merged


class TestMergeDaily:
    def test_merge_equals_recompute_on_exact_fields(self, halves):
        _, _, full, merged = halves
        assert set(merged) == set(full)
        for api in merged:
            m, f = merged[api], full[api]
            assert m.record_count == f.record_count
            assert m.sequence_total == f.sequence_total
            assert m.generated_at == f.generated_at
            assert set(m.params) == set(f.params)
            for name in m.params:
                mp, fp = m.params[name], f.params[name]
                assert Counter(dict(mp.profile.patterns)) == Counter(dict(fp.profile.patterns)), (api, name)
                assert mp.profile.lengths == fp.profile.lengths
                assert mp.profile.values_seen == fp.profile.values_seen
                assert mp.profile.truncated == fp.profile.truncated
                assert mp.enum.status == fp.enum.status
                assert mp.enum.values == fp.enum.values
                assert (mp.numeric.min, mp.numeric.max) == (fp.numeric.min, fp.numeric.max)
                assert mp.numeric.sample_count == fp.numeric.sample_count
                assert mp.numeric.non_numeric_count == fp.numeric.non_numeric_count
                assert mp.requiredness.present_count == fp.requiredness.present_count
                assert (mp.requiredness.total_success_count
                        == fp.requiredness.total_success_count)
                assert mp.unspecified_param == fp.unspecified_param

    def test_merge_sequence_rows_equal_recompute(self, halves):
        _, _, full, merged = halves
        for api in merged:
            m_rows = {r.params: (r.count, r.rate) for r in merged[api].sequences}
            f_rows = {r.params: (r.count, r.rate) for r in full[api].sequences}
            assert m_rows == f_rows

    def test_merged_subsequence_is_fold_of_partials(self, halves):
        k1, k2, _, merged = halves
        for api in merged:
            for name, mp in merged[api].params.items():
                a = k1[api].params.get(name)
                b = k2[api].params.get(name)
                if a is None or b is None:
                    continue
                want = common_subsequence(
                    [a.profile.common_subsequence, b.profile.common_subsequence]
                )
                assert mp.profile.common_subsequence == want

    def test_merged_examples_respect_top_pattern(self, halves):
        _, _, _, merged = halves
        for api in merged:
            for p in merged[api].params.values():
                top = p.profile.top_pattern
                assert all(abstract_pattern(ex) == top for ex in p.examples)

    def test_merged_document_round_trips(self, halves, tmp_path):
        _, _, _, merged = halves
        for api, knowledge in merged.items():
            path = tmp_path / document_name(api)
            save(knowledge, path)
            assert to_doc(load(path)) == to_doc(knowledge)

    def test_dependency_scores_prefer_newer_batch(self):
        a = ApiKnowledge.empty("C")
        b = ApiKnowledge.empty("C")
        a.dependencies = {
            "P": [DependencyEdge("C", "P", "Old", 0.9), DependencyEdge("C", "P", "Keep", 0.5)]
        }
        b.dependencies = {"P": [DependencyEdge("C", "P", "Old", 0.1)]}
        merged = merge_daily(a, b)
        edges = merged.dependencies["P"]
        assert [(e.producer_api, e.score) for e in edges] == [("Keep", 0.5), ("Old", 0.1)]

    def test_relevance_newer_wins(self):
        a = ApiKnowledge.empty("C")
        b = ApiKnowledge.empty("C")
        a.relevance = {"X": 0.2, "Y": 0.8}
        b.relevance = {"X": 0.6, "Z": 0.1}
        merged = merge_daily(a, b)
        assert merged.relevance == {"X": 0.6, "Y": 0.8, "Z": 0.1}

    def test_not_enumerable_is_absorbing_through_merge(self, halves):
        k1, k2, _, merged = halves
        for api in merged:
            for name, mp in merged[api].params.items():
                a = k1[api].params.get(name)
                b = k2[api].params.get(name)
                statuses = {p.enum.status for p in (a, b) if p is not None}
                if NOT_ENUMERABLE in statuses:
                    assert mp.enum.status == NOT_ENUMERABLE
                    assert mp.enum_values is None

    def test_param_only_in_one_batch_carried_over(self):
        scenario = sms_scenario(seed=7)
        records = generate(scenario, 400)
        k = mine_knowledge(records, catalog=scenario.catalog)["SendSms"]
        empty = ApiKnowledge.empty("SendSms")
        merged = merge_daily(empty, k)
        assert set(merged.params) == set(k.params)
        merged2 = merge_daily(k, empty)
        assert set(merged2.params) == set(k.params)

    def test_api_mismatch_rejected(self):
        with pytest.raises(ApiMismatch):
            merge_daily(ApiKnowledge.empty("A"), ApiKnowledge.empty("B"))

    def test_pattern_cap_respected_after_merge(self):
        a = ApiKnowledge.empty("C")
        b = ApiKnowledge.empty("C")
        # two half-full pattern tables that overflow the cap when combined
        from apifk.enum_miner import EnumState, NumericRange, RequirednessStat
        from apifk.knowledge_store import ParamKnowledge
        from apifk.param_abstraction import AbstractionProfile

        def mk(patterns):
            return ParamKnowledge(
                name="P",
                profile=AbstractionProfile(
                    common_subsequence="",
                    patterns=patterns,
                    lengths={1: sum(n for _, n in patterns)},
                    values_seen=sum(n for _, n in patterns),
                    truncated=0,
                ),
                enum=EnumState(param_key=("C", "P"), status=NOT_ENUMERABLE),
                numeric=NumericRange(),
                requiredness=RequirednessStat(0, 0),
                unspecified_param=True,
            )

        a.params = {"P": mk([(f"a{i:03d}", 5) for i in range(200)])}
        b.params = {"P": mk([(f"b{i:03d}", 3) for i in range(200)])}
        merged = merge_daily(a, b)
        pats = merged.params["P"].profile.patterns
        named = [p for p, _ in pats if p != OTHER_BUCKET]
        assert len(named) <= 256
        spill = dict(pats).get(OTHER_BUCKET, 0)
        # totals are conserved: 200*5 + 200*3
        assert sum(n for _, n in pats) == 1600
        assert spill == 1600 - sum(n for p, n in pats if p != OTHER_BUCKET)
        assert spill > 0
