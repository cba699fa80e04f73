"""Producer-ranking tests with independent distance/Jaccard oracles."""

from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apifk.dependency_graph import (
    ApiCatalog,
    DegenerateCandidate,
    RankWeights,
    RelevanceTable,
    edit_distance,
    generate_candidates,
    rank,
    rank_all,
    relevance_row,
    score,
    session_relevance,
    string_similarity,
)
from apifk.log_model import ApiCallRecord, ApiSpec


def oracle_distance(a: str, b: str) -> int:
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return d(len(a), len(b))


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("kitten", "sitting", 3),
        ("", "", 0),
        ("", "abc", 3),
        ("abc", "abc", 0),
        ("flaw", "lawn", 2),
    ],
)
def test_edit_distance_known_values(a, b, expected):
    assert edit_distance(a, b) == expected


@given(st.text(max_size=12), st.text(max_size=12))
@settings(max_examples=200, deadline=None)
def test_edit_distance_matches_recursive_oracle(a, b):
    assert edit_distance(a, b) == oracle_distance(a, b)


@given(st.text(max_size=15), st.text(max_size=15))
@settings(max_examples=100, deadline=None)
def test_similarity_bounds_and_symmetry(a, b):
    s = string_similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == string_similarity(b, a)
    if a == b:
        assert s == 1.0


# --- fixture catalog ---------------------------------------------------------


def sms_catalog() -> ApiCatalog:
    return ApiCatalog.from_specs(
        [
            ApiSpec.make(
                "SendSms",
                inputs=["PhoneNumbers", "SignName", "TemplateCode", "TemplateParam"],
                outputs=["BizId", "RequestId"],
            ),
            ApiSpec.make(
                "AddSmsSign",
                inputs=["SignName", "SignSource", "Remark"],
                outputs=["SignName", "RequestId"],
            ),
            ApiSpec.make(
                "QuerySendDetails",
                inputs=["PhoneNumber", "BizId", "SendDate"],
                outputs=["TotalCount", "RequestId"],
            ),
        ]
    )


def test_candidates_come_from_producer_index():
    catalog = sms_catalog()
    assert generate_candidates(catalog, "SignName") == {"AddSmsSign"}
    assert generate_candidates(catalog, "BizId") == {"SendSms"}
    assert generate_candidates(catalog, "NoSuchParam") == set()


def test_add_sms_sign_ranks_first_for_sign_name():
    edges = rank("SendSms", "SignName", sms_catalog())
    assert edges
    assert edges[0].producer_api == "AddSmsSign"
    assert edges[0].consumer_api == "SendSms"
    assert edges[0].input_param == "SignName"


def test_biz_id_chain():
    edges = rank("QuerySendDetails", "BizId", sms_catalog())
    assert [e.producer_api for e in edges] == ["SendSms"]


def test_degenerate_candidate_raises():
    catalog = ApiCatalog.from_specs(
        [ApiSpec.make("Empty", outputs=["P"])]  # 1 output, 0 inputs: size 1, fine
    )
    # force a truly empty spec through the index
    catalog.specs["Weird"] = ApiSpec.make("Weird")
    catalog.producers.setdefault("P", set()).add("Weird")
    with pytest.raises(DegenerateCandidate):
        score("A", "P", "Weird", catalog)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        RankWeights(alpha=0)
    with pytest.raises(ValueError):
        RankWeights(sigma=-1)


def five_candidate_catalog() -> ApiCatalog:
    specs = [
        ApiSpec.make("GetToken", inputs=["App"], outputs=["Token"]),
        ApiSpec.make("MakeToken", inputs=["App", "Scope"], outputs=["Token"]),
        ApiSpec.make("IssueToken", inputs=["User", "App", "Scope"], outputs=["Token"]),
        ApiSpec.make("TokenService", inputs=["A", "B", "C", "D"], outputs=["Token"]),
        ApiSpec.make("Mint", inputs=[], outputs=["Token"]),
    ]
    return ApiCatalog.from_specs(specs)


def test_ranking_invariant_under_positive_weight_scaling():
    catalog = five_candidate_catalog()
    base = [e.producer_api for e in rank("UseToken", "Token", catalog, k=5)]
    assert len(base) == 5
    for c in (0.1, 1.0, 10.0):
        weights = RankWeights(alpha=c, beta=c, sigma=c)
        order = [
            e.producer_api for e in rank("UseToken", "Token", catalog, k=5, weights=weights)
        ]
        assert order == base, f"scale {c} changed the order"
    # mixed positive scales too: score factors multiply through
    weights = RankWeights(alpha=0.1, beta=10.0, sigma=2.5)
    assert [e.producer_api for e in rank("UseToken", "Token", catalog, k=5, weights=weights)] == base


def test_rank_truncates_to_k_and_orders_by_score():
    catalog = five_candidate_catalog()
    edges = rank("UseToken", "Token", catalog, k=2)
    assert len(edges) == 2
    assert edges[0].score >= edges[1].score
    with pytest.raises(ValueError):
        rank("A", "Token", catalog, k=0)


def test_tie_break_is_producer_name_ascending():
    # identical specs shaped so every factor matches
    catalog = ApiCatalog.from_specs(
        [
            ApiSpec.make("Bbb", inputs=["x"], outputs=["P"]),
            ApiSpec.make("Aaa", inputs=["x"], outputs=["P"]),
        ]
    )
    edges = rank("Zzz", "P", catalog, k=2)
    assert edges[0].score == edges[1].score
    assert [e.producer_api for e in edges] == ["Aaa", "Bbb"]


def test_size_normalization_prefers_smaller_producer():
    # name factors equal and nonzero; only the parameter count differs
    catalog = ApiCatalog.from_specs(
        [
            ApiSpec.make("MintTokenA", inputs=["x"], outputs=["Token"]),  # size 2
            ApiSpec.make("MintTokenB", inputs=["a", "b", "c", "d", "e"], outputs=["Token"]),
        ]
    )
    s_small = score("MintToken", "Token", "MintTokenA", catalog)
    s_big = score("MintToken", "Token", "MintTokenB", catalog)
    assert s_small > 0
    assert s_small > s_big


# --- session relevance --------------------------------------------------------


def oracle_jaccard(records, a, b):
    sa = {r.session_id for r in records if r.api == a}
    sb = {r.session_id for r in records if r.api == b}
    return len(sa & sb) / len(sa | sb) if sa | sb else 0.0


def test_session_relevance_matches_counting_oracle():
    records = []
    for i in range(30):
        records.append(ApiCallRecord.make("A", {}, session_id=f"s{i % 5}"))
        if i % 2 == 0:
            records.append(ApiCallRecord.make("B", {}, session_id=f"s{i % 5}"))
        if i % 3 == 0:
            records.append(ApiCallRecord.make("C", {}, session_id=f"s{i % 7}"))
    table = session_relevance(records)
    for x in "ABC":
        for y in "ABC":
            assert table.value(x, y) == pytest.approx(oracle_jaccard(records, x, y))


def test_relevance_table_is_symmetric():
    table = RelevanceTable()
    table.set("B", "A", 0.5)
    assert table.value("A", "B") == 0.5
    assert table.value("B", "A") == 0.5
    assert table.value("A", "Z") == 0.0


def test_relevance_row_collects_both_sides():
    table = RelevanceTable()
    table.set("A", "B", 0.25)
    table.set("C", "A", 0.75)
    table.set("B", "C", 0.1)
    assert relevance_row(table, "A") == {"B": 0.25, "C": 0.75}


def test_no_session_data_defaults_relevance_to_one():
    catalog = sms_catalog()
    with_none = score("SendSms", "SignName", "AddSmsSign", catalog, relevance=None)
    table = RelevanceTable()
    table.set("SendSms", "AddSmsSign", 1.0)
    with_full = score("SendSms", "SignName", "AddSmsSign", catalog, relevance=table)
    assert with_none == with_full


def test_rank_all_covers_every_param_with_producers():
    catalog = sms_catalog()
    edges = rank_all(catalog)
    assert "SignName" in edges["SendSms"]
    assert "BizId" in edges["QuerySendDetails"]
    # params with no producer do not appear
    assert "PhoneNumbers" not in edges.get("SendSms", {})
