import time
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from plansum.backends import RemoteBackend, StubBackend
from plansum.engine import run_end_to_end
from plansum.fixtures import corpus_jsonl
from plansum.service import AppConfig, create_app

from conftest import SKY_QUERY, TITANIC_QUERY


@pytest.fixture
def combined_corpus_file(tmp_path):
    path = tmp_path / "combined.jsonl"
    path.write_text(corpus_jsonl("sky") + corpus_jsonl("titanic"), encoding="utf-8")
    return path


def make_client(corpus_path, **overrides):
    config = AppConfig(corpus_path=str(corpus_path), **overrides)
    return TestClient(create_app(config))


@pytest.fixture
def client(titanic_corpus_file):
    return make_client(titanic_corpus_file)


def start_session(client, query=TITANIC_QUERY):
    response = client.post("/api/retrieve", json={"query": query})
    assert response.status_code == 200
    return response.json()["session_id"]


class TestModels:
    def test_exact_body(self, client):
        body = client.get("/api/models").json()
        assert body == {
            "models": [{"id": "end_to_end"}, {"id": "iterative"}, {"id": "interactive"}],
            "backends": ["stub"],
        }

    def test_idempotent(self, client):
        assert client.get("/api/models").content == client.get("/api/models").content


class TestRetrieve:
    def test_returns_session_and_ranked_documents(self, client):
        response = client.post("/api/retrieve", json={"query": TITANIC_QUERY})
        body = response.json()
        assert body["session_id"] == "s-1"
        assert [d["doc_id"] for d in body["documents"]] == [0, 1]
        # The liner document out-ranks the wreck document for this query.
        assert body["documents"][0]["url"] == "https://example.test/titanic"
        assert body["documents"][1]["url"] == "https://example.test/wreck"

    def test_empty_query_is_400(self, client):
        response = client.post("/api/retrieve", json={"query": "  "})
        assert response.status_code == 400
        assert response.json()["error_code"] == "EmptyQuery"

    def test_distinct_sessions_per_request(self, client):
        first = client.post("/api/retrieve", json={"query": TITANIC_QUERY}).json()["session_id"]
        second = client.post("/api/retrieve", json={"query": TITANIC_QUERY}).json()["session_id"]
        assert first != second

    def test_no_corpus_no_urls_is_404(self):
        client = TestClient(create_app(AppConfig()))
        response = client.post("/api/retrieve", json={"query": "anything"})
        assert response.status_code == 404
        assert response.json()["error_code"] == "NoCorpus"

    def test_all_fetches_failed_is_502(self, client):
        import socket

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        dead_port = probe.getsockname()[1]
        probe.close()
        response = client.post(
            "/api/retrieve",
            json={"query": "anything", "urls": [f"http://127.0.0.1:{dead_port}/page"]},
        )
        assert response.status_code == 502
        assert response.json()["error_code"] == "AllFetchesFailed"

    def test_max_docs_caps_documents(self, combined_corpus_file):
        client = make_client(combined_corpus_file)
        body = client.post("/api/retrieve", json={"query": SKY_QUERY, "max_docs": 1}).json()
        assert len(body["documents"]) == 1
        assert body["documents"][0]["url"] == "https://example.test/sky"


class TestSummarize:
    def test_end_to_end_payload(self, client):
        session_id = start_session(client)
        body = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"}).json()
        assert body["blueprint"]["mode"] == "qa"
        assert [p["answer"] for p in body["blueprint"]["pairs"]] == ["titanic", "iceberg"]
        assert body["summary"]["sentences"] == [
            "The Titanic was a British passenger liner famous for its size.",
            "The ship became known worldwide after it hit an iceberg and sank in 1912.",
        ]
        assert body["alignment"] == {"0": [0], "1": [1]}
        assert body["backend_id"] == "stub"
        assert "steps" not in body

    def test_iterative_includes_steps(self, client):
        session_id = start_session(client)
        body = client.post("/api/summarize", json={"session_id": session_id, "model": "iterative"}).json()
        assert len(body["steps"]) == 2
        assert body["steps"][0]["step_index"] == 0

    def test_interactive_is_question_only(self, client):
        session_id = start_session(client)
        body = client.post("/api/summarize", json={"session_id": session_id, "model": "interactive"}).json()
        assert body["blueprint"]["mode"] == "question_only"
        assert all("answer" not in p for p in body["blueprint"]["pairs"])

    def test_unknown_session_404(self, client):
        response = client.post("/api/summarize", json={"session_id": "s-99", "model": "end_to_end"})
        assert response.status_code == 404
        assert response.json()["error_code"] == "UnknownSession"

    def test_unknown_model_400(self, client):
        session_id = start_session(client)
        response = client.post("/api/summarize", json={"session_id": session_id, "model": "t5"})
        assert response.status_code == 400
        assert response.json()["error_code"] == "UnknownModel"

    def test_max_pairs_param(self, client):
        session_id = start_session(client)
        body = client.post(
            "/api/summarize",
            json={"session_id": session_id, "model": "end_to_end", "params": {"max_pairs": 1}},
        ).json()
        assert len(body["blueprint"]["pairs"]) == 1

    def test_parse_failure_is_422_with_raw_emission(self, client):
        session_id = start_session(client)
        response = client.post(
            "/api/summarize",
            json={
                "session_id": session_id,
                "model": "end_to_end",
                "params": {"max_output_tokens": 3},
            },
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error_code"] == "ParseFailure"
        assert body["raw_output"]  # truncated emission is preserved for debugging


class TestRegenerate:
    def test_unedited_plan_reproduces_summary(self, client):
        session_id = start_session(client)
        first = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"})
        blueprint = first.json()["blueprint"]
        second = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        assert second.json()["summary"] == first.json()["summary"]

    def test_toggled_pair_drops_aligned_sentence(self, client):
        session_id = start_session(client)
        first = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"}).json()
        blueprint = first["blueprint"]
        blueprint["pairs"][1]["included"] = False
        body = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        ).json()
        assert body["summary"]["sentences"] == first["summary"]["sentences"][:1]
        assert body["blueprint"]["pairs"][1]["included"] is False

    def test_iterative_regeneration_409(self, client):
        session_id = start_session(client)
        blueprint = {"mode": "qa", "pairs": [{"question": "Q?", "answer": "x", "included": True}]}
        response = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "iterative", "blueprint": blueprint},
        )
        assert response.status_code == 409

    def test_mode_mismatch_400(self, client):
        session_id = start_session(client)
        blueprint = {"mode": "question_only", "pairs": [{"question": "Q?", "included": True}]}
        response = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        assert response.status_code == 400

    def test_all_excluded_400(self, client):
        session_id = start_session(client)
        blueprint = {"mode": "qa", "pairs": [{"question": "Q?", "answer": "x", "included": False}]}
        response = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        assert response.status_code == 400
        assert response.json()["error_code"] == "EmptyPlan"

    def test_interactive_with_added_question(self, client):
        session_id = start_session(client)
        first = client.post("/api/summarize", json={"session_id": session_id, "model": "interactive"}).json()
        blueprint = first["blueprint"]
        blueprint["pairs"].append({"question": "Where do explorers film?", "included": True})
        body = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "interactive", "blueprint": blueprint},
        ).json()
        assert len(body["summary"]["sentences"]) == len(first["summary"]["sentences"]) + 1
        assert body["blueprint"]["pairs"][-1]["question"] == "Where do explorers film?"


class TestFilter:
    def test_removes_ungrounded_pair(self, client):
        session_id = start_session(client)
        client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"})
        blueprint = {
            "mode": "qa",
            "pairs": [
                {"question": "Grounded?", "answer": "iceberg", "included": True},
                {"question": "Hallucinated?", "answer": "unicorn", "included": True},
            ],
        }
        client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        body = client.post("/api/filter", json={"session_id": session_id}).json()
        assert body["removed_pairs"] == 1
        assert [p["answer"] for p in body["blueprint"]["pairs"]] == ["iceberg"]

    def test_fully_grounded_plan_unchanged(self, client):
        session_id = start_session(client)
        first = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"}).json()
        body = client.post("/api/filter", json={"session_id": session_id}).json()
        assert body["removed_pairs"] == 0
        assert body["blueprint"] == first["blueprint"]

    def test_question_only_plan_400(self, client):
        session_id = start_session(client)
        client.post("/api/summarize", json={"session_id": session_id, "model": "interactive"})
        response = client.post("/api/filter", json={"session_id": session_id})
        assert response.status_code == 400
        assert response.json()["error_code"] == "ModeMismatch"

    def test_without_result_400(self, client):
        session_id = start_session(client)
        response = client.post("/api/filter", json={"session_id": session_id})
        assert response.status_code == 400
        assert response.json()["error_code"] == "NoResult"


class TestSessionLifecycle:
    def test_ttl_eviction(self, titanic_corpus_file):
        client = make_client(titanic_corpus_file, session_ttl=0.05)
        session_id = start_session(client)
        time.sleep(0.12)
        response = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"})
        assert response.status_code == 404

    def test_session_isolation_under_concurrent_storm(self, combined_corpus_file):
        client = make_client(combined_corpus_file)
        sky_session = start_session(client, SKY_QUERY)
        titanic_session = start_session(client, TITANIC_QUERY)
        reference = {
            session: client.post(
                "/api/summarize", json={"session_id": session, "model": "end_to_end"}
            ).content
            for session in (sky_session, titanic_session)
        }

        def hit(session):
            return session, client.post(
                "/api/summarize", json={"session_id": session, "model": "end_to_end"}
            ).content

        jobs = [sky_session, titanic_session] * 10
        with ThreadPoolExecutor(max_workers=8) as pool:
            for session, content in pool.map(hit, jobs):
                assert content == reference[session]

    def test_validation_error_body_shape(self, client):
        response = client.post("/api/retrieve", json={})
        assert response.status_code == 400
        body = response.json()
        assert body["error_code"] == "ValidationError"
        assert "message" in body


class TestReplayDeterminism:
    @staticmethod
    def run_script(client):
        bodies = []
        response = client.post("/api/retrieve", json={"query": TITANIC_QUERY})
        bodies.append(response.content)
        session_id = response.json()["session_id"]
        response = client.post("/api/summarize", json={"session_id": session_id, "model": "end_to_end"})
        bodies.append(response.content)
        blueprint = response.json()["blueprint"]
        blueprint["pairs"][0]["included"] = False
        response = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        bodies.append(response.content)
        response = client.post("/api/filter", json={"session_id": session_id})
        bodies.append(response.content)
        blueprint = response.json()["blueprint"]
        response = client.post(
            "/api/regenerate",
            json={"session_id": session_id, "model": "end_to_end", "blueprint": blueprint},
        )
        bodies.append(response.content)
        return bodies

    def test_fresh_servers_replay_byte_identically(self, titanic_corpus_file):
        first = self.run_script(make_client(titanic_corpus_file))
        second = self.run_script(make_client(titanic_corpus_file))
        assert first == second


class TestWireEndpoint:
    def test_remote_backend_through_service_matches_local_stub(self, client, titanic_input):
        remote = RemoteBackend("http://testserver/api/backend/generate", client=client)
        via_wire = run_end_to_end(titanic_input, remote)
        local = run_end_to_end(titanic_input, StubBackend(task="end_to_end"))
        assert via_wire.blueprint == local.blueprint
        assert via_wire.summary == local.summary

    def test_wire_contract_shape(self, client):
        response = client.post(
            "/api/backend/generate",
            json={"source": "q [DOC] Plain text sentence.", "prefix": "", "max_new_tokens": 64},
        )
        body = response.json()
        assert set(body) == {"text", "finish_reason"}
        assert body["finish_reason"] in ("stop_marker", "token_limit")
