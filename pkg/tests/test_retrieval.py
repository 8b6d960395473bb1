import io
import math
import random
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from plansum.engine import EmptyQuery
from plansum.retrieval import (
    AllFetchesFailed,
    BM25_B,
    BM25_K1,
    Corpus,
    CorpusSource,
    Document,
    EmptyCorpus,
    FetchLimits,
    MalformedRecord,
    assemble_input,
    extract_text,
    fetch_documents,
    ingest_local,
    rank_passages,
)

from oracles import brute_force_bm25, random_corpus, random_query, whitespace_token_count


def doc(body, doc_id, title="", url=None):
    return Document(url=url or f"https://example.test/{doc_id}", title=title, body=body, doc_id=doc_id)


class TestIngest:
    def test_three_valid_lines(self):
        lines = io.StringIO(
            '{"url": "u1", "title": "t1", "body": "Alpha."}\n'
            '{"url": "u2", "title": "t2", "body": "Beta."}\n'
            '{"url": "u3", "title": "t3", "body": "Gamma."}\n'
        )
        corpus = ingest_local(lines)
        assert [d.doc_id for d in corpus.documents] == [0, 1, 2]
        assert corpus.source is CorpusSource.LOCAL_FILES

    def test_missing_body_field(self):
        lines = io.StringIO('{"url": "u", "title": "t", "body": "x."}\n{"url": "u", "title": "t"}\n')
        with pytest.raises(MalformedRecord) as info:
            ingest_local(lines)
        assert info.value.line_number == 2

    def test_invalid_json(self):
        with pytest.raises(MalformedRecord):
            ingest_local(io.StringIO("not json\n"))

    def test_empty_file(self):
        with pytest.raises(EmptyCorpus):
            ingest_local(io.StringIO(""))

    def test_empty_bodies_skipped_with_contiguous_ids(self, caplog):
        lines = io.StringIO(
            '{"url": "u1", "title": "t", "body": "Alpha."}\n'
            '{"url": "u2", "title": "t", "body": "  "}\n'
            '{"url": "u3", "title": "t", "body": "Beta."}\n'
        )
        with caplog.at_level("WARNING"):
            corpus = ingest_local(lines)
        assert [d.url for d in corpus.documents] == ["u1", "u3"]
        assert [d.doc_id for d in corpus.documents] == [0, 1]
        assert any("empty body" in r.message for r in caplog.records)

    def test_from_path(self, titanic_corpus_file):
        corpus = ingest_local(titanic_corpus_file)
        assert len(corpus.documents) == 2


GOLDEN_HTML = """<html><head><title>Fixture  Page</title>
<style>p { color: red; }</style><script>var x = "<p>not text</p>";</script></head>
<body><h1>Heading Words</h1>
<p>First paragraph with <b>bold</b> text.</p>
<p>Second &amp; final.</p><noscript>enable js</noscript></body></html>"""

GOLDEN_TEXT = "Heading Words First paragraph with bold text. Second & final."


class TestExtractText:
    def test_golden_page(self):
        title, text = extract_text(GOLDEN_HTML)
        assert title == "Fixture Page"
        assert text == GOLDEN_TEXT

    def test_markup_only_page_is_empty(self):
        title, text = extract_text("<html><body><script>x()</script><style>a{}</style></body></html>")
        assert text == ""

    def test_entities_decoded(self):
        _, text = extract_text("<p>fish &amp; chips &lt;now&gt;</p>")
        assert text == "fish & chips <now>"


class _Handler(BaseHTTPRequestHandler):
    pages: dict[str, str] = {}
    slow_paths: set[str] = set()

    def do_GET(self):
        if self.path in self.slow_paths:
            time.sleep(1.5)
        page = self.pages.get(self.path)
        if page is None:
            self.send_error(404)
            return
        body = page.encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def web_server():
    _Handler.pages = {
        "/one": "<html><head><title>One</title></head><body><p>Page one text.</p></body></html>",
        "/two": "<html><head><title>Two</title></head><body><p>Page two text.</p></body></html>",
        "/slow": "<html><body><p>Too slow.</p></body></html>",
        "/empty": "<html><head><script>void(0)</script></head><body></body></html>",
    }
    _Handler.slow_paths = {"/slow"}
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestFetch:
    def test_mixed_success_and_timeout(self, web_server):
        limits = FetchLimits(timeout=0.4)
        corpus, failures = fetch_documents(
            [f"{web_server}/one", f"{web_server}/slow", f"{web_server}/two"], limits
        )
        assert [d.title for d in corpus.documents] == ["One", "Two"]
        assert [d.doc_id for d in corpus.documents] == [0, 1]
        assert len(failures) == 1
        assert failures[0].url.endswith("/slow")
        assert failures[0].error.startswith("Timeout")

    def test_empty_extraction_recorded(self, web_server):
        corpus, failures = fetch_documents([f"{web_server}/one", f"{web_server}/empty"])
        assert len(corpus.documents) == 1
        assert failures[0].error == "EmptyExtraction"

    def test_all_failures_raise(self, web_server):
        with pytest.raises(AllFetchesFailed):
            fetch_documents([f"{web_server}/missing", f"{web_server}/gone"])

    def test_results_follow_input_url_order(self, web_server):
        corpus, _ = fetch_documents([f"{web_server}/two", f"{web_server}/one"])
        assert [d.title for d in corpus.documents] == ["Two", "One"]
        assert corpus.source is CorpusSource.FETCHED

    def test_golden_extraction_via_http(self, web_server):
        _Handler.pages["/golden"] = GOLDEN_HTML
        corpus, _ = fetch_documents([f"{web_server}/golden"])
        assert corpus.documents[0].body == GOLDEN_TEXT
        assert corpus.documents[0].title == "Fixture Page"


class TestRankPassages:
    def test_higher_tf_ranks_first(self):
        # Two single-passage docs of equal length; "apple" occurs 3x vs 1x.
        corpus = Corpus(
            (
                doc("Apple apple apple pear.", 0),
                doc("Apple pear kiwi plum.", 1),
            ),
            CorpusSource.LOCAL_FILES,
        )
        ranked = rank_passages("apple", corpus, k=2)
        assert [p.doc_id for p in ranked] == [0, 1]
        assert [p.rank for p in ranked] == [1, 2]
        # Hand-checked BM25: idf = ln(1 + 0.5/2.5); equal lengths make the
        # normalizer k1 exactly, so scores are idf*3*2.2/(3+1.2) and idf*1.
        idf = math.log(1.0 + (2 - 2 + 0.5) / (2 + 0.5))
        norm = BM25_K1 * (1.0 - BM25_B + BM25_B * 1.0)
        assert ranked[0].score == idf * (3 * (BM25_K1 + 1.0)) / (3 + norm)
        assert ranked[1].score == idf * (1 * (BM25_K1 + 1.0)) / (1 + norm)

    def test_no_shared_terms_falls_back_to_document_order(self):
        corpus = Corpus((doc("Alpha beta.", 0), doc("Gamma delta.", 1)), CorpusSource.LOCAL_FILES)
        ranked = rank_passages("zeppelin", corpus, k=5)
        assert [(p.score, p.doc_id) for p in ranked] == [(0.0, 0), (0.0, 1)]

    def test_k_larger_than_passage_count(self):
        corpus = Corpus((doc("One sentence only.", 0),), CorpusSource.LOCAL_FILES)
        assert len(rank_passages("one", corpus, k=50)) == 1

    def test_windows_are_non_overlapping_chunks(self):
        body = "A one. B two. C three. D four. E five."
        corpus = Corpus((doc(body, 0),), CorpusSource.LOCAL_FILES)
        ranked = rank_passages("anything", corpus, k=10, passage_window=2)
        texts = sorted(p.passage_text for p in ranked)
        assert texts == ["A one. B two.", "C three. D four.", "E five."]

    def test_empty_query_rejected(self, sky_corpus):
        with pytest.raises(EmptyQuery):
            rank_passages(" ", sky_corpus, k=1)

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            rank_passages("q", Corpus((), CorpusSource.LOCAL_FILES), k=1)

    def test_matches_brute_force_oracle(self):
        rng = random.Random(3)
        for _ in range(10):
            corpus = random_corpus(rng, max_docs=12, max_sentences=15)
            query = random_query(rng)
            window = rng.randint(1, 7)
            k = rng.randint(1, 30)
            ranked = rank_passages(query, corpus, k=k, passage_window=window)
            expected = brute_force_bm25(query, corpus, k=k, passage_window=window)
            got = [(p.doc_id, p.passage_text, p.score) for p in ranked]
            assert got == [(d, t, s) for d, _, t, s in expected]
            assert [p.rank for p in ranked] == list(range(1, len(ranked) + 1))

    def test_deterministic_across_runs(self, titanic_corpus):
        a = rank_passages("What is the Titanic known for?", titanic_corpus, k=10)
        b = rank_passages("What is the Titanic known for?", titanic_corpus, k=10)
        assert a == b


class TestAssembleInput:
    def test_document_order_follows_best_passage(self):
        corpus = Corpus(
            (doc("Nothing relevant here.", 0), doc("Zeppelin zeppelin flies.", 1)),
            CorpusSource.LOCAL_FILES,
        )
        ranked = rank_passages("zeppelin", corpus, k=10)
        d = assemble_input("zeppelin", ranked, corpus, token_budget=100)
        assert d.formatted_text.index("Zeppelin") < d.formatted_text.index("Nothing")

    def test_single_doc(self, sky_corpus):
        single = Corpus((sky_corpus.documents[0],), CorpusSource.LOCAL_FILES)
        ranked = rank_passages("sky", single, k=10)
        d = assemble_input("sky", ranked, single, token_budget=200)
        assert d.formatted_text == "sky [DOC] " + single.documents[0].title + " " + single.documents[0].body

    def test_budget_truncates_first_doc_and_drops_second(self):
        corpus = Corpus(
            (doc(" ".join(f"a{i}" for i in range(30)) + ".", 0), doc("Dropped entirely.", 1)),
            CorpusSource.LOCAL_FILES,
        )
        ranked = rank_passages("a0", corpus, k=10)
        d = assemble_input("a0", ranked, corpus, token_budget=10)
        assert whitespace_token_count(d.formatted_text) == 10
        assert "Dropped" not in d.formatted_text

    def test_budget_invariant_holds(self, titanic_corpus):
        ranked = rank_passages("titanic", titanic_corpus, k=10)
        for budget in (2, 3, 5, 9, 17, 4096):
            d = assemble_input("titanic", ranked, titanic_corpus, token_budget=budget)
            assert whitespace_token_count(d.formatted_text) <= budget
            assert d.formatted_text.startswith("titanic")
