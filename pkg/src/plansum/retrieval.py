"""Turn a query into ranked, cleaned multi-document generator input.

Corpora come from line-delimited JSON records or live fetches. Passages are
scored with BM25 over normalized terms; the ranking only decides which
documents reach the generator and in what order — the generator always sees
whole document bodies.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import IO

import httpx

from collections.abc import Callable

from plansum.blueprint import segment_sentences
from plansum.engine import EmptyQuery, InputDocument, ModelInput, build_model_input, count_tokens
from plansum.filtering import normalize

log = logging.getLogger(__name__)

BM25_K1 = 1.2
BM25_B = 0.75
DEFAULT_PASSAGE_WINDOW = 5


class MalformedRecord(ValueError):
    """A corpus line is not a valid {url, title, body} record."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyCorpus(ValueError):
    """No usable documents."""


class AllFetchesFailed(RuntimeError):
    """Every requested URL failed to produce a document."""


class CorpusSource(str, enum.Enum):
    LOCAL_FILES = "local_files"
    FETCHED = "fetched"


@dataclass(frozen=True)
class Document:
    url: str
    title: str
    body: str
    doc_id: int

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise ValueError(f"document {self.doc_id} ({self.url!r}) has an empty body")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    source: CorpusSource

    def __post_init__(self) -> None:
        object.__setattr__(self, "documents", tuple(self.documents))
        ids = [d.doc_id for d in self.documents]
        if ids != list(range(len(ids))):
            raise ValueError(f"doc_ids must be contiguous from 0, got {ids}")

    def text(self) -> str:
        """All titles and bodies, for grounding checks against the full input."""
        return "\n".join(f"{d.title}\n{d.body}" if d.title else d.body for d in self.documents)


@dataclass(frozen=True)
class RankedPassage:
    doc_id: int
    passage_text: str
    score: float
    rank: int


@dataclass(frozen=True)
class FetchLimits:
    max_concurrency: int = 8
    timeout: float = 10.0
    max_bytes: int = 2 * 1024 * 1024


@dataclass(frozen=True)
class FetchFailure:
    url: str
    error: str


def ingest_local(source: str | Path | IO[str]) -> Corpus:
    """Read a corpus of line-delimited JSON {url, title, body} records.

    Records with an empty body are skipped with a warning; structurally bad
    lines raise MalformedRecord with their line number.
    """
    if hasattr(source, "read"):
        documents = _read_records(source)  # type: ignore[arg-type]
    else:
        with open(source, encoding="utf-8") as handle:
            documents = _read_records(handle)
    if not documents:
        raise EmptyCorpus(f"no usable documents in {getattr(source, 'name', source)!r}")
    return Corpus(tuple(documents), CorpusSource.LOCAL_FILES)


def _read_records(handle: IO[str]) -> list[Document]:
    documents: list[Document] = []
    skipped = 0
    for line_number, line in enumerate(handle, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_number, f"invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedRecord(line_number, "record is not an object")
        for key in ("url", "title", "body"):
            if key not in record:
                raise MalformedRecord(line_number, f"missing field {key!r}")
            if not isinstance(record[key], str):
                raise MalformedRecord(line_number, f"field {key!r} is not a string")
        if not record["body"].strip():
            skipped += 1
            log.warning("skipping record at line %d: empty body (%s)", line_number, record["url"])
            continue
        documents.append(
            Document(url=record["url"], title=record["title"], body=record["body"], doc_id=len(documents))
        )
    if skipped:
        log.warning("skipped %d record(s) with empty bodies", skipped)
    return documents


_SKIP_TAGS = {"script", "style", "noscript", "template"}
_BLOCK_TAGS = {
    "address", "article", "aside", "blockquote", "br", "div", "dd", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4",
    "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre", "section",
    "table", "td", "th", "tr", "ul",
}


class _TextExtractor(HTMLParser):
    """Visible-text extractor: drops script/style regions, keeps reading order."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._skip_depth = 0
        self._in_title = False
        self._title_parts: list[str] = []
        self._parts: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag in _BLOCK_TAGS:
            self._parts.append(" ")

    def handle_endtag(self, tag: str) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag == "title":
            self._in_title = False
        elif tag in _BLOCK_TAGS:
            self._parts.append(" ")

    def handle_data(self, data: str) -> None:
        if self._skip_depth:
            return
        if self._in_title:
            self._title_parts.append(data)
        else:
            self._parts.append(data)

    def result(self) -> tuple[str, str]:
        title = " ".join("".join(self._title_parts).split())
        text = " ".join("".join(self._parts).split())
        return title, text


def extract_text(html: str) -> tuple[str, str]:
    """Strip markup down to (title, visible text), whitespace-collapsed."""
    extractor = _TextExtractor()
    extractor.feed(html)
    extractor.close()
    return extractor.result()


def _fetch_one(client: httpx.Client, url: str, limits: FetchLimits) -> Document | FetchFailure:
    try:
        with client.stream("GET", url, timeout=limits.timeout, follow_redirects=True) as response:
            response.raise_for_status()
            chunks: list[bytes] = []
            size = 0
            for chunk in response.iter_bytes():
                chunks.append(chunk)
                size += len(chunk)
                if size >= limits.max_bytes:
                    break
            raw = b"".join(chunks)[: limits.max_bytes]
            encoding = response.charset_encoding or "utf-8"
    except httpx.TimeoutException as exc:
        return FetchFailure(url, f"Timeout: {exc}")
    except httpx.HTTPStatusError as exc:
        return FetchFailure(url, f"HTTPStatus: {exc.response.status_code}")
    except httpx.HTTPError as exc:
        return FetchFailure(url, f"{type(exc).__name__}: {exc}")
    title, text = extract_text(raw.decode(encoding, errors="replace"))
    if not text:
        return FetchFailure(url, "EmptyExtraction")
    # Body is capped within the limit; doc_id is assigned by the caller.
    return Document(url=url, title=title or url, body=text, doc_id=0)


def fetch_documents(
    urls: list[str], limits: FetchLimits | None = None
) -> tuple[Corpus, list[FetchFailure]]:
    """Fetch pages concurrently and extract their visible text.

    Per-URL failures are returned, not raised; results follow the input URL
    order regardless of completion order, so output is deterministic.
    """
    if not urls:
        raise ValueError("no URLs given")
    limits = limits or FetchLimits()
    outcomes: list[Document | FetchFailure]
    with httpx.Client() as client:
        workers = max(1, min(limits.max_concurrency, len(urls)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda u: _fetch_one(client, u, limits), urls))
    documents: list[Document] = []
    failures: list[FetchFailure] = []
    for outcome in outcomes:
        if isinstance(outcome, FetchFailure):
            log.warning("fetch failed for %s: %s", outcome.url, outcome.error)
            failures.append(outcome)
        else:
            documents.append(
                Document(url=outcome.url, title=outcome.title, body=outcome.body, doc_id=len(documents))
            )
    if not documents:
        raise AllFetchesFailed(f"all {len(urls)} fetch(es) failed")
    return Corpus(tuple(documents), CorpusSource.FETCHED), failures


@dataclass(frozen=True)
class _Passage:
    doc_id: int
    start: int
    text: str
    tokens: tuple[str, ...]


def _document_passages(corpus: Corpus, passage_window: int) -> list[_Passage]:
    passages: list[_Passage] = []
    for doc in corpus.documents:
        doc_text = f"{doc.title} {doc.body}" if doc.title else doc.body
        sentences = segment_sentences(doc_text)
        for start in range(0, len(sentences), passage_window):
            text = " ".join(sentences[start : start + passage_window])
            passages.append(
                _Passage(doc.doc_id, start, text, tuple(normalize(text).split()))
            )
    return passages


def _unique_terms(query: str) -> list[str]:
    # First-occurrence order keeps float summation order stable across runs.
    return list(dict.fromkeys(normalize(query).split()))


def rank_passages(
    query: str, corpus: Corpus, k: int, passage_window: int = DEFAULT_PASSAGE_WINDOW
) -> list[RankedPassage]:
    """Score sentence-window passages with BM25 and return the top k.

    Constants k1=1.2, b=0.75; document frequency is computed over all
    passages. Ties break toward the lower doc_id, then the earlier passage.
    """
    if not query.strip():
        raise EmptyQuery("query is empty")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if passage_window < 1:
        raise ValueError(f"passage_window must be >= 1, got {passage_window}")
    if not corpus.documents:
        raise EmptyCorpus("corpus has no documents")
    passages = _document_passages(corpus, passage_window)
    terms = _unique_terms(query)
    total = len(passages)
    df = {t: sum(1 for p in passages if t in p.tokens) for t in terms}
    idf = {t: math.log(1.0 + (total - df[t] + 0.5) / (df[t] + 0.5)) for t in terms}
    avg_len = sum(len(p.tokens) for p in passages) / total if total else 1.0
    if avg_len == 0.0:
        avg_len = 1.0
    scored: list[tuple[float, _Passage]] = []
    for passage in passages:
        counts = Counter(passage.tokens)
        length_norm = BM25_K1 * (1.0 - BM25_B + BM25_B * len(passage.tokens) / avg_len)
        score = 0.0
        for term in terms:
            tf = counts[term]
            if tf:
                score += idf[term] * (tf * (BM25_K1 + 1.0)) / (tf + length_norm)
        scored.append((score, passage))
    scored.sort(key=lambda item: (-item[0], item[1].doc_id, item[1].start))
    return [
        RankedPassage(doc_id=p.doc_id, passage_text=p.text, score=score, rank=rank)
        for rank, (score, p) in enumerate(scored[:k], start=1)
    ]


def assemble_input(
    query: str,
    ranked: list[RankedPassage],
    corpus: Corpus,
    token_budget: int,
    count: Callable[[str], int] = count_tokens,
) -> ModelInput:
    """Compose generator input: whole documents, ordered by best passage rank."""
    if not ranked:
        raise ValueError("no ranked passages")
    doc_order = list(dict.fromkeys(p.doc_id for p in ranked))
    docs = [corpus.documents[doc_id] for doc_id in doc_order]
    return build_model_input(
        query,
        [InputDocument(d.url, d.title, d.body) for d in docs],
        token_budget=token_budget,
        count=count,
    )
