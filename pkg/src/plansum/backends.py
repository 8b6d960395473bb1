"""Backend implementations: the deterministic extractive stub and a remote client.

The stub fulfils the backend contract with pure lexical rules so every
downstream behavior is exactly reproducible and hand-checkable. It is not a
model; it is the reference machine the test suite scores everything against.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass

import httpx

from plansum.blueprint import (
    ANSWER_MARKER,
    Blueprint,
    Mode,
    QAPair,
    QUESTION_MARKER,
    SUMMARY_MARKER,
    parse_blueprint_text,
    segment_sentences,
    serialize_blueprint,
)
from plansum.engine import (
    BackendFailure,
    DOC_MARKER,
    FinishReason,
    GenerationOutcome,
    GeneratorBackend,
    STOP_MARKER,
)
from plansum.filtering import normalize

# The 30-word stop list used by the stub's lexical scoring (also documented
# in the README). Interrogatives are stopped so question/sentence overlap is
# driven by content words.
STOP_WORDS = frozenset(
    """
    a an the is are was were be been and or of to in on at for with by from
    as it its this that what who how why does
    """.split()
)

FALLBACK_PREFIX = "No supporting sentence found for: "

STUB_TASKS = ("end_to_end", "iterative", "interactive")


@dataclass(frozen=True)
class _SentenceView:
    doc_index: int
    position: int
    text: str
    tokens: tuple[str, ...]

    @property
    def content_terms(self) -> frozenset[str]:
        return frozenset(t for t in self.tokens if t not in STOP_WORDS)


class _CorpusView:
    """Normalized view of one formatted source text."""

    def __init__(self, source_text: str):
        parts = source_text.split(DOC_MARKER)
        self.query = parts[0]
        self.doc_texts = parts[1:]
        self.sentences: list[_SentenceView] = []
        self.doc_token_counts: list[Counter[str]] = []
        for doc_index, doc_text in enumerate(self.doc_texts):
            doc_tokens: list[str] = []
            for position, sentence in enumerate(segment_sentences(doc_text)):
                tokens = tuple(normalize(sentence).split())
                doc_tokens.extend(tokens)
                self.sentences.append(_SentenceView(doc_index, position, sentence, tokens))
            self.doc_token_counts.append(Counter(doc_tokens))
        n_docs = len(self.doc_texts)
        df: Counter[str] = Counter()
        for counts in self.doc_token_counts:
            df.update(set(counts))
        # Smoothed idf: stays positive and still orders by rarity with one doc.
        self._idf = {t: math.log((1 + n_docs) / (1 + d)) + 1.0 for t, d in df.items()}

    def query_terms(self) -> frozenset[str]:
        return frozenset(t for t in normalize(self.query).split() if t not in STOP_WORDS)

    def overlap(self, sentence: _SentenceView, terms: frozenset[str]) -> int:
        return len(sentence.content_terms & terms)

    def scored_sentences(self, terms: frozenset[str]) -> list[tuple[int, _SentenceView]]:
        """Positive-scoring sentences, best first; ties by document order."""
        scored = [(self.overlap(s, terms), s) for s in self.sentences]
        positive = [(score, s) for score, s in scored if score > 0]
        positive.sort(key=lambda item: (-item[0], item[1].doc_index, item[1].position))
        return positive

    def best_answer_token(self, sentence: _SentenceView) -> str | None:
        """The sentence's non-stop-word token with the highest tf-idf.

        tf counts occurrences in the sentence's own document; ties go to the
        earliest occurrence within the sentence.
        """
        counts = self.doc_token_counts[sentence.doc_index]
        best: str | None = None
        best_score = 0.0
        for token in sentence.tokens:
            if token in STOP_WORDS:
                continue
            score = counts[token] * self._idf[token]
            if score > best_score:
                best, best_score = token, score
        return best

    def earliest_containing(self, needle: str) -> _SentenceView | None:
        for sentence in self.sentences:
            if needle and needle in " ".join(sentence.tokens):
                return sentence
        return None

    def best_match(self, terms: frozenset[str]) -> _SentenceView | None:
        """Sentence with maximal term overlap; document order breaks ties."""
        best: _SentenceView | None = None
        best_score = -1
        for sentence in self.sentences:
            score = self.overlap(sentence, terms)
            if score > best_score:
                best, best_score = sentence, score
        return best


class StubBackend(GeneratorBackend):
    """Deterministic extractive backend used as the offline test oracle.

    ``task`` mirrors the checkpoint a real deployment would load: it decides
    what a bare (no-prefix) request emits. Requests whose forced prefix ends
    with the summary marker are always treated as plan-forced continuations,
    whatever the task.
    """

    backend_id = "stub"
    concurrency_safe = True

    def __init__(self, task: str = "end_to_end", max_pairs: int = 8):
        if task not in STUB_TASKS:
            raise ValueError(f"unknown stub task {task!r}; expected one of {STUB_TASKS}")
        if max_pairs <= 0:
            raise ValueError("max_pairs must be positive")
        self.task = task
        self.max_pairs = max_pairs

    def generate(self, source_text: str, forced_prefix: str, max_new_tokens: int) -> GenerationOutcome:
        view = _CorpusView(source_text)
        if forced_prefix.endswith(SUMMARY_MARKER):
            emission = self._continue_summary(view, forced_prefix)
        elif self.task == "iterative":
            emission = self._iterative_step(view, forced_prefix)
        elif self.task == "interactive":
            emission = self._one_shot(view, Mode.QUESTION_ONLY)
        else:
            emission = self._one_shot(view, Mode.QA)
        return self._truncate(emission, max_new_tokens)

    @staticmethod
    def _truncate(emission: str, max_new_tokens: int) -> GenerationOutcome:
        tokens = emission.split()
        if len(tokens) > max_new_tokens:
            return GenerationOutcome(" ".join(tokens[:max_new_tokens]), FinishReason.TOKEN_LIMIT)
        return GenerationOutcome(emission, FinishReason.STOP_MARKER)

    def _plan_sentences(self, view: _CorpusView) -> list[_SentenceView]:
        """Top query-matching sentences, re-sorted into document order."""
        top = [s for _, s in view.scored_sentences(view.query_terms())[: self.max_pairs]]
        top.sort(key=lambda s: (s.doc_index, s.position))
        return top

    def _pair_for(self, view: _CorpusView, sentence: _SentenceView) -> QAPair | None:
        answer = view.best_answer_token(sentence)
        if answer is None:
            return None
        return QAPair(question=f"What does the source say about {answer}?", answer=answer)

    def _qa_plan(self, view: _CorpusView) -> Blueprint:
        pairs = []
        for sentence in self._plan_sentences(view):
            pair = self._pair_for(view, sentence)
            if pair is not None:
                pairs.append(pair)
        return Blueprint(tuple(pairs), Mode.QA)

    def _supporting_sentences(self, view: _CorpusView, plan: Blueprint) -> list[str]:
        """Per included pair, the earliest sentence containing its answer."""
        sentences = []
        for pair in plan.included_pairs():
            hit = view.earliest_containing(normalize(pair.answer or ""))
            sentences.append(hit.text if hit else f"{FALLBACK_PREFIX}{pair.answer}.")
        return sentences

    def _question_matches(self, view: _CorpusView, plan: Blueprint) -> list[str]:
        """Per included question, the sentence with maximal term overlap."""
        sentences = []
        for pair in plan.included_pairs():
            terms = frozenset(t for t in normalize(pair.question).split() if t not in STOP_WORDS)
            hit = view.best_match(terms)
            if hit is not None:
                sentences.append(hit.text)
        return sentences

    def _one_shot(self, view: _CorpusView, mode: Mode) -> str:
        plan = self._qa_plan(view)
        if mode is Mode.QUESTION_ONLY:
            plan = Blueprint(tuple(QAPair(question=p.question) for p in plan.pairs), mode)
            sentences = self._question_matches(view, plan)
        else:
            sentences = self._supporting_sentences(view, plan)
        return serialize_blueprint(plan) + SUMMARY_MARKER + " ".join(sentences)

    def _continue_summary(self, view: _CorpusView, forced_prefix: str) -> str:
        plan_text = forced_prefix[: -len(SUMMARY_MARKER)]
        mode = Mode.QA if ANSWER_MARKER in plan_text else Mode.QUESTION_ONLY
        plan = parse_blueprint_text(plan_text, mode)
        if mode is Mode.QA:
            sentences = self._supporting_sentences(view, plan)
        else:
            sentences = self._question_matches(view, plan)
        return " ".join(sentences)

    def _iterative_step(self, view: _CorpusView, forced_prefix: str) -> str:
        already = set(segment_sentences(forced_prefix))
        for _, sentence in view.scored_sentences(view.query_terms()):
            if sentence.text in already:
                continue
            pair = self._pair_for(view, sentence)
            if pair is None:
                continue
            plan = Blueprint((pair,), Mode.QA)
            return serialize_blueprint(plan) + SUMMARY_MARKER + sentence.text
        return STOP_MARKER


class RemoteBackend(GeneratorBackend):
    """Client for a hosted generator speaking the minimal wire contract.

    Request: ``{source, prefix, max_new_tokens}``; response:
    ``{text, finish_reason}``. Marker remapping for checkpoint-specific
    separators is the hosted side's job. Token counts fall back to the
    whitespace rule since remote tokenizers are not exposed.
    """

    backend_id = "remote"
    concurrency_safe = True

    def __init__(self, endpoint_url: str, timeout: float = 60.0, client: httpx.Client | None = None):
        self.endpoint_url = endpoint_url
        self._client = client or httpx.Client(timeout=timeout)

    def generate(self, source_text: str, forced_prefix: str, max_new_tokens: int) -> GenerationOutcome:
        payload = {"source": source_text, "prefix": forced_prefix, "max_new_tokens": max_new_tokens}
        try:
            response = self._client.post(self.endpoint_url, json=payload)
            response.raise_for_status()
            data = response.json()
            return GenerationOutcome(data["text"], FinishReason(data["finish_reason"]))
        except (httpx.HTTPError, KeyError, ValueError, TypeError) as exc:
            raise BackendFailure(f"remote backend at {self.endpoint_url}: {exc}") from exc


class SerializedBackend(GeneratorBackend):
    """FIFO wrapper for backends that declare themselves concurrency-unsafe."""

    concurrency_safe = True

    def __init__(self, inner: GeneratorBackend):
        self._inner = inner
        self._lock = threading.Lock()
        self.backend_id = inner.backend_id

    def generate(self, source_text: str, forced_prefix: str, max_new_tokens: int) -> GenerationOutcome:
        with self._lock:
            return self._inner.generate(source_text, forced_prefix, max_new_tokens)

    def count_tokens(self, text: str) -> int:
        return self._inner.count_tokens(text)


def ensure_concurrency_safe(backend: GeneratorBackend) -> GeneratorBackend:
    """Wrap a serialize-me backend in a FIFO; pass safe backends through."""
    return backend if backend.concurrency_safe else SerializedBackend(backend)
