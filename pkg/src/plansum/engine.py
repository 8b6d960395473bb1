"""Plan-guided generation: input formatting, backend contract, control flows.

Three control flows sit on top of one backend contract:

* end-to-end: one decoding pass emits the whole plan followed by the summary;
* iterative: each pass plans and writes one sentence, with the sentences so
  far replayed as a forced decoder prefix;
* interactive: a question-only variant whose plan the user can author.

Backends only ever see ``generate(source_text, forced_prefix,
max_new_tokens)``; everything model-specific (including plan size) is fixed
when the backend instance is built.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple
import abc
import enum

from plansum.blueprint import (
    Blueprint,
    BlueprintError,
    Mode,
    QAPair,
    Summary,
    SUMMARY_MARKER,
    align_blueprint_to_summary,
    parse_model_output,
    segment_sentences,
    serialize_blueprint,
)

DOC_MARKER = " [DOC] "
STOP_MARKER = " [DONE] "

DEFAULT_INPUT_TOKENS = 4096
DEFAULT_OUTPUT_TOKENS = 512


class EmptyQuery(ValueError):
    """Query is empty after whitespace trimming."""


class EmptyBudget(ValueError):
    """Token budget leaves no room for any document after the query."""


class EmptyPlan(ValueError):
    """Regeneration was asked for a plan with no included pairs."""


class BudgetExceeded(ValueError):
    """Source text is over budget for the active backend's tokenizer."""


class BackendFailure(RuntimeError):
    """The generation backend raised or returned garbage."""


class ParseFailure(Exception):
    """A backend emission did not parse; the raw emission is preserved."""

    def __init__(self, message: str, raw_output: str, steps: tuple[IterationStep, ...] | None = None):
        super().__init__(message)
        self.raw_output = raw_output
        self.steps = steps


class MalformedStep(Exception):
    """Internal: an iterative step emission broke the one-step grammar."""


def count_tokens(text: str) -> int:
    """Reference token count: number of maximal non-whitespace runs."""
    return len(text.split())


class FinishReason(str, enum.Enum):
    STOP_MARKER = "stop_marker"
    TOKEN_LIMIT = "token_limit"


class GenerationOutcome(NamedTuple):
    text: str
    finish_reason: FinishReason


class GeneratorBackend(abc.ABC):
    """Contract every text-generation backend fulfils.

    ``generate`` returns only the continuation, never the forced prefix.
    Deterministic backends must return identical output for identical input.
    Backends that cannot serve concurrent calls set ``concurrency_safe``
    False and get wrapped in a FIFO by the callers that need it.
    """

    backend_id: str = "abstract"
    concurrency_safe: bool = True

    @abc.abstractmethod
    def generate(self, source_text: str, forced_prefix: str, max_new_tokens: int) -> GenerationOutcome:
        ...

    def count_tokens(self, text: str) -> int:
        return count_tokens(text)


class InputDocument(NamedTuple):
    url: str
    title: str
    body: str


@dataclass(frozen=True)
class ModelInput:
    """Query plus ranked documents, flattened and truncated for a backend.

    ``formatted_text`` always starts with the verbatim query and never
    exceeds ``token_budget`` tokens.
    """

    query: str
    documents: tuple[InputDocument, ...]
    formatted_text: str
    token_budget: int = DEFAULT_INPUT_TOKENS


@dataclass(frozen=True)
class GenerationParams:
    """Per-request generation knobs.

    ``max_pairs`` is honored by backends that expose a plan-size knob (the
    stub does); the wire contract itself carries no plan-size field.
    ``max_sentences`` caps the iterative loop only.
    """

    max_output_tokens: int = DEFAULT_OUTPUT_TOKENS
    max_pairs: int = 8
    max_sentences: int = 8

    def __post_init__(self) -> None:
        for name in ("max_output_tokens", "max_pairs", "max_sentences"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class IterationStep:
    """One round of the iterative loop: a per-sentence plan and its sentence."""

    step_index: int
    plan: Blueprint
    sentence: str

    def __post_init__(self) -> None:
        if self.plan.mode is not Mode.QA or not self.plan.pairs:
            raise ValueError("step plan must be qa-mode with at least one pair")
        if not self.sentence.strip():
            raise ValueError("step sentence is empty")


@dataclass(frozen=True)
class GenerationResult:
    """Everything one control-flow run produced."""

    blueprint: Blueprint
    summary: Summary
    alignment: dict[int, list[int]]
    backend_id: str
    raw_output: str
    steps: tuple[IterationStep, ...] | None = None


def build_model_input(
    query: str,
    documents: Sequence[InputDocument | tuple[str, str, str]],
    token_budget: int = DEFAULT_INPUT_TOKENS,
    count: Callable[[str], int] = count_tokens,
) -> ModelInput:
    """Format ``query [DOC] title1 body1 [DOC] title2 body2 ...`` within budget.

    Documents are appended in the given order. The first document that does
    not fit whole is cut to whole trailing tokens, and every later document
    is dropped. The query itself is never truncated; a budget at or below
    the query's own token count is an error.
    """
    if not query.strip():
        raise EmptyQuery("query is empty")
    docs = tuple(InputDocument(*doc) for doc in documents)
    if token_budget <= count(query):
        raise EmptyBudget(
            f"budget of {token_budget} token(s) leaves no document room after the query"
        )
    text = query
    for doc in docs:
        doc_text = f"{doc.title} {doc.body}" if doc.title else doc.body
        tokens = doc_text.split()
        if not tokens:
            continue
        candidate = text + DOC_MARKER + doc_text
        if count(candidate) <= token_budget:
            text = candidate
            continue
        # Largest whole-token prefix of this document that still fits.
        best, lo, hi = 0, 1, len(tokens)
        while lo <= hi:
            mid = (lo + hi) // 2
            if count(text + DOC_MARKER + " ".join(tokens[:mid])) <= token_budget:
                best, lo = mid, mid + 1
            else:
                hi = mid - 1
        if best:
            text = text + DOC_MARKER + " ".join(tokens[:best])
        break
    return ModelInput(query=query, documents=docs, formatted_text=text, token_budget=token_budget)


def _check_budget(d: ModelInput, backend: GeneratorBackend) -> None:
    used = backend.count_tokens(d.formatted_text)
    if used > d.token_budget:
        raise BudgetExceeded(
            f"source is {used} tokens for backend {backend.backend_id!r}, budget is {d.token_budget}"
        )


def _generate(backend: GeneratorBackend, source: str, prefix: str, max_new_tokens: int) -> GenerationOutcome:
    try:
        return backend.generate(source, prefix, max_new_tokens)
    except BackendFailure:
        raise
    except Exception as exc:
        raise BackendFailure(f"backend {backend.backend_id!r} failed: {exc}") from exc


def _empty_alignment(summary: Summary) -> dict[int, list[int]]:
    # Question-only plans have no answers to align; keep the key shape stable.
    return {i: [] for i in range(len(summary.sentences))}


def run_end_to_end(d: ModelInput, backend: GeneratorBackend, params: GenerationParams | None = None) -> GenerationResult:
    """One decoding pass: the backend emits plan and summary together."""
    params = params or GenerationParams()
    _check_budget(d, backend)
    outcome = _generate(backend, d.formatted_text, "", params.max_output_tokens)
    try:
        blueprint, summary = parse_model_output(outcome.text, Mode.QA)
    except BlueprintError as exc:
        raise ParseFailure(str(exc), raw_output=outcome.text) from exc
    return GenerationResult(
        blueprint=blueprint,
        summary=summary,
        alignment=align_blueprint_to_summary(blueprint, summary),
        backend_id=backend.backend_id,
        raw_output=outcome.text,
    )


def regenerate_with_plan(
    d: ModelInput,
    edited: Blueprint,
    backend: GeneratorBackend,
    params: GenerationParams | None = None,
) -> GenerationResult:
    """Force the edited plan as decoder prefix and let the backend continue.

    The result carries ``edited`` verbatim (excluded pairs and all); only the
    summary comes from the backend.
    """
    params = params or GenerationParams()
    if not edited.included_pairs():
        raise EmptyPlan("plan has no included pairs")
    _check_budget(d, backend)
    prefix = serialize_blueprint(edited) + SUMMARY_MARKER
    outcome = _generate(backend, d.formatted_text, prefix, params.max_output_tokens)
    try:
        summary = Summary(tuple(segment_sentences(outcome.text)))
    except ValueError as exc:
        raise ParseFailure(str(exc), raw_output=prefix + outcome.text) from exc
    if edited.mode is Mode.QA:
        alignment = align_blueprint_to_summary(edited, summary)
    else:
        alignment = _empty_alignment(summary)
    return GenerationResult(
        blueprint=edited,
        summary=summary,
        alignment=alignment,
        backend_id=backend.backend_id,
        raw_output=prefix + outcome.text,
    )


def run_iterative(d: ModelInput, backend: GeneratorBackend, params: GenerationParams | None = None) -> GenerationResult:
    """Plan and generate one sentence per pass, replaying prior sentences.

    At step i the forced prefix is the space-join of sentences 1..i-1,
    byte for byte. The loop stops at the backend's stop marker, at
    ``params.max_sentences``, or on an empty emitted sentence.
    """
    params = params or GenerationParams()
    _check_budget(d, backend)
    steps: list[IterationStep] = []
    sentences: list[str] = []
    raw_parts: list[str] = []
    bare_stop = STOP_MARKER.strip()
    while len(steps) < params.max_sentences:
        prefix = " ".join(sentences)
        outcome = _generate(backend, d.formatted_text, prefix, params.max_output_tokens)
        raw_parts.append(outcome.text)
        emission = outcome.text.strip()
        if not emission or emission == bare_stop:
            break
        stop_after = emission.endswith(" " + bare_stop)
        if stop_after:
            emission = emission[: -len(" " + bare_stop)].rstrip()
        try:
            plan, step_summary = parse_model_output(emission, Mode.QA)
            if not plan.pairs:
                raise MalformedStep("step emitted no plan pairs")
            if len(step_summary.sentences) > 1:
                raise MalformedStep("step emitted more than one sentence")
        except (BlueprintError, MalformedStep) as exc:
            raise ParseFailure(
                f"step {len(steps)}: {exc}", raw_output=outcome.text, steps=tuple(steps)
            ) from exc
        if not step_summary.sentences:
            break
        sentence = step_summary.sentences[0]
        steps.append(IterationStep(step_index=len(steps), plan=plan, sentence=sentence))
        sentences.append(sentence)
        if stop_after:
            break
    all_pairs = tuple(pair for step in steps for pair in step.plan.pairs)
    blueprint = Blueprint(all_pairs, Mode.QA)
    try:
        summary = Summary(tuple(sentences))
    except ValueError as exc:
        raise ParseFailure(str(exc), raw_output="\n".join(raw_parts), steps=tuple(steps)) from exc
    return GenerationResult(
        blueprint=blueprint,
        summary=summary,
        alignment=align_blueprint_to_summary(blueprint, summary),
        backend_id=backend.backend_id,
        raw_output="\n".join(raw_parts),
        steps=tuple(steps),
    )


def run_interactive(
    d: ModelInput,
    user_questions: Sequence[str] | None,
    backend: GeneratorBackend,
    params: GenerationParams | None = None,
) -> GenerationResult:
    """Question-only flow: model-authored questions, or the user's own.

    Without ``user_questions`` this is a one-shot pass parsed in
    question-only mode. With them, the questions become the forced plan and
    the backend writes the matching summary.
    """
    params = params or GenerationParams()
    if user_questions is None:
        _check_budget(d, backend)
        outcome = _generate(backend, d.formatted_text, "", params.max_output_tokens)
        try:
            blueprint, summary = parse_model_output(outcome.text, Mode.QUESTION_ONLY)
        except BlueprintError as exc:
            raise ParseFailure(str(exc), raw_output=outcome.text) from exc
        return GenerationResult(
            blueprint=blueprint,
            summary=summary,
            alignment=_empty_alignment(summary),
            backend_id=backend.backend_id,
            raw_output=outcome.text,
        )
    plan = Blueprint(tuple(QAPair(question=q) for q in user_questions), Mode.QUESTION_ONLY)
    return regenerate_with_plan(d, plan, backend, params)
