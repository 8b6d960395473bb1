"""Plan data model and the textual codec between plans and decoder token streams.

A plan ("blueprint") is an ordered list of question-answer pairs. The codec
renders a plan and its summary as one flat string the generation backend can
emit or be prompted with::

    Q: q1 A: a1 Q: q2 A: a2 [SUMMARY] sentence one. Sentence two.

Question-only plans drop the ``A:`` segments. The three marker literals are
reserved: pair fields that could collide with them are rejected outright
instead of escaped, which keeps the grammar bijective.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

QUESTION_MARKER = "Q: "
ANSWER_MARKER = " A: "
SUMMARY_MARKER = " [SUMMARY] "

# Pair separator inside a serialized plan: single space + question marker.
_PAIR_SEPARATOR = " " + QUESTION_MARKER


class BlueprintError(ValueError):
    """Base class for plan construction, edit, and codec errors."""


class MarkerCollision(BlueprintError):
    """Pair text would be ambiguous next to the codec markers."""


class EmptyQuestion(BlueprintError):
    """A question is empty after whitespace trimming."""


class MissingSummaryMarker(BlueprintError):
    """Decoder emission has no ``[SUMMARY]`` separator."""


class MalformedPair(BlueprintError):
    """A plan segment does not match the expected pair grammar."""


class ModeMismatch(BlueprintError):
    """Operation applied to a plan of the wrong mode."""


class IndexOutOfRange(BlueprintError):
    """Edit targets a pair index outside the plan."""


class InvalidPermutation(BlueprintError):
    """Reorder edit is not a bijection over the plan indices."""


class Mode(str, enum.Enum):
    QA = "qa"
    QUESTION_ONLY = "question_only"


def _check_marker_free(value: str, field: str) -> None:
    # Padded check: also rejects text whose edges would fuse with the single
    # spaces the serializer inserts (e.g. a question ending in " A:").
    padded = f" {value} "
    for marker in (QUESTION_MARKER, ANSWER_MARKER, SUMMARY_MARKER):
        if marker in padded:
            raise MarkerCollision(f"{field} may not contain the reserved marker {marker!r}")


@dataclass(frozen=True)
class QAPair:
    """One plan element: a question, an optional answer, and an inclusion flag.

    Text fields are stored whitespace-trimmed so serialization round-trips
    exactly. Excluded pairs stay in the plan (``included=False``) so a client
    can re-enable them without rebuilding the plan.
    """

    question: str
    answer: str | None = None
    included: bool = True

    def __post_init__(self) -> None:
        question = self.question.strip()
        if not question:
            raise EmptyQuestion("question is empty")
        _check_marker_free(question, "question")
        object.__setattr__(self, "question", question)
        if self.answer is not None:
            answer = self.answer.strip()
            _check_marker_free(answer, "answer")
            object.__setattr__(self, "answer", answer)


@dataclass(frozen=True)
class Blueprint:
    """An ordered plan of QA pairs with a uniform mode."""

    pairs: tuple[QAPair, ...]
    mode: Mode = Mode.QA

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "mode", Mode(self.mode))
        for i, pair in enumerate(self.pairs):
            if self.mode is Mode.QA and not pair.answer:
                raise ModeMismatch(f"pair {i} has no answer in a qa-mode plan")
            if self.mode is Mode.QUESTION_ONLY and pair.answer is not None:
                raise ModeMismatch(f"pair {i} carries an answer in a question-only plan")

    def included_pairs(self) -> tuple[QAPair, ...]:
        return tuple(p for p in self.pairs if p.included)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Summary:
    """Generated output as an ordered list of sentences.

    The sentence list must be stable under render-then-segment, so joining
    with single spaces and re-segmenting is the identity.
    """

    sentences: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for s in self.sentences:
            if not s or s != s.strip():
                raise ValueError(f"summary sentence is empty or untrimmed: {s!r}")
        if segment_sentences(self.render()) != list(self.sentences):
            raise ValueError("sentence list is not stable under segmentation")

    def render(self) -> str:
        return " ".join(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)


class EditKind(str, enum.Enum):
    TOGGLE_INCLUDE = "toggle_include"
    ADD_QUESTION = "add_question"
    REMOVE_PAIR = "remove_pair"
    REORDER = "reorder"


@dataclass(frozen=True)
class PlanEdit:
    """A single plan edit; ``apply_edit`` validates it against a concrete plan."""

    kind: EditKind
    target_index: int | None = None
    question_text: str | None = None
    permutation: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EditKind(self.kind))
        if self.kind in (EditKind.TOGGLE_INCLUDE, EditKind.REMOVE_PAIR) and self.target_index is None:
            raise BlueprintError(f"{self.kind.value} requires target_index")
        if self.kind is EditKind.ADD_QUESTION and self.question_text is None:
            raise BlueprintError("add_question requires question_text")
        if self.kind is EditKind.REORDER:
            if self.permutation is None:
                raise BlueprintError("reorder requires a permutation")
            object.__setattr__(self, "permutation", tuple(self.permutation))


def segment_sentences(text: str) -> list[str]:
    """Split text into sentences with a fixed, reproducible rule.

    A sentence ends at '.', '!' or '?' when followed by whitespace and an
    uppercase letter, or by end of text. Terminators stay with their
    sentence; inter-sentence whitespace is consumed. The rule is idempotent
    on its own output.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in ".!?":
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j == n or (j > i + 1 and text[j].isupper()):
                piece = text[start : i + 1].strip()
                if piece:
                    sentences.append(piece)
                start = j
                i = j
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def serialize_blueprint(bp: Blueprint) -> str:
    """Render the included pairs of a plan as a flat marker-delimited string."""
    parts = []
    for pair in bp.included_pairs():
        if bp.mode is Mode.QA:
            parts.append(f"{QUESTION_MARKER}{pair.question}{ANSWER_MARKER}{pair.answer}")
        else:
            parts.append(f"{QUESTION_MARKER}{pair.question}")
    return " ".join(parts)


def serialize_output(bp: Blueprint, summary: Summary) -> str:
    """Render a plan and its summary as one decoder-style emission."""
    if not summary.sentences:
        raise ValueError("summary is empty")
    return serialize_blueprint(bp) + SUMMARY_MARKER + summary.render()


def parse_blueprint_text(plan_text: str, mode: Mode) -> Blueprint:
    """Parse the plan half of an emission (everything left of the summary marker)."""
    text = plan_text.strip()
    if not text:
        return Blueprint((), mode)
    if not text.startswith(QUESTION_MARKER):
        raise MalformedPair(f"plan text does not start with {QUESTION_MARKER!r}: {text[:40]!r}")
    segments = text[len(QUESTION_MARKER) :].split(_PAIR_SEPARATOR)
    pairs = []
    for segment in segments:
        if mode is Mode.QA:
            answer_at = segment.find(ANSWER_MARKER)
            if answer_at < 0:
                raise MalformedPair(f"qa segment has no {ANSWER_MARKER!r}: {segment[:40]!r}")
            question = segment[:answer_at]
            answer = segment[answer_at + len(ANSWER_MARKER) :]
            if not answer.strip():
                raise MalformedPair(f"qa segment has an empty answer: {segment[:40]!r}")
            pairs.append(QAPair(question=question, answer=answer))
        else:
            if ANSWER_MARKER in segment:
                raise MalformedPair(f"answer marker inside a question-only plan: {segment[:40]!r}")
            pairs.append(QAPair(question=segment))
    return Blueprint(tuple(pairs), mode)


def parse_model_output(text: str, mode: Mode = Mode.QA) -> tuple[Blueprint, Summary]:
    """Split a decoder emission into its plan and summary.

    The first ``[SUMMARY]`` marker separates the two; the left side is parsed
    by the pair grammar for ``mode``, the right side is sentence-segmented.
    Parsed pairs are always ``included=True``.
    """
    marker_at = text.find(SUMMARY_MARKER)
    if marker_at < 0:
        raise MissingSummaryMarker(f"no {SUMMARY_MARKER!r} in emission")
    blueprint = parse_blueprint_text(text[:marker_at], Mode(mode))
    summary = Summary(tuple(segment_sentences(text[marker_at + len(SUMMARY_MARKER) :])))
    return blueprint, summary


def apply_edit(bp: Blueprint, edit: PlanEdit) -> Blueprint:
    """Return a new plan with one edit applied; the input plan is untouched."""
    m = len(bp.pairs)
    if edit.kind in (EditKind.TOGGLE_INCLUDE, EditKind.REMOVE_PAIR):
        index = edit.target_index
        assert index is not None
        if not 0 <= index < m:
            raise IndexOutOfRange(f"index {index} outside plan of {m} pair(s)")
        if edit.kind is EditKind.TOGGLE_INCLUDE:
            pair = bp.pairs[index]
            flipped = dataclasses.replace(pair, included=not pair.included)
            return dataclasses.replace(bp, pairs=bp.pairs[:index] + (flipped,) + bp.pairs[index + 1 :])
        return dataclasses.replace(bp, pairs=bp.pairs[:index] + bp.pairs[index + 1 :])
    if edit.kind is EditKind.ADD_QUESTION:
        if bp.mode is not Mode.QUESTION_ONLY:
            raise ModeMismatch("add_question applies to question-only plans")
        new_pair = QAPair(question=edit.question_text or "")
        return dataclasses.replace(bp, pairs=bp.pairs + (new_pair,))
    assert edit.kind is EditKind.REORDER
    permutation = edit.permutation
    assert permutation is not None
    if sorted(permutation) != list(range(m)):
        raise InvalidPermutation(f"permutation {permutation!r} is not a bijection over 0..{m - 1}")
    return dataclasses.replace(bp, pairs=tuple(bp.pairs[j] for j in permutation))


def align_blueprint_to_summary(bp: Blueprint, summary: Summary) -> dict[int, list[int]]:
    """Map each summary sentence index to the plan pairs whose answer it contains.

    Containment is tested on normalized text, so casing and punctuation at
    word edges do not matter. Every sentence index appears as a key; a pair
    may land in several sentences or in none.
    """
    from plansum.filtering import normalize

    if bp.mode is not Mode.QA:
        raise ModeMismatch("alignment needs answers; plan is question-only")
    answers = [normalize(p.answer or "") for p in bp.pairs]
    alignment: dict[int, list[int]] = {}
    for i, sentence in enumerate(summary.sentences):
        norm_sentence = normalize(sentence)
        alignment[i] = [j for j, answer in enumerate(answers) if answer and answer in norm_sentence]
    return alignment
