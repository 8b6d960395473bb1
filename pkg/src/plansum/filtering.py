"""Grounding, deduplication, and length-control transforms on plans.

An answer is "grounded" when it can be found in the source documents; pairs
with ungrounded answers are hallucination candidates and can be removed
before regenerating the summary. All transforms are pure and idempotent.
"""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass

from plansum.blueprint import Blueprint, Mode, ModeMismatch

# Characters stripped from token edges by normalize(). '$' and '%' survive so
# money and percentage tokens keep their spelling.
_STRIP_CHARS = "".join(c for c in string.punctuation if c not in "$%")


class EmptyAnswer(ValueError):
    """Grounding was asked about an empty answer."""


class GroundingMethod(str, enum.Enum):
    NORMALIZED_SUBSTRING = "normalized_substring"
    TOKEN_OVERLAP = "token_overlap"


@dataclass(frozen=True)
class GroundingPolicy:
    """How answer-in-input containment is decided.

    ``normalized_substring`` is the default: the normalized answer must occur
    verbatim in the normalized input. ``token_overlap`` tolerates noisy
    extraction by requiring only a fraction of the answer's unique tokens to
    appear, controlled by ``overlap_threshold``.
    """

    method: GroundingMethod = GroundingMethod.NORMALIZED_SUBSTRING
    overlap_threshold: float = 0.8

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", GroundingMethod(self.method))
        if not 0.0 < self.overlap_threshold <= 1.0:
            raise ValueError(f"overlap_threshold must be in (0, 1], got {self.overlap_threshold}")


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace, and strip punctuation from token edges.

    Internal punctuation is untouched, so "$100,000", "3.50" and "668-668d"
    normalize to themselves.
    """
    tokens = []
    for token in text.lower().split():
        token = token.strip(_STRIP_CHARS)
        if token:
            tokens.append(token)
    return " ".join(tokens)


def is_answer_grounded(answer: str, input_text: str, policy: GroundingPolicy | None = None) -> bool:
    """Decide whether an answer is contained in the input under the policy."""
    policy = policy or GroundingPolicy()
    if not answer.strip():
        raise EmptyAnswer("answer is empty")
    if policy.method is GroundingMethod.NORMALIZED_SUBSTRING:
        return normalize(answer) in normalize(input_text)
    answer_tokens = set(normalize(answer).split())
    if not answer_tokens:
        return True
    input_tokens = set(normalize(input_text).split())
    return len(answer_tokens & input_tokens) / len(answer_tokens) >= policy.overlap_threshold


def filter_blueprint(bp: Blueprint, input_text: str, policy: GroundingPolicy | None = None) -> Blueprint:
    """Drop pairs whose answer is not grounded in the input.

    Ungrounded pairs are removed outright (not just excluded), mirroring an
    automatic cleanup rather than a user edit. Order and inclusion flags of
    the surviving pairs are preserved.
    """
    if bp.mode is not Mode.QA:
        raise ModeMismatch("grounding filter needs answers; plan is question-only")
    kept = tuple(p for p in bp.pairs if is_answer_grounded(p.answer or "", input_text, policy))
    return Blueprint(kept, bp.mode)


def dedup_blueprint(bp: Blueprint) -> Blueprint:
    """Remove pairs repeating an earlier pair's normalized question."""
    seen: set[str] = set()
    kept = []
    for pair in bp.pairs:
        key = normalize(pair.question)
        if key in seen:
            continue
        seen.add(key)
        kept.append(pair)
    return Blueprint(tuple(kept), bp.mode)


def select_length(bp: Blueprint, num_pairs: int) -> Blueprint:
    """Keep only the first ``num_pairs`` pairs."""
    if num_pairs < 0:
        raise ValueError(f"num_pairs must be >= 0, got {num_pairs}")
    return Blueprint(bp.pairs[:num_pairs], bp.mode)
