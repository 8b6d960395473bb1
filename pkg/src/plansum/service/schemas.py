"""Pydantic models for the HTTP API: the canonical interchange encoding.

Plans travel as ``{mode, pairs: [{question, answer?, included}]}`` and
summaries as ``{sentences: [...]}`` everywhere — service responses, CLI
result files, and the UI all share this shape.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from plansum.blueprint import Blueprint, Mode, QAPair, Summary
from plansum.engine import GenerationParams, GenerationResult, IterationStep
from plansum.filtering import GroundingPolicy
from plansum.retrieval import Corpus


class QAPairModel(BaseModel):
    question: str
    answer: str | None = None
    included: bool = True


class BlueprintModel(BaseModel):
    mode: Literal["qa", "question_only"]
    pairs: list[QAPairModel]

    @classmethod
    def from_domain(cls, bp: Blueprint) -> "BlueprintModel":
        return cls(
            mode=bp.mode.value,
            pairs=[
                QAPairModel(question=p.question, answer=p.answer, included=p.included)
                for p in bp.pairs
            ],
        )

    def to_domain(self) -> Blueprint:
        return Blueprint(
            tuple(QAPair(question=p.question, answer=p.answer, included=p.included) for p in self.pairs),
            Mode(self.mode),
        )


class SummaryModel(BaseModel):
    sentences: list[str]

    @classmethod
    def from_domain(cls, summary: Summary) -> "SummaryModel":
        return cls(sentences=list(summary.sentences))


class StepModel(BaseModel):
    step_index: int
    plan: BlueprintModel
    sentence: str

    @classmethod
    def from_domain(cls, step: IterationStep) -> "StepModel":
        return cls(
            step_index=step.step_index,
            plan=BlueprintModel.from_domain(step.plan),
            sentence=step.sentence,
        )


class GenerationResponse(BaseModel):
    blueprint: BlueprintModel
    summary: SummaryModel
    alignment: dict[int, list[int]]
    steps: list[StepModel] | None = None
    backend_id: str
    raw_output: str

    @classmethod
    def from_result(cls, result: GenerationResult) -> "GenerationResponse":
        return cls(
            blueprint=BlueprintModel.from_domain(result.blueprint),
            summary=SummaryModel.from_domain(result.summary),
            alignment=result.alignment,
            steps=[StepModel.from_domain(s) for s in result.steps] if result.steps is not None else None,
            backend_id=result.backend_id,
            raw_output=result.raw_output,
        )


class ModelDescriptor(BaseModel):
    id: str


class ModelsResponse(BaseModel):
    models: list[ModelDescriptor]
    backends: list[str]


class DocumentModel(BaseModel):
    doc_id: int
    url: str
    title: str
    body: str


class RetrieveRequest(BaseModel):
    query: str
    urls: list[str] | None = None
    max_docs: int | None = Field(default=None, ge=1)


class RetrieveResponse(BaseModel):
    session_id: str
    documents: list[DocumentModel]

    @classmethod
    def from_corpus(cls, session_id: str, corpus: Corpus) -> "RetrieveResponse":
        return cls(
            session_id=session_id,
            documents=[
                DocumentModel(doc_id=d.doc_id, url=d.url, title=d.title, body=d.body)
                for d in corpus.documents
            ],
        )


class ParamsModel(BaseModel):
    max_output_tokens: int = Field(default=512, ge=1)
    max_pairs: int = Field(default=8, ge=1)
    max_sentences: int = Field(default=8, ge=1)

    def to_domain(self) -> GenerationParams:
        return GenerationParams(
            max_output_tokens=self.max_output_tokens,
            max_pairs=self.max_pairs,
            max_sentences=self.max_sentences,
        )


class SummarizeRequest(BaseModel):
    session_id: str
    model: str
    params: ParamsModel | None = None


class RegenerateRequest(BaseModel):
    session_id: str
    model: str
    blueprint: BlueprintModel


class PolicyModel(BaseModel):
    method: Literal["normalized_substring", "token_overlap"] = "normalized_substring"
    overlap_threshold: float = Field(default=0.8, gt=0.0, le=1.0)

    def to_domain(self) -> GroundingPolicy:
        return GroundingPolicy(method=self.method, overlap_threshold=self.overlap_threshold)


class FilterRequest(BaseModel):
    session_id: str
    policy: PolicyModel | None = None
    dedup: bool = False
    num_pairs: int | None = Field(default=None, ge=0)


class FilterResponse(BaseModel):
    blueprint: BlueprintModel
    removed_pairs: int


class WireGenerateRequest(BaseModel):
    source: str
    prefix: str = ""
    max_new_tokens: int = Field(default=512, ge=1)


class WireGenerateResponse(BaseModel):
    text: str
    finish_reason: Literal["stop_marker", "token_limit"]


class ErrorBody(BaseModel):
    error_code: str
    message: str
    raw_output: str | None = None
