"""HTTP backend: stateless transport over session state.

Endpoints run as sync handlers on the server's worker threads, so a long
generation never blocks the request acceptor; requests that share a session
serialize on its lock, requests on different sessions run concurrently.
"""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from plansum.backends import RemoteBackend, StubBackend, ensure_concurrency_safe
from plansum.blueprint import Blueprint, BlueprintError, Mode
from plansum.engine import (
    BackendFailure,
    BudgetExceeded,
    EmptyBudget,
    EmptyPlan,
    EmptyQuery,
    GenerationParams,
    GeneratorBackend,
    ParseFailure,
    regenerate_with_plan,
    run_end_to_end,
    run_interactive,
    run_iterative,
)
from plansum.filtering import EmptyAnswer, GroundingPolicy, dedup_blueprint, filter_blueprint, select_length
from plansum.retrieval import (
    AllFetchesFailed,
    Corpus,
    Document,
    EmptyCorpus,
    FetchLimits,
    fetch_documents,
    ingest_local,
    rank_passages,
)
from plansum.service import schemas
from plansum.service.sessions import SessionStore, UnknownSession

log = logging.getLogger(__name__)

MODEL_IDS = ("end_to_end", "iterative", "interactive")

# rank_passages wants an explicit k; the service always ranks everything and
# then caps at the document level.
_RANK_ALL = 1_000_000


class UnknownModel(ValueError):
    """Model id is not one of the three control flows."""


class NoCorpus(LookupError):
    """No corpus configured and the request carried no URLs."""


class NoResult(ValueError):
    """Session has no prior generation result to operate on."""


class RegenerateUnsupported(ValueError):
    """Regeneration is not defined for this model."""


@dataclass(frozen=True)
class AppConfig:
    """Service configuration; every field has an environment override."""

    corpus_path: str | None = None
    backend: str = "stub"
    remote_url: str | None = None
    session_ttl: float = 1800.0
    token_budget: int = 4096
    max_docs: int = 5
    passage_window: int = 5
    fetch_limits: FetchLimits = field(default_factory=FetchLimits)
    cors_origins: tuple[str, ...] = ("*",)

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "AppConfig":
        env = dict(os.environ if env is None else env)
        base = cls()
        return cls(
            corpus_path=env.get("PLANSUM_CORPUS") or None,
            backend=env.get("PLANSUM_BACKEND", base.backend),
            remote_url=env.get("PLANSUM_REMOTE_URL") or None,
            session_ttl=float(env.get("PLANSUM_SESSION_TTL", base.session_ttl)),
            token_budget=int(env.get("PLANSUM_TOKEN_BUDGET", base.token_budget)),
            max_docs=int(env.get("PLANSUM_MAX_DOCS", base.max_docs)),
            passage_window=int(env.get("PLANSUM_PASSAGE_WINDOW", base.passage_window)),
            fetch_limits=FetchLimits(
                max_concurrency=int(env.get("PLANSUM_FETCH_CONCURRENCY", FetchLimits.max_concurrency)),
                timeout=float(env.get("PLANSUM_FETCH_TIMEOUT", FetchLimits.timeout)),
                max_bytes=int(env.get("PLANSUM_FETCH_MAX_BYTES", FetchLimits.max_bytes)),
            ),
            cors_origins=tuple(env.get("PLANSUM_CORS_ORIGINS", "*").split(",")),
        )


class BackendProvider:
    """Builds the backend serving one request; mirrors checkpoint selection."""

    backend_id = "abstract"

    def for_request(self, model: str, params: GenerationParams) -> GeneratorBackend:
        raise NotImplementedError


class StubProvider(BackendProvider):
    backend_id = "stub"

    def for_request(self, model: str, params: GenerationParams) -> GeneratorBackend:
        return ensure_concurrency_safe(StubBackend(task=model, max_pairs=params.max_pairs))


class RemoteProvider(BackendProvider):
    backend_id = "remote"

    def __init__(self, endpoint_url: str):
        self._backend = ensure_concurrency_safe(RemoteBackend(endpoint_url))

    def for_request(self, model: str, params: GenerationParams) -> GeneratorBackend:
        return self._backend


def make_provider(config: AppConfig) -> BackendProvider:
    if config.backend == "stub":
        return StubProvider()
    if config.backend == "remote":
        if not config.remote_url:
            raise ValueError("backend 'remote' needs remote_url (PLANSUM_REMOTE_URL)")
        return RemoteProvider(config.remote_url)
    raise ValueError(f"unknown backend {config.backend!r}; expected 'stub' or 'remote'")


# Exception type -> HTTP status. The error_code is the exception class name.
_ERROR_STATUS: list[tuple[type[Exception], int]] = [
    (UnknownSession, 404),
    (NoCorpus, 404),
    (RegenerateUnsupported, 409),
    (ParseFailure, 422),
    (BackendFailure, 502),
    (AllFetchesFailed, 502),
    (UnknownModel, 400),
    (NoResult, 400),
    (EmptyQuery, 400),
    (EmptyBudget, 400),
    (EmptyPlan, 400),
    (EmptyAnswer, 400),
    (EmptyCorpus, 400),
    (BudgetExceeded, 400),
    (BlueprintError, 400),
]


def _error_response(exc: Exception, status: int) -> JSONResponse:
    body = {"error_code": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseFailure):
        body["raw_output"] = exc.raw_output
    return JSONResponse(status_code=status, content=body)


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    provider = make_provider(config)
    store = SessionStore(ttl_seconds=config.session_ttl)
    base_corpus: Corpus | None = None
    if config.corpus_path:
        base_corpus = ingest_local(config.corpus_path)
        log.info("loaded corpus of %d document(s) from %s", len(base_corpus.documents), config.corpus_path)

    app = FastAPI(title="plansum", version="0.1.0")
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    for exc_type, status in _ERROR_STATUS:
        def handler(request: Request, exc: Exception, status: int = status) -> JSONResponse:
            return _error_response(exc, status)

        app.add_exception_handler(exc_type, handler)

    @app.exception_handler(RequestValidationError)
    def validation_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error_code": "ValidationError", "message": str(exc.errors())},
        )

    @app.get("/api/models", response_model=schemas.ModelsResponse)
    def get_models() -> schemas.ModelsResponse:
        return schemas.ModelsResponse(
            models=[schemas.ModelDescriptor(id=m) for m in MODEL_IDS],
            backends=[provider.backend_id],
        )

    @app.post("/api/retrieve", response_model=schemas.RetrieveResponse)
    def retrieve(req: schemas.RetrieveRequest) -> schemas.RetrieveResponse:
        if not req.query.strip():
            raise EmptyQuery("query is empty")
        if req.urls:
            corpus, failures = fetch_documents(req.urls, config.fetch_limits)
            for failure in failures:
                log.warning("retrieve: %s failed: %s", failure.url, failure.error)
        elif base_corpus is not None:
            corpus = base_corpus
        else:
            raise NoCorpus("no corpus configured and no urls given")
        ranked = rank_passages(req.query, corpus, k=_RANK_ALL, passage_window=config.passage_window)
        doc_order = list(dict.fromkeys(p.doc_id for p in ranked))[: req.max_docs or config.max_docs]
        selected = tuple(
            dataclasses.replace(corpus.documents[doc_id], doc_id=position)
            for position, doc_id in enumerate(doc_order)
        )
        session_corpus = Corpus(selected, corpus.source)
        model_input = _build_input(req.query, session_corpus, config)
        session = store.create(req.query, session_corpus, model_input)
        return schemas.RetrieveResponse.from_corpus(session.session_id, session_corpus)

    @app.post("/api/summarize", response_model=schemas.GenerationResponse, response_model_exclude_none=True)
    def summarize(req: schemas.SummarizeRequest) -> schemas.GenerationResponse:
        session = store.get(req.session_id)
        params = req.params.to_domain() if req.params else GenerationParams()
        backend = provider.for_request(_checked_model(req.model), params)
        with session.lock:
            if req.model == "end_to_end":
                result = run_end_to_end(session.model_input, backend, params)
            elif req.model == "iterative":
                result = run_iterative(session.model_input, backend, params)
            else:
                result = run_interactive(session.model_input, None, backend, params)
            session.last_result = result
        return schemas.GenerationResponse.from_result(result)

    @app.post("/api/regenerate", response_model=schemas.GenerationResponse, response_model_exclude_none=True)
    def regenerate(req: schemas.RegenerateRequest) -> schemas.GenerationResponse:
        session = store.get(req.session_id)
        model = _checked_model(req.model)
        if model == "iterative":
            raise RegenerateUnsupported("the iterative model does not support plan regeneration")
        blueprint = req.blueprint.to_domain()
        params = GenerationParams()
        backend = provider.for_request(model, params)
        with session.lock:
            if model == "end_to_end":
                if blueprint.mode is not Mode.QA:
                    raise BlueprintError("end_to_end regeneration needs a qa-mode plan")
                result = regenerate_with_plan(session.model_input, blueprint, backend, params)
            else:
                if blueprint.mode is not Mode.QUESTION_ONLY:
                    raise BlueprintError("interactive regeneration needs a question-only plan")
                questions = [p.question for p in blueprint.included_pairs()]
                if not questions:
                    raise EmptyPlan("plan has no included questions")
                result = run_interactive(session.model_input, questions, backend, params)
                # Echo the submitted plan verbatim so excluded chips survive.
                result = dataclasses.replace(result, blueprint=blueprint)
            session.last_result = result
        return schemas.GenerationResponse.from_result(result)

    @app.post("/api/filter", response_model=schemas.FilterResponse)
    def filter_plan(req: schemas.FilterRequest) -> schemas.FilterResponse:
        session = store.get(req.session_id)
        with session.lock:
            if session.last_result is None:
                raise NoResult("session has no generation result to filter")
            blueprint = session.last_result.blueprint
            policy = req.policy.to_domain() if req.policy else GroundingPolicy()
            filtered = filter_blueprint(blueprint, session.corpus.text(), policy)
            if req.dedup:
                filtered = dedup_blueprint(filtered)
            if req.num_pairs is not None:
                filtered = select_length(filtered, req.num_pairs)
        return schemas.FilterResponse(
            blueprint=schemas.BlueprintModel.from_domain(filtered),
            removed_pairs=len(blueprint.pairs) - len(filtered.pairs),
        )

    @app.post("/api/backend/generate", response_model=schemas.WireGenerateResponse)
    def backend_generate(req: schemas.WireGenerateRequest) -> schemas.WireGenerateResponse:
        # Exposes the configured backend over the minimal wire contract.
        # Bare (no-prefix) requests are served by the end-to-end task, the
        # way a hosted deployment serves one checkpoint per endpoint.
        backend = provider.for_request("end_to_end", GenerationParams())
        outcome = backend.generate(req.source, req.prefix, req.max_new_tokens)
        return schemas.WireGenerateResponse(text=outcome.text, finish_reason=outcome.finish_reason.value)

    return app


def _checked_model(model: str) -> str:
    if model not in MODEL_IDS:
        raise UnknownModel(f"unknown model {model!r}; expected one of {MODEL_IDS}")
    return model


def _build_input(query: str, corpus: Corpus, config: AppConfig):
    from plansum.engine import InputDocument, build_model_input

    return build_model_input(
        query,
        [InputDocument(d.url, d.title, d.body) for d in corpus.documents],
        token_budget=config.token_budget,
    )
