"""Command-line entry points: batch runs, plan filtering, serving, fixtures.

Exit codes: 0 success, 1 usage or environment problem, 2 data or parse
problem. Results are written to files rather than stdout so raw emissions
from parse failures are always preserved for inspection.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
import threading
import time
from pathlib import Path

import uvicorn

from plansum.backends import RemoteBackend, StubBackend
from plansum.blueprint import BlueprintError, Mode
from plansum.engine import (
    GenerationParams,
    GeneratorBackend,
    ParseFailure,
    run_end_to_end,
    run_interactive,
    run_iterative,
)
from plansum.filtering import GroundingPolicy, filter_blueprint
from plansum.fixtures import write_fixture_files
from plansum.retrieval import EmptyCorpus, MalformedRecord, ingest_local, rank_passages, assemble_input
from plansum.service import AppConfig, create_app
from plansum.service.schemas import BlueprintModel, GenerationResponse

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

MODEL_CHOICES = ("end_to_end", "iterative", "interactive")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for data
    # problems, so remap.
    def error(self, message: str) -> "argparse.NoReturn":  # type: ignore[name-defined]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plansum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("summarize", help="run one control flow over a local corpus")
    p.add_argument("--query", required=True)
    p.add_argument("--corpus", required=True, help="line-delimited JSON {url,title,body} file")
    p.add_argument("--model", choices=MODEL_CHOICES, default="end_to_end")
    p.add_argument("--backend", choices=("stub", "remote"), default="stub")
    p.add_argument("--max-pairs", type=int, default=8)
    p.add_argument("--max-input-tokens", type=int, default=4096)
    p.add_argument("--max-output-tokens", type=int, default=512)
    p.add_argument("--max-sentences", type=int, default=8)
    p.add_argument("--question", action="append", dest="questions", default=None,
                   help="interactive model only; repeat to supply a question plan")
    p.add_argument("--out", required=True, help="result file (canonical JSON encoding)")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("filter", help="drop ungrounded pairs from a result's plan")
    p.add_argument("--result", required=True, help="result file from 'summarize'")
    p.add_argument("--corpus", required=True)
    p.add_argument("--method", choices=("normalized_substring", "token_overlap"),
                   default="normalized_substring")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--out", default=None, help="default: <result>.filtered.json")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--corpus", default=None)
    p.add_argument("--backend", choices=("stub", "remote"), default="stub")
    p.add_argument("--session-ttl", type=float, default=1800.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixtures", help="write bundled demo corpora and plan files")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fixtures)

    return parser


def _make_backend(name: str, model: str, max_pairs: int) -> GeneratorBackend:
    if name == "remote":
        url = os.environ.get("PLANSUM_REMOTE_URL")
        if not url:
            raise EnvironmentError("backend 'remote' needs PLANSUM_REMOTE_URL")
        return RemoteBackend(url)
    return StubBackend(task=model, max_pairs=max_pairs)


def cmd_summarize(args: argparse.Namespace) -> int:
    corpus_path = Path(args.corpus)
    if not corpus_path.is_file():
        print(f"plansum: corpus file not found: {corpus_path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        corpus = ingest_local(corpus_path)
    except (MalformedRecord, EmptyCorpus) as exc:
        print(f"plansum: bad corpus: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        backend = _make_backend(args.backend, args.model, args.max_pairs)
    except EnvironmentError as exc:
        print(f"plansum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    params = GenerationParams(
        max_output_tokens=args.max_output_tokens,
        max_pairs=args.max_pairs,
        max_sentences=args.max_sentences,
    )
    ranked = rank_passages(args.query, corpus, k=1_000_000)
    model_input = assemble_input(args.query, ranked, corpus, token_budget=args.max_input_tokens,
                                 count=backend.count_tokens)
    try:
        if args.model == "end_to_end":
            result = run_end_to_end(model_input, backend, params)
        elif args.model == "iterative":
            result = run_iterative(model_input, backend, params)
        else:
            result = run_interactive(model_input, args.questions, backend, params)
    except ParseFailure as exc:
        payload = {"error_code": "ParseFailure", "message": str(exc), "raw_output": exc.raw_output}
        _write_json_text(args.out, json.dumps(payload, indent=2, ensure_ascii=False))
        print(f"plansum: parse failure, raw emission written to {args.out}", file=sys.stderr)
        return EXIT_DATA
    encoded = GenerationResponse.from_result(result)
    _write_json_text(args.out, encoded.model_dump_json(indent=2, exclude_none=True))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    result_path = Path(args.result)
    corpus_path = Path(args.corpus)
    for path in (result_path, corpus_path):
        if not path.is_file():
            print(f"plansum: file not found: {path}", file=sys.stderr)
            return EXIT_USAGE
    try:
        payload = json.loads(result_path.read_text(encoding="utf-8"))
        blueprint = BlueprintModel.model_validate(payload["blueprint"]).to_domain()
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"plansum: malformed result file: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        corpus = ingest_local(corpus_path)
    except (MalformedRecord, EmptyCorpus) as exc:
        print(f"plansum: bad corpus: {exc}", file=sys.stderr)
        return EXIT_DATA
    if blueprint.mode is not Mode.QA:
        print("plansum: ModeMismatch: cannot ground a question-only plan", file=sys.stderr)
        return EXIT_DATA
    policy = GroundingPolicy(method=args.method, overlap_threshold=args.threshold)
    try:
        filtered = filter_blueprint(blueprint, corpus.text(), policy)
    except BlueprintError as exc:
        print(f"plansum: {exc}", file=sys.stderr)
        return EXIT_DATA
    out = args.out or f"{result_path}.filtered.json"
    encoded = BlueprintModel.from_domain(filtered)
    _write_json_text(out, json.dumps({"blueprint": encoded.model_dump(exclude_none=True)},
                                     indent=2, ensure_ascii=False))
    print(f"removed {len(blueprint.pairs) - len(filtered.pairs)} pair(s)")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    host, _, port_text = args.addr.partition(":")
    try:
        port = int(port_text)
    except ValueError:
        print(f"plansum: bad --addr {args.addr!r}, expected host:port", file=sys.stderr)
        return EXIT_USAGE
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"plansum: cannot bind {args.addr}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        probe.close()
    config = AppConfig.from_env()
    if args.corpus:
        config = AppConfig(**{**config.__dict__, "corpus_path": args.corpus})
    config = AppConfig(**{**config.__dict__, "backend": args.backend, "session_ttl": args.session_ttl})
    app = create_app(config)

    # Run the server off the main thread so SIGINT lands here and we can
    # shut down gracefully with a zero exit code.
    server = uvicorn.Server(uvicorn.Config(app, host=host, port=port, log_level="warning"))
    worker = threading.Thread(target=server.run, daemon=True)
    worker.start()
    while not server.started and worker.is_alive():
        time.sleep(0.01)
    if server.started:
        print(f"plansum service listening on http://{host}:{port}", flush=True)
    try:
        while worker.is_alive():
            worker.join(timeout=0.2)
    except KeyboardInterrupt:
        server.should_exit = True
        worker.join(timeout=10.0)
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    try:
        written = write_fixture_files(args.out_dir)
    except OSError as exc:
        print(f"plansum: cannot write fixtures: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _write_json_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text + "\n", encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("PLANSUM_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
