"""Query-focused summarization driven by editable question-answer plans."""

from plansum.blueprint import (
    Blueprint,
    Mode,
    PlanEdit,
    QAPair,
    Summary,
    align_blueprint_to_summary,
    apply_edit,
    parse_model_output,
    segment_sentences,
    serialize_blueprint,
    serialize_output,
)
from plansum.engine import (
    GenerationParams,
    GenerationResult,
    GeneratorBackend,
    IterationStep,
    ModelInput,
    build_model_input,
    count_tokens,
    regenerate_with_plan,
    run_end_to_end,
    run_interactive,
    run_iterative,
)
from plansum.filtering import (
    GroundingPolicy,
    dedup_blueprint,
    filter_blueprint,
    is_answer_grounded,
    normalize,
    select_length,
)

__version__ = "0.1.0"

__all__ = [
    "Blueprint",
    "GenerationParams",
    "GenerationResult",
    "GeneratorBackend",
    "GroundingPolicy",
    "IterationStep",
    "Mode",
    "ModelInput",
    "PlanEdit",
    "QAPair",
    "Summary",
    "align_blueprint_to_summary",
    "apply_edit",
    "build_model_input",
    "count_tokens",
    "dedup_blueprint",
    "filter_blueprint",
    "is_answer_grounded",
    "normalize",
    "parse_model_output",
    "regenerate_with_plan",
    "run_end_to_end",
    "run_interactive",
    "run_iterative",
    "segment_sentences",
    "select_length",
    "serialize_blueprint",
    "serialize_output",
]
