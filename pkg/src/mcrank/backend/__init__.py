from .client import (
    Backend,
    BackendConfig,
    DiskCache,
    HttpChatBackend,
    ModelRequest,
    ModelResponse,
    OracleBackend,
    RetryPolicy,
    cache_key,
    complete,
    make_backend,
)
from .parsers import (
    labels_to_ordering,
    parse_condition_list,
    parse_paragraph_ranking,
    parse_token_ranking,
)
from .prompts import PromptKind, decode_prompt, render_prompt

__all__ = [
    "Backend",
    "BackendConfig",
    "DiskCache",
    "HttpChatBackend",
    "ModelRequest",
    "ModelResponse",
    "OracleBackend",
    "PromptKind",
    "RetryPolicy",
    "cache_key",
    "complete",
    "decode_prompt",
    "labels_to_ordering",
    "make_backend",
    "parse_condition_list",
    "parse_paragraph_ranking",
    "parse_token_ranking",
    "render_prompt",
]
