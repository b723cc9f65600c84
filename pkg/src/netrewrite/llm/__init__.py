from netrewrite.llm.backends import (
    Backend,
    BackendConfig,
    BackendError,
    BackendTransportError,
    ConfigError,
    Conversation,
    HttpBackend,
    OracleBackend,
    ScriptedBackend,
    ScriptExhausted,
    make_backend,
)
from netrewrite.llm.oracle import canonical_transformation
from netrewrite.llm.prompts import (
    FUNCTIONALITY_FEEDBACK,
    CheckFailure,
    build_feedback_prompt,
    build_initial_prompt,
    extract_circuit_text,
)

__all__ = [
    "FUNCTIONALITY_FEEDBACK",
    "Backend",
    "BackendConfig",
    "BackendError",
    "BackendTransportError",
    "CheckFailure",
    "ConfigError",
    "Conversation",
    "HttpBackend",
    "OracleBackend",
    "ScriptExhausted",
    "ScriptedBackend",
    "build_feedback_prompt",
    "build_initial_prompt",
    "canonical_transformation",
    "extract_circuit_text",
    "make_backend",
]
