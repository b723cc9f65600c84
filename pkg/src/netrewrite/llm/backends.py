"""Chat backends: an OpenAI-compatible HTTP client, the offline oracle, and a
scripted replayer for tests."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import httpx

from netrewrite.boolexpr import ASSIGNMENT_RE, parse_boolean_circuit
from netrewrite.llm.oracle import canonical_transformation, self_check
from netrewrite.llm.prompts import allowed_from_prompt
from netrewrite.netlist import GateType

log = logging.getLogger(__name__)

Role = Literal["system", "user", "assistant"]


class BackendError(RuntimeError):
    """Backend could not produce a reply; aborts the session."""


class BackendTransportError(BackendError):
    pass


class ScriptExhausted(BackendError):
    pass


class ConfigError(ValueError):
    pass


@dataclass
class Conversation:
    """Append-only chat history."""

    messages: list[tuple[str, str]] = field(default_factory=list)

    def append(self, role: Role, text: str) -> None:
        if role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {role!r}")
        if role != "system":
            first = next((r for r, _ in self.messages if r != "system"), None)
            if first is None and role != "user":
                raise ValueError("conversation must start with a user message")
        elif any(r != "system" for r, _ in self.messages):
            raise ValueError("system messages must come first")
        self.messages.append((role, text))

    def user(self, text: str) -> None:
        self.append("user", text)

    def assistant(self, text: str) -> None:
        self.append("assistant", text)

    def user_messages(self) -> list[str]:
        return [t for r, t in self.messages if r == "user"]

    def count(self, role: Role) -> int:
        return sum(1 for r, _ in self.messages if r == role)

    def as_openai(self) -> list[dict]:
        return [{"role": r, "content": t} for r, t in self.messages]


@dataclass
class BackendConfig:
    kind: Literal["http", "oracle", "scripted"] = "oracle"
    endpoint: str | None = None
    model: str | None = None
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0
    script_path: str | None = None
    # forwarded verbatim into the request body (temperature, top_p, ...)
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "BackendConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown backend options: {', '.join(sorted(unknown))}")
        return cls(**data)


class Backend:
    name = "backend"

    def complete(self, conversation: Conversation) -> str:
        raise NotImplementedError


class OracleBackend(Backend):
    """Answers every rewrite prompt with the canonical table entry."""

    name = "oracle"

    def __init__(self) -> None:
        self_check()

    def complete(self, conversation: Conversation) -> str:
        users = conversation.user_messages()
        if not users:
            raise BackendError("oracle: no user prompt")
        latest = users[-1]
        lines = [l for l in latest.splitlines() if ASSIGNMENT_RE.match(l)]
        if not lines:
            raise BackendError("oracle: prompt carries no circuit")
        circuit = parse_boolean_circuit("\n".join(lines))
        if len(circuit.statements) != 1:
            raise BackendError("oracle: prompt circuit is not a single gate")
        st = circuit.statements[0]
        ops = None
        for text in reversed(users):
            ops = allowed_from_prompt(text)
            if ops is not None:
                break
        if ops is None:
            raise BackendError("oracle: prompt names no allowed operators")
        try:
            entry = canonical_transformation(GateType(st.op, len(st.args)), ops)
        except ValueError as exc:
            raise BackendError(f"oracle: {exc}") from None
        return entry.text


class ScriptedBackend(Backend):
    """Replays canned replies in order. Single-session only."""

    name = "scripted"

    def __init__(self, responses: list[str]):
        self.responses = list(responses)
        self.calls = 0

    @classmethod
    def from_file(cls, path) -> "ScriptedBackend":
        return cls(parse_script(Path(path).read_text(encoding="utf-8")))

    def complete(self, conversation: Conversation) -> str:
        if self.calls >= len(self.responses):
            raise ScriptExhausted(
                f"script exhausted after {len(self.responses)} responses"
            )
        reply = self.responses[self.calls]
        self.calls += 1
        return reply


def parse_script(text: str) -> list[str]:
    """Split a script file on lines consisting solely of ``---``."""
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "---":
            chunks.append("\n".join(cur).strip("\n"))
            cur = []
        else:
            cur.append(line)
    if any(l.strip() for l in cur):
        chunks.append("\n".join(cur).strip("\n"))
    return chunks


class HttpBackend(Backend):
    """OpenAI-compatible ``/chat/completions`` client.

    Only transport failures are retried; a well-formed but wrong answer is
    the caller's business.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str,
        *,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        params: dict | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.url = endpoint.rstrip("/") + "/chat/completions"
        self.model = model
        self.max_retries = max_retries
        self.backoff = backoff
        self.params = dict(params or {})
        self.name = f"http:{model}"
        self._client = httpx.Client(
            timeout=timeout,
            headers={"Authorization": f"Bearer {api_key}"},
            transport=transport,
        )

    def complete(self, conversation: Conversation) -> str:
        body = {"model": self.model, "messages": conversation.as_openai(), **self.params}
        for attempt in range(self.max_retries + 1):
            try:
                resp = self._client.post(self.url, json=body)
                break
            except httpx.TransportError as exc:
                if attempt == self.max_retries:
                    raise BackendTransportError(
                        f"{self.url}: {exc} (after {attempt + 1} tries)"
                    ) from exc
                delay = self.backoff * 2**attempt
                log.warning("transport error %s; retrying in %.1fs", exc, delay)
                time.sleep(delay)
        if not resp.is_success:
            raise BackendError(f"{self.url}: HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"{self.url}: malformed completion payload") from exc

    def close(self) -> None:
        self._client.close()


def make_backend(config: BackendConfig) -> Backend:
    if config.kind == "oracle":
        return OracleBackend()
    if config.kind == "scripted":
        if not config.script_path:
            raise ConfigError("scripted backend needs script_path")
        return ScriptedBackend.from_file(config.script_path)
    if config.kind == "http":
        if not config.endpoint or not config.model:
            raise ConfigError("http backend needs endpoint and model")
        key = os.environ.get(config.api_key_env)
        if not key:
            raise ConfigError(
                f"environment variable {config.api_key_env} is not set"
            )
        return HttpBackend(
            config.endpoint,
            config.model,
            key,
            timeout=config.timeout,
            max_retries=config.max_retries,
            backoff=config.backoff,
            params=config.params,
        )
    raise ConfigError(f"unknown backend kind {config.kind!r}")
