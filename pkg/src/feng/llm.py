"""LLM backends: a chat-completion HTTP client and a deterministic scripted
stand-in, plus fenced-code extraction and token/cost/time accounting."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .fedsl.errors import ErrorKind, ExecError
from .prompt import FENCE_CLOSE, FENCE_OPEN

SYSTEM_MESSAGE = (
    "You are an expert data scientist. Reply with exactly one codeblock in the "
    "requested feature-language format."
)

_RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


class LlmError(Exception):
    """Transport failure, bad HTTP status, malformed body, or exhausted playbook."""


@dataclass(frozen=True)
class LlmConfig:
    backend: str = "scripted"  # scripted | http
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    model_name: str = "gpt-4"
    temperature: float = 0.5
    max_response_tokens: int = 1024
    request_timeout: float = 60.0
    max_retries: int = 3
    retry_base_delay: float = 0.5
    api_key_env_var: str = "LLM_API_KEY"
    # model name -> (prompt, completion) price per 1k tokens; zero when unknown
    price_table: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.backend not in ("scripted", "http"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class UsageRecord:
    prompt_tokens: int = 0
    completion_tokens: int = 0
    estimated_cost: float = 0.0
    latency: float = 0.0


def accumulate_usage(records: list[UsageRecord]) -> UsageRecord:
    return UsageRecord(
        prompt_tokens=sum(r.prompt_tokens for r in records),
        completion_tokens=sum(r.completion_tokens for r in records),
        estimated_cost=sum(r.estimated_cost for r in records),
        latency=sum(r.latency for r in records),
    )


class ScriptedBackend:
    """Canned responses consumed one per query; exhausting them is an error."""

    def __init__(self, playbook: list[str]):
        self.playbook = list(playbook)
        self.cursor = 0

    def skip(self, n: int) -> None:
        self.cursor += n

    def complete(self, prompt: str) -> tuple[str, UsageRecord]:
        if self.cursor >= len(self.playbook):
            raise LlmError(
                f"playbook exhausted after {len(self.playbook)} responses"
            )
        response = self.playbook[self.cursor]
        self.cursor += 1
        return response, UsageRecord()


class HttpBackend:
    """One chat request per completion, with exponential backoff on transport
    errors and retryable statuses, up to max_retries extra attempts."""

    def __init__(self, config: LlmConfig, session: requests.Session | None = None):
        self.config = config
        self.session = session or requests.Session()

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env_var, "")
        if not key:
            raise LlmError(
                f"API key environment variable {self.config.api_key_env_var!r} is not set"
            )
        return key

    def complete(self, prompt: str) -> tuple[str, UsageRecord]:
        cfg = self.config
        body = {
            "model": cfg.model_name,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_response_tokens,
        }
        headers = {
            "Authorization": f"Bearer {self._api_key()}",
            "Content-Type": "application/json",
        }
        start = time.monotonic()
        last_error = "no attempt made"
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.retry_base_delay * 2 ** (attempt - 1))
            try:
                resp = self.session.post(
                    cfg.endpoint_url, json=body, headers=headers, timeout=cfg.request_timeout
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                continue
            if resp.status_code in _RETRYABLE_STATUSES:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise LlmError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return self._parse(resp, time.monotonic() - start)
        raise LlmError(
            f"giving up after {cfg.max_retries + 1} attempts; last error: {last_error}"
        )

    def _parse(self, resp, latency: float) -> tuple[str, UsageRecord]:
        try:
            payload = resp.json()
            text = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"malformed response body: {exc}") from exc
        usage = payload.get("usage") or {}
        prompt_tokens = int(usage.get("prompt_tokens", 0))
        completion_tokens = int(usage.get("completion_tokens", 0))
        prices = self.config.price_table.get(self.config.model_name, (0.0, 0.0))
        cost = prompt_tokens / 1000.0 * prices[0] + completion_tokens / 1000.0 * prices[1]
        return text, UsageRecord(prompt_tokens, completion_tokens, cost, latency)


Backend = ScriptedBackend | HttpBackend


def make_backend(config: LlmConfig, playbook: list[str] | None = None) -> Backend:
    if config.backend == "scripted":
        if playbook is None:
            raise LlmError("scripted backend requires a playbook")
        return ScriptedBackend(playbook)
    return HttpBackend(config)


def load_playbook(path: str | Path) -> list[str]:
    """Playbook file: a JSON array of response strings."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise LlmError(f"{path}: playbook must be a JSON array of strings")
    return data


def extract_code_block(response: str) -> str:
    """Contents of the first fenced block opened with the fence tag and closed
    by the end fence (a plain closing fence also terminates it). The result
    never contains the opening fence tag."""
    lines = response.split("\n")
    start = None
    for i, line in enumerate(lines):
        if line.strip() == FENCE_OPEN:
            start = i + 1
            break
    if start is None:
        raise ExecError(
            ErrorKind.PARSE, "no fedsl code block found in the response"
        )
    body: list[str] = []
    for line in lines[start:]:
        stripped = line.strip()
        if stripped == FENCE_CLOSE or stripped.startswith("```"):
            return "\n".join(body)
        body.append(line)
    raise ExecError(ErrorKind.PARSE, "unterminated code block in the response")
