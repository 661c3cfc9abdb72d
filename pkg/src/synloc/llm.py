"""Completion-endpoint clients with on-disk response caching.

Two interchangeable backends: an HTTP JSON client with bounded retries,
and a deterministic mock that answers from a fixture table keyed by the
SHA-256 of the prompt. Responses are cached as content-addressed JSON
files keyed by model, decoding parameters, and prompt, so a warm rerun
never touches the network.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import requests


class LlmError(Exception):
    pass


class LlmConfigError(LlmError):
    pass


class LlmRequestError(LlmError):
    """Request still failing after the configured retries."""


@dataclass(frozen=True)
class LlmConfig:
    endpoint_url: str
    model_name: str
    temperature: float = 0.0
    top_p: float = 1.0
    sample: bool = False
    max_tokens: int = 512
    api_key_env: str = ""

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must lie in (0, 1], got {self.top_p}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")
        if not self.sample and self.temperature != 0.0:
            raise ValueError("greedy decoding (sample=False) requires temperature 0")

    def decoding_fingerprint(self) -> dict:
        return {
            "model": self.model_name,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "sample": self.sample,
            "max_tokens": self.max_tokens,
        }


# defaults used for answering math questions: greedy decoding
QA_DECODING = {"temperature": 0.0, "top_p": 1.0, "sample": False}
# defaults used for rewriting question text: mild sampling
REPHRASE_DECODING = {"temperature": 0.1, "top_p": 0.9, "sample": True}


def prompt_sha(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def cache_key(config: LlmConfig, prompt: str) -> str:
    payload = json.dumps(
        {**config.decoding_fingerprint(), "prompt": prompt}, sort_keys=True
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """One JSON file per completion; writes are atomic (tmp + rename)."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)["completion"]

    def put(self, key: str, record: dict) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class LlmClient:
    """Shared cache/retry shell; subclasses implement ``_request``."""

    def __init__(self, config: LlmConfig, cache_dir=None, max_retries: int = 3,
                 backoff: float = 0.5, timeout: float = 60.0):
        self.config = config
        self.cache = ResponseCache(cache_dir) if cache_dir is not None else None
        self.max_retries = max_retries
        self.backoff = backoff
        self.timeout = timeout

    def complete(self, prompt: str) -> str:
        key = cache_key(self.config, prompt)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        completion = self._request_with_retries(prompt)
        if self.cache is not None:
            self.cache.put(key, {
                "key": key,
                **self.config.decoding_fingerprint(),
                "prompt": prompt,
                "completion": completion,
            })
        return completion

    def _request_with_retries(self, prompt: str) -> str:
        attempts = self.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                return self._request(prompt)
            except LlmRequestError as exc:
                last_error = exc
                if attempt + 1 < attempts and self.backoff > 0:
                    time.sleep(self.backoff * (2 ** attempt))
        raise LlmRequestError(
            f"request failed after {attempts} attempt(s): {last_error}"
        ) from last_error

    def _request(self, prompt: str) -> str:
        raise NotImplementedError


class HttpLlmClient(LlmClient):
    """POSTs a JSON completion request and reads the completion text back.

    Accepted response shapes: ``{"completion": ...}``, ``{"text": ...}``,
    or an OpenAI-style ``choices`` list.
    """

    def __init__(self, config: LlmConfig, cache_dir=None, **kwargs):
        super().__init__(config, cache_dir=cache_dir, **kwargs)
        self.api_key = None
        if config.api_key_env:
            self.api_key = os.environ.get(config.api_key_env)
            if not self.api_key:
                raise LlmConfigError(
                    f"environment variable {config.api_key_env!r} is not set"
                )

    def _request(self, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.config.model_name,
            "prompt": prompt,
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": self.config.max_tokens,
        }
        try:
            response = requests.post(
                self.config.endpoint_url, json=payload, headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise LlmRequestError(str(exc)) from exc
        if response.status_code != 200:
            raise LlmRequestError(
                f"HTTP {response.status_code} from {self.config.endpoint_url}"
            )
        try:
            body = response.json()
        except ValueError as exc:
            raise LlmRequestError(f"non-JSON response body: {exc}") from exc
        return _extract_completion(body)


def _extract_completion(body: dict) -> str:
    if "completion" in body:
        return body["completion"]
    if "text" in body:
        return body["text"]
    choices = body.get("choices")
    if choices:
        first = choices[0]
        if "text" in first:
            return first["text"]
        message = first.get("message", {})
        if "content" in message:
            return message["content"]
    raise LlmRequestError(f"no completion text in response: {list(body)}")


class MockLlmClient(LlmClient):
    """Fixture-table backend: maps sha256(prompt) to a canned completion."""

    def __init__(self, config: LlmConfig, table: dict[str, str], cache_dir=None, **kwargs):
        kwargs.setdefault("max_retries", 0)
        kwargs.setdefault("backoff", 0.0)
        super().__init__(config, cache_dir=cache_dir, **kwargs)
        self.table = dict(table)

    @classmethod
    def from_table_file(cls, path, config: LlmConfig, cache_dir=None, **kwargs):
        with open(path, encoding="utf-8") as fh:
            return cls(config, json.load(fh), cache_dir=cache_dir, **kwargs)

    def _request(self, prompt: str) -> str:
        digest = prompt_sha(prompt)
        if digest not in self.table:
            raise LlmRequestError(f"mock table has no entry for prompt {digest[:12]}...")
        return self.table[digest]


def make_client(config: LlmConfig, cache_dir=None, **kwargs) -> LlmClient:
    """Build a client from the endpoint URL.

    ``mock://<path>`` loads a fixture table; ``http(s)://`` is the real
    endpoint.
    """
    url = config.endpoint_url
    if url.startswith("mock://"):
        return MockLlmClient.from_table_file(url[len("mock://"):], config,
                                             cache_dir=cache_dir, **kwargs)
    if url.startswith(("http://", "https://")):
        return HttpLlmClient(config, cache_dir=cache_dir, **kwargs)
    raise LlmConfigError(f"unsupported endpoint URL {url!r}")


def call_llm(prompt: str, config: LlmConfig, cache_dir=None, **kwargs) -> str:
    """One-shot completion; prefer holding a client for batch work."""
    return make_client(config, cache_dir=cache_dir, **kwargs).complete(prompt)
