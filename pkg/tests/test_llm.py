import json
import threading

import pytest

from synloc.llm import (
    HttpLlmClient,
    LlmConfig,
    LlmConfigError,
    LlmRequestError,
    MockLlmClient,
    _extract_completion,
    cache_key,
    call_llm,
    make_client,
    prompt_sha,
)

CFG = LlmConfig(endpoint_url="mock://unused", model_name="test-model")


def test_config_greedy_requires_zero_temperature():
    with pytest.raises(ValueError, match="temperature 0"):
        LlmConfig(endpoint_url="x", model_name="m", temperature=0.5, sample=False)
    LlmConfig(endpoint_url="x", model_name="m", temperature=0.5, top_p=0.9, sample=True)


def test_config_bounds():
    with pytest.raises(ValueError):
        LlmConfig(endpoint_url="x", model_name="m", top_p=0.0)
    with pytest.raises(ValueError):
        LlmConfig(endpoint_url="x", model_name="m", top_p=1.5)
    with pytest.raises(ValueError):
        LlmConfig(endpoint_url="x", model_name="m", max_tokens=0)
    with pytest.raises(ValueError):
        LlmConfig(endpoint_url="x", model_name="m", temperature=-1, sample=True)


def test_cache_key_depends_on_decoding_params():
    base = cache_key(CFG, "hello")
    assert base == cache_key(CFG, "hello")
    other_model = LlmConfig(endpoint_url="mock://u", model_name="other")
    assert cache_key(other_model, "hello") != base
    sampled = LlmConfig(endpoint_url="mock://u", model_name="test-model",
                        temperature=0.1, top_p=0.9, sample=True)
    assert cache_key(sampled, "hello") != base
    assert cache_key(CFG, "other prompt") != base


def test_mock_client_serves_fixture():
    table = {prompt_sha("ping"): "pong"}
    client = MockLlmClient(CFG, table)
    assert client.complete("ping") == "pong"


def test_mock_client_missing_entry():
    client = MockLlmClient(CFG, {})
    with pytest.raises(LlmRequestError, match="no entry"):
        client.complete("unknown")


def test_cache_hit_skips_backend(tmp_path):
    table = {prompt_sha("ping"): "pong"}
    first = MockLlmClient(CFG, table, cache_dir=tmp_path)
    assert first.complete("ping") == "pong"
    # a client with an empty table can only answer from the cache
    second = MockLlmClient(CFG, {}, cache_dir=tmp_path)
    assert second.complete("ping") == "pong"
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    record = json.loads(files[0].read_text())
    assert record["prompt"] == "ping"
    assert record["completion"] == "pong"


def test_cache_safe_under_concurrent_writes(tmp_path):
    table = {prompt_sha(f"p{i}"): f"c{i}" for i in range(20)}
    results = {}

    def worker(i):
        client = MockLlmClient(CFG, table, cache_dir=tmp_path)
        results[i] = client.complete(f"p{i % 20}")

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(40)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results[i] == f"c{i % 20}" for i in range(40))
    for path in tmp_path.glob("*.json"):
        json.loads(path.read_text())  # every cache file is intact JSON


class _FlakyClient(MockLlmClient):
    def __init__(self, *args, fail_times=0, **kwargs):
        super().__init__(*args, **kwargs)
        self.fail_times = fail_times
        self.attempts = 0

    def _request(self, prompt):
        self.attempts += 1
        if self.attempts <= self.fail_times:
            raise LlmRequestError("transient")
        return super()._request(prompt)


def test_retries_then_success():
    table = {prompt_sha("p"): "ok"}
    client = _FlakyClient(CFG, table, fail_times=2, max_retries=3, backoff=0.0)
    assert client.complete("p") == "ok"
    assert client.attempts == 3


def test_retries_exhausted_surfaces_error():
    client = _FlakyClient(CFG, {}, fail_times=99, max_retries=2, backoff=0.0)
    with pytest.raises(LlmRequestError, match="after 3 attempt"):
        client.complete("p")
    assert client.attempts == 3


def test_http_client_missing_credential_fails_before_any_request(monkeypatch):
    monkeypatch.delenv("SYNLOC_TEST_KEY", raising=False)
    cfg = LlmConfig(endpoint_url="http://127.0.0.1:9/v1", model_name="m",
                    api_key_env="SYNLOC_TEST_KEY")
    with pytest.raises(LlmConfigError, match="SYNLOC_TEST_KEY"):
        HttpLlmClient(cfg)


def test_http_client_unreachable_endpoint_errors_after_retries():
    cfg = LlmConfig(endpoint_url="http://127.0.0.1:9/v1", model_name="m")
    client = HttpLlmClient(cfg, max_retries=1, backoff=0.0, timeout=0.5)
    with pytest.raises(LlmRequestError, match="after 2 attempt"):
        client.complete("hello")


class _FakeResponse:
    def __init__(self, status_code=200, body=None, broken=False):
        self.status_code = status_code
        self._body = body
        self._broken = broken

    def json(self):
        if self._broken:
            raise ValueError("not json")
        return self._body


def test_http_client_happy_path(monkeypatch):
    import requests

    captured = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        captured.update(url=url, payload=json, headers=headers)
        return _FakeResponse(body={"completion": "done"})

    monkeypatch.setattr(requests, "post", fake_post)
    monkeypatch.setenv("SYNLOC_TEST_KEY", "sekrit")
    cfg = LlmConfig(endpoint_url="http://llm.local/v1", model_name="m",
                    max_tokens=64, api_key_env="SYNLOC_TEST_KEY")
    client = HttpLlmClient(cfg, max_retries=0)
    assert client.complete("hi") == "done"
    assert captured["url"] == "http://llm.local/v1"
    assert captured["payload"]["model"] == "m"
    assert captured["payload"]["prompt"] == "hi"
    assert captured["payload"]["max_tokens"] == 64
    assert captured["headers"]["Authorization"] == "Bearer sekrit"


def test_http_client_bad_status_and_body(monkeypatch):
    import requests

    monkeypatch.setattr(requests, "post",
                        lambda *a, **k: _FakeResponse(status_code=500))
    cfg = LlmConfig(endpoint_url="http://llm.local/v1", model_name="m")
    client = HttpLlmClient(cfg, max_retries=0)
    with pytest.raises(LlmRequestError, match="HTTP 500"):
        client.complete("hi")

    monkeypatch.setattr(requests, "post", lambda *a, **k: _FakeResponse(broken=True))
    with pytest.raises(LlmRequestError, match="non-JSON"):
        client.complete("hi")


def test_extract_completion_shapes():
    assert _extract_completion({"completion": "a"}) == "a"
    assert _extract_completion({"text": "b"}) == "b"
    assert _extract_completion({"choices": [{"text": "c"}]}) == "c"
    assert _extract_completion({"choices": [{"message": {"content": "d"}}]}) == "d"
    with pytest.raises(LlmRequestError):
        _extract_completion({"unexpected": 1})


def test_make_client_dispatch(tmp_path):
    table_path = tmp_path / "table.json"
    table_path.write_text(json.dumps({prompt_sha("q"): "a"}))
    cfg = LlmConfig(endpoint_url=f"mock://{table_path}", model_name="m")
    client = make_client(cfg)
    assert isinstance(client, MockLlmClient)
    assert client.complete("q") == "a"
    http_cfg = LlmConfig(endpoint_url="https://example.invalid/v1", model_name="m")
    assert isinstance(make_client(http_cfg), HttpLlmClient)
    with pytest.raises(LlmConfigError):
        make_client(LlmConfig(endpoint_url="ftp://nope", model_name="m"))


def test_call_llm_one_shot(tmp_path):
    table_path = tmp_path / "table.json"
    table_path.write_text(json.dumps({prompt_sha("q"): "a"}))
    cfg = LlmConfig(endpoint_url=f"mock://{table_path}", model_name="m")
    assert call_llm("q", cfg, cache_dir=tmp_path / "cache") == "a"
    # warm cache now answers even with an empty table
    table_path.write_text("{}")
    assert call_llm("q", cfg, cache_dir=tmp_path / "cache") == "a"
