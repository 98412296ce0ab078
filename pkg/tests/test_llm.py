import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from feng.fedsl import ErrorKind, ExecError
from feng.llm import (
    HttpBackend,
    LlmConfig,
    LlmError,
    ScriptedBackend,
    UsageRecord,
    accumulate_usage,
    extract_code_block,
    load_playbook,
    make_backend,
)


class TestScriptedBackend:
    def test_queue_semantics(self):
        backend = ScriptedBackend(["A", "B"])
        assert backend.complete("p1")[0] == "A"
        assert backend.complete("p2")[0] == "B"

    def test_exhaustion(self):
        backend = ScriptedBackend(["A"])
        backend.complete("p")
        with pytest.raises(LlmError, match="exhausted"):
            backend.complete("p")

    def test_usage_zeroed(self):
        _, usage = ScriptedBackend(["A"]).complete("p")
        assert usage == UsageRecord(0, 0, 0.0, 0.0)

    def test_make_backend_requires_playbook(self):
        with pytest.raises(LlmError, match="playbook"):
            make_backend(LlmConfig(backend="scripted"))

    def test_skip(self):
        backend = ScriptedBackend(["A", "B", "C"])
        backend.skip(2)
        assert backend.complete("p")[0] == "C"


class TestExtractCodeBlock:
    def test_prose_around_block(self):
        assert extract_code_block("text\n```fedsl\nX\n```end\nmore") == "X"

    def test_bare_block(self):
        assert extract_code_block("```fedsl\nbody line\n```end") == "body line"

    def test_plain_closing_fence_fallback(self):
        assert extract_code_block("```fedsl\nX\n```\ntrailing") == "X"

    def test_no_fence_is_error(self):
        with pytest.raises(ExecError) as exc:
            extract_code_block("no code here")
        assert exc.value.kind is ErrorKind.PARSE

    def test_unterminated_is_error(self):
        with pytest.raises(ExecError, match="unterminated"):
            extract_code_block("```fedsl\nX")

    def test_first_block_only(self):
        text = "```fedsl\nfirst\n```end\n```fedsl\nsecond\n```end"
        assert extract_code_block(text) == "first"

    def test_never_contains_opening_fence(self):
        text = "```fedsl\nbody\n```fedsl\nnested\n```end"
        assert "```fedsl" not in extract_code_block(text)

    def test_multiline_body(self):
        body = 'feature "f" {\n  usefulness: "u"\n  expr: 1\n}'
        assert extract_code_block(f"Reply:\n```fedsl\n{body}\n```end\n") == body


class TestAccumulateUsage:
    def test_empty(self):
        assert accumulate_usage([]) == UsageRecord(0, 0, 0.0, 0.0)

    def test_sum(self):
        total = accumulate_usage(
            [UsageRecord(10, 5, 0.01, 1.0), UsageRecord(20, 5, 0.02, 0.5)]
        )
        assert total.prompt_tokens == 30
        assert total.completion_tokens == 10
        assert total.estimated_cost == pytest.approx(0.03, abs=1e-12)
        assert total.latency == pytest.approx(1.5)

    def test_monotone(self):
        records = [UsageRecord(5, 1, 0.001, 0.2)] * 4
        totals = [accumulate_usage(records[: i + 1]) for i in range(4)]
        for earlier, later in zip(totals, totals[1:]):
            assert later.prompt_tokens >= earlier.prompt_tokens
            assert later.estimated_cost >= earlier.estimated_cost


class _Stub(BaseHTTPRequestHandler):
    behaviour: list = []  # mutable script: each entry is (status, payload)
    requests_seen: list = []

    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        type(self).requests_seen.append(body)
        status, payload = (
            self.behaviour.pop(0) if self.behaviour else (200, _ok_payload("done"))
        )
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def _ok_payload(text, prompt_tokens=12, completion_tokens=7):
    return {
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": prompt_tokens, "completion_tokens": completion_tokens},
    }


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Stub)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Stub.behaviour = []
    _Stub.requests_seen = []
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    server.shutdown()


def _config(url, **kw):
    defaults = dict(
        backend="http",
        endpoint_url=url,
        model_name="test-model",
        max_retries=2,
        retry_base_delay=0.001,
        request_timeout=5.0,
    )
    defaults.update(kw)
    return LlmConfig(**defaults)


class TestHttpBackend:
    def test_loopback_completion(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(200, _ok_payload("fixed completion"))]
        text, usage = HttpBackend(_config(stub_server)).complete("hello")
        assert text == "fixed completion"
        assert usage.prompt_tokens == 12 and usage.completion_tokens == 7
        assert usage.latency > 0

    def test_request_shape(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(200, _ok_payload("x"))]
        HttpBackend(_config(stub_server, temperature=0.25)).complete("the prompt")
        body = _Stub.requests_seen[-1]
        assert body["model"] == "test-model"
        assert body["temperature"] == 0.25
        assert [m["role"] for m in body["messages"]] == ["system", "user"]
        assert body["messages"][1]["content"] == "the prompt"

    def test_retries_then_success(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(429, {}), (500, {}), (200, _ok_payload("ok"))]
        text, _ = HttpBackend(_config(stub_server)).complete("p")
        assert text == "ok"
        assert len(_Stub.requests_seen) == 3

    def test_attempts_bounded_by_max_retries(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(429, {})] * 10
        with pytest.raises(LlmError, match="giving up"):
            HttpBackend(_config(stub_server, max_retries=2)).complete("p")
        assert len(_Stub.requests_seen) == 3  # max_retries + 1

    def test_non_retryable_status(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(404, {"error": "nope"})]
        with pytest.raises(LlmError, match="HTTP 404"):
            HttpBackend(_config(stub_server)).complete("p")
        assert len(_Stub.requests_seen) == 1

    def test_malformed_body(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(200, {"unexpected": True})]
        with pytest.raises(LlmError, match="malformed"):
            HttpBackend(_config(stub_server)).complete("p")

    def test_missing_api_key(self, stub_server, monkeypatch):
        monkeypatch.delenv("LLM_API_KEY", raising=False)
        with pytest.raises(LlmError, match="LLM_API_KEY"):
            HttpBackend(_config(stub_server)).complete("p")

    def test_cost_from_price_table(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(200, _ok_payload("x", prompt_tokens=1000, completion_tokens=500))]
        config = _config(stub_server, price_table={"test-model": (0.03, 0.06)})
        _, usage = HttpBackend(config).complete("p")
        assert usage.estimated_cost == pytest.approx(0.03 + 0.03)

    def test_unknown_model_costs_zero(self, stub_server, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sk-test")
        _Stub.behaviour = [(200, _ok_payload("x"))]
        _, usage = HttpBackend(_config(stub_server)).complete("p")
        assert usage.estimated_cost == 0.0


class TestPlaybookFile:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps(["a", "b"]))
        assert load_playbook(path) == ["a", "b"]

    def test_rejects_non_list(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"not": "a list"}))
        with pytest.raises(LlmError):
            load_playbook(path)


class TestConfigValidation:
    def test_negative_temperature(self):
        with pytest.raises(ValueError):
            LlmConfig(temperature=-0.1)

    def test_negative_retries(self):
        with pytest.raises(ValueError):
            LlmConfig(max_retries=-1)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            LlmConfig(backend="quantum")
