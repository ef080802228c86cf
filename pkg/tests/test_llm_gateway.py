import json

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chartshot.errors import AuthError, MalformedResponse, RateLimited, TransportError, ValidationError
from chartshot.llm_gateway import (
    MOCK_SENTINEL,
    CompletionClient,
    CompletionRequest,
    DecodingParams,
    EchoDemonstrationsBackend,
    HttpBackend,
    ReplayBackend,
    ResponseCache,
    RetryPolicy,
    TokenBucket,
    mock_llm,
)
from chartshot.prompt_kit import assemble_prompt, build_prompt_spec, builtin_demonstrations


def req(prompt="P", **params):
    return CompletionRequest("test-model", prompt, DecodingParams(**params))


def client(backend, **kw):
    return CompletionClient(backend, sleep=lambda _: None, **kw)


class Flaky:
    """Fails ``n`` times with ``error`` before answering."""

    def __init__(self, n, error=TransportError):
        self.n, self.error, self.calls = n, error, 0

    def send(self, r):
        self.calls += 1
        if self.calls <= self.n:
            raise self.error(f"failure {self.calls}")
        return "The answer is 5.", {}


def test_default_decoding_params():
    p = DecodingParams()
    assert (p.temperature, p.top_p, p.max_tokens, p.frequency_penalty, p.presence_penalty) == (0.7, 0.9, 256, 0.0, 0.0)


@pytest.mark.parametrize("kw", [{"temperature": -0.1}, {"top_p": 0}, {"top_p": 1.5}, {"max_tokens": 0}])
def test_decoding_param_bounds(kw):
    with pytest.raises(ValidationError):
        DecodingParams(**kw)


def test_model_id_required():
    with pytest.raises(ValidationError):
        CompletionRequest("", "P")


def test_replay():
    c = client(mock_llm("replay", {"P": "The answer is 5."}))
    assert c.complete(req("P")).text == "The answer is 5."
    assert c.complete(req("unseen")).text == MOCK_SENTINEL


def test_replay_persistence(tmp_path):
    b = ReplayBackend({"P": "The answer is 5.", "Q": "ünïcode"})
    b.save(tmp_path / "t.json")
    loaded = ReplayBackend.load(tmp_path / "t.json")
    for prompt in ("P", "Q", "other"):
        assert loaded.send(req(prompt))[0] == b.send(req(prompt))[0]


def test_cache_hit_is_byte_identical(tmp_path):
    backend = ReplayBackend({"P": "The answer is 5."})
    c = client(backend, cache=ResponseCache(tmp_path / "cache.jsonl"))
    first, second = c.complete(req()), c.complete(req())
    assert not first.from_cache and second.from_cache
    assert first.text == second.text
    assert backend.calls == 1
    # a fresh client reading the same file never touches the backend
    other = ReplayBackend({})
    again = client(other, cache=ResponseCache(tmp_path / "cache.jsonl")).complete(req())
    assert again.from_cache and again.text == "The answer is 5." and other.calls == 0
    lines = (tmp_path / "cache.jsonl").read_text().splitlines()
    assert len(lines) == 1 and set(json.loads(lines[0])) == {"key", "timestamp", "response"}


def test_retry_then_success():
    backend = Flaky(2)
    resp = client(backend, retry=RetryPolicy(max_attempts=3)).complete(req())
    assert resp.text == "The answer is 5." and resp.attempts == 3


def test_retries_exhausted():
    c = client(Flaky(5, RateLimited), retry=RetryPolicy(max_attempts=3))
    with pytest.raises(RateLimited) as info:
        c.complete(req())
    assert info.value.attempts == 3


def test_auth_error_not_retried():
    backend = Flaky(5, AuthError)
    with pytest.raises(AuthError):
        client(backend).complete(req())
    assert backend.calls == 1


def test_backoff_recorded_and_nondecreasing():
    c = client(Flaky(4), retry=RetryPolicy(max_attempts=5, base_delay=0.5, multiplier=2, max_delay=3))
    c.complete(req())
    assert c.delays == [0.5, 1.0, 2.0, 3.0]


@given(st.floats(0, 5), st.floats(1, 4), st.floats(0, 60))
def test_backoff_nondecreasing(base, mult, cap):
    p = RetryPolicy(max_attempts=10, base_delay=base, multiplier=mult, max_delay=cap)
    delays = [p.delay(i) for i in range(10)]
    assert delays == sorted(delays)


def test_request_not_mutated():
    r = req()
    before = (r.model_id, r.prompt, r.params, r.cache_key)
    client(Flaky(1)).complete(r)
    assert (r.model_id, r.prompt, r.params, r.cache_key) == before


@given(st.lists(st.tuples(st.text(), st.floats(0, 2), st.integers(1, 512)), unique=True, max_size=30))
def test_cache_keys_distinct(items):
    keys = {CompletionRequest("m", p, DecodingParams(temperature=t, max_tokens=n)).cache_key for p, t, n in items}
    assert len(keys) == len(items)


def test_cache_key_covers_model_and_params():
    assert req().cache_key != CompletionRequest("other", "P").cache_key
    assert req().cache_key != req(temperature=0.0).cache_key
    assert req().cache_key == req().cache_key


def test_echo_backend_answers_demo_targets():
    demo = builtin_demonstrations("LCQA")[0]
    prompt = assemble_prompt(build_prompt_spec("LCQA", "FewShot", demo.input_block))
    c = client(EchoDemonstrationsBackend())
    assert c.complete(req(prompt)).text == demo.gold_output
    assert c.complete(req("something else")).text == MOCK_SENTINEL


def test_mock_factory_rejects_unknown_mode():
    with pytest.raises(ValidationError):
        mock_llm("psychic")


def test_complete_many_keeps_order_and_errors():
    class Picky:
        def send(self, r):
            if r.prompt == "bad":
                raise AuthError("no")
            return r.prompt.upper(), {}

    out = client(Picky(), max_in_flight=3).complete_many([req(p) for p in ("a", "bad", "c", "d")])
    assert [o.text if not isinstance(o, Exception) else "ERR" for o in out] == ["A", "ERR", "C", "D"]


def test_token_bucket_waits_when_empty():
    now = [0.0]
    waits = []

    def sleep(s):
        waits.append(s)
        now[0] += s

    bucket = TokenBucket(rate=2.0, capacity=1, clock=lambda: now[0], sleep=sleep)
    bucket.acquire()
    bucket.acquire()
    assert waits == [0.5]


# --- HTTP backend -----------------------------------------------------------------


def http_backend(handler, monkeypatch, key="sk-test"):
    if key is None:
        monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    else:
        monkeypatch.setenv("OPENAI_API_KEY", key)
    return HttpBackend("https://llm.example/v1", client=httpx.Client(transport=httpx.MockTransport(handler)))


def test_http_body_and_parse(monkeypatch):
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"text": " The answer is 5."}], "usage": {"total_tokens": 9}})

    text, usage = http_backend(handler, monkeypatch).send(req("P"))
    assert text == " The answer is 5." and usage == {"total_tokens": 9}
    assert seen["url"] == "https://llm.example/v1/completions"
    assert seen["auth"] == "Bearer sk-test"
    assert seen["body"] == {
        "model": "test-model",
        "prompt": "P",
        "temperature": 0.7,
        "top_p": 0.9,
        "max_tokens": 256,
        "frequency_penalty": 0.0,
        "presence_penalty": 0.0,
    }


@pytest.mark.parametrize(
    "status, error",
    [(401, AuthError), (403, AuthError), (429, RateLimited), (500, TransportError), (503, TransportError), (400, MalformedResponse)],
)
def test_http_status_mapping(monkeypatch, status, error):
    with pytest.raises(error):
        http_backend(lambda r: httpx.Response(status, text="nope"), monkeypatch).send(req())


@pytest.mark.parametrize("payload", [{"choices": []}, {"nothing": 1}, {"choices": [{"text": 5}]}])
def test_http_malformed_payload(monkeypatch, payload):
    with pytest.raises(MalformedResponse):
        http_backend(lambda r: httpx.Response(200, json=payload), monkeypatch).send(req())


def test_http_timeout_is_transient(monkeypatch):
    def handler(request):
        raise httpx.ReadTimeout("slow", request=request)

    with pytest.raises(TransportError) as info:
        http_backend(handler, monkeypatch).send(req())
    assert info.value.transient


def test_http_missing_credential(monkeypatch):
    with pytest.raises(AuthError):
        http_backend(lambda r: httpx.Response(200, json={}), monkeypatch, key=None).send(req())
