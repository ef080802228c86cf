"""Client for OpenAI-compatible completion endpoints, with caching and mocks."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol

import httpx

from .errors import AuthError, GatewayError, MalformedResponse, RateLimited, TransportError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "OPENAI_API_KEY"
MOCK_SENTINEL = "[no mock completion for this prompt]"


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.7
    top_p: float = 0.9
    max_tokens: int = 256
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValidationError("top_p must be in (0, 1]")
        if int(self.max_tokens) != self.max_tokens or self.max_tokens < 1:
            raise ValidationError("max_tokens must be a positive integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    prompt: str
    params: DecodingParams = field(default_factory=DecodingParams)

    def __post_init__(self):
        if not self.model_id:
            raise ValidationError("model_id is required")

    @property
    def cache_key(self) -> str:
        payload = json.dumps(
            {"model_id": self.model_id, "prompt": self.prompt, "params": self.params.to_dict()},
            sort_keys=True,
            ensure_ascii=False,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    usage: dict = field(default_factory=dict)
    latency_ms: float = 0.0
    from_cache: bool = False
    attempts: int = 1


class Backend(Protocol):
    def send(self, req: CompletionRequest) -> tuple[str, dict]: ...


# --- HTTP backend --------------------------------------------------------------


class HttpBackend:
    """POSTs the standard completions body; maps failures onto gateway errors."""

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self.url = endpoint.rstrip("/")
        if not self.url.endswith("/completions"):
            self.url += "/completions"
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    def _headers(self) -> dict:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise AuthError(f"credential variable {self.api_key_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def send(self, req: CompletionRequest) -> tuple[str, dict]:
        body = {"model": req.model_id, "prompt": req.prompt, **req.params.to_dict()}
        try:
            r = self._client.post(self.url, json=body, headers=self._headers())
        except httpx.TimeoutException as exc:
            raise TransportError(f"timeout calling {self.url}") from exc
        except httpx.TransportError as exc:
            raise TransportError(f"transport failure calling {self.url}: {exc}") from exc
        if r.status_code in (401, 403):
            raise AuthError(f"endpoint rejected credentials ({r.status_code})")
        if r.status_code == 429:
            raise RateLimited("endpoint rate limit (429)")
        if r.status_code >= 500:
            raise TransportError(f"server error {r.status_code}")
        if r.status_code >= 400:
            raise MalformedResponse(f"request rejected ({r.status_code}): {r.text[:200]}")
        try:
            payload = r.json()
            text = payload["choices"][0]["text"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected completion payload: {r.text[:200]}") from exc
        if not isinstance(text, str):
            raise MalformedResponse("completion text is not a string")
        usage = payload.get("usage") or {}
        return text, {k: int(v) for k, v in usage.items() if isinstance(v, int)}


# --- cache, limiter, retries --------------------------------------------------------


class ResponseCache:
    """Append-only JSONL store keyed by ``cache_key``; in memory when path is None."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        if self.path is not None and self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self._entries[rec["key"]] = rec["response"]

    def get(self, key: str) -> dict | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, text: str, usage: dict):
        rec = {"key": key, "timestamp": time.time(), "response": {"text": text, "usage": usage}}
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = rec["response"]
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")

    def __len__(self):
        return len(self._entries)


class TokenBucket:
    def __init__(self, rate: float, capacity: float = 1.0, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0 or capacity < 1:
            raise ValidationError("token bucket needs rate > 0 and capacity >= 1")
        self.rate, self.capacity = rate, capacity
        self._tokens = capacity
        self._clock, self._sleep = clock, sleep
        self._stamp = clock()
        self._lock = threading.Lock()

    def acquire(self):
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._stamp) * self.rate)
                self._stamp = now
                if self._tokens >= 1:
                    self._tokens -= 1
                    return
                wait = (1 - self._tokens) / self.rate
            self._sleep(wait)


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 1.0
    multiplier: float = 2.0
    max_delay: float = 30.0

    def __post_init__(self):
        if self.max_attempts < 1 or self.base_delay < 0 or self.multiplier < 1:
            raise ValidationError("invalid retry policy")

    def delay(self, retry_index: int) -> float:
        """Wait before retry ``retry_index`` (0-based); nondecreasing in the index."""
        return min(self.max_delay, self.base_delay * self.multiplier**retry_index)


class CompletionClient:
    def __init__(
        self,
        backend: Backend,
        cache: ResponseCache | None = None,
        retry: RetryPolicy = RetryPolicy(),
        limiter: TokenBucket | None = None,
        sleep: Callable[[float], None] = time.sleep,
        max_in_flight: int = 4,
    ):
        self.backend = backend
        self.cache = cache
        self.retry = retry
        self.limiter = limiter
        self._sleep = sleep
        self.max_in_flight = max_in_flight
        self.delays: list[float] = []  # every backoff wait, for auditing

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        key = req.cache_key
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return CompletionResponse(hit["text"], dict(hit.get("usage", {})), 0.0, True, 0)
        t0 = time.perf_counter()
        attempt = 0
        while True:
            attempt += 1
            if self.limiter is not None:
                self.limiter.acquire()
            try:
                text, usage = self.backend.send(req)
                break
            except GatewayError as exc:
                exc.attempts = attempt
                if not exc.transient or attempt >= self.retry.max_attempts:
                    raise
                wait = self.retry.delay(attempt - 1)
                log.warning("attempt %d failed (%s); retrying in %.2fs", attempt, exc, wait)
                self.delays.append(wait)
                self._sleep(wait)
        latency = (time.perf_counter() - t0) * 1000
        if self.cache is not None:
            self.cache.put(key, text, usage)
        return CompletionResponse(text, usage, latency, False, attempt)

    def complete_many(self, reqs: Iterable[CompletionRequest]) -> list:
        """Responses in request order; a failed request yields its exception."""
        reqs = list(reqs)

        def one(r):
            try:
                return self.complete(r)
            except GatewayError as exc:
                return exc

        with ThreadPoolExecutor(max_workers=max(1, self.max_in_flight)) as pool:
            return list(pool.map(one, reqs))


# --- mocks --------------------------------------------------------------------


def _usage(prompt: str, text: str) -> dict:
    return {"prompt_tokens": len(prompt.split()), "completion_tokens": len(text.split())}


class ReplayBackend:
    """Exact prompt -> completion table; unknown prompts get the sentinel."""

    def __init__(self, table: Mapping[str, str] | None = None, sentinel: str = MOCK_SENTINEL):
        self.table = dict(table or {})
        self.sentinel = sentinel
        self.calls = 0

    def send(self, req: CompletionRequest) -> tuple[str, dict]:
        self.calls += 1
        text = self.table.get(req.prompt, self.sentinel)
        return text, _usage(req.prompt, text)

    def save(self, path: str | Path):
        doc = {"version": 1, "sentinel": self.sentinel, "table": self.table}
        Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ReplayBackend":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(doc["table"], doc.get("sentinel", MOCK_SENTINEL))


class EchoDemonstrationsBackend:
    """Answers a prompt whose target is a known demonstration with its gold output."""

    def __init__(self, demonstrations=None, sentinel: str = MOCK_SENTINEL):
        from .prompt_kit import Task, builtin_demonstrations, target_block

        if demonstrations is None:
            demonstrations = [d for t in Task for d in builtin_demonstrations(t)]
        self._suffixes = [(target_block(d.task, d.input_block), d.input_block, d.gold_output) for d in demonstrations]
        self.sentinel = sentinel
        self.calls = 0

    def send(self, req: CompletionRequest) -> tuple[str, dict]:
        self.calls += 1
        prompt = req.prompt.rstrip()
        text = self.sentinel
        for block, raw_input, gold in self._suffixes:
            if prompt.endswith(block) or prompt.endswith(raw_input.rstrip()):
                text = gold
                break
        return text, _usage(req.prompt, text)


def mock_llm(mode: str, table: Mapping[str, str] | None = None, registry=None):
    """``mode`` is ``"replay"`` (with ``table``) or ``"echo"`` (optional demo list)."""
    mode = mode.lower()
    if mode == "replay":
        return ReplayBackend(table)
    if mode in ("echo", "echodemonstrations"):
        return EchoDemonstrationsBackend(registry)
    raise ValidationError(f"unknown mock mode {mode!r}")
