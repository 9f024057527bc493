"""Model backends: an OpenAI-compatible chat client and a rule-based oracle."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import tempfile
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

import httpx

from .. import conditions as C
from ..engine import Item, gold_ranking
from ..errors import (
    AuthError,
    BackendError,
    MCRankError,
    PromptUnparseable,
    RateLimited,
    TransportError,
)
from .prompts import DecodedPrompt, PromptKind, decode_prompt, item_label, numbered

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "MCRANK_API_KEY"


@dataclass
class ModelRequest:
    prompt_kind: PromptKind
    rendered_prompt: str
    model_name: str = "oracle"
    temperature: float = 0.0
    max_output_tokens: int = 1024
    # deterministic noise stream for the oracle, e.g. "<sample id>/<step>"
    stream_key: Optional[str] = None
    use_cache: bool = True


@dataclass
class ModelResponse:
    text: str
    usage: Optional[dict] = None
    cached: bool = False
    latency_ms: float = 0.0


@dataclass
class RetryPolicy:
    max_attempts: int = 4
    backoff_base_ms: float = 500.0


@dataclass
class BackendConfig:
    kind: str = "oracle"  # "http" | "oracle"
    model_name: str = "oracle"
    base_url: Optional[str] = None
    api_key_env_name: str = DEFAULT_API_KEY_ENV
    concurrency_limit: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    cache_dir: Optional[str] = None
    oracle_noise_epsilon: float = 0.0
    rng_seed: int = 0
    temperature: float = 0.0
    timeout_s: float = 60.0
    # re-asks allowed after an unparseable answer before the run is scored 0
    invalid_retries: int = 1

    def validate(self) -> None:
        if self.kind not in ("http", "oracle"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "http" and not self.base_url:
            raise ValueError("the http backend needs base_url")
        if self.concurrency_limit < 1:
            raise ValueError("concurrency_limit must be >= 1")
        if not 0.0 <= self.oracle_noise_epsilon <= 1.0:
            raise ValueError("oracle_noise_epsilon must lie in [0, 1]")


class _Gate:
    """Bounded dispatcher; records the high-water mark of in-flight calls."""

    def __init__(self, limit: int):
        self._sem = threading.BoundedSemaphore(limit)
        self._lock = threading.Lock()
        self.in_flight = 0
        self.peak = 0

    @contextmanager
    def slot(self) -> Iterator[None]:
        with self._sem:
            with self._lock:
                self.in_flight += 1
                self.peak = max(self.peak, self.in_flight)
            try:
                yield
            finally:
                with self._lock:
                    self.in_flight -= 1


class Backend:
    def __init__(self, cfg: BackendConfig):
        cfg.validate()
        self.cfg = cfg
        self.gate = _Gate(cfg.concurrency_limit)
        self.calls = 0
        self._count_lock = threading.Lock()

    def _count(self) -> None:
        with self._count_lock:
            self.calls += 1

    def complete(self, req: ModelRequest) -> ModelResponse:
        raise NotImplementedError

    def close(self) -> None:
        pass


# --------------------------------------------------------------------------
# disk cache
# --------------------------------------------------------------------------

def cache_key(model_name: str, temperature: float, prompt: str) -> str:
    # max_output_tokens deliberately excluded
    material = json.dumps([model_name, float(temperature), prompt], ensure_ascii=False)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class DiskCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> Optional[dict]:
        try:
            return json.loads(self.path(key).read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    def put(self, key: str, payload: dict) -> None:
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, self.path(key))


# --------------------------------------------------------------------------
# OpenAI-compatible HTTP backend
# --------------------------------------------------------------------------

def _content(raw: dict) -> str:
    try:
        return raw["choices"][0]["message"]["content"] or ""
    except (KeyError, IndexError, TypeError):
        raise TransportError("response has no choices[0].message.content") from None


class HttpChatBackend(Backend):
    def __init__(self, cfg: BackendConfig, client: Optional[httpx.Client] = None):
        super().__init__(cfg)
        if cfg.kind != "http":
            raise ValueError("HttpChatBackend needs an http config")
        self.api_key = os.environ.get(cfg.api_key_env_name, "").strip()
        if not self.api_key:
            raise AuthError(f"environment variable {cfg.api_key_env_name} is not set")
        self.url = cfg.base_url.rstrip("/") + "/chat/completions"
        self.cache = DiskCache(cfg.cache_dir) if cfg.cache_dir else None
        self.client = client or httpx.Client(timeout=cfg.timeout_s)
        self.network_calls = 0

    def close(self) -> None:
        self.client.close()

    def complete(self, req: ModelRequest) -> ModelResponse:
        key = cache_key(req.model_name, req.temperature, req.rendered_prompt)
        if self.cache is not None and req.use_cache:
            hit = self.cache.get(key)
            if hit is not None:
                return ModelResponse(_content(hit["response"]), hit["response"].get("usage"), cached=True)

        body = {
            "model": req.model_name,
            "messages": [{"role": "user", "content": req.rendered_prompt}],
            "temperature": req.temperature,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        policy = self.cfg.retry
        started = time.monotonic()
        last: Optional[BackendError] = None
        for attempt in range(policy.max_attempts):
            if attempt:
                time.sleep(policy.backoff_base_ms * 2 ** (attempt - 1) / 1000.0)
            with self.gate.slot():
                self._count()
                with self._count_lock:
                    self.network_calls += 1
                try:
                    resp = self.client.post(self.url, json=body, headers=headers)
                except httpx.TransportError as exc:
                    last = TransportError(f"{type(exc).__name__}: {exc}")
                    log.warning("attempt %d/%d failed: %s", attempt + 1, policy.max_attempts, last)
                    continue
            if resp.status_code in (401, 403):
                raise AuthError(f"HTTP {resp.status_code} from {self.url}")
            if resp.status_code == 429:
                last = RateLimited(f"HTTP 429 after {attempt + 1} attempts")
                continue
            if resp.status_code >= 500:
                last = TransportError(f"HTTP {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                raw = resp.json()
            except ValueError:
                raise TransportError("response body is not JSON") from None
            text = _content(raw)
            if self.cache is not None:
                self.cache.put(key, {"request_digest": key, "model": req.model_name, "response": raw})
            latency = (time.monotonic() - started) * 1000.0
            return ModelResponse(text, raw.get("usage"), cached=False, latency_ms=latency)
        assert last is not None
        raise last


# --------------------------------------------------------------------------
# oracle backend
# --------------------------------------------------------------------------

class OracleBackend(Backend):
    """Answers prompts with the rule engine.

    Knows the labels of every item it was given. With probability
    ``oracle_noise_epsilon`` a ranking answer has one adjacent pair swapped;
    the draw depends only on ``rng_seed`` and the request's ``stream_key``,
    so the same step of the same sample fails identically at every noise
    level above its draw.
    """

    def __init__(self, cfg: BackendConfig, knowledge: Iterable[Item] = ()):
        super().__init__(cfg)
        self.knowledge: dict[str, Item] = {}
        self.learn(knowledge)

    def learn(self, items: Iterable[Item]) -> None:
        for it in items:
            self.knowledge.setdefault(it.text.strip(), it)

    def _stream(self, req: ModelRequest) -> random.Random:
        key = req.stream_key or hashlib.sha256(req.rendered_prompt.encode()).hexdigest()
        digest = hashlib.sha256(f"{self.cfg.rng_seed}/{key}".encode()).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def complete(self, req: ModelRequest) -> ModelResponse:
        started = time.monotonic()
        with self.gate.slot():
            self._count()
            try:
                decoded = decode_prompt(req.rendered_prompt)
                text = self._answer(decoded, req)
            except PromptUnparseable:
                raise
            except MCRankError as exc:
                raise PromptUnparseable(f"{type(exc).__name__}: {exc}") from None
        usage = {
            "prompt_tokens": len(req.rendered_prompt.split()),
            "completion_tokens": len(text.split()),
        }
        return ModelResponse(text, usage, cached=False, latency_ms=(time.monotonic() - started) * 1000.0)

    def _answer(self, p: DecodedPrompt, req: ModelRequest) -> str:
        if p.kind is PromptKind.EXTRACT_CONDITIONS:
            fragments = [f.strip() for f in p.conditions.split(";")]
            for f in fragments:
                C.parse_condition(f)
            return numbered(fragments)
        if p.kind is PromptKind.SORT_CONDITIONS:
            parsed = [(C.parse_condition(s).priority, k, s) for k, s in enumerate(p.conditions)]
            return numbered([s for _, _, s in sorted(parsed)])

        conds = C.extract_conditions(p.conditions)
        listed = []
        for k, t in enumerate(p.item_texts):
            known = self.knowledge.get(t.strip())
            if known is None:
                raise PromptUnparseable(f"oracle has no labels for item {t!r}")
            # positional ids keep duplicate texts apart
            listed.append(Item(str(k), known.text, known.level, known.attributes))
        presented = [it.id for it in listed]
        answer = list(gold_ranking(listed, presented, conds))

        rng = self._stream(req)
        if len(answer) >= 2 and rng.random() < self.cfg.oracle_noise_epsilon:
            j = rng.randrange(len(answer) - 1)
            answer[j], answer[j + 1] = answer[j + 1], answer[j]

        if p.kind in (PromptKind.RANK_TOKEN, PromptKind.RANK_TOKEN_COT):
            return ", ".join(listed[int(i)].text for i in answer)
        return "\n".join(item_label(int(i) + 1) for i in answer)


def make_backend(cfg: BackendConfig, knowledge: Iterable[Item] = ()) -> Backend:
    if cfg.kind == "oracle":
        return OracleBackend(cfg, knowledge)
    return HttpChatBackend(cfg)


def complete(req: ModelRequest, cfg: BackendConfig, knowledge: Iterable[Item] = ()) -> ModelResponse:
    backend = make_backend(cfg, knowledge)
    try:
        return backend.complete(req)
    finally:
        backend.close()
