"""Text-generation backends behind one gateway with retries and a disk cache.

Two backends ship: :class:`HttpBackend` for OpenAI-compatible chat endpoints
and :class:`ScriptedBackend`, which replays a transcript file and never
touches the network. :class:`RecordingBackend` wraps any backend and writes
what it saw as a transcript, which is how test fixtures are authored.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
import urllib.error
import urllib.request
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import BackendError, ScriptMissError, TransportError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 1024
    sample_index: int = 0

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValidationError("empty prompt", field="prompt")
        if self.temperature < 0:
            raise ValidationError("negative temperature", field="temperature")
        if self.max_tokens < 1:
            raise ValidationError("max_tokens must be positive", field="max_tokens")
        if self.sample_index < 0:
            raise ValidationError("negative sample_index", field="sample_index")


@dataclass(frozen=True)
class BackendResponse:
    text: str
    backend_id: str
    cached: bool = False


class Backend(Protocol):
    backend_id: str
    model: str

    def generate(self, req: GenerationRequest) -> str: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def scripted_key(prompt: str, sample_index: int) -> str:
    return f"{prompt_hash(prompt)}:{sample_index}"


class ScriptedBackend:
    """Replays canned responses keyed on (prompt hash, sample index).

    Transcript file layout::

        {"version": 1,
         "entries": [{"key": "<sha256>:<i>", "text": "...", "seed": 0, "prompt": "..."}]}

    ``seed`` is optional; entries without it belong to every seed. ``prompt``
    is informational only.
    """

    backend_id = "scripted"

    def __init__(self, responses: Mapping[str, str], model: str = "scripted"):
        self.responses = dict(responses)
        self.model = model
        self.calls = 0

    @classmethod
    def from_pairs(cls, pairs: Mapping[tuple[str, int], str], model: str = "scripted") -> ScriptedBackend:
        return cls({scripted_key(p, i): t for (p, i), t in pairs.items()}, model=model)

    @classmethod
    def from_file(cls, path: str | os.PathLike, seed: int = 0, model: str = "scripted") -> ScriptedBackend:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        responses = {}
        for e in data.get("entries", []):
            if e.get("seed", seed) == seed:
                responses[e["key"]] = e["text"]
        return cls(responses, model=model)

    def generate(self, req: GenerationRequest) -> str:
        self.calls += 1
        key = scripted_key(req.prompt, req.sample_index)
        try:
            return self.responses[key]
        except KeyError:
            raise ScriptMissError(f"no scripted response for key {key}") from None


class FunctionBackend:
    """Backend computed by a Python callable; used to author transcripts."""

    backend_id = "function"

    def __init__(self, fn: Callable[[GenerationRequest], str], model: str = "function"):
        self.fn = fn
        self.model = model
        self.calls = 0

    def generate(self, req: GenerationRequest) -> str:
        self.calls += 1
        return self.fn(req)


class RecordingBackend:
    """Pass-through that records every exchange for :meth:`dump`."""

    def __init__(self, inner: Backend):
        self.inner = inner
        self.backend_id = inner.backend_id
        self.model = inner.model
        self.entries: dict[str, dict] = {}
        self._lock = threading.Lock()

    def generate(self, req: GenerationRequest) -> str:
        text = self.inner.generate(req)
        key = scripted_key(req.prompt, req.sample_index)
        with self._lock:
            self.entries[key] = {"key": key, "text": text, "prompt": req.prompt}
        return text

    def dump(self, path: str | os.PathLike) -> None:
        entries = [self.entries[k] for k in sorted(self.entries)]
        payload = json.dumps({"version": 1, "entries": entries}, indent=1, sort_keys=True, ensure_ascii=True)
        Path(path).write_text(payload + "\n", encoding="utf-8", newline="\n")


class HttpBackend:
    """OpenAI-compatible ``/chat/completions`` client on the standard library."""

    backend_id = "http"

    def __init__(self, model: str, base_url: str = "https://api.openai.com/v1",
                 api_key_env: str = "OPENAI_API_KEY", timeout: float = 120.0):
        self.model = model
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def generate(self, req: GenerationRequest) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise BackendError(f"environment variable {self.api_key_env} is not set")
        body = json.dumps({
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }).encode("utf-8")
        http_req = urllib.request.Request(
            f"{self.base_url}/chat/completions", data=body, method="POST",
            headers={"Content-Type": "application/json", "Authorization": f"Bearer {key}"},
        )
        try:
            with urllib.request.urlopen(http_req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            if exc.code == 429 or exc.code >= 500:
                raise TransportError(f"HTTP {exc.code} from {self.base_url}") from exc
            raise BackendError(f"HTTP {exc.code} from {self.base_url}: {exc.read()[:200]!r}") from exc
        except (urllib.error.URLError, TimeoutError, ConnectionError) as exc:
            raise TransportError(f"cannot reach {self.base_url}: {exc}") from exc
        try:
            return payload["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"unexpected response shape: {str(payload)[:200]}") from exc


class ResponseCache:
    """Directory of JSON files, one per request, named by a SHA-256 key."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    @staticmethod
    def key(backend_id: str, model: str, req: GenerationRequest) -> str:
        identity = json.dumps(
            [backend_id, model, req.prompt, float(req.temperature), req.max_tokens, req.sample_index],
            ensure_ascii=True, separators=(",", ":"),
        )
        return hashlib.sha256(identity.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> str | None:
        try:
            return json.loads(self._path(key).read_text(encoding="utf-8"))["text"]
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, KeyError):
            log.warning("ignoring corrupt cache entry %s", key)
            return None

    def put(self, key: str, text: str) -> None:
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"text": text}, fh, ensure_ascii=True)
            os.replace(tmp, self._path(key))


class LLMGateway:
    """Uniform ``complete``/``sample_n`` over a backend, with cache and retries.

    Only :class:`TransportError` is retried: ``retries`` extra attempts with
    exponential backoff ``backoff * 2**attempt`` seconds.
    """

    def __init__(self, backend: Backend, cache: ResponseCache | None = None, retries: int = 3,
                 backoff: float = 1.0, sleep: Callable[[float], None] = time.sleep):
        self.backend = backend
        self.cache = cache
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep
        self._lock = threading.Lock()
        self.backend_calls = 0
        self.cache_hits = 0

    def complete(self, req: GenerationRequest) -> BackendResponse:
        bid = self.backend.backend_id
        key = ResponseCache.key(bid, self.backend.model, req) if self.cache else None
        if key is not None:
            hit = self.cache.get(key)
            if hit is not None:
                with self._lock:
                    self.cache_hits += 1
                return BackendResponse(hit, bid, cached=True)

        attempt = 0
        while True:
            with self._lock:
                self.backend_calls += 1
            try:
                text = self.backend.generate(req)
                break
            except TransportError as exc:
                if attempt >= self.retries:
                    raise BackendError(f"backend unreachable after {self.retries} retries: {exc}") from exc
                delay = self.backoff * (2 ** attempt)
                log.warning("transport failure (%s); retrying in %.1fs", exc, delay)
                self._sleep(delay)
                attempt += 1

        if key is not None:
            self.cache.put(key, text)
        return BackendResponse(text, bid, cached=False)

    def sample_n(self, prompt: str, n: int, temperature: float = 1.0, max_tokens: int = 16) -> list[str]:
        if n < 1:
            raise ValidationError("n must be >= 1", field="n")
        return [
            self.complete(GenerationRequest(prompt, temperature, max_tokens, i)).text
            for i in range(n)
        ]
