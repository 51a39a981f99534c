import pytest

from claimtree.errors import BackendError, ScriptMissError, TransportError, ValidationError
from claimtree.llm import (FunctionBackend, GenerationRequest, LLMGateway, RecordingBackend, ResponseCache,
                           ScriptedBackend, scripted_key)


def scripted(n=5, prompt="p"):
    return ScriptedBackend.from_pairs({(prompt, i): f"text {i}" for i in range(n)})


def test_scripted_lookup():
    gw = LLMGateway(scripted())
    r = gw.complete(GenerationRequest("p"))
    assert r.text == "text 0" and not r.cached and r.backend_id == "scripted"


def test_scripted_miss():
    with pytest.raises(ScriptMissError, match="no scripted response"):
        LLMGateway(scripted()).complete(GenerationRequest("unknown"))


def test_cache_hit(tmp_path):
    gw = LLMGateway(scripted(), ResponseCache(tmp_path))
    first = gw.complete(GenerationRequest("p", 1.0, 16, 2))
    second = gw.complete(GenerationRequest("p", 1.0, 16, 2))
    assert second.cached and second.text == first.text
    assert gw.backend_calls == 1


def test_cache_key_covers_fields():
    base = GenerationRequest("p", 1.0, 16, 0)
    keys = {ResponseCache.key("b", "m", base),
            ResponseCache.key("b2", "m", base),
            ResponseCache.key("b", "m2", base),
            ResponseCache.key("b", "m", GenerationRequest("q", 1.0, 16, 0)),
            ResponseCache.key("b", "m", GenerationRequest("p", 0.5, 16, 0)),
            ResponseCache.key("b", "m", GenerationRequest("p", 1.0, 17, 0)),
            ResponseCache.key("b", "m", GenerationRequest("p", 1.0, 16, 1))}
    assert len(keys) == 7


def test_sample_n_enumerates_indices():
    gw = LLMGateway(scripted())
    assert gw.sample_n("p", 5) == [f"text {i}" for i in range(5)]
    assert gw.sample_n("p", 1) == ["text 0"]
    assert gw.sample_n("p", 3) == [gw.complete(GenerationRequest("p", 1.0, 16, i)).text for i in range(3)]


def test_sample_n_replays_from_cache(tmp_path):
    LLMGateway(scripted(), ResponseCache(tmp_path)).sample_n("p", 5)
    empty = ScriptedBackend({})
    gw = LLMGateway(empty, ResponseCache(tmp_path))
    assert gw.sample_n("p", 5) == [f"text {i}" for i in range(5)]
    assert empty.calls == 0


def test_sample_n_rejects_zero():
    with pytest.raises(ValidationError):
        LLMGateway(scripted()).sample_n("p", 0)


def test_retries_with_backoff():
    delays = []
    attempts = []

    def flaky(req):
        attempts.append(1)
        if len(attempts) < 3:
            raise TransportError("down")
        return "ok"

    gw = LLMGateway(FunctionBackend(flaky), sleep=delays.append)
    assert gw.complete(GenerationRequest("p")).text == "ok"
    assert delays == [1.0, 2.0]


def test_gives_up_after_retries():
    def down(req):
        raise TransportError("down")

    delays = []
    gw = LLMGateway(FunctionBackend(down), retries=3, sleep=delays.append)
    with pytest.raises(BackendError, match="after 3 retries"):
        gw.complete(GenerationRequest("p"))
    assert delays == [1.0, 2.0, 4.0]
    assert gw.backend_calls == 4


def test_request_validation():
    with pytest.raises(ValidationError):
        GenerationRequest("")
    with pytest.raises(ValidationError):
        GenerationRequest("p", temperature=-1)


def test_recording_round_trip(tmp_path):
    rec = RecordingBackend(FunctionBackend(lambda r: r.prompt.upper()))
    LLMGateway(rec).sample_n("abc", 2)
    rec.dump(tmp_path / "t.json")
    replay = ScriptedBackend.from_file(tmp_path / "t.json")
    assert replay.responses == {scripted_key("abc", 0): "ABC", scripted_key("abc", 1): "ABC"}


def test_transcript_seed_selection(tmp_path):
    import json
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"entries": [
        {"key": scripted_key("p", 0), "text": "zero", "seed": 0},
        {"key": scripted_key("p", 0), "text": "one", "seed": 1},
    ]}))
    assert ScriptedBackend.from_file(path, seed=1).generate(GenerationRequest("p")) == "one"
    assert ScriptedBackend.from_file(path).generate(GenerationRequest("p")) == "zero"
