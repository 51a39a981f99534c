from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from claimtree.llm import LLMGateway, ScriptedBackend
from claimtree.pipeline import PipelineConfig

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN_THREAD = FIXTURES / "golden_thread.jsonl"
GOLDEN_TRANSCRIPT = FIXTURES / "golden_transcript.json"
GOLDEN_SUMMARY = FIXTURES / "golden_summary.json"


@pytest.fixture
def golden_backend() -> ScriptedBackend:
    return ScriptedBackend.from_file(GOLDEN_TRANSCRIPT)


@pytest.fixture
def golden_gateway(golden_backend) -> LLMGateway:
    return LLMGateway(golden_backend, sleep=lambda s: None)


@pytest.fixture
def golden_thread():
    from claimtree.model import validate_thread
    return validate_thread(json.loads(GOLDEN_THREAD.read_text(encoding="utf-8")))


@pytest.fixture
def golden_config(tmp_path) -> PipelineConfig:
    return PipelineConfig(input_path=GOLDEN_THREAD, work_dir=tmp_path / "work", backend="scripted",
                          model="scripted", transcript=GOLDEN_TRANSCRIPT)


_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_criteria.items()):
        status = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{status:<5} {name}")
