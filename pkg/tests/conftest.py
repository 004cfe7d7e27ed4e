import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LOGITMETA_OUT", str(tmp_path / "out"))
    return tmp_path / "out"


class CriterionRecorder:
    """Collects sub-check outcomes for one acceptance criterion."""

    def __init__(self, number, title, sink):
        self.number = number
        self.title = title
        self.checks = []
        self._sink = sink

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def finish(self):
        failed = [f"{name} ({detail})" for name, ok, detail in self.checks if not ok]
        verdict = "PASS" if self.passed else "FAIL"
        line = f"criterion {self.number:>2}: {verdict}  {self.title}"
        if failed:
            line += "  -- failed: " + "; ".join(failed)
        self._sink.append((self.number, line))
        assert self.passed, line


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    def make(number, title):
        return CriterionRecorder(number, title, _ACCEPTANCE)

    return make


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
