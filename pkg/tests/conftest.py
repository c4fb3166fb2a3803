from __future__ import annotations

import time
from contextlib import contextmanager

import pytest

RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Context manager that times an acceptance criterion and records the outcome."""
    results = request.config.stash.setdefault(RESULTS, {})

    @contextmanager
    def run(number: int, title: str, limit: float | None = None):
        note: dict = {}
        start = time.perf_counter()
        try:
            yield note
        except BaseException as exc:
            results[number] = (title, False, time.perf_counter() - start, f"{type(exc).__name__}: {exc}"[:120])
            raise
        elapsed = time.perf_counter() - start
        ok = limit is None or elapsed < limit
        detail = note.get("detail", "")
        if not ok:
            detail = f"took {elapsed:.1f}s, bound {limit}s"
        results[number] = (title, ok, elapsed, detail)
        assert ok, detail

    return run


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, elapsed, detail = results[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title} ({elapsed:.2f}s)"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
