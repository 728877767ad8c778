from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


# acceptance criteria report one summary line each; sub-checks are folded into that line
ACCEPTANCE: dict[int, list[tuple[str, bool]]] = {}


@pytest.fixture
def criterion():
    def record(number: int, label: str, passed: bool) -> bool:
        ACCEPTANCE.setdefault(number, []).append((label, bool(passed)))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        subs = ACCEPTANCE[number]
        ok = all(p for _, p in subs)
        detail = "; ".join(f"{label} {'ok' if p else 'FAILED'}" for label, p in subs)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
