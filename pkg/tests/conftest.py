from collections import defaultdict

import pytest

from pgl3ekr.verify import Config, context

# criterion number -> list of (part, passed, detail); filled by test_acceptance
ACCEPTANCE = defaultdict(list)


def ctx(q):
    """Shared lazily built artifacts (field, plane, group, N) for q."""
    return context(q, Config())


@pytest.fixture(scope="session")
def ctx2():
    return ctx(2)


@pytest.fixture(scope="session")
def ctx3():
    return ctx(3)


@pytest.fixture(scope="session")
def ctx4():
    return ctx(4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
        for name, passed, detail in parts:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}: {detail}")
