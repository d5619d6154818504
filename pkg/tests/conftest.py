import pytest
from hypothesis import HealthCheck, settings

# seeded, repeatable property runs
settings.register_profile("repo", derandomize=True, max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

_VERDICTS = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record one check towards a numbered acceptance criterion."""
    book = request.config.stash.setdefault(_VERDICTS, {})

    def record(criterion: int, ok: bool, detail: str) -> bool:
        book.setdefault(criterion, []).append((bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    book = config.stash.get(_VERDICTS, {})
    if not book:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(book):
        parts = book[criterion]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
