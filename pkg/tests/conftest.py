import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from charmean.fp import build_context  # noqa: E402

SMALL_PRIMES = [5, 7, 11, 13]
SWEEP_PRIMES = [p for p in range(5, 98) if all(p % d for d in range(2, int(p**0.5) + 1))]


@pytest.fixture(params=SMALL_PRIMES)
def ctx(request):
    return build_context(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
