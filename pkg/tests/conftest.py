from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "qrd",
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qrd")


@pytest.fixture(scope="session")
def corpus():
    from qrdensity.tuples import random_corpus

    return random_corpus(seed=0, count=500)


@pytest.fixture(scope="session")
def recurrence_corpus():
    """Tuples built by the gap recurrence; far richer in nonzero mu than the random corpus."""
    from qrdensity.tuples import generate_lemma38

    rng = random.Random(1)
    out = []
    for _ in range(400):
        k = rng.randint(2, 5)
        s = rng.randint(2, 5)
        gaps = [rng.randint(1, s + 1) for _ in range(k - 1)]
        mult = [rng.choice([2, 3, 5, 6, 7, 10, 11, 13, 15]) for _ in gaps]
        out.append(generate_lemma38(gaps, (rng.randint(0, 5), rng.randint(1, 6)), mult, s))
    return out


@pytest.fixture(scope="session")
def primes_1e6():
    from qrdensity.arith import sieve_primes

    return sieve_primes(10**6)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one (criterion, passed, detail) row per acceptance check."""
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_ACCEPTANCE_KEY, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(rows):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
