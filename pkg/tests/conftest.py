import numpy as np
import pytest
from hypothesis import settings

from damvi.vote import VoteMatrix

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def record(name, ok, detail=""):
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        _ACCEPTANCE_LINES.append(f"{status}  {name}  {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_instance(rng, max_n=50, max_k=8):
    """Random (votes, q, dist): voters are noisy copies of the labels with mixed accuracy."""
    n = int(rng.integers(1, max_n + 1))
    k = int(rng.integers(1, max_k + 1))
    y = rng.choice([-1, 1], size=n)
    acc = rng.uniform(0.3, 1.0, size=k)
    correct = rng.random((n, k)) < acc
    h = np.where(correct, y[:, None], -y[:, None])
    alpha_q = rng.choice([0.2, 1.0, 5.0])
    q = rng.dirichlet(np.full(k, alpha_q))
    if rng.random() < 0.2:
        q[rng.random(k) < 0.5] = 0.0
        if q.sum() == 0:
            q[0] = 1.0
        q /= q.sum()
    dist = rng.dirichlet(np.full(n, rng.choice([0.3, 1.0, 10.0])))
    return VoteMatrix(h, y), q, dist


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
