import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """``criterion(number, title, body)`` runs ``body() -> (ok, detail)`` and logs one line."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def run(number, title, body):
        try:
            ok, detail = body()
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            raise
        finally:
            line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title} -- {detail}"
            print(line)
            lines.append(line)
        assert ok, line

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
