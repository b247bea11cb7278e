import pytest

from server.lctrs_io.parser import parse_lctrs
from server.oracle.ginst_oracle import FiniteFragment
from tests.support import SIG1, SIG1_PRIME, builtin_context, fixture_text

LCTRS_VARIABLES = (
    "LCTRS_SOLVER", "LCTRS_SOLVER_CMD", "LCTRS_SOLVER_TIMEOUT_MS", "LCTRS_SOLVER_FALLBACK",
    "LCTRS_EQUIV_MODE", "LCTRS_MAX_DIFF_STEPS", "LCTRS_INT_RANGE", "LCTRS_MAX_HEIGHT",
    "LCTRS_OUTPUT_FORMAT", "LCTRS_LOG_LEVEL", "LCTRS_JSON_LOGS",
)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in LCTRS_VARIABLES:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def ctx():
    with builtin_context(SIG1) as context:
        yield context


@pytest.fixture
def ctx_prime():
    with builtin_context(SIG1_PRIME) as context:
        yield context


@pytest.fixture
def r1():
    return parse_lctrs(fixture_text("r1.lctrs"))


@pytest.fixture
def r1prime():
    return parse_lctrs(fixture_text("r1prime.lctrs"))


@pytest.fixture
def frag():
    return FiniteFragment(-2, 2, 4)
