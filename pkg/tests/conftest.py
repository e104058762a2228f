import itertools

import numpy as np
import pytest

from quantum_gloves.spaces import parse_space

TOKENS = ("spin", "orb1", "orb2", "orb3")


def small_spaces(max_dim: int = 64, max_factors: int = 3):
    """Every product of the basic factor tokens with dimension <= max_dim."""
    out = []
    for n in range(1, max_factors + 1):
        for toks in itertools.product(TOKENS, repeat=n):
            space = parse_space(",".join(toks))
            if space.dim <= max_dim:
                out.append(space)
    return out


def random_state(space, rng):
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return v / np.linalg.norm(v)


def random_density(space, rng, rank=None):
    rank = rank or space.dim
    a = rng.normal(size=(space.dim, rank)) + 1j * rng.normal(size=(space.dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
