import numpy as np
import pytest
from hypothesis import settings

from hfnoise.control import ControllerConfig
from hfnoise.plant import PlantModel

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def nominal_plant():
    # lam^4 + lam^2 + lam, R = 1, k = 1
    return PlantModel.from_coeffs([0.0, 1.0, 1.0, 0.0, 1.0])


@pytest.fixture
def design_controller():
    return ControllerConfig(7.0, (0.9, 1.5, 2.0, 0.5))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary."""
    def emit(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
