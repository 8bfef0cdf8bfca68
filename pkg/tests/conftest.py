import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ahgeom.almost_abelian import AlmostAbelianData
from ahgeom.presets import catalog, get_preset

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PRESET_NAMES = [p.name for p in catalog()]


@pytest.fixture(params=PRESET_NAMES)
def preset(request):
    return get_preset(request.param)


@pytest.fixture
def a36():
    return get_preset("a36_a1").structure()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_data(rng, n=2, unimodular=False, scale=1.0):
    k = 2 * n - 2
    A = scale * rng.standard_normal((k, k))
    a = -np.trace(A) if unimodular else scale * rng.standard_normal()
    return AlmostAbelianData(a, scale * rng.standard_normal(k), scale * rng.standard_normal(k), A)


finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def almost_abelian_data(draw, unimodular=False):
    A = np.array(draw(st.lists(finite, min_size=4, max_size=4))).reshape(2, 2)
    a = -float(np.trace(A)) if unimodular else draw(finite)
    b = draw(st.lists(finite, min_size=2, max_size=2))
    v = draw(st.lists(finite, min_size=2, max_size=2))
    return AlmostAbelianData(a, b, v, A)


# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
