import numpy as np
import pytest

from asymsob import ConvexBody, build_spherical_profile, builtin_field

TRIANGLE = [[-1.0, -1.0], [2.0, 0.0], [0.0, 1.0]]


@pytest.fixture(scope="session")
def triangle():
    return ConvexBody.polytope_v(TRIANGLE)


@pytest.fixture(scope="session")
def square():
    return ConvexBody.polytope_v([[1, 1], [-1, 1], [-1, -1], [1, -1]])


@pytest.fixture(scope="session")
def disk():
    return ConvexBody.unit_ball(2)


@pytest.fixture(scope="session")
def tent2():
    return builtin_field("tent_tensor", 2)


@pytest.fixture(scope="session")
def hat():
    return builtin_field("hat1d", 1)


@pytest.fixture(scope="session")
def tent_profile(tent2):
    """Default-budget spherical profile of the 2-D tent, p=2 (several seconds)."""
    return build_spherical_profile(tent2, 2)


@pytest.fixture(scope="session")
def small_tent_profile(tent2):
    """Coarse profile for invariance checks that need no accuracy."""
    from asymsob import sphere_grid

    return build_spherical_profile(tent2, 2, sphere_grid(2, 16), line_spacing=0.25, radial={"panels": 12, "per_panel": 6})


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one PASS/FAIL line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
