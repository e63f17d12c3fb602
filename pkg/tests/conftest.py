import numpy as np
import pytest

# the eight symmetries of the square grid acting on the last two axes
DIHEDRAL = {
    "rot90": lambda a: np.rot90(a, 1, axes=(-2, -1)),
    "rot180": lambda a: np.rot90(a, 2, axes=(-2, -1)),
    "rot270": lambda a: np.rot90(a, 3, axes=(-2, -1)),
    "flip_x": lambda a: a[..., :, ::-1],
    "flip_y": lambda a: a[..., ::-1, :],
    "transpose": lambda a: np.swapaxes(a, -1, -2),
    "antitranspose": lambda a: np.rot90(np.swapaxes(a, -1, -2), 2, axes=(-2, -1)),
}


def apply(op, a):
    return np.ascontiguousarray(DIHEDRAL[op](a))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def grid(n, m=None, h=1.0):
    """Coordinates ``x = i h`` and ``y = j h`` on an ``n`` by ``m`` grid."""
    m = n if m is None else m
    jj, ii = np.mgrid[0:m, 0:n].astype(np.float64)
    return ii * h, jj * h


ACCEPTANCE_LINES = []


def record(criterion: int, title: str, passed: bool, detail: str) -> None:
    """Print and keep one PASS/FAIL line for an acceptance criterion."""
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion:2d} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
