import pytest

from gpmirror.polytope import boundary_points, builtin, hypersurface_simplex
from gpmirror.monoid import default_grading, relation_lattice

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, summary: str) -> None:
    ACCEPTANCE[number] = (passed, summary)
    print(f"ACCEPTANCE {number:2d} {'PASS' if passed else 'FAIL'}: {summary}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, summary = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {summary}")


@pytest.fixture(scope="session")
def quintic():
    return builtin("quintic")


@pytest.fixture(scope="session")
def cubic():
    return builtin("cubic")


@pytest.fixture(scope="session")
def interval():
    return builtin("interval")


@pytest.fixture(scope="session")
def mirror_quartic_dim3_n4():
    """The 3-dimensional mirror quartic with four vertices and 22 points in P."""
    return builtin("mirror_quartic")


@pytest.fixture(scope="session")
def quartic_K(mirror_quartic_dim3_n4):
    return relation_lattice(mirror_quartic_dim3_n4)


@pytest.fixture(scope="session")
def quartic_grading(quartic_K):
    return default_grading(quartic_K)


@pytest.fixture(scope="session")
def quartic_labels(mirror_quartic_dim3_n4):
    """Indices of e1..e6 on two opposite edges and the relations a, b, c, d."""
    P = boundary_points(mirror_quartic_dim3_n4)
    e = {i: P.index(p) for i, p in enumerate(
        [(2, 0, -1), (1, 1, -1), (0, 2, -1), (-1, -1, 0), (-1, -1, 1), (-1, -1, 2)], start=1)}

    def vec(**coeffs):
        u = [0] * len(P)
        for k, c in coeffs.items():
            u[e[int(k[1:])]] += c
        return tuple(u)

    return {
        "e": e,
        "a": vec(k2=1, k5=1),
        "b": vec(k1=1, k3=1, k4=1, k6=1),
        "c": vec(k1=1, k3=1, k5=2),
        "d": vec(k2=2, k4=1, k6=1),
    }


def fermat(n):
    return hypersurface_simplex(n)
