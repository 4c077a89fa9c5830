import numpy as np
import pytest

from kreinkit import DiagonalModel, KreinExtension, PointModel3D

FOUR_PI = 4.0 * np.pi
ROOT2 = np.sqrt(2.0)

# lines emitted by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES = []


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_hermitian(rng, n, scale=1.0):
    m = rand_c(rng, n, n)
    return scale * 0.5 * (m + m.conj().T)


def point_theta(alpha, centers):
    """Point-interaction parameter for strength ``alpha`` with reference ``i``.

    Diagonal ``alpha + 1/(4 pi sqrt 2)``, off-diagonal ``-Re G_i(L_jk)``.
    """
    c = np.asarray(centers, dtype=float)
    n = len(c)
    th = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            if j == k:
                th[j, k] = alpha + 1.0 / (FOUR_PI * ROOT2)
            else:
                r = np.linalg.norm(c[j] - c[k])
                th[j, k] = -np.exp(-r / ROOT2) * np.cos(r / ROOT2) / (FOUR_PI * r)
    return th


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def diag_ext(rng):
    model = DiagonalModel.random(48, 3, rng)
    return KreinExtension(model, rand_hermitian(rng, 3))


@pytest.fixture
def point_ext():
    centers = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.8, -0.2]]
    return KreinExtension(PointModel3D(centers), point_theta(-0.5, centers))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
