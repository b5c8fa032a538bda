import numpy as np
import pytest

import clarktorus as ct


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger jit compilation once so timed tests measure steady-state numerics
    from clarktorus import kernels

    z = np.exp(1j * np.linspace(0, 6, 8))
    c = np.array([[1.0 + 0j, 0.5j], [0.25, 0.0]])
    kernels.poly2_eval(c, z, z)
    kernels.poisson_sum(z, z, np.ones(8), 0.1 + 0j, 0.2 + 0j)
    kernels.cauchy_sum(z, z, np.ones(8, dtype=np.complex128), 0.1 + 0j, 0.2 + 0j)
    h = np.ones((2, 8), dtype=np.complex128)
    kernels.affine_norm_sum(h, np.full(8, 2.0 + 0j), 0.5 * z)


@pytest.fixture(scope="session")
def p1():
    return ct.parse_poly("4 - z2 - 3*z1 - z1*z2 + z1^2")


@pytest.fixture(scope="session")
def p2():
    return ct.parse_poly("2 - z1*z2 - z1^2*z2")


@pytest.fixture(scope="session")
def b1(p1):
    return ct.build(p1, (2, 1))


@pytest.fixture(scope="session")
def b2(p2):
    return ct.build(p2, (2, 1))


@pytest.fixture(scope="session")
def fav2():
    return ct.fav_rif(2)


@pytest.fixture(scope="session")
def fav3():
    return ct.fav_rif(3)


@pytest.fixture(scope="session")
def zz():
    return ct.monomial_rif()


def interior_points(seed, count, radius=0.7):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        r = radius * np.sqrt(rng.uniform(size=2))
        a = rng.uniform(0, 2 * np.pi, size=2)
        pts.append((r[0] * np.exp(1j * a[0]), r[1] * np.exp(1j * a[1])))
    return pts
