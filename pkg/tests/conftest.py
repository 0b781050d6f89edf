import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import kms_cayley as kc

settings.register_profile(
    "deterministic", derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def heisenberg():
    return kc.builtin_spec("heisenberg")


@pytest.fixture(scope="session")
def dinf():
    return kc.builtin_spec("dihedral_infinite")


@pytest.fixture(scope="session")
def z1():
    return kc.builtin_spec("zn:1")


@pytest.fixture(scope="session")
def z2():
    return kc.builtin_spec("zn:2")


@pytest.fixture(scope="session")
def z1_f12():
    """Z with asymmetric potential F(+1)=1, F(-1)=2."""
    return kc.free_abelian_spec(1, {"e1": 1.0, "e1_inv": 2.0}, name="z1-f12")


@pytest.fixture(scope="session")
def z2_f12():
    """Z^2 with F(+-e1)=1, F(+-e2)=2; the second acceptance fixture."""
    return kc.free_abelian_spec(
        2, {"e1": 1.0, "e1_inv": 1.0, "e2": 2.0, "e2_inv": 2.0}, name="z2-f12")


def bisect_root(f, lo, hi, iters=200):
    """Plain interval bisection; the independent root oracle for tests."""
    flo, fhi = f(lo), f(hi)
    assert flo * fhi <= 0, "oracle bracket does not straddle the root"
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def bisection_oracle():
    return bisect_root


def heisenberg_matrix_endpoint(word):
    """Independent endpoint oracle: literal 3x3 integer matrix products."""
    mats = {
        "a": [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
        "a_inv": [[1, -1, 0], [0, 1, 0], [0, 0, 1]],
        "b": [[1, 0, 0], [0, 1, 1], [0, 0, 1]],
        "b_inv": [[1, 0, 0], [0, 1, -1], [0, 0, 1]],
        "c": [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
        "c_inv": [[1, 0, -1], [0, 1, 0], [0, 0, 1]],
    }
    out = np.eye(3, dtype=np.int64)
    for s in word:
        out = out @ np.array(mats[s], dtype=np.int64)
    return (int(out[0, 1]), int(out[1, 2]), int(out[0, 2]))


@pytest.fixture(scope="session")
def matrix_endpoint():
    return heisenberg_matrix_endpoint
