import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from hardyop import funcspace as fs

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def disk_points(rmax=0.95):
    """Points of the disk ``|a| <= rmax``."""
    return st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)),
                     st.floats(0.0, rmax), st.floats(0.0, 2 * math.pi))


def coefficient_lists(max_degree=16):
    comp = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))
    return st.lists(comp, min_size=1, max_size=max_degree + 1).filter(lambda c: any(abs(x) > 1e-3 for x in c))


def blaschke_maps(max_zeros=3, rmax=0.8):
    return st.lists(disk_points(rmax), min_size=1, max_size=max_zeros).map(lambda z: fs.SelfMap(fs.blaschke(z)))


def polynomial_maps(max_degree=4):
    """Polynomials with coefficient l^1 norm below one, hence self-maps."""
    def build(c, scale):
        c = np.asarray(c, dtype=complex)
        c[1] += 0.1
        return fs.SelfMap(fs.polynomial(c * scale / np.abs(c).sum()))
    return st.builds(build, coefficient_lists(max_degree).filter(lambda c: len(c) >= 2), st.floats(0.2, 0.95))


def selfmaps():
    return st.one_of(blaschke_maps(), polynomial_maps())


@pytest.fixture
def z():
    return fs.identity()


@pytest.fixture
def one():
    return fs.constant(1.0)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
