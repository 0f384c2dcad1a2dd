import numpy as np
import pytest

from polykern.kernels import KernelParams


def c1():
    return KernelParams.create((2,), 2.0)


def c2():
    return KernelParams.create((0, 1), (2.0, 3.0))


def c3():
    return KernelParams.create((1, 1), (1.5, 2.5), [1, 0.8, 1.2, 0.9, 1.1])


CONFIGS = {"C1": c1, "C2": c2, "C3": c3}


@pytest.fixture(params=sorted(CONFIGS))
def params(request):
    return CONFIGS[request.param]()


@pytest.fixture
def rng(request):
    # a stable seed per test, independent of execution order
    import zlib

    return np.random.default_rng(zlib.crc32(request.node.nodeid.encode()))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
