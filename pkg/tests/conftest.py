import pytest

from nqdecoherence.core import (DeformationBath, OhmicFermionicBath, PiezoBath,
                                RegisterGeometry)


# Reference device: 50 nm dots, 400 nm spacing, GaAs-like sound speed.
@pytest.fixture(scope="session")
def fig_geometry():
    return RegisterGeometry.from_nm(1000, 50, 400, 5e3)


@pytest.fixture(scope="session")
def fig_piezo():
    return PiezoBath(g=0.03, omega_c=5e10)


@pytest.fixture(scope="session")
def fig_deformation():
    return DeformationBath(omega_s_sq=1e25, omega_c=5e10)


@pytest.fixture(scope="session")
def gold_gate():
    return OhmicFermionicBath(eta=9.3e-8, omega_c_f=1.3e15)


# Dimensionless toy problem: c_L = 1, alpha = 0.25, omega_q = 1, tau_s = 4.
@pytest.fixture(scope="session")
def toy_geometry():
    return RegisterGeometry(3, 0.5, 4.0, 1.0)


@pytest.fixture(scope="session")
def toy_piezo():
    return PiezoBath(g=1.0, omega_c=1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
