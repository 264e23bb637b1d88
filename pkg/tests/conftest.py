import pytest

from floquet_raman import DriveParams


@pytest.fixture(scope="session")
def fig2c():
    return DriveParams.from_mhz(delta_z=10.03, delta_x=9.67, amp_a=2.37,
                                omega=6.985)


@pytest.fixture(scope="session")
def fig2d():
    return DriveParams.from_mhz(delta_z=9.92, delta_x=10.12, amp_a=2.37,
                                omega=7.09)


@pytest.fixture(scope="session")
def fig2e():
    return DriveParams.from_mhz(delta_z=9.63, delta_x=10.32, amp_a=1.37,
                                omega=7.0)


@pytest.fixture(scope="session")
def fig3():
    return DriveParams.from_mhz(delta_z=9.82, delta_x=9.67, amp_a=2.37,
                                omega=4.657)


@pytest.fixture(scope="session")
def fig4():
    return DriveParams.from_mhz(delta_z=10.0, delta_x=10.0, amp_a=2.404,
                                omega=7.271, phase_mod_a=4.35 * 7.343,
                                phase_mod_nu=7.343)
