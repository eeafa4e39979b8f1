import pytest

from wealthca.analysis import construct_optimal_odd, point_filled


@pytest.fixture(scope="session")
def lattice6():
    """6x6 point lattice: ones at even (i, j), the unshifted even optimum."""
    return point_filled(6)


@pytest.fixture(scope="session")
def optimal5():
    return construct_optimal_odd(5)


@pytest.fixture(scope="session")
def optimal7():
    return construct_optimal_odd(7)
