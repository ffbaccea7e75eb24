import pytest

from torusleray.lattice import enumerate_frequencies


@pytest.fixture(scope="session")
def freqs_e5():
    return enumerate_frequencies(2, 5)


@pytest.fixture(scope="session")
def freqs_e25():
    return enumerate_frequencies(2, 25)


@pytest.fixture(scope="session")
def freqs_e325():
    return enumerate_frequencies(2, 325)


@pytest.fixture(scope="session")
def freqs_d3_e2():
    return enumerate_frequencies(3, 2)
