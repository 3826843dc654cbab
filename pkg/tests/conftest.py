import pytest

from discproof.consts import compute_constants


@pytest.fixture(scope="session")
def c():
    return compute_constants()
