import pytest

from sheetcrystal import atomic_units


@pytest.fixture(scope="session")
def atomic():
    return atomic_units()
