import pytest

from cobweave.fixtures import ab_fixture


@pytest.fixture
def ab():
    return ab_fixture()
