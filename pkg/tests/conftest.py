import pytest

from orbitcx.gcw import build_corpus
from orbitcx.groups import catalog, enumerate_subgroups


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def lattices():
    return {name: enumerate_subgroups(G) for name, G in catalog().items()}
