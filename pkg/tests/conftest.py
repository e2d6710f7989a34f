import pytest

import pencildil as pd


@pytest.fixture(scope="session")
def corpus():
    return pd.seeded_corpus()


@pytest.fixture(scope="session")
def all_chains(corpus):
    return [pd.canonical_chain(t) for t in corpus]


@pytest.fixture(scope="session")
def scalar_chain():
    return pd.canonical_chain(pd.LinearPencil([[0.5]], [[0.3]]))
