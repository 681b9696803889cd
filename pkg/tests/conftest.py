import pytest

from queryforge.corpus import Corpus, Publication
from queryforge.engine import scholar_profile
from queryforge.synth import generate_corpus


@pytest.fixture
def table1_pubs():
    """The three fictional publications used by the worked examples."""
    return [
        Publication("s1", ("Smith", "Jones"), "The question to 42", 2005, "Fictional 2005"),
        Publication("s2", ("Williams", "Smith"), "Don't Panic!", 2005, "Fictional 2005"),
        Publication(
            "s3", ("Taylor",), "The Hitchhiker's Guide to the Galaxy", 2005, "Fictional 2005"
        ),
    ]


@pytest.fixture
def table1_corpus(table1_pubs):
    return Corpus(table1_pubs)


@pytest.fixture
def scholar_caps():
    return scholar_profile()


@pytest.fixture(scope="session")
def small_corpus():
    """Mid-size synthetic corpus shared by the slower unit tests."""
    return generate_corpus(600, seed=11)
