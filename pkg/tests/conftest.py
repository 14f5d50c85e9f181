import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from budgetqa.bench import lincoln_corpus
from budgetqa.search import Document, OfflineProvider, build_index


@pytest.fixture(scope="session")
def lincoln_docs() -> list[Document]:
    return lincoln_corpus()


@pytest.fixture(scope="session")
def lincoln_provider(lincoln_docs) -> OfflineProvider:
    return OfflineProvider(build_index(lincoln_docs))
