"""Shared fixtures: the seeded ground-truth corpus and a tiny hand corpus."""

from __future__ import annotations

import pytest

from speckit.generator import CorpusBundle, generate_corpus
from speckit.index import SpecIndex, build_index
from speckit.lexicon import build_lexicon
from speckit.model import DevelopmentRegistry, ReleaseId
from speckit.parser import parse_document

SEED = 42


@pytest.fixture(scope="session")
def bundle() -> CorpusBundle:
    return generate_corpus(seed=SEED, size=200)


@pytest.fixture(scope="session")
def reparsed_docs(bundle):
    """The corpus as read back from its serialized sources."""
    docs = []
    for filename, text in sorted(bundle.sources.items()):
        result = parse_document(text, name=filename.removesuffix(".spec"))
        assert not result.errors, result.errors[:3]
        docs.append(result.document)
    return docs


@pytest.fixture(scope="session")
def corpus_index(bundle) -> SpecIndex:
    return build_index(bundle.documents, bundle.registry, bundle.lexicon)


@pytest.fixture()
def small_registry() -> DevelopmentRegistry:
    return DevelopmentRegistry(
        {
            "CB00XXXX": ReleaseId.parse("01R2"),
            "CB00YYYY": ReleaseId.parse("02R1"),
        }
    )


@pytest.fixture()
def a2_lexicon():
    return build_lexicon(
        {
            "A2 measurement": [
                "A2 measurement for Handover",
                "A2 measurement for the activation of Inter-frequency measurements",
            ]
        }
    )
