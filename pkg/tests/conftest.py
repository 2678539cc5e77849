from __future__ import annotations

from pathlib import Path

import pytest

from actool.link import resolve_links
from actool.parser import parse_bundle, parse_case

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load_corpus_case(name: str):
    result = parse_case((CORPUS / name).read_text(encoding="utf-8"), name)
    assert result.case is not None, [d.line() for d in result.diagnostics]
    return result.case


def load_corpus_bundle(name: str = "bundle_mrgfus.acb"):
    def loader(path: str) -> str:
        return (CORPUS / path).read_text(encoding="utf-8")

    bundle, diagnostics = parse_bundle((CORPUS / name).read_text(encoding="utf-8"), loader, name)
    return bundle, diagnostics


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def tac_case():
    return load_corpus_case("tac_mrgfus.acd")


@pytest.fixture(scope="session")
def cac_case():
    return load_corpus_case("cac_uterine_fibroids.acd")


@pytest.fixture(scope="session")
def mono_case():
    return load_corpus_case("monolithic_mrgfus.acd")


@pytest.fixture(scope="session")
def corpus_bundle():
    bundle, diagnostics = load_corpus_bundle()
    assert bundle is not None, [d.line() for d in diagnostics]
    assert not diagnostics
    return bundle


@pytest.fixture(scope="session")
def corpus_resolved(corpus_bundle):
    resolved, diagnostics = resolve_links(corpus_bundle)
    assert resolved is not None, [d.line() for d in diagnostics]
    return resolved
