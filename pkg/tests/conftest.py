import os
from pathlib import Path

import hypothesis
import pytest

from toriclab.core.config import settings
from toriclab.schemas.germs import load_germ

FIXTURES = Path(__file__).parent / "fixtures"
GERM_NAMES = sorted(p.stem for p in (FIXTURES / "germs").glob("*.json"))

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.register_profile("acceptance", deadline=None, max_examples=200)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


def load_fixture(name: str):
    return load_germ((FIXTURES / "germs" / f"{name}.json").read_text(encoding="utf-8"))


@pytest.fixture(autouse=True, scope="session")
def fixtures_root():
    previous = settings.FIXTURES
    settings.FIXTURES = FIXTURES
    yield FIXTURES
    settings.FIXTURES = previous


@pytest.fixture(params=GERM_NAMES)
def corpus_germ(request):
    return request.param, load_fixture(request.param)


@pytest.fixture
def p1xa1():
    return load_fixture("p1xa1")
