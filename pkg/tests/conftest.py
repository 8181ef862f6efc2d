import pytest
from hypothesis import settings

from diamond import bigseries

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def isolated_cache(tmp_path, monkeypatch):
    """A fresh on-disk cache directory and an empty in-process memo."""
    monkeypatch.setenv(bigseries.CACHE_ENV, str(tmp_path))
    bigseries.clear_memo()
    yield tmp_path
    bigseries.clear_memo()
