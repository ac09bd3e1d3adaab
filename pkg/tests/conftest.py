import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # keep every test's class polynomial cache inside its own tmp dir so the
    # repository working directory never grows state
    monkeypatch.setenv("TWISTLOCAL_CACHE", str(tmp_path / "cache"))
