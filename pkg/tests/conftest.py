import pytest

import certificate_store
from codes import Code


@pytest.fixture
def even_weight_code():
    """The (3, 4, 2) code, 2-wFP and above Panoui's n=3 formula value"""
    return Code.from_strings(["000", "011", "101", "110"])


@pytest.fixture
def framed_code():
    """{00, 01, 11}: coalition {1, 3} frames word 2"""
    return Code.from_strings(["00", "01", "11"])


@pytest.fixture
def write_code_file(tmp_path):
    def write(text: str, name: str = "code.txt"):
        path = tmp_path / name
        path.write_bytes(text.encode("ascii"))
        return path
    return write


@pytest.fixture
def store(tmp_path, monkeypatch):
    """A certificate store backed by a throwaway SQLite file"""
    monkeypatch.setenv("WFP_DATABASE_URL", f"sqlite:///{tmp_path / 'certificates.db'}")
    certificate_store.reset_engine()
    certificate_store.init_db()
    yield certificate_store
    certificate_store.reset_engine()
