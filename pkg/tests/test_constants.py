import pytest

from src.applemmas.constants import ConstantBook
from src.errors import InputError


def test_derived_constants():
    book = ConstantBook()
    assert book.c_me == pytest.approx(1 / 96)
    assert book.c962 == pytest.approx(1 / 96)
    assert book.c96 == pytest.approx(1 / 3072)
    assert book.c128 == pytest.approx(1 / 256)


def test_derived_constants_follow_overrides():
    book = ConstantBook().with_overrides(C_specpos=1.0)
    assert book.c_me == pytest.approx(1 / 8)


def test_digest_depends_only_on_base_values():
    assert ConstantBook().digest() == ConstantBook().digest()
    assert ConstantBook().digest() != ConstantBook.desk().digest()


def test_save_and_load(tmp_path):
    book = ConstantBook.desk()
    loaded = ConstantBook.load(book.save(tmp_path / "book.json"))
    assert loaded == book
    assert loaded.digest() == book.digest()


def test_load_defaults_and_missing_file(tmp_path):
    assert ConstantBook.load(None) == ConstantBook()
    with pytest.raises(InputError):
        ConstantBook.load(tmp_path / "absent.json")


@pytest.mark.parametrize("overrides", [{"c32": -1.0}, {"c_me": 0.5}, {"nonsense": 1.0}])
def test_invalid_overrides(overrides):
    with pytest.raises(InputError):
        ConstantBook().with_overrides(**overrides)
