import json

import pytest

from src.applemmas.constants import ConstantBook
from src.equation.rado_criterion import IntervalColouring
from src.errors import InputError
from src.tools.manifest import RunManifest
from src.tools.persistence import (
    load_colouring,
    load_json,
    load_subset,
    save_colouring,
    save_subset,
    to_csv,
    to_ndjson,
)


def test_colouring_from_labels_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"labels": [0, 1, 1, 0], "signed": False}))
    colouring = load_colouring(path)
    assert colouring.classes == [[1, 4], [2, 3]]


def test_saved_colouring_loads_back(tmp_path):
    colouring = IntervalColouring(n=2, signed=True, classes=[[-2, 2], [-1, 0, 1]])
    assert load_colouring(save_colouring(colouring, tmp_path / "c.json")) == colouring


def test_colouring_that_misses_an_element(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 3, "classes": [[1, 2]]}))
    with pytest.raises(InputError):
        load_colouring(path)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InputError):
        load_json(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InputError):
        load_json(broken)


def test_subset_file(tmp_path, interval_101):
    path = save_subset(interval_101, tmp_path / "A.json")
    assert load_subset(path) == interval_101
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"members": [1]}))
    with pytest.raises(InputError):
        load_subset(bad)


def test_csv_uses_union_of_keys():
    text = to_csv([{"a": 1}, {"a": 2, "b": 3}])
    assert text.splitlines() == ["a,b", "1,", "2,3"]


def test_ndjson_sorts_keys():
    assert to_ndjson([{"b": 1, "a": 2}, {"c": 3}]) == '{"a": 2, "b": 1}\n{"c": 3}'


def test_manifest_digest_ignores_wall_time():
    book = ConstantBook()
    first = RunManifest.build("rado number", {"eq": "1,1,-1"}, book, seed=0, wall_time=1.5)
    second = RunManifest.build("rado number", {"eq": "1,1,-1"}, book, seed=0, wall_time=2.5)
    assert first.digest() == second.digest()
    assert first.book_hash == book.digest()
    assert "numpy" in first.versions


def test_manifest_digest_tracks_the_book():
    plain = RunManifest.build("lemma chang", {}, ConstantBook())
    desk = RunManifest.build("lemma chang", {}, ConstantBook.desk())
    assert plain.digest() != desk.digest()


def test_witness_output_loads_as_a_colouring(tmp_path):
    path = tmp_path / "witness.json"
    path.write_text(json.dumps({"manifest": {}, "result": {"n": 4, "classes": [[1, 4], [2, 3]]}}))
    assert load_colouring(path).classes == [[1, 4], [2, 3]]
    path.write_text(json.dumps({"manifest": {}, "result": None}))
    with pytest.raises(InputError):
        load_colouring(path)
