"""Bundled example systems and the config-dict builder."""

import pytest

from meanrds import catalog
from meanrds.rds import FiberSpace, validate


def test_names_are_stable():
    assert catalog.names() == ("rot2", "rot1-trivial", "cat-trivial", "cat2", "mixed")


@pytest.mark.parametrize("name", catalog.names())
def test_every_system_validates(name):
    sys_ = catalog.load(name)
    rep = validate(sys_, max_word_length=8)
    assert rep.ok, rep.to_text()
    assert rep.worst_residual < 1e-12


@pytest.mark.parametrize("name", catalog.names())
def test_declared_fields_present(name):
    sys_ = catalog.load(name)
    assert sys_.declared["expected"] in ("wme-evidence", "sensitive-evidence")
    assert "minimal_base" in sys_.declared
    assert sys_.declared["notes"]


def test_load_unknown_name():
    with pytest.raises(KeyError, match="rot2"):
        catalog.load("does-not-exist")


def test_summary_rows():
    rows = catalog.summary()
    assert [r["name"] for r in rows] == list(catalog.names())
    byname = {r["name"]: r for r in rows}
    assert byname["cat2"]["dim"] == 2
    assert byname["cat2"]["base_size"] == 2
    assert byname["rot2"]["group"] == "Z"


def test_build_system_from_dict():
    spec = {
        "name": "two-rotations",
        "group": "Z",
        "dim": 1,
        "base": {
            "labels": ["a", "b"],
            "weights": [0.5, 0.5],
            "perms": [[1, 0]],
        },
        "maps": [
            [
                {"matrix": [[1]], "shift": [0.25]},
                {"matrix": [[1]], "shift": [0.75]},
            ]
        ],
        "declared": {"expected": "wme-evidence"},
    }
    sys_ = catalog.build_system(spec)
    assert sys_.name == "two-rotations"
    assert sys_.base.labels == ("a", "b")
    assert sys_.maps[0][1].shift == (0.75,)
    assert sys_.fibers[0] == FiberSpace.full(1)
    assert validate(sys_, max_word_length=6).ok
    assert sys_.declared["expected"] == "wme-evidence"


def test_build_system_with_sliced_fibers():
    spec = {
        "group": "Z",
        "dim": 2,
        "base": {"labels": ["a"], "weights": [1.0], "perms": [[0]]},
        "fibers": [{"slices": [[[1, 0.5]]]}],
        "maps": [[{"matrix": [[1, 0], [0, 1]], "shift": [0.1, 0.0]}]],
    }
    sys_ = catalog.build_system(spec)
    assert sys_.name == "custom"
    assert sys_.fibers[0].contains((0.3, 0.5))
    assert not sys_.fibers[0].contains((0.3, 0.4))
    assert validate(sys_, max_word_length=4).ok


def test_build_system_shift_defaults_to_zero():
    spec = {
        "group": "Z",
        "dim": 1,
        "base": {"labels": ["a"], "weights": [1.0], "perms": [[0]]},
        "maps": [[{"matrix": [[1]]}]],
    }
    sys_ = catalog.build_system(spec)
    assert sys_.maps[0][0].shift == (0.0,)


def test_build_system_missing_key():
    with pytest.raises(KeyError):
        catalog.build_system({"group": "Z", "dim": 1})


def test_expected_verdicts_split_both_ways():
    expected = {n: catalog.load(n).declared["expected"] for n in catalog.names()}
    assert set(expected.values()) == {"wme-evidence", "sensitive-evidence"}
