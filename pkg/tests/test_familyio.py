import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmeshalkin.familyio import (
    FamilyFormatError,
    family_from_dict,
    family_to_dict,
    flats_from_dict,
    flats_to_dict,
    load_family,
    load_flats,
    rational_from_json,
    rational_to_json,
    save_family,
    write_json_atomic,
)
from qmeshalkin.meshalkin import Family, ProblemParams, SequenceMode, enumerate_sequences
from qmeshalkin.projgeom import Lattice
from qmeshalkin.sampling import random_family


def test_empty_round_trip(tmp_path, line):
    fam = Family(line, 2)
    save_family(fam, tmp_path / "f.json")
    assert load_family(tmp_path / "f.json") == fam


def test_six_round_trip(tmp_path, line):
    fam = Family(line, 2, enumerate_sequences(line, (1, 1)))
    save_family(fam, tmp_path / "f.json")
    back = load_family(tmp_path / "f.json")
    assert back == fam and back.profile == fam.profile


@pytest.mark.parametrize("mode", ["full", "partial"])
@pytest.mark.parametrize("seed", range(4))
def test_random_round_trip(mode, seed):
    lat = Lattice(3, 3) if seed % 2 else Lattice(3, 2)
    fam = random_family(lat, ProblemParams(3, 2, 2, lat.q), mode, random.Random(seed))
    assert family_from_dict(family_to_dict(fam)) == fam


def test_non_rref_matrix_warns(line):
    doc = {"n": 2, "q": 2, "p": 2, "mode": "full", "sequences": [[[[1, 1]], [[1, 0], [0, 0]]]]}
    with pytest.warns(UserWarning, match=r"\$\.sequences\[0\]\[1\].*canonicalized"):
        fam = family_from_dict(doc)
    (seq,) = fam
    assert seq.flats[1].rows == ((1, 0),)


@pytest.mark.parametrize(
    "doc,where",
    [
        ({"n": 2, "q": 2, "p": 2, "mode": "full"}, "$"),
        ({"n": 2, "q": 2, "p": 2, "mode": "sideways", "sequences": []}, "$.mode"),
        ({"n": 2, "q": 1, "p": 2, "mode": "full", "sequences": []}, "$.q"),
        ({"n": 2, "q": 2, "p": 2, "mode": "full", "sequences": [[[["x"]]]]}, "$.sequences[0][0][0][0]"),
        ({"n": 2, "q": 2, "p": 2, "mode": "full", "sequences": [[[[1, 0]]]]}, "$.sequences[0]"),
        ({"n": 2, "q": 2, "p": 2, "mode": "full", "sequences": [[[[1, 0]], [[1, 0]]]]}, "$.sequences[0]"),
        ({"n": 2, "q": 2, "p": 1, "mode": "full", "sequences": [[[[1, 2]]]]}, "$.sequences[0][0]"),
    ],
)
def test_schema_errors_name_the_path(doc, where):
    with pytest.raises(FamilyFormatError) as err:
        family_from_dict(doc)
    assert str(err.value).startswith(where + ":")


def test_flats_round_trip(tmp_path, fano):
    flats = list(fano.level(1))
    write_json_atomic(flats_to_dict(flats, fano), tmp_path / "a.json")
    back, lat = load_flats(tmp_path / "a.json")
    assert lat == fano and sorted(back) == sorted(flats)
    with pytest.raises(FamilyFormatError, match=r"^\$: 'flats' is a required"):
        flats_from_dict({"n": 3, "q": 2})


def test_invalid_json(tmp_path):
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(FamilyFormatError, match="invalid JSON"):
        load_family(tmp_path / "bad.json")


@given(st.fractions())
def test_rational_round_trip(x):
    doc = rational_to_json(x)
    assert isinstance(doc["num"], str) and isinstance(doc["den"], str)
    assert rational_from_json(doc) == x


def test_large_rational_exact():
    x = Fraction(3**200 + 1, 7**90)
    assert rational_from_json(rational_to_json(x)) == x


def test_partial_mode_preserved(line):
    fam = Family(line, 1, enumerate_sequences(line, (1,), SequenceMode.PARTIAL), SequenceMode.PARTIAL)
    assert family_from_dict(family_to_dict(fam)).mode is SequenceMode.PARTIAL
