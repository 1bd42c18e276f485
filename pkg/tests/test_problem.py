from __future__ import annotations

import json
from fractions import Fraction

import pytest

from wellcap.errors import ProblemFormatError, UnsupportedNormError
from wellcap.geometry import NormKind
from wellcap.problem import (
    format_rational,
    load_aux_values,
    load_problem,
    map_document,
    parse_problem,
    parse_rational,
)

from tests.builders import band_document, double_well_document

F = Fraction


@pytest.mark.parametrize(
    "text, expected",
    [("3/4", F(3, 4)), ("-1/2", F(-1, 2)), (" 6/4 ", F(3, 2)), ("7", F(7)), (5, F(5))],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("bad", ["1/0", "0.5", "a/b", "", 0.5, True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(ProblemFormatError):
        parse_rational(bad)


def test_format_rational():
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(-4, 2)) == "-2"
    assert format_rational(0) == "0"


def test_parse_band(band):
    assert band.n == 1
    assert band.norm is NormKind.LINF
    assert list(band.radii) == [F(1, 2)]
    assert band.complex.dim == 2
    assert len(band.B.simplices_of_dim(1)) == 8
    assert band.f(7) == (F(0),)
    assert len(band.digest) == 64


def test_digest_is_stable_and_content_based():
    assert parse_problem(band_document()).digest == parse_problem(band_document()).digest
    assert parse_problem(band_document()).digest != parse_problem(band_document(with_sides=False)).digest


def _broken(**changes):
    data = double_well_document()
    data.update(changes)
    return data


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"complex": [[0, 1]]},
        _broken(complex="edges"),
        _broken(complex=[[0, 0]]),
        _broken(complex=[[0, "1"]]),
        _broken(B=[[7, 8]]),
        _broken(map={"values": {}}),
        _broken(map={"n": 0, "values": {}}),
        _broken(map={"n": 1, "values": {"0": ["0"]}}),
        _broken(map={"n": 1, "values": {"x": ["0"]}}),
        _broken(radii=[]),
        _broken(radii=["1", "1"]),
        _broken(radii=["0"]),
        _broken(norm=1),
    ],
)
def test_malformed_problems(data):
    with pytest.raises(ProblemFormatError):
        parse_problem(data)


def test_unsupported_norm():
    with pytest.raises(UnsupportedNormError):
        parse_problem(_broken(norm="l2"))


def test_load_problem_from_disk(tmp_path):
    path = tmp_path / "band.json"
    path.write_text(json.dumps(band_document()), encoding="utf-8")
    assert load_problem(path).n == 1
    with pytest.raises(ProblemFormatError):
        load_problem(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ProblemFormatError):
        load_problem(broken)


def test_load_aux_values(tmp_path):
    wrapped = tmp_path / "wrapped.json"
    wrapped.write_text(json.dumps({"values": {"0": ["1/2"], "1": ["-1"]}}), encoding="utf-8")
    assert load_aux_values(wrapped, 1) == {0: (F(1, 2),), 1: (F(-1),)}
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps({"0": ["1", "2"]}), encoding="utf-8")
    assert load_aux_values(bare, 2) == {0: (F(1), F(2))}
    with pytest.raises(ProblemFormatError):
        load_aux_values(bare, 1)


def test_map_document_loads_back(band):
    data = map_document(band.complex, band.f, band.norm, band.radii, band.B)
    again = parse_problem(json.loads(json.dumps(data)))
    assert again.complex.simplices == band.complex.simplices
    assert again.B.members == band.B.members
    assert again.f.values == band.f.values
    assert list(again.radii) == list(band.radii)
