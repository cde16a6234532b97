"""JSON documents for families, flat sets and exact rationals.

Family document::

    {"n": 2, "q": 2, "p": 2, "mode": "full",
     "sequences": [[matrix, matrix], ...]}

where a matrix is a list of rows of field-element codes.  A set of flats
(an antichain, say) is ``{"n", "q", "flats": [matrix, ...]}``.  Rationals
are ``{"num": "1", "den": "6"}`` with decimal strings, since JSON numbers
cannot carry big integers safely.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import jsonschema

from .meshalkin import Family, MeshalkinSequence, NotMeshalkinError, SequenceMode, is_meshalkin
from .projgeom import Flat, Lattice, matrix_to_flat


class FamilyFormatError(ValueError):
    pass


_MATRIX = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
}

FAMILY_SCHEMA = {
    "type": "object",
    "required": ["n", "q", "p", "mode", "sequences"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 2},
        "p": {"type": "integer", "minimum": 1},
        "mode": {"enum": ["full", "partial"]},
        "sequences": {"type": "array", "items": {"type": "array", "items": _MATRIX}},
    },
}

FLATS_SCHEMA = {
    "type": "object",
    "required": ["n", "q", "flats"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 2},
        "flats": {"type": "array", "items": _MATRIX},
    },
}


def _validate(doc, schema) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as err:
        raise FamilyFormatError(f"{err.json_path}: {err.message}") from None


def rational_to_json(x: Fraction | int) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(doc: dict) -> Fraction:
    return Fraction(int(doc["num"]), int(doc["den"]))


def matrix_to_json(flat: Flat) -> list[list[int]]:
    return [list(r) for r in flat.rows]


def _load_matrix(rows, lattice: Lattice, where: str) -> Flat:
    try:
        return matrix_to_flat(rows, lattice, where)
    except ValueError as err:
        raise FamilyFormatError(f"{where}: {err}") from None


def family_to_dict(family: Family) -> dict:
    return {
        "n": family.n,
        "q": family.q,
        "p": family.p,
        "mode": family.mode.value,
        "sequences": [[matrix_to_json(f) for f in s.flats] for s in family],
    }


def family_from_dict(doc: dict, lattice: Lattice | None = None) -> Family:
    _validate(doc, FAMILY_SCHEMA)
    n, q, p = doc["n"], doc["q"], doc["p"]
    mode = SequenceMode(doc["mode"])
    if lattice is None:
        lattice = Lattice(n, q)
    elif (lattice.n, lattice.q) != (n, q):
        raise FamilyFormatError(f"$: document is for n={n}, q={q}, not {lattice!r}")
    seqs = []
    for i, raw in enumerate(doc["sequences"]):
        where = f"$.sequences[{i}]"
        if len(raw) != p:
            raise FamilyFormatError(f"{where}: has {len(raw)} flats, expected p={p}")
        flats = [_load_matrix(m, lattice, f"{where}[{j}]") for j, m in enumerate(raw)]
        ok, reason = is_meshalkin(flats, mode, lattice)
        if not ok:
            raise FamilyFormatError(f"{where}: not a {mode.value} Meshalkin sequence: {reason}")
        seqs.append(MeshalkinSequence.from_flats(flats))
    try:
        return Family(lattice, p, seqs, mode)
    except NotMeshalkinError as err:
        raise FamilyFormatError(f"$.sequences: {err}") from None


def flats_to_dict(flats, lattice: Lattice) -> dict:
    return {"n": lattice.n, "q": lattice.q, "flats": [matrix_to_json(f) for f in sorted(set(flats))]}


def flats_from_dict(doc: dict) -> tuple[list[Flat], Lattice]:
    _validate(doc, FLATS_SCHEMA)
    lattice = Lattice(doc["n"], doc["q"])
    flats = [_load_matrix(m, lattice, f"$.flats[{i}]") for i, m in enumerate(doc["flats"])]
    return flats, lattice


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise FamilyFormatError(f"{path}: invalid JSON: {err}") from None


def write_json_atomic(doc, path) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def save_family(family: Family, path) -> None:
    write_json_atomic(family_to_dict(family), path)


def load_family(path, lattice: Lattice | None = None) -> Family:
    return family_from_dict(_read_json(path), lattice)


def load_flats(path) -> tuple[list[Flat], Lattice]:
    return flats_from_dict(_read_json(path))
