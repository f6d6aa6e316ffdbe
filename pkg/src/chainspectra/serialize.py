"""JSON round-trips for complexes, maps and diagrams.

Coefficients travel as strings so nothing is lost at any size (Q uses
fraction strings like "3/2"); degree keys are strings, grid cells are
"i,j".  `loads` sniffs the object kind from the keys present, so the
command line can accept whichever kind a subcommand makes sense for.
"""

import json

from .complexes import ChainComplex, ChainMap
from .matrices import SparseMatrix
from .rings import VARIANTS, Backend, Fp, FpRing, Ring, ring_from_token
from .spectra import Bispectrum, _cells
from .tangent import ParamBispectrum, RetractiveObject


class FormatError(ValueError):
    """The payload does not match the schema."""


def _need(data, key: str, what: str):
    if not isinstance(data, dict):
        raise FormatError(f"{what} must be a JSON object")
    if key not in data:
        raise FormatError(f"{what} is missing {key!r}")
    return data[key]


def _degree(key: str, what: str) -> int:
    try:
        return int(key)
    except (TypeError, ValueError):
        raise FormatError(f"{what}: degree key {key!r} is not an integer") from None


def _cell(key: str, what: str):
    parts = key.split(",") if isinstance(key, str) else []
    if len(parts) != 2:
        raise FormatError(f'{what}: cell key {key!r} is not "i,j"')
    return _degree(parts[0], what), _degree(parts[1], what)


def _cell_key(cell) -> str:
    return f"{cell[0]},{cell[1]}"


# -- rings ---------------------------------------------------------------


def ring_to_json(ring: Ring):
    if isinstance(ring, FpRing):
        return {"Fp": ring.p}
    return ring.token()


def ring_from_json(data) -> Ring:
    if isinstance(data, dict):
        p = data.get("Fp")
        if len(data) != 1 or not isinstance(p, int) or isinstance(p, bool):
            raise FormatError('ring object must be {"Fp": p}')
        try:
            return Fp(p)
        except AssertionError:
            raise FormatError(f"modulus {p} is not prime") from None
    if data in ("Z", "Q"):
        return ring_from_token(data)
    raise FormatError(f"unknown ring {data!r}")


# -- matrices ------------------------------------------------------------


def _matrix_to_json(m: SparseMatrix) -> list:
    return [[r, c, m.ring.fmt(v)] for r, c, v in m.triples()]


def _matrix_from_json(ring: Ring, rows: int, cols: int, data, what: str) -> SparseMatrix:
    if not isinstance(data, list):
        raise FormatError(f"{what} must be a list of [row, col, coeff]")
    triples, seen = [], set()
    for item in data:
        if not (isinstance(item, list) and len(item) == 3):
            raise FormatError(f"{what}: entries are [row, col, coeff]")
        r, c, coeff = item
        if not (isinstance(r, int) and isinstance(c, int)
                and 0 <= r < rows and 0 <= c < cols):
            raise FormatError(
                f"{what}: position ({r}, {c}) outside a {rows} by {cols} matrix")
        if (r, c) in seen:
            raise FormatError(f"{what}: duplicate position ({r}, {c})")
        seen.add((r, c))
        if not isinstance(coeff, str):
            raise FormatError(f"{what}: coefficients serialize as strings")
        try:
            triples.append((r, c, ring.parse(coeff)))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"{what}: bad coefficient {coeff!r}") from None
    return SparseMatrix.from_triples(ring, rows, cols, triples)


# -- complexes and maps --------------------------------------------------


def complex_to_json(c: ChainComplex) -> dict:
    return {
        "ring": ring_to_json(c.backend.ring),
        "variant": c.backend.variant,
        "ranks": {str(n): c.rank(n) for n in sorted(c.ranks)},
        "differentials": {str(n): _matrix_to_json(c.diff(n))
                          for n in sorted(c.differentials)},
    }


def complex_from_json(data) -> ChainComplex:
    ring = ring_from_json(_need(data, "ring", "complex"))
    variant = _need(data, "variant", "complex")
    if variant not in VARIANTS:
        raise FormatError(f"variant must be one of {VARIANTS}, got {variant!r}")
    ranks = {}
    for key, value in _need(data, "ranks", "complex").items():
        n = _degree(key, "ranks")
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise FormatError(f"rank at degree {n} must be a non-negative integer")
        ranks[n] = value
    diffs = {}
    for key, value in _need(data, "differentials", "complex").items():
        n = _degree(key, "differentials")
        diffs[n] = _matrix_from_json(ring, ranks.get(n - 1, 0), ranks.get(n, 0),
                                     value, f"differential at degree {n}")
    try:
        return ChainComplex(Backend(ring, variant), ranks, diffs)
    except AssertionError as exc:
        raise FormatError(f"not a valid complex: {exc}") from None


def _components_to_json(f: ChainMap) -> dict:
    return {str(n): _matrix_to_json(f.components[n]) for n in sorted(f.components)}


def _components_from_json(data, source: ChainComplex, target: ChainComplex,
                          what: str) -> dict:
    if not isinstance(data, dict):
        raise FormatError(f"{what} must be an object keyed by degree")
    ring = source.backend.ring
    comps = {}
    for key, value in data.items():
        n = _degree(key, what)
        comps[n] = _matrix_from_json(ring, target.rank(n), source.rank(n),
                                     value, f"{what} at degree {n}")
    return comps


def _chain_map(source, target, comps, what: str) -> ChainMap:
    try:
        return ChainMap(source, target, comps)
    except AssertionError as exc:
        raise FormatError(f"{what} is not a chain map: {exc}") from None


def map_to_json(f: ChainMap) -> dict:
    return {
        "source": complex_to_json(f.source),
        "target": complex_to_json(f.target),
        "components": _components_to_json(f),
    }


def map_from_json(data) -> ChainMap:
    source = complex_from_json(_need(data, "source", "map"))
    target = complex_from_json(_need(data, "target", "map"))
    comps = _components_from_json(_need(data, "components", "map"),
                                  source, target, "components")
    return _chain_map(source, target, comps, "map")


# -- diagrams ------------------------------------------------------------


def _stage_of(data, what: str) -> int:
    stage = _need(data, "stage", what)
    if not isinstance(stage, int) or isinstance(stage, bool) or stage < 0:
        raise FormatError("stage must be a non-negative integer")
    return stage


def _structure_from_json(data, stage: int, entry_at, what: str) -> dict:
    """Decode horiz or vert component dicts against decoded entries."""
    if not isinstance(data, dict):
        raise FormatError(f'{what} must be an object keyed by "i,j"')
    out = {}
    step = (0, 1) if what == "horiz" else (1, 0)
    for key, value in data.items():
        i, j = _cell(key, what)
        src, dst = (i, j), (i + step[0], j + step[1])
        if not (0 <= dst[0] <= stage and 0 <= dst[1] <= stage):
            raise FormatError(f"{what}: cell {key!r} outside stage {stage}")
        comps = _components_from_json(value, entry_at(src), entry_at(dst),
                                      f"{what} {key}")
        out[src] = _chain_map(entry_at(src), entry_at(dst), comps, f"{what} {key}")
    return out


def bispectrum_to_json(b: Bispectrum) -> dict:
    return {
        "stage": b.stage,
        "entries": {_cell_key(cell): complex_to_json(b.entries[cell])
                    for cell in sorted(b.entries)},
        "horiz": {_cell_key(cell): _components_to_json(b.horiz[cell])
                  for cell in sorted(b.horiz)},
        "vert": {_cell_key(cell): _components_to_json(b.vert[cell])
                 for cell in sorted(b.vert)},
    }


def bispectrum_from_json(data) -> Bispectrum:
    stage = _stage_of(data, "bispectrum")
    entries = {}
    for key, value in _need(data, "entries", "bispectrum").items():
        entries[_cell(key, "entries")] = complex_from_json(value)
    for cell in _cells(stage):
        if cell not in entries:
            raise FormatError(f"bispectrum is missing entry {_cell_key(cell)!r}")
    backends = {e.backend for e in entries.values()}
    if len(backends) != 1:
        raise FormatError("bispectrum entries mix backends")
    entry_at = entries.__getitem__
    horiz = _structure_from_json(_need(data, "horiz", "bispectrum"),
                                 stage, entry_at, "horiz")
    vert = _structure_from_json(_need(data, "vert", "bispectrum"),
                                stage, entry_at, "vert")
    try:
        return Bispectrum(backends.pop(), stage, entries, horiz, vert)
    except AssertionError as exc:
        raise FormatError(f"not a valid bispectrum: {exc}") from None


def param_to_json(p: ParamBispectrum) -> dict:
    out = bispectrum_to_json(p.totals())
    out["base"] = complex_to_json(p.base)
    out["sections"] = {_cell_key(cell): _components_to_json(x.section)
                       for cell, x in sorted(p.entries.items())}
    out["retractions"] = {_cell_key(cell): _components_to_json(x.retraction)
                          for cell, x in sorted(p.entries.items())}
    return out


def param_from_json(data) -> ParamBispectrum:
    base = complex_from_json(_need(data, "base", "parameterized diagram"))
    totals = bispectrum_from_json(data)
    secs = _need(data, "sections", "parameterized diagram")
    rets = _need(data, "retractions", "parameterized diagram")
    entries = {}
    for cell in _cells(totals.stage):
        key = _cell_key(cell)
        total = totals.entries[cell]
        for name, table in (("sections", secs), ("retractions", rets)):
            if not isinstance(table, dict) or key not in table:
                raise FormatError(f"{name} is missing cell {key!r}")
        sec = _chain_map(base, total,
                         _components_from_json(secs[key], base, total,
                                               f"section {key}"),
                         f"section {key}")
        ret = _chain_map(total, base,
                         _components_from_json(rets[key], total, base,
                                               f"retraction {key}"),
                         f"retraction {key}")
        try:
            entries[cell] = RetractiveObject(base, total, sec, ret)
        except AssertionError as exc:
            raise FormatError(f"cell {key}: {exc}") from None
    try:
        return ParamBispectrum(base, totals.stage, entries, totals.horiz,
                               totals.vert)
    except AssertionError as exc:
        raise FormatError(f"not a valid parameterized diagram: {exc}") from None


# -- top level -----------------------------------------------------------


def to_json(obj) -> dict:
    if isinstance(obj, ParamBispectrum):
        return param_to_json(obj)
    if isinstance(obj, Bispectrum):
        return bispectrum_to_json(obj)
    if isinstance(obj, ChainMap):
        return map_to_json(obj)
    if isinstance(obj, ChainComplex):
        return complex_to_json(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(data):
    """Decode any supported object, sniffing the kind from its keys."""
    if not isinstance(data, dict):
        raise FormatError("payload must be a JSON object")
    if "sections" in data:
        return param_from_json(data)
    if "entries" in data:
        return bispectrum_from_json(data)
    if "components" in data:
        return map_from_json(data)
    return complex_from_json(data)


def dumps(obj) -> str:
    return json.dumps(to_json(obj), sort_keys=True, indent=2)


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from None
    return from_json(data)
