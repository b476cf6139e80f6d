"""JSON formats for complexes, maps, sequences and endomorphism squares.

A complex is ``{"ring": "Z"|"Q"|{"Fp": p}, "ranks": {"0": 3}, "d": {"0": [[...]]}}``
with degrees as strings and ``d["n"]`` the matrix ``E^n -> E^{n+1}``.  A map
is ``{"source": id, "target": id, "degree": k, "components": {"n": [[...]]}}``.
A bundle collects named complexes and maps:
``{"complexes": {id: complex}, "maps": {id: map}}``, optionally with
``"ses": {"E": id, "G": id, "w": id}`` and ``"square": {"phi": id, "psi": id, "s": id}``;
maps of a bundle with an ``"ses"`` entry may use ``"F"`` for the glued complex.
"""

from __future__ import annotations

import json

from .complexes import ChainComplex, ChainMap, Homotopy, NotSquareZero, SemiSplitSES, ShapeMismatch
from .linalg import DimensionError, Matrix, Ring, RingError


class InputError(ValueError):
    code = "E_INPUT"


class MalformedJSON(InputError):
    code = "E_JSON"


class BadRing(InputError):
    code = "E_RING"


class BadShape(InputError):
    code = "E_SHAPE"


class BadDifferential(InputError):
    code = "E_DSQUARE"


class BadMap(InputError):
    code = "E_NOT_CHAIN"


def canonical(obj) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def _degree(key) -> int:
    try:
        if isinstance(key, bool):
            raise ValueError
        return int(key)
    except (TypeError, ValueError):
        raise MalformedJSON(f"degree keys are integer strings, got {key!r}") from None


def _obj(x, what):
    if not isinstance(x, dict):
        raise MalformedJSON(f"{what} must be a JSON object")
    return x


def ring_from_json(obj) -> Ring:
    try:
        return Ring.from_json(obj)
    except RingError as exc:
        raise BadRing(str(exc)) from None


def complex_to_json(E: ChainComplex) -> dict:
    return {"ring": E.ring.to_json(),
            "ranks": {str(n): r for n, r in sorted(E.ranks.items())},
            "d": {str(n): E.d(n).to_json() for n in E.degrees
                  if E.rank(n + 1) and not E.d(n).is_zero()}}


def complex_from_json(obj, ring: Ring | None = None) -> ChainComplex:
    obj = _obj(obj, "complex")
    if "ranks" not in obj:
        raise MalformedJSON("complex needs 'ranks'")
    if ring is None:
        if "ring" not in obj:
            raise MalformedJSON("complex needs 'ring'")
        ring = ring_from_json(obj["ring"])
    elif "ring" in obj and ring_from_json(obj["ring"]) != ring:
        raise BadRing("complexes of one bundle must share a ring")
    ranks = {}
    for k, r in _obj(obj["ranks"], "ranks").items():
        if not isinstance(r, int) or isinstance(r, bool) or r < 0:
            raise BadShape(f"rank in degree {k} must be a nonnegative integer")
        if r:
            ranks[_degree(k)] = r
    d = {}
    for k, rows in _obj(obj.get("d", {}), "d").items():
        n = _degree(k)
        try:
            d[n] = Matrix.from_json(ring, rows, ranks.get(n + 1, 0), ranks.get(n, 0))
        except DimensionError as exc:
            raise BadShape(f"d in degree {n}: {exc}") from None
        except RingError as exc:
            raise BadRing(f"d in degree {n}: {exc}") from None
    try:
        return ChainComplex(ring, ranks, {n: m for n, m in d.items() if m.rows and m.cols})
    except NotSquareZero as exc:
        raise BadDifferential(str(exc)) from None
    except ShapeMismatch as exc:
        raise BadShape(str(exc)) from None


def map_to_json(f: ChainMap, source: str, target: str) -> dict:
    return {"source": source, "target": target, "degree": f.degree,
            "components": {str(n): m.to_json() for n, m in sorted(f.components().items())
                           if m.rows and m.cols and not m.is_zero()}}


def map_from_json(obj, complexes: dict, check_chain: bool = True) -> ChainMap:
    obj = _obj(obj, "map")
    for key in ("source", "target"):
        if obj.get(key) not in complexes:
            raise MalformedJSON(f"map {key} {obj.get(key)!r} is not a known complex")
    E, F = complexes[obj["source"]], complexes[obj["target"]]
    k = obj.get("degree", 0)
    if not isinstance(k, int) or isinstance(k, bool):
        raise MalformedJSON("map degree must be an integer")
    comps = {}
    for key, rows in _obj(obj.get("components", {}), "components").items():
        n = _degree(key)
        try:
            comps[n] = Matrix.from_json(E.ring, rows, F.rank(n + k), E.rank(n))
        except DimensionError as exc:
            raise BadShape(f"component {n}: {exc}") from None
        except RingError as exc:
            raise BadRing(f"component {n}: {exc}") from None
    try:
        f = ChainMap(E, F, {n: m for n, m in comps.items() if m.rows and m.cols}, k)
    except ShapeMismatch as exc:
        raise BadShape(str(exc)) from None
    if check_chain and not f.is_chain():
        raise BadMap(f"map {obj['source']} -> {obj['target']} is not a chain map")
    return f


class Bundle:
    """Named complexes and maps read from one file."""

    def __init__(self, complexes: dict, maps: dict, raw: dict):
        self.complexes, self.maps, self.raw = complexes, maps, raw
        self.ses = None
        self.square = None

    def complex(self, name=None) -> ChainComplex:
        if name is None:
            if len(self.complexes) != 1 and "E" not in self.complexes:
                raise MalformedJSON("bundle has several complexes; name one")
            name = "E" if "E" in self.complexes else next(iter(self.complexes))
        if name not in self.complexes:
            raise MalformedJSON(f"no complex {name!r} in input")
        return self.complexes[name]

    def map(self, name=None) -> ChainMap:
        if name is None:
            if len(self.maps) != 1:
                raise MalformedJSON("bundle has several maps; name one")
            name = next(iter(self.maps))
        if name not in self.maps:
            raise MalformedJSON(f"no map {name!r} in input")
        return self.maps[name]


def bundle_from_json(obj) -> Bundle:
    obj = _obj(obj, "input")
    if "ranks" in obj:
        E = complex_from_json(obj)
        return Bundle({"E": E}, {}, obj)
    comps_raw = _obj(obj.get("complexes", {}), "complexes")
    if not comps_raw:
        raise MalformedJSON("input has no complexes")
    ring = None
    complexes = {}
    for name, c in sorted(comps_raw.items()):
        C = complex_from_json(c, ring)
        ring = C.ring
        complexes[name] = C
    maps_raw = _obj(obj.get("maps", {}), "maps")
    maps = {}
    ses = None
    if "ses" in obj:
        ref = _obj(obj["ses"], "ses")
        try:
            E, G = complexes[ref["E"]], complexes[ref["G"]]
            w = map_from_json(maps_raw[ref["w"]], complexes, check_chain=False)
        except KeyError as exc:
            raise MalformedJSON(f"ses refers to missing entry {exc}") from None
        try:
            ses = SemiSplitSES(E, G, w)
        except NotSquareZero as exc:
            raise BadDifferential(str(exc)) from None
        except ShapeMismatch as exc:
            raise BadShape(str(exc)) from None
        complexes = dict(complexes, F=ses.F)
    for name, m in sorted(maps_raw.items()):
        deg = m.get("degree", 0) if isinstance(m, dict) else 0
        maps[name] = map_from_json(m, complexes, check_chain=deg != -1)
    b = Bundle(complexes, maps, obj)
    b.ses = ses
    if "square" in obj:
        if ses is None:
            raise MalformedJSON("'square' needs an 'ses'")
        ref = _obj(obj["square"], "square")
        try:
            phi, psi, s = maps[ref["phi"]], maps[ref["psi"]], maps[ref["s"]]
        except KeyError as exc:
            raise MalformedJSON(f"square refers to missing map {exc}") from None
        h = Homotopy(ses.f @ phi, psi @ ses.f, s)
        if not h.verify():
            raise BadMap("s does not certify f phi ~ psi f")
        b.square = (phi, psi, h)
    return b


def load(path) -> Bundle:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedJSON(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    return bundle_from_json(obj)


def ses_to_json(ses: SemiSplitSES, square=None) -> dict:
    out = {"complexes": {"E": complex_to_json(ses.E), "G": complex_to_json(ses.G)},
           "maps": {"w": map_to_json(ses.w, "G", "E")},
           "ses": {"E": "E", "G": "G", "w": "w"}}
    if square is not None:
        phi, psi, s = square
        out["maps"].update({"phi": map_to_json(phi, "E", "E"), "psi": map_to_json(psi, "F", "F"),
                            "s": map_to_json(s.s, "E", "F")})
        out["square"] = {"phi": "phi", "psi": "psi", "s": "s"}
    return out
