"""JSON serialization for maps, grids and systems.

Map file format::

    {"domain": "[-1,1]" | "[0,1]",
     "breakpoints": [{"x": "p/q", "y": "p/q"}, ...]}

Rationals are written canonically (q > 0, gcd-reduced; integers without the
slash).  The parser reports the position of offending entries.
"""

from __future__ import annotations

import json

from .grid import FiniteGrid
from .plmap import PLMap, domain_from_label
from .rational import format_rational, parse_rational

SCHEMA = "plic/1"


class MapFormatError(ValueError):
    pass


def map_to_obj(f: PLMap) -> dict:
    return {
        "domain": f.domain.label,
        "breakpoints": [
            {"x": format_rational(x), "y": format_rational(y)} for x, y in f.points
        ],
    }


def map_from_obj(obj) -> PLMap:
    if not isinstance(obj, dict):
        raise MapFormatError("map object must be a JSON object")
    try:
        domain = domain_from_label(obj["domain"])
    except (KeyError, ValueError) as exc:
        raise MapFormatError(f"bad or missing domain: {exc}") from None
    raw = obj.get("breakpoints")
    if not isinstance(raw, list) or len(raw) < 2:
        raise MapFormatError("breakpoints must be a list of at least two entries")
    pts = []
    for i, entry in enumerate(raw):
        try:
            x = parse_rational(entry["x"])
            y = parse_rational(entry["y"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MapFormatError(f"breakpoint {i}: {exc}") from None
        if pts and x <= pts[-1][0]:
            raise MapFormatError(f"breakpoint {i}: abscissa {entry['x']} not increasing")
        if y < -1 or y > 1:
            raise MapFormatError(f"breakpoint {i}: value {entry['y']} outside [-1,1]")
        pts.append((x, y))
    try:
        return PLMap(domain, pts)
    except ValueError as exc:
        raise MapFormatError(str(exc)) from None


def dump_map(f: PLMap) -> str:
    return json.dumps(map_to_obj(f), indent=2) + "\n"


def load_map(text: str) -> PLMap:
    return map_from_obj(json.loads(text))


def read_map(path) -> PLMap:
    with open(path, "r", encoding="utf-8") as fh:
        return load_map(fh.read())


def write_map(path, f: PLMap) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_map(f))


def grid_to_obj(grid: FiniteGrid) -> list:
    return [format_rational(p) for p in grid]


def grid_from_obj(obj) -> FiniteGrid:
    if not isinstance(obj, list) or not obj:
        raise MapFormatError("grid must be a non-empty list of rationals")
    return FiniteGrid([parse_rational(s) for s in obj])


def system_to_obj(maps) -> list:
    return [map_to_obj(f) for f in maps]


def system_from_obj(obj) -> list[PLMap]:
    if isinstance(obj, dict) and "maps" in obj:
        obj = obj["maps"]
    if not isinstance(obj, list) or not obj:
        raise MapFormatError("system file must be a non-empty array of map objects")
    return [map_from_obj(m) for m in obj]


def read_system(path) -> list[PLMap]:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_obj(json.load(fh))
