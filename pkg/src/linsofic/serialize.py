"""JSON interchange for fields, matrices, groups, windows and almost homomorphisms.

An almost homomorphism is stored as a manifest::

    {"window": <path or inline window>, "mode": "rank" | "jordan",
     "images": {<element name>: <path or inline matrix>, ...}}

Relative paths are resolved against the manifest's directory.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .almosthom import AlmostHom, FiniteGroup, GroupWindow, window_from_finite_group
from .errors import LinsoficError, ShapeError
from .fields import Field, field_make
from .matrix import Matrix


class InputError(LinsoficError):
    """A file could not be read or does not match its format."""


def read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def dumps(obj) -> str:
    """Canonical text: sorted keys, so equal objects give identical bytes."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")


def frac_to_json(x: Fraction | None):
    if x is None:
        return None
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def frac_from_json(obj) -> Fraction:
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        return Fraction(obj)
    try:
        return Fraction(obj["num"], obj["den"])
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"malformed fraction {obj!r}") from exc


def _resolve(ref, base: Path):
    """Inline objects pass through; strings are paths relative to ``base``."""
    if isinstance(ref, str):
        return read_json(base / ref)
    return ref


def load_field(ref, base: Path = Path(".")) -> Field:
    return field_make(_resolve(ref, base))


def load_matrix(ref, base: Path = Path("."), field: Field | None = None) -> Matrix:
    return Matrix.from_json(_resolve(ref, base), field)


def load_group(ref, base: Path = Path(".")) -> FiniteGroup:
    return FiniteGroup.from_json(_resolve(ref, base))


def load_window(ref, base: Path = Path(".")) -> GroupWindow:
    """A window file; a table without gaps is validated as a full group first."""
    obj = _resolve(ref, base)
    table = obj.get("table") if isinstance(obj, dict) else None
    if table is not None and all(x is not None for row in table for x in row):
        return window_from_finite_group(FiniteGroup.from_json(obj))
    return GroupWindow.from_json(obj)


def hom_from_manifest(obj: dict, base: Path = Path("."), check: bool = True) -> AlmostHom:
    if not isinstance(obj, dict) or "window" not in obj or "images" not in obj:
        raise InputError("almost-homomorphism manifest needs 'window' and 'images'")
    window = load_window(obj["window"], base)
    by_name = {window.name(g): g for g in window.elements}
    images = {}
    for name, ref in obj["images"].items():
        if name not in by_name:
            raise InputError(f"image given for {name!r}, which is not a window element")
        images[by_name[name]] = load_matrix(ref, base)
    missing = [nm for nm in by_name if by_name[nm] not in images]
    if missing:
        raise ShapeError(f"manifest has no image for {missing[:5]}")
    return AlmostHom(window, images, obj.get("mode", "rank"), check=check)


def load_hom(path, check: bool = True) -> AlmostHom:
    path = Path(path)
    return hom_from_manifest(read_json(path), path.parent, check)


def hom_to_json(phi: AlmostHom) -> dict:
    """Fully inline manifest (used for counterexamples)."""
    w = phi.window
    return {
        "window": w.to_json(),
        "mode": phi.mode,
        "images": {w.name(g): phi[g].to_json() for g in w.elements},
    }


def save_hom(phi: AlmostHom, path, inline: bool = False) -> Path:
    """Write the manifest at ``path``; unless ``inline``, the window and each
    image go to sibling files named after the manifest's stem."""
    path = Path(path)
    if inline:
        write_json(hom_to_json(phi), path)
        return path
    w = phi.window
    stem = path.stem
    win_name = f"{stem}.window.json"
    write_json(w.to_json(), path.parent / win_name)
    images = {}
    for i, g in enumerate(w.elements):
        fname = f"{stem}.img{i}.json"
        write_json(phi[g].to_json(), path.parent / fname)
        images[w.name(g)] = fname
    write_json({"window": win_name, "mode": phi.mode, "images": images}, path)
    return path


def is_hom_manifest(obj) -> bool:
    return isinstance(obj, dict) and "images" in obj and "window" in obj


def is_matrix(obj) -> bool:
    return isinstance(obj, dict) and "entries" in obj and "field" in obj
