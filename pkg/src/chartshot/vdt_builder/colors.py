"""Hex color -> natural-language color name."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InvalidHex, ValidationError

RGB = tuple[int, int, int]
_HEX_RE = re.compile(r"^[0-9a-fA-F]{6}$")


def hex_to_rgb(hex_color: str) -> RGB:
    if not isinstance(hex_color, str) or not _HEX_RE.match(hex_color):
        raise InvalidHex(f"not a 6-hex-digit color: {hex_color!r}")
    return tuple(int(hex_color[i : i + 2], 16) for i in (0, 2, 4))


def rgb_to_hex(rgb: Iterable[int]) -> str:
    return "".join(f"{int(c):02x}" for c in rgb)


@dataclass(frozen=True)
class ColorPalette:
    entries: tuple[tuple[str, RGB], ...]

    def __post_init__(self):
        entries = tuple((name, tuple(int(c) for c in rgb)) for name, rgb in self.entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValidationError("palette color names must be unique")
        if not entries:
            raise ValidationError("palette is empty")
        for name, rgb in entries:
            if len(rgb) != 3 or any(not 0 <= c <= 255 for c in rgb):
                raise ValidationError(f"bad rgb for {name!r}: {rgb}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_file(cls, path, include_css3: bool = True) -> "ColorPalette":
        """Read ``name #RRGGBB`` lines; the CSS3 set is merged in underneath."""
        merged = dict(css3_palette().entries) if include_css3 else {}
        merged.update(_read_palette_lines(Path(path).read_text(encoding="utf-8")))
        return cls(tuple(merged.items()))

    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    @cached_property
    def _index(self):
        # one point per distinct rgb; duplicate rgbs keep the smallest name
        by_rgb: dict[RGB, str] = {}
        for name, rgb in self.entries:
            if rgb not in by_rgb or name < by_rgb[rgb]:
                by_rgb[rgb] = name
        rgbs = sorted(by_rgb)
        points = np.array(rgbs, dtype=float)
        return cKDTree(points), rgbs, [by_rgb[r] for r in rgbs]


def _read_palette_lines(text: str) -> dict[str, RGB]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, hex_part = line.rpartition(" ")
        hex_part = hex_part.lstrip("#")
        if not name.strip():
            raise ValidationError(f"palette line {lineno}: missing name")
        out[name.strip()] = hex_to_rgb(hex_part)
    return out


@lru_cache(maxsize=1)
def css3_palette() -> ColorPalette:
    text = resources.files("chartshot.vdt_builder").joinpath("data/palette.txt").read_text("utf-8")
    return ColorPalette(tuple(_read_palette_lines(text).items()))


@dataclass(frozen=True)
class OverrideTable:
    mappings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for hex_color, name in dict(self.mappings).items():
            hex_to_rgb(hex_color)
            if not isinstance(name, str) or not name.strip():
                raise ValidationError(f"override for {hex_color} has an empty name")
            clean[hex_color.lower()] = name.strip()
        object.__setattr__(self, "mappings", clean)

    def get(self, hex_color: str) -> str | None:
        return self.mappings.get(hex_color.lower())

    def __contains__(self, hex_color: str) -> bool:
        return hex_color.lower() in self.mappings

    def __len__(self):
        return len(self.mappings)

    @classmethod
    def from_text(cls, text: str) -> "OverrideTable":
        out = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            hex_part, _, name = line.partition(" ")
            if not name.strip():
                raise ValidationError(f"override line {lineno}: missing name")
            out[hex_part.lstrip("#").lower()] = name.strip()
        return cls(out)

    @classmethod
    def from_file(cls, path) -> "OverrideTable":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_overrides() -> OverrideTable:
    text = resources.files("chartshot.vdt_builder").joinpath("data/overrides.txt").read_text("utf-8")
    return OverrideTable.from_text(text)


def euclidean_rgb(a: RGB, b: RGB) -> float:
    return float(sum((x - y) ** 2 for x, y in zip(a, b))) ** 0.5


def nearest_color(
    hex_color: str,
    palette: ColorPalette | None = None,
    overrides: OverrideTable | None = None,
    distance: Callable[[RGB, RGB], float] | None = None,
) -> str:
    """Name of the closest palette color, unless ``overrides`` has the exact hex.

    Ties go to the lexicographically smallest name. ``distance`` swaps the
    metric; the KD-tree path is only used for the default Euclidean RGB one.
    """
    rgb = hex_to_rgb(hex_color)
    if overrides is not None:
        hit = overrides.get(hex_color)
        if hit is not None:
            return hit
    palette = palette or css3_palette()

    if distance is not None:
        return min(palette.entries, key=lambda e: (distance(rgb, e[1]), e[0]))[0]

    tree, rgbs, names = palette._index
    d, _ = tree.query(rgb, k=1)
    # the tree only finds *a* nearest point; gather all within float slack and
    # settle ties on exact integer distances
    candidates = tree.query_ball_point(rgb, r=float(d) + 1e-6)
    best = min(
        candidates,
        key=lambda i: (sum((a - b) ** 2 for a, b in zip(rgb, rgbs[i])), names[i]),
    )
    return names[best]
