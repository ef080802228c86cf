"""Deterministic ground-truth visual data tables from chart annotations."""

from .builder import build_vdt, sort_annotation
from .colors import (
    ColorPalette,
    OverrideTable,
    css3_palette,
    default_overrides,
    hex_to_rgb,
    nearest_color,
    rgb_to_hex,
)
from .svg import normalize_color, parse_svg_chart

__all__ = [
    "ColorPalette",
    "OverrideTable",
    "build_vdt",
    "css3_palette",
    "default_overrides",
    "hex_to_rgb",
    "nearest_color",
    "normalize_color",
    "parse_svg_chart",
    "rgb_to_hex",
    "sort_annotation",
]
