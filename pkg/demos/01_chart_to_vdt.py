"""
From an SVG chart to a visual data table
========================================

Render a synthetic chart, read it back, and compare the rebuilt table with
the generator's own ground truth.
"""

from chartshot.answer_eval import rms_f1, rnss
from chartshot.bench import generate_synthetic_charts
from chartshot.chart_data import parse_vdt_text, render_vdt_text
from chartshot.vdt_builder import build_vdt, nearest_color, parse_svg_chart

# a handful of charts, fully determined by the seed
charts = [e["chart"] for e in generate_synthetic_charts(4, seed=3)["charts"]]
chart = charts[0]
print(chart.chart_type, "chart,", len(chart.svg), "bytes of SVG")

# marks and text come back out of the SVG with their boxes and fill colors
annotation = parse_svg_chart(chart.svg)
print(len(annotation.marks), "marks, first fill", annotation.marks[0].hex_color)
print("named as", nearest_color(annotation.marks[0].hex_color))

# ordering, color naming and table layout happen in build_vdt
vdt = build_vdt(annotation)
print(render_vdt_text(vdt).replace(" <0x0A> ", "\n"))

# the rebuilt table scores perfectly against the generator's answer
gold = parse_vdt_text(chart.vdt_text).table
print("RNSS", float(rnss(vdt.table, gold)), "RMS-F1", float(rms_f1(vdt.table, gold)[2]))
