#!/usr/bin/env python3
"""Regenerates encoding.json, chart.png, paragraph.txt and gold.json for the
bundled cases from the definitions below and each case's fixture.json.

    python3 tools/make_cases.py
"""

import json
import math
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

ROOT = Path(__file__).resolve().parent.parent
CHAR_W = 7
TEXT_H = 14
MARK = (70, 130, 180)

CASES = {
    "data/corpus/deptype": dict(
        chart="line", size=(480, 420),
        x=dict(kind="linear", domain=[1e5, 1e8],
               labels=[("100 thousand", 1e5), ("1 million", 1e6),
                       ("10 million", 1e7), ("100 million", 1e8)]),
        y=dict(kind="linear", domain=[0, 30], labels=[0, 10, 20, 30]),
        color=dict(labels={"DepType": (214, 39, 40), "Baseline": (31, 119, 180),
                           "Oracle": (44, 160, 44)}),
        gold=[dict(phrases=["100 million", "DepType", "27.0%"],
                   elements=["x-label-100-million", "legend-deptype", "y-label-30"])],
    ),
    "data/corpus/numeracy": dict(
        chart="bar", size=(440, 400),
        x=dict(kind="ordinal", domain=["USA", "England", "Italy", "Spain"]),
        y=dict(kind="linear", domain=[0, 50], labels=[0, 10, 20, 30, 40, 50]),
        series={None: [39, 24, 28, 30]},
        gold=[dict(phrases=["USA", "40 percent"], elements=["x-label-usa", "y-label-40"]),
              dict(phrases=["Spain", "30 percent"], elements=["x-label-spain", "y-label-30"])],
    ),
    "data/corpus/lifespan": dict(
        chart="scatter", size=(480, 420),
        x=dict(kind="linear", domain=[0, 60], title="Income", labels=[0, 20, 40, 60]),
        y=dict(kind="linear", domain=[40, 90], title="Lifespan",
               labels=[40, 50, 60, 70, 80, 90]),
        color=dict(labels={"Europe": (31, 119, 180), "Africa": (255, 127, 14),
                           "Asia": (44, 160, 44)}),
        gold=[dict(phrases=["Europe", "lifespan", "82 years"],
                   elements=["legend-europe", "y-title", "y-label-80"]),
              dict(phrases=["Africa", ("lifespan", 1), "60 years"],
                   elements=["legend-africa", "y-title", "y-label-60"])],
    ),
    "data/corpus/oracle": dict(
        chart="line", size=(480, 460),
        x=dict(kind="linear", domain=[0, 10], range=[40, 440], title="k",
               labels=[0, 2, 4, 6, 8, 10]),
        y=dict(kind="linear", domain=[0, 100], range=[400, 20], title="Accuracy (%)",
               labels=[0, 20, 40, 60, 80, 100]),
        color=dict(labels={"Oracle": (214, 39, 40), "Greedy": (31, 119, 180),
                           "Random": (127, 127, 127)}),
        series={"Oracle": [40, 70, 85, 91, 94, 96.23],
                "Greedy": [35, 55, 66, 72, 75, 77],
                "Random": [20, 26, 30, 33, 35, 36]},
        # Annotated as one "k=10" phrase, as a reader would mark it.
        gold=[dict(phrases=["k=10", "Oracle", "96.23%"],
                   elements=["x-label-10", "legend-oracle", "y-label-100"])],
    ),
    "data/corpus/survey": dict(
        chart="bar", size=(460, 420),
        x=dict(kind="ordinal", domain=["2018", "2019", "2020"]),
        y=dict(kind="linear", domain=[0, 100], title="Share (%)",
               labels=[0, 20, 40, 60, 80, 100]),
        color=dict(labels={"Men": (31, 119, 180), "Women": (255, 127, 14)}),
        series={"Men": [45, 41, 36], "Women": [55, 59, 64]},
        gold=[dict(phrases=["2020", "women", "share", "64%"],
                   elements=["x-label-2020", "legend-women", "y-title", "y-label-60"]),
              dict(phrases=["Men", ("share", 1), "36%"],
                   elements=["legend-men", "y-title", "y-label-40"])],
    ),
    "data/corpus/sales": dict(
        chart="line", size=(480, 400),
        x=dict(kind="linear", domain=[1925, 2010], labels=[1925, 1950, 1975, 2000]),
        y=dict(kind="linear", domain=[0, 500], title="Sales (units)",
               labels=[0, 100, 200, 300, 400, 500]),
        series={None: [60, 90, 150, 210, 300, 330, 420]},
        gold=[dict(phrases=["Sales", "1940", "1970"],
                   elements=["y-title", "x-label-1950", "x-label-1975"])],
    ),
    "tests/fixtures/badnumeric_a": dict(
        chart="line", size=(460, 400),
        x=dict(kind="linear", domain=[0, 50], title="Epoch", labels=[0, 10, 20, 30, 40, 50]),
        y=dict(kind="linear", domain=[0, 100], title="Accuracy (%)",
               labels=[0, 25, 50, 75, 100]),
        series={None: [10, 45, 62, 70, 74, 76]},
    ),
    "tests/fixtures/badnumeric_b": dict(
        chart="scatter", size=(460, 400),
        x=dict(kind="linear", domain=[0, 100], title="Coverage PC",
               labels=[0, 25, 50, 75, 100]),
        y=dict(kind="linear", domain=[0, 100], title="Precision",
               labels=[0, 25, 50, 75, 100]),
    ),
    "tests/fixtures/erroneous_a": dict(
        chart="line", size=(500, 400),
        x=dict(kind="linear", domain=[0, 100], range=[60, 440],
               labels=list(range(0, 101, 10))),
        y=dict(kind="linear", domain=[0, 100], range=[340, 40],
               title="Cumulative probability", labels=[0, 20, 40, 60, 80, 100]),
        series={None: [0, 30, 52, 66, 75, 80, 83, 84, 85, 86, 86]},
    ),
    "tests/fixtures/semantic": dict(
        chart="bar", size=(520, 400),
        x=dict(kind="ordinal", domain=["religious items or clothing", "food", "toys"]),
        y=dict(kind="linear", domain=[0, 50], labels=[0, 25, 50]),
        series={None: [42, 30, 18]},
    ),
}


def slug(text):
    out = "".join(c.lower() if c.isalnum() else "-" for c in str(text))
    while "--" in out:
        out = out.replace("--", "-")
    return out.strip("-")


def fmt(value):
    if isinstance(value, str):
        return value
    return str(int(value)) if float(value).is_integer() else str(value)


def text_box(cx, cy, text, size):
    w = CHAR_W * len(text) + 4
    x = min(max(0, cx - w / 2), size[0] - w)
    y = min(max(0, cy - TEXT_H / 2), size[1] - TEXT_H)
    return dict(x=round(x, 1), y=round(y, 1), w=w, h=TEXT_H)


def layout(spec):
    w, h = spec["size"]
    legend = "color" in spec
    xr = spec["x"].get("range", [60, w - 40])
    yr = spec["y"].get("range", [h - 60, 70 if legend else 30])
    return xr, yr


def to_pixel(axis, rng, value):
    if axis["kind"] == "ordinal":
        n = len(axis["domain"])
        i = axis["domain"].index(value)
        return rng[0] + (i + 0.5) * (rng[1] - rng[0]) / n
    lo, hi = axis["domain"]
    return rng[0] + (value - lo) / (hi - lo) * (rng[1] - rng[0])


def build_encoding(spec):
    size = spec["size"]
    xr, yr = layout(spec)
    elements, channels = [], {}

    for name, rng in (("x", xr), ("y", yr)):
        axis = spec[name]
        entry = {"scale": {"kind": axis["kind"], "domain": axis["domain"], "range": rng},
                 "labelIds": []}
        if "title" in axis:
            tid = f"{name}-title"
            if name == "x":
                box = text_box((xr[0] + xr[1]) / 2, yr[0] + 40, axis["title"], size)
            else:
                length = CHAR_W * len(axis["title"]) + 4
                cy = (yr[0] + yr[1]) / 2
                box = dict(x=2, y=round(max(0, cy - length / 2), 1), w=TEXT_H, h=length)
            elements.append(dict(id=tid, text=axis["title"], role=f"{name}-axis-title",
                                 bbox=box))
            entry["titleId"] = tid
        labels = axis.get("labels", axis["domain"] if axis["kind"] == "ordinal" else [])
        for label in labels:
            text, value = (label if isinstance(label, tuple) else (fmt(label), label))
            pos = to_pixel(axis, rng, value if axis["kind"] == "linear" else text)
            lid = f"{name}-label-{slug(text)}"
            if name == "x":
                box = text_box(pos, yr[0] + 16, text, size)
            else:
                w = CHAR_W * len(text) + 4
                box = dict(x=round(max(0, xr[0] - 8 - w), 1),
                           y=round(pos - TEXT_H / 2, 1), w=w, h=TEXT_H)
            element = dict(id=lid, text=text, role=f"{name}-axis-label", bbox=box)
            if axis["kind"] == "linear":
                element["numericValue"] = value
            elements.append(element)
            entry["labelIds"].append(lid)
        channels[name] = entry

    if "color" in spec:
        entry = {"labelIds": [], "colors": {}}
        longest = max(len(t) for t in spec["color"]["labels"])
        x0 = size[0] - (CHAR_W * longest + 4) - 24
        for i, (text, rgb) in enumerate(spec["color"]["labels"].items()):
            lid = f"legend-{slug(text)}"
            elements.append(dict(id=lid, text=text, role="legend-label",
                                 bbox=dict(x=x0 + 16, y=6 + i * 18, w=CHAR_W * len(text) + 4,
                                           h=TEXT_H)))
            entry["labelIds"].append(lid)
            entry["colors"][lid] = list(rgb)
        channels["color"] = entry

    return {"chartType": spec["chart"], "imageSize": {"w": size[0], "h": size[1]},
            "channels": channels, "elements": elements}


def series_values(spec, n):
    if "series" in spec:
        return spec["series"]
    keys = list(spec["color"]["labels"]) if "color" in spec else [None]
    out = {}
    for k, key in enumerate(keys):
        out[key] = [50 + 35 * math.sin(0.9 * i + 1.7 * k) for i in range(n)]
    return out


def draw_chart(spec, encoding, path):
    size = spec["size"]
    xr, yr = layout(spec)
    img = Image.new("RGB", size, (255, 255, 255))
    d = ImageDraw.Draw(img)
    font = ImageFont.load_default()
    colors = spec.get("color", {}).get("labels", {})

    def color_of(key):
        return tuple(colors[key]) if key is not None else MARK

    xa, ya = spec["x"], spec["y"]
    ylo, yhi = ya["domain"]
    if xa["kind"] == "ordinal":
        cats = xa["domain"]
        vals = series_values(spec, len(cats))
        band = (xr[1] - xr[0]) / len(cats)
        width = band * 0.7 / len(vals)
        for j, (key, ys) in enumerate(vals.items()):
            for i, v in enumerate(ys):
                left = xr[0] + i * band + band * 0.15 + j * width
                top = to_pixel(ya, yr, v)
                d.rectangle([left, top, left + width - 1, yr[0]], fill=color_of(key))
    else:
        xlo, xhi = xa["domain"]
        n = max(len(v) for v in series_values(spec, 7).values())
        vals = series_values(spec, n)
        for key, ys in vals.items():
            pts = [(to_pixel(xa, xr, xlo + (xhi - xlo) * i / (len(ys) - 1)),
                    to_pixel(ya, yr, min(max(v, ylo), yhi))) for i, v in enumerate(ys)]
            if spec["chart"] == "line":
                d.line(pts, fill=color_of(key), width=2)
            for px, py in pts:
                r = 4 if spec["chart"] == "scatter" else 2
                d.ellipse([px - r, py - r, px + r, py + r], fill=color_of(key))

    d.line([(xr[0], yr[0]), (xr[1], yr[0])], fill=(0, 0, 0))
    d.line([(xr[0], yr[0]), (xr[0], yr[1])], fill=(0, 0, 0))
    for e in encoding["elements"]:
        b = e["bbox"]
        if e["role"] == "legend-label":
            rgb = tuple(encoding["channels"]["color"]["colors"][e["id"]])
            d.rectangle([b["x"] - 14, b["y"] + 2, b["x"] - 5, b["y"] + 11], fill=rgb)
        if e["role"] == "y-axis-title":
            tile = Image.new("RGB", (int(b["h"]), int(b["w"])), (255, 255, 255))
            ImageDraw.Draw(tile).text((2, 1), e["text"], fill=(0, 0, 0), font=font)
            img.paste(tile.rotate(90, expand=True), (int(b["x"]), int(b["y"])))
        else:
            d.text((b["x"] + 2, b["y"] + 1), e["text"], fill=(0, 0, 0), font=font)
    img.save(path)


def span_of(paragraph, phrase):
    text, occurrence = phrase if isinstance(phrase, tuple) else (phrase, 0)
    start = -1
    for _ in range(occurrence + 1):
        start = paragraph.index(text, start + 1)
    return {"start": start, "end": start + len(text)}


def main():
    for rel, spec in CASES.items():
        case = ROOT / rel
        fixture = json.loads((case / "fixture.json").read_text())
        paragraph = fixture["paragraph"]
        (case / "paragraph.txt").write_text(paragraph + "\n")
        encoding = build_encoding(spec)
        (case / "encoding.json").write_text(json.dumps(encoding, indent=2) + "\n")
        draw_chart(spec, encoding, case / "chart.png")
        if "gold" in spec:
            groups = [{"phrases": [span_of(paragraph, p) for p in g["phrases"]],
                       "elementIds": g["elements"]} for g in spec["gold"]]
            gold = {"annotator": "a1", "guidelineVersion": "1", "groups": groups}
            (case / "gold.json").write_text(json.dumps(gold, indent=2) + "\n")
        print("wrote", rel)


if __name__ == "__main__":
    main()
