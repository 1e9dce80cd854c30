#!/usr/bin/env python3
"""Regenerate the bundled UCI CSV files under data/uci/.

The files are exported from offline copies shipped inside well-known Python
packages, so no network access is required:

  wine    scikit-learn  (sklearn.datasets.load_wine)          178 x 13, 3 classes
  glass   rdatasets     (MASS::fgl, UCI glass identification) 214 x 9,  6 classes
  libras  keel-ds       (KEEL movement_libras)                 360 x 90, 15 classes

Usage: python3 tools/prepare_uci_data.py [out_dir]
"""
import csv
import os
import sys
from importlib import resources


def fmt(v):
    return "%.10g" % float(v)


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def wine(out):
    from sklearn.datasets import load_wine

    d = load_wine()
    names = [n.replace("/", "_") for n in d.feature_names]
    rows = [[fmt(v) for v in x] + [f"class_{int(t)}"] for x, t in zip(d.data, d.target)]
    write(os.path.join(out, "wine.csv"), names + ["class"], rows)


def glass(out):
    import pandas as pd

    pkl = resources.files("rdatasets") / "_data" / "MASS" / "fgl.pkl.compress"
    d = pd.read_pickle(str(pkl), compression="xz")
    feats = ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"]
    rows = [[fmt(r[f]) for f in feats] + [str(r["type"])] for _, r in d.iterrows()]
    write(os.path.join(out, "glass.csv"), feats + ["class"], rows)


def libras(out):
    dat = resources.files("keel_ds") / "data" / "balanced" / "raw" / "movement_libras.dat"
    rows = []
    for line in dat.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        rows.append([fmt(c) for c in cells[:-1]] + [f"move_{cells[-1]}"])
    m = len(rows[0]) - 1
    write(os.path.join(out, "libras.csv"), [f"f{j}" for j in range(m)] + ["class"], rows)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data", "uci")
    os.makedirs(out, exist_ok=True)
    wine(out)
    glass(out)
    libras(out)
