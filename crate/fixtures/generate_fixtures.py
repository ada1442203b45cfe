"""Regenerates the synthetic fixtures. Deterministic: uses only random.Random(seed)."""

import csv
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def write(path, header, rows):
    with open(os.path.join(HERE, path), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def fmt(v):
    return repr(round(v, 6))


def dye():
    rng = random.Random(8802)
    names = ["conj_length", "n_rings", "homo_lumo_gap", "dipole", "mol_weight", "n_hetero"]

    def features():
        return [
            rng.uniform(4, 30),
            float(rng.randint(1, 8)),
            rng.uniform(1.5, 4.0),
            rng.uniform(0, 12),
            rng.uniform(200, 900),
            float(rng.randint(0, 6)),
        ]

    def epsilon(f):
        base = 6000 * f[0] + 9000 * f[1] - 30000 * f[2] + 1500 * f[3] + 40 * f[4] + 2000 * f[5] + 60000
        return base + rng.uniform(-15000, 15000)

    rows = []
    for _ in range(8802):
        f = features()
        rows.append([fmt(v) for v in f] + [fmt(epsilon(f))])
    write("dye/DyeData.csv", names + ["epsilon"], rows)

    test = []
    for i in range(12):
        test.append([f"T{i + 1:03d}"] + [fmt(v) for v in features()])
    write("dye/TestData.csv", ["Tag"] + names, test)

    ext = []
    for i in range(40):
        v = 250000.0 if i == 0 else rng.uniform(100000, 400000)
        ext.append([f"D{i + 1:04d}", fmt(v)])
    write("dye/High_Extinction.csv", ["Tag", "ShouldBe"], ext)

    # A table whose class column needs wrangling: Solvent is categorical text.
    wr = []
    for i in range(60):
        f = features()
        wr.append([rng.choice(["water", "ethanol", "dmso"])] + [fmt(v) for v in f] + [fmt(epsilon(f))])
    write("dye/RawDyes.csv", ["Solvent"] + names + ["epsilon"], wr)


def kmeans1d():
    rng = random.Random(12)
    for i in range(10):
        n = rng.randint(4, 12)
        centers = [rng.uniform(-10, 10) for _ in range(rng.randint(1, 3))]
        pts = [rng.choice(centers) + rng.uniform(-2, 2) for _ in range(n)]
        write(f"kmeans1d/instance_{i:02d}.csv", ["x"], [[fmt(p)] for p in pts])


def linear():
    specs = [
        ("lin_a", [2.0, -1.0], 3.0, 50),
        ("lin_b", [0.5, 4.0, -2.5], -1.0, 80),
        ("lin_c", [10.0], 0.25, 30),
    ]
    rng = random.Random(3)
    for name, coef, icpt, n in specs:
        cols = [f"x{j + 1}" for j in range(len(coef))]
        rows = []
        for _ in range(n):
            x = [round(rng.uniform(-5, 5), 3) for _ in coef]
            rows.append([fmt(v) for v in x] + [fmt(icpt + sum(c * v for c, v in zip(coef, x)))])
        write(f"linear/{name}.csv", cols + ["y"], rows)
        over = [[str(k + 1)] + [fmt(round(rng.uniform(-5, 5), 3)) for _ in coef] for k in range(5)]
        write(f"linear/{name}_new.csv", ["id"] + cols, over)
        with open(os.path.join(HERE, f"linear/{name}.mql"), "w") as f:
            f.write(
                f"GENERATE PREDICTION y\nOVER {name}_new\nUSING ALGORITHM LinearRegression\n"
                f"LABEL id\nFEATURES {', '.join(cols)}\nFROM {name};\n"
            )


if __name__ == "__main__":
    dye()
    kmeans1d()
    linear()
