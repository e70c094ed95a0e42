#!/usr/bin/env python3
"""Regenerate the bundled synthetic 2-d benchmark sets as ARFF files.

Every set is produced deterministically from a fixed per-set seed, so the
committed ARFF files can be rebuilt byte-for-byte with:

    python3 datasets/make_synthetic.py [outdir]

Only numpy is required.
"""
import sys
import numpy as np


def to_arff(name, X, y, class_names):
    lines = [f"% synthetic set '{name}', regenerate with datasets/make_synthetic.py"]
    lines.append(f"@relation {name}")
    for j in range(X.shape[1]):
        lines.append(f"@attribute x{j + 1} numeric")
    lines.append("@attribute class {" + ",".join(class_names) + "}")
    lines.append("@data")
    for row, lab in zip(X, y):
        vals = ",".join(f"{v:.6f}" for v in row)
        lines.append(f"{vals},{class_names[lab]}")
    return "\n".join(lines) + "\n"


def moons(rng, n0, n1, noise, scale=1.0):
    t0 = rng.uniform(0, np.pi, n0)
    t1 = rng.uniform(0, np.pi, n1)
    x0 = np.column_stack([np.cos(t0), np.sin(t0)])
    x1 = np.column_stack([1 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([x0, x1]) * scale
    X += rng.normal(0, noise, X.shape)
    y = np.array([0] * n0 + [1] * n1)
    return X, y


def banana2d(rng):
    return moons(rng, 100, 100, 0.18, scale=1.2)


def halfrings1(rng):
    return moons(rng, 100, 100, 0.10)


def halfrings2(rng):
    return moons(rng, 140, 70, 0.22)


def check2d(rng):
    n = 200
    X = rng.uniform(0, 1, (n, 2))
    y = ((X[:, 0] > 0.5).astype(int) + (X[:, 1] > 0.5).astype(int)) % 2
    return X, y


def gausssand(rng):
    # tight blob buried in a uniform square of "sand"
    n_blob, n_sand = 70, 140
    blob = rng.normal(0, 0.18, (n_blob, 2))
    sand = rng.uniform(-1.5, 1.5, (n_sand, 2))
    X = np.vstack([blob, sand])
    y = np.array([0] * n_blob + [1] * n_sand)
    return X, y


def ring2d(rng):
    n_in, n_out = 100, 100
    r_in = rng.uniform(0, 0.52, n_in) ** 0.5
    a_in = rng.uniform(0, 2 * np.pi, n_in)
    r_out = rng.uniform(0.72, 1.0, n_out)
    a_out = rng.uniform(0, 2 * np.pi, n_out)
    inner = np.column_stack([r_in * np.cos(a_in), r_in * np.sin(a_in)])
    outer = np.column_stack([r_out * np.cos(a_out), r_out * np.sin(a_out)])
    X = np.vstack([inner, outer]) + rng.normal(0, 0.04, (n_in + n_out, 2))
    y = np.array([0] * n_in + [1] * n_out)
    return X, y


def spirals1(rng):
    n = 100
    t0 = rng.uniform(0.4, 2.9 * np.pi * 0.5, n) * 1.6
    t1 = rng.uniform(0.4, 2.9 * np.pi * 0.5, n) * 1.6
    x0 = np.column_stack([t0 * np.cos(t0), t0 * np.sin(t0)])
    x1 = np.column_stack([t1 * np.cos(t1 + np.pi), t1 * np.sin(t1 + np.pi)])
    X = np.vstack([x0, x1]) / 8.0
    X += rng.normal(0, 0.055, X.shape)
    y = np.array([0] * n + [1] * n)
    return X, y


def gauss3(rng):
    # three overlapping blobs, mildly imbalanced
    n = (80, 70, 60)
    centers = [(-1.0, 0.0), (1.0, 0.3), (0.0, 1.4)]
    sds = (0.55, 0.45, 0.5)
    parts, labs = [], []
    for c, (cx, cy) in enumerate(centers):
        parts.append(rng.normal(0, sds[c], (n[c], 2)) + [cx, cy])
        labs += [c] * n[c]
    return np.vstack(parts), np.array(labs)


SETS = {
    "banana2d": (banana2d, 20260801, 2),
    "halfrings1": (halfrings1, 20260802, 2),
    "halfrings2": (halfrings2, 20260803, 2),
    "check2d": (check2d, 20260804, 2),
    "gausssand": (gausssand, 20260805, 2),
    "ring2d": (ring2d, 20260806, 2),
    "spirals1": (spirals1, 20260807, 2),
    "gauss3": (gauss3, 20260808, 3),
}


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "datasets"
    for name, (fn, seed, n_classes) in SETS.items():
        rng = np.random.default_rng(seed)
        X, y = fn(rng)
        class_names = [f"c{i}" for i in range(n_classes)]
        path = f"{outdir}/{name}.arff"
        with open(path, "w") as fh:
            fh.write(to_arff(name, X, y, class_names))
        sizes = np.bincount(y)
        ir = np.mean(sizes.max() / sizes)
        print(f"{name}: n={len(y)} d=2 classes={n_classes} sizes={list(sizes)} IR={ir:.2f}")


if __name__ == "__main__":
    main()
