#!/usr/bin/env python3
"""Export the bundled real datasets (iris, wine, wdbc) from scikit-learn to ARFF.

    python3 datasets/export_sklearn.py [outdir]
"""
import sys
from sklearn import datasets as skd


def to_arff(name, X, y, feature_names, class_names):
    lines = [f"% '{name}' exported from scikit-learn by datasets/export_sklearn.py"]
    lines.append(f"@relation {name}")
    for fname in feature_names:
        safe = fname.strip().replace(" ", "_").replace("(", "").replace(")", "")
        lines.append(f"@attribute {safe} numeric")
    lines.append("@attribute class {" + ",".join(class_names) + "}")
    lines.append("@data")
    for row, lab in zip(X, y):
        vals = ",".join(repr(float(v)) for v in row)
        lines.append(f"{vals},{class_names[lab]}")
    return "\n".join(lines) + "\n"


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "datasets"
    for name, loader in [("iris", skd.load_iris), ("wine", skd.load_wine), ("wdbc", skd.load_breast_cancer)]:
        bunch = loader()
        class_names = [str(c).replace(" ", "_") for c in bunch.target_names]
        text = to_arff(name, bunch.data, bunch.target, list(bunch.feature_names), class_names)
        with open(f"{outdir}/{name}.arff", "w") as fh:
            fh.write(text)
        print(f"{name}: n={len(bunch.target)} d={bunch.data.shape[1]} classes={len(class_names)}")


if __name__ == "__main__":
    main()
