"""Write the fixture problem files used by the CLI walkthrough and the tests."""

import json
import sys
from fractions import Fraction
from pathlib import Path

from sparseres.oracles import simplex_support
from sparseres.subdivision import lifting_from_vertex_values

SQUARE = [[0, 0], [1, 0], [0, 1], [1, 1]]


def rationals(values):
    return [str(Fraction(v)) for v in values]


def simplex_lifting(k, vertex_values):
    pts = simplex_support(2, k)
    vals = lifting_from_vertex_values(pts, vertex_values)
    return [list(p) for p in pts], rationals(vals[p] for p in pts)


def problems():
    out = {}
    out["bilinear"] = {
        "supports": [SQUARE] * 3,
        "names": [[f"{c}{k}" for c in "abcd"] for k in (0, 1, 2)],
        "mode": "general",
        "q_polytope": [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]],
        "delta": ["2/3", "1/2"],
        "b0": [0, 0],
        "liftings": [["0", "1", "1", "2"], ["0", "0", "7", "7"], ["0", "14", "0", "14"]],
        "seed": 0,
    }
    out["univariate"] = {
        "supports": [[[0], [2], [4]], [[4], [8]]],
        "names": [["a", "b", "c"], ["d", "e"]],
        "mode": "unmixed",
        "lambda": "5/2",
        "delta": ["1/3"],
        "b0": [0],
        "liftings": [["0", "1"], ["0", "0"]],
        "seed": 0,
    }
    s1 = [list(p) for p in simplex_support(2, 1)]
    s2, w2 = simplex_lifting(2, {(0, 0): 1, (2, 0): 0, (0, 2): 1})
    s3, w3 = simplex_lifting(3, {(0, 0): 1, (3, 0): 1, (0, 3): 0})
    out["simplex_123"] = {
        "supports": [s1, s2, s3],
        "names": [[f"a{k}" for k in range(1, 4)], [f"b{k}" for k in range(1, 7)], [f"c{k}" for k in range(1, 11)]],
        "mode": "general",
        "q_polytope": [["0", "0"]],
        "delta": ["1/1000", "1/1000"],
        "b0": [0, 0],
        "liftings": [w2, w3, ["0"]],
        "seed": 0,
    }
    out["triangle_extra"] = {
        "supports": [SQUARE, [[0, 0], [1, 1]], [[1, 0], [0, 1]]],
        "names": [["a1", "a2", "a3", "a4"], ["c1", "c2"], ["b1", "b2"]],
        "mode": "general",
        "q_polytope": [["0", "0"], ["1", "0"], ["1", "1"]],
        "delta": ["1/100", "1/3"],
        "b0": [0, 0],
        "liftings": [["2", "2"], ["2", "2"], ["0", "0", "0"]],
        "strict_liftings": True,
        "seed": 1,
        "subfamily_policy": "last",
    }
    out["three_term"] = {
        "supports": [[[0, 0], [2, 2], [1, 3]], [[0, 0], [2, 0], [1, 2]], [[3, 0], [1, 1]]],
        "names": [["alpha1", "alpha2", "alpha3"], ["beta1", "beta2", "beta3"], ["gamma1", "gamma2"]],
        "mode": "general",
        "delta": "random",
        "seed": 0,
    }
    out["trivial"] = {"supports": [[[1, 1]], [[1, 1]]], "mode": "general"}
    return out


def main(target="problems"):
    root = Path(target)
    root.mkdir(exist_ok=True)
    for name, data in problems().items():
        (root / f"{name}.json").write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
        print(root / f"{name}.json")


if __name__ == "__main__":
    main(*sys.argv[1:])
