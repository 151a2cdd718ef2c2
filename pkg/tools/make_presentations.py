"""Generate the bundled presentation JSON files.

Run from the repository root: python3 tools/make_presentations.py
Every file is rebuilt and its based algebra constructed as a smoke test.
"""

import json
import os
import sys

sys.path.insert(0, "src")

from nangle.algebras import build_based_algebra
from nangle.modules import is_selfinjective
from nangle.quivers import parse_presentation

OUT = os.path.join("src", "nangle", "data")
os.makedirs(OUT, exist_ok=True)


def write(name, data):
    path = os.path.join(OUT, name)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=1)
    pres = parse_presentation(data, name=name)
    algebra = build_based_algebra(pres)
    nak = is_selfinjective(algebra)
    print(f"{name}: dim {algebra.dim}, self-injective: {nak is not None}")
    return algebra


def rev(path):
    """Figure potentials are written in function-composition order; the
    engine composes left to right, so monomials are reversed."""
    return list(reversed(path))


def path_algebra_an(n, p=2):
    return {
        "name": f"a{n}",
        "field": p,
        "degree_bound": n + 2,
        "vertices": list(range(1, n + 1)),
        "arrows": [{"name": f"a{i}", "source": i, "target": i + 1} for i in range(1, n)],
        "relations": [],
    }


def preprojective(n, p):
    arrows = []
    for i in range(1, n):
        arrows.append({"name": f"a{i}", "source": i, "target": i + 1})
        arrows.append({"name": f"b{i}", "source": i + 1, "target": i})
    relations = []
    for v in range(1, n + 1):
        terms = []
        if v < n:
            terms.append({"coeff": 1, "path": [f"a{v}", f"b{v}"]})
        if v > 1:
            terms.append({"coeff": -1, "path": [f"b{v-1}", f"a{v-1}"]})
        relations.append(terms)
    return {
        "name": f"pi_a{n}_f{p}",
        "field": p,
        "degree_bound": 2 * n,
        "vertices": list(range(1, n + 1)),
        "arrows": arrows,
        "relations": relations,
    }


def dual_numbers(p):
    return {
        "name": f"dual_numbers_f{p}",
        "field": p,
        "degree_bound": 4,
        "vertices": [1],
        "arrows": [{"name": "x", "source": 1, "target": 1}],
        "relations": [[{"coeff": 1, "path": ["x", "x"]}]],
    }


def triangle_a5(p=2):
    # ten-vertex triangular grid; arrows exactly as in the source figure
    arcs = [(1, 0), (0, 2), (2, 1), (3, 1), (1, 4), (4, 2), (2, 5), (4, 3),
            (6, 3), (3, 7), (5, 4), (7, 4), (4, 8), (8, 5), (5, 9), (7, 6),
            (8, 7), (9, 8)]
    arrows = [{"name": f"e{s}_{t}", "source": s, "target": t} for s, t in arcs]

    def cyc(*arcs_in_cycle):
        # a small triangle as a left-to-right path of its arrows
        return [f"e{s}_{t}" for s, t in arcs_in_cycle]

    up = [
        cyc((1, 0), (0, 2), (2, 1)),
        cyc((3, 1), (1, 4), (4, 3)),
        cyc((4, 2), (2, 5), (5, 4)),
        cyc((6, 3), (3, 7), (7, 6)),
        cyc((7, 4), (4, 8), (8, 7)),
        cyc((8, 5), (5, 9), (9, 8)),
    ]
    down = [
        cyc((2, 1), (1, 4), (4, 2)),
        cyc((4, 3), (3, 7), (7, 4)),
        cyc((5, 4), (4, 8), (8, 5)),
    ]
    potential = [{"coeff": 1, "path": c} for c in up] + [{"coeff": -1, "path": c} for c in down]
    return {
        "name": f"triangle_a5_f{p}",
        "field": p,
        "degree_bound": 10,
        "vertices": list(range(10)),
        "arrows": arrows,
        "potential": potential,
    }


def fig1_q1(p, lam):
    verts = ["x0", "x1", "y0", "y1", "z0", "z1"]
    arrows = [
        ("a00", "y0", "x0"), ("a10", "y0", "x1"), ("a11", "y1", "x1"), ("a01", "y1", "x0"),
        ("b00", "z0", "y0"), ("b10", "z0", "y1"), ("b11", "z1", "y1"), ("b01", "z1", "y0"),
        ("c00", "x0", "z0"), ("c10", "x0", "z1"), ("c11", "x1", "z1"), ("c01", "x1", "z0"),
    ]
    terms = [
        ("lambda", ["a00", "b00", "c00"]),
        (-1, ["a01", "b10", "c00"]),
        (1, ["a11", "b10", "c01"]),
        (-1, ["a10", "b00", "c01"]),
        (1, ["a01", "b11", "c10"]),
        (-1, ["a00", "b01", "c10"]),
        (1, ["a10", "b01", "c11"]),
        (-1, ["a11", "b11", "c11"]),
    ]
    return {
        "name": f"fig1_q1_f{p}",
        "field": p,
        "degree_bound": 12,
        "vertices": verts,
        "arrows": [{"name": n, "source": s, "target": t} for n, s, t in arrows],
        "potential": [{"coeff": c, "path": rev(path)} for c, path in terms],
        "params": {"lambda": lam},
    }


def fig1_q2(p, lam):
    verts = ["w0", "w1", "x", "y0", "y1", "z"]
    arrows = [
        ("a0", "x", "w0"), ("a1", "x", "w1"),
        ("b0", "y0", "x"), ("b1", "y1", "x"),
        ("c0", "z", "y0"), ("c1", "z", "y1"),
        ("d0", "w0", "z"), ("d1", "w1", "z"),
    ]
    terms = [
        ("lambda", ["a0", "b0", "c0", "d0"]),
        (-1, ["a0", "b1", "c1", "d0"]),
        (1, ["a1", "b1", "c1", "d1"]),
        (-1, ["a1", "b0", "c0", "d1"]),
    ]
    return {
        "name": f"fig1_q2_f{p}",
        "field": p,
        "degree_bound": 14,
        "vertices": verts,
        "arrows": [{"name": n, "source": s, "target": t} for n, s, t in arrows],
        "potential": [{"coeff": c, "path": rev(path)} for c, path in terms],
        "params": {"lambda": lam},
    }


def fig1_q3(p, lam):
    verts = ["w", "x", "y", "z0", "z1", "z2"]
    arrows = [
        ("a", "x", "w"), ("at", "y", "w"), ("b", "y", "x"),
        ("c0", "z0", "y"), ("c1", "z1", "y"), ("c2", "z2", "y"),
        ("d0", "w", "z0"), ("d1", "w", "z1"), ("d2", "w", "z2"),
    ]
    terms = [
        ("lambda", ["at", "c0", "d0"]),
        (-1, ["a", "b", "c0", "d0"]),
        (1, ["a", "b", "c1", "d1"]),
        (-1, ["at", "c1", "d1"]),
        (1, ["at", "c2", "d2"]),
    ]
    return {
        "name": f"fig1_q3_f{p}",
        "field": p,
        "degree_bound": 14,
        "vertices": verts,
        "arrows": [{"name": n, "source": s, "target": t} for n, s, t in arrows],
        "potential": [{"coeff": c, "path": rev(path)} for c, path in terms],
        "params": {"lambda": lam},
    }


def fig1_q4(p, lam):
    verts = ["x", "y0", "y1", "y2", "y3", "z"]
    arrows = [
        ("a0", "y0", "x"), ("a1", "y1", "x"), ("a2", "y2", "x"), ("a3", "y3", "x"),
        ("b0", "z", "y0"), ("b1", "z", "y1"), ("b2", "z", "y2"), ("b3", "z", "y3"),
        ("c0", "x", "z"), ("c1", "x", "z"),
    ]
    terms = [
        ("lambda", ["a0", "b0", "c0"]),
        (1, ["a1", "b1", "c0"]),
        (-1, ["a2", "b2", "c0"]),
        (-1, ["a0", "b0", "c1"]),
        (-1, ["a1", "b1", "c1"]),
        (1, ["a3", "b3", "c1"]),
    ]
    return {
        "name": f"fig1_q4_f{p}",
        "field": p,
        "degree_bound": 12,
        "vertices": verts,
        "arrows": [{"name": n, "source": s, "target": t} for n, s, t in arrows],
        "potential": [{"coeff": c, "path": rev(path)} for c, path in terms],
        "params": {"lambda": lam},
    }


if __name__ == "__main__":
    write("a2.json", path_algebra_an(2))
    write("a3.json", path_algebra_an(3))
    write("dual_numbers_f2.json", dual_numbers(2))
    write("dual_numbers_f3.json", dual_numbers(3))
    for n in (2, 3, 4, 5):
        write(f"pi_a{n}_f2.json", preprojective(n, 2))
    write("pi_a3_f3.json", preprojective(3, 3))
    write("triangle_a5_f2.json", triangle_a5(2))
    for p, lam in ((5, 2),):
        write(f"fig1_q1_f{p}.json", fig1_q1(p, lam))
        write(f"fig1_q2_f{p}.json", fig1_q2(p, lam))
        write(f"fig1_q3_f{p}.json", fig1_q3(p, lam))
        write(f"fig1_q4_f{p}.json", fig1_q4(p, lam))
