import json

import pytest

from nangle.field import PrimeField
from nangle.quivers import (
    AlgebraPresentation,
    PathExpr,
    Potential,
    Quiver,
    cyclic_derivative,
    jacobi_relations,
    parse_presentation,
)


def triangle_quiver():
    return Quiver([1, 2, 3], [("a", 1, 2), ("b", 2, 3), ("c", 3, 1)])


def test_quiver_validation():
    with pytest.raises(ValueError):
        Quiver([1, 1], [])
    with pytest.raises(ValueError):
        Quiver([1], [("a", 1, 2)])
    with pytest.raises(ValueError):
        Quiver([1, 2], [("a", 1, 2), ("a", 2, 1)])


def test_path_endpoints():
    q = triangle_quiver()
    assert q.path_endpoints(("a", "b")) == (1, 3)
    with pytest.raises(ValueError):
        q.path_endpoints(("b", "a"))
    with pytest.raises(ValueError):
        q.path_endpoints(("z",))


def test_path_expr_parallel_check():
    q = triangle_quiver()
    F = PrimeField(5)
    PathExpr(q, [(1, ("a", "b", "c")), (2, ("a", "b", "c"))], F)
    with pytest.raises(ValueError):
        PathExpr(q, [(1, ("a",)), (1, ("b",))], F)


def test_jacobi_triangle_potential():
    # W = abc on a 3-cycle -> relations {bc, ca, ab}
    q = triangle_quiver()
    F = PrimeField(3)
    W = Potential(q, F, [(1, ("a", "b", "c"))])
    pres = AlgebraPresentation(q, F, [], potential=W)
    rels = jacobi_relations(pres)
    got = {tuple(sorted(r.terms)) for r in rels}
    assert got == {(("b", "c"),), (("c", "a"),), (("a", "b"),)}


def test_jacobi_zero_potential():
    q = triangle_quiver()
    F = PrimeField(3)
    pres = AlgebraPresentation(q, F, [], potential=None)
    with pytest.raises(ValueError):
        jacobi_relations(pres)


def test_cyclic_derivative_oracle():
    # Independent string-rotation oracle on a random-ish potential.
    q = Quiver([1, 2], [("a", 1, 2), ("b", 2, 1), ("c", 1, 1)])
    F = PrimeField(7)
    W = Potential(q, F, [(2, ("a", "b", "c")), (3, ("c", "c"))])

    def oracle(arrow):
        out = {}
        for path, coeff in W.terms.items():
            for k, x in enumerate(path):
                if x == arrow:
                    rot = path[k:] + path[:k]
                    key = rot[1:]
                    out[key] = (out.get(key, 0) + coeff) % 7
        return {k: v for k, v in out.items() if v}

    for arrow in ("a", "b", "c"):
        got = {}
        for coeff, path in cyclic_derivative(W, arrow):
            got[path] = (got.get(path, 0) + coeff) % 7
        got = {k: v for k, v in got.items() if v}
        assert got == oracle(arrow)


def test_potential_must_be_cycles():
    q = triangle_quiver()
    F = PrimeField(3)
    with pytest.raises(ValueError):
        Potential(q, F, [(1, ("a", "b"))])  # 1 -> 3 is not a cycle


def test_parse_presentation_a2():
    data = {
        "field": 2,
        "vertices": [1, 2],
        "arrows": [{"name": "a", "source": 1, "target": 2}],
        "relations": [],
    }
    pres = parse_presentation(json.dumps(data))
    assert len(pres.quiver.arrows) == 1
    assert pres.relations == []
    assert pres.degree_bound == 6


def test_parse_presentation_errors():
    with pytest.raises(ValueError):
        parse_presentation("{not json")
    with pytest.raises(ValueError):
        parse_presentation({"field": 4, "vertices": [1], "arrows": []})
    with pytest.raises(ValueError):
        parse_presentation(
            {
                "field": 3,
                "vertices": [1, 2],
                "arrows": [{"name": "a", "source": 1, "target": 2}],
                "potential": [{"coeff": 1, "path": ["a"]}],
            }
        )


def test_parse_lambda_substitution():
    data = {
        "field": 5,
        "vertices": [1],
        "arrows": [{"name": "x", "source": 1, "target": 1}],
        "potential": [{"coeff": "lambda", "path": ["x", "x", "x"]}, {"coeff": -1, "path": ["x", "x", "x", "x"]}],
        "params": {"lambda": 2},
    }
    pres = parse_presentation(data)
    assert pres.potential.terms[("x", "x", "x")] == 2
    assert pres.potential.terms[("x", "x", "x", "x")] == 4
