"""Shared presentation builders and independent oracles for the test suite."""

from __future__ import annotations

import itertools
from typing import Dict, List, Tuple

import numpy as np

from nangle.field import Matrix, PrimeField, rank
from nangle.quivers import AlgebraPresentation, PathExpr, Quiver


def path_algebra_an(n: int, p: int = 2) -> AlgebraPresentation:
    """Linear orientation 1 -> 2 -> ... -> n, no relations."""
    verts = list(range(1, n + 1))
    arrows = [(f"a{i}", i, i + 1) for i in range(1, n)]
    return AlgebraPresentation(Quiver(verts, arrows), PrimeField(p), [], name=f"A{n}")


def preprojective_an(n: int, p: int = 2, degree_bound: int = None) -> AlgebraPresentation:
    """Double quiver of A_n with the preprojective relations.

    Relation at vertex v: sum of (incoming a // outgoing a*) signed
    commutators; over the double of A_n the standard choice is
    a_i a_i^* - a_{i-1}^* a_{i-1} = 0 read at each vertex.
    """
    field = PrimeField(p)
    verts = list(range(1, n + 1))
    arrows = []
    for i in range(1, n):
        arrows.append((f"a{i}", i, i + 1))
        arrows.append((f"b{i}", i + 1, i))
    quiver = Quiver(verts, arrows)
    relations = []
    for v in verts:
        terms = []
        if v < n:
            terms.append((1, (f"a{v}", f"b{v}")))
        if v > 1:
            terms.append((-1, (f"b{v-1}", f"a{v-1}")))
        relations.append(PathExpr(quiver, terms, field))
    bound = degree_bound if degree_bound is not None else 2 * n + 2
    return AlgebraPresentation(quiver, field, relations, degree_bound=bound, name=f"Pi(A{n})")


def dual_numbers(p: int = 2) -> AlgebraPresentation:
    """k[x]/x^2 as the one-loop quiver with relation x.x."""
    field = PrimeField(p)
    quiver = Quiver([1], [("x", 1, 1)])
    rel = PathExpr(quiver, [(1, ("x", "x"))], field)
    return AlgebraPresentation(quiver, field, [rel], degree_bound=4, name="k[x]/x2")


def enumerate_paths(quiver: Quiver, max_deg: int):
    """All composable paths of length <= max_deg, grouped by degree."""
    by_deg: Dict[int, List[Tuple[Tuple[str, ...], object, object]]] = {
        0: [((), v, v) for v in quiver.vertices]
    }
    for d in range(1, max_deg + 1):
        out = []
        for path, s, t in by_deg[d - 1]:
            for a in quiver.arrows_from(t):
                out.append((path + (a,), s, quiver.target(a)))
        by_deg[d] = out
    return by_deg


def naive_graded_quotient_dims(pres: AlgebraPresentation, max_deg: int) -> Dict[int, int]:
    """Degreewise quotient dimensions by brute-force ideal spans.

    Only valid for length-homogeneous relations.  Independent of the
    production closure: enumerates every path and every p*r*q product
    and row-reduces in the full path space.
    """
    field = pres.field
    quiver = pres.quiver
    rels = pres.all_relations()
    for r in rels:
        lens = {len(t) for t in r.terms}
        if len(lens) != 1:
            raise ValueError("oracle requires homogeneous relations")
    by_deg = enumerate_paths(quiver, max_deg)
    dims: Dict[int, int] = {}
    for d in range(0, max_deg + 1):
        paths = by_deg[d]
        index = {pt[0]: i for i, pt in enumerate(paths)}
        if not paths:
            dims[d] = 0
            continue
        rows = []
        for r in rels:
            rl = len(next(iter(r.terms)))
            if rl > d:
                continue
            for i in range(0, d - rl + 1):
                j = d - rl - i
                for lp, ls, lt in by_deg[i]:
                    if lt != r.source:
                        continue
                    for rp, rs, rt in by_deg[j]:
                        if rs != r.target:
                            continue
                        row = np.zeros(len(paths), dtype=np.int64)
                        for term, coeff in r.terms.items():
                            full = lp + term + rp
                            row[index[full]] = (row[index[full]] + coeff) % field.p
                        if row.any():
                            rows.append(row)
        if rows:
            rk = rank(Matrix(field, np.vstack(rows)))
        else:
            rk = 0
        dims[d] = len(paths) - rk
        if dims[d] == 0:
            break
    return dims


def brute_force_hom_count(m, n) -> int:
    """Count intertwiners by enumerating every vertex-matrix tuple (tiny cases)."""
    p = m.field.p
    verts = m.algebra.quiver.vertices
    shapes = [(n.dims[v], m.dims[v]) for v in verts]
    total_entries = sum(r * c for r, c in shapes)
    assert p ** total_entries <= 200000, "brute force too large"
    count = 0
    for bits in itertools.product(range(p), repeat=total_entries):
        mats = {}
        pos = 0
        for v, (r, c) in zip(verts, shapes):
            mats[v] = Matrix(m.field, np.array(bits[pos : pos + r * c], dtype=np.int64).reshape(r, c))
            pos += r * c
        ok = True
        for name_, s, t in m.algebra.quiver.arrows:
            if n.act[name_].mul(mats[s]) != mats[t].mul(m.act[name_]):
                ok = False
                break
        if ok:
            count += 1
    return count
