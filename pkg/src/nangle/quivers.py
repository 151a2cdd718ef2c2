"""Quivers, path expressions, and algebra presentations.

Paths compose left to right: for arrows a: u -> v and b: v -> w the
product path ``a b`` means "a then b" and runs u -> w.  All bundled
presentations are written in this convention.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .field import PrimeField

Vertex = Union[str, int]


class Quiver:
    """A finite quiver: vertex labels plus named arrows."""

    def __init__(self, vertices: Sequence[Vertex], arrows: Sequence[Tuple[str, Vertex, Vertex]]):
        self.vertices: List[Vertex] = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.arrows: List[Tuple[str, Vertex, Vertex]] = [tuple(a) for a in arrows]
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate arrow names")
        vset = set(self.vertices)
        for name, s, t in self.arrows:
            if s not in vset or t not in vset:
                raise ValueError(f"arrow {name}: endpoint not a vertex ({s} -> {t})")
        self.arrow_by_name: Dict[str, Tuple[str, Vertex, Vertex]] = {a[0]: a for a in self.arrows}
        self._out: Dict[Vertex, List[str]] = {v: [] for v in self.vertices}
        self._in: Dict[Vertex, List[str]] = {v: [] for v in self.vertices}
        for name, s, t in self.arrows:
            self._out[s].append(name)
            self._in[t].append(name)

    def source(self, name: str) -> Vertex:
        return self.arrow_by_name[name][1]

    def target(self, name: str) -> Vertex:
        return self.arrow_by_name[name][2]

    def arrows_from(self, v: Vertex) -> List[str]:
        return list(self._out[v])

    def arrows_into(self, v: Vertex) -> List[str]:
        return list(self._in[v])

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [(n, t, s) for n, s, t in self.arrows])

    def path_endpoints(self, path: Sequence[str]) -> Tuple[Vertex, Vertex]:
        """(source, target) of a nonempty composable path; raises otherwise."""
        if not path:
            raise ValueError("empty path has no intrinsic endpoints")
        for name in path:
            if name not in self.arrow_by_name:
                raise ValueError(f"unknown arrow {name!r}")
        for a, b in zip(path, path[1:]):
            if self.target(a) != self.source(b):
                raise ValueError(f"path not composable at {a!r} -> {b!r}")
        return self.source(path[0]), self.target(path[-1])

    def __repr__(self):
        return f"Quiver({self.vertices}, {len(self.arrows)} arrows)"


class PathExpr:
    """An F_p-linear combination of parallel paths.

    Every path in one expression shares source and target; the empty
    path needs an explicit base vertex.
    """

    def __init__(self, quiver: Quiver, terms: Sequence[Tuple[int, Sequence[str]]],
                 field: PrimeField, base_vertex: Optional[Vertex] = None):
        self.quiver = quiver
        self.field = field
        self.base_vertex = base_vertex
        merged: Dict[Tuple[str, ...], int] = {}
        src = tgt = None
        for coeff, path in terms:
            path = tuple(path)
            if not path:
                if base_vertex is None:
                    raise ValueError("empty path requires a base vertex")
                s = t = base_vertex
            else:
                s, t = quiver.path_endpoints(path)
            if src is None:
                src, tgt = s, t
            elif (s, t) != (src, tgt):
                raise ValueError(f"terms not parallel: ({src}->{tgt}) vs ({s}->{t})")
            c = (merged.get(path, 0) + coeff) % field.p
            if c:
                merged[path] = c
            else:
                merged.pop(path, None)
        self.terms: Dict[Tuple[str, ...], int] = merged
        self.source = src
        self.target = tgt

    def is_zero(self) -> bool:
        return not self.terms

    def min_length(self) -> int:
        return min(len(p) for p in self.terms) if self.terms else 0

    def max_length(self) -> int:
        return max(len(p) for p in self.terms) if self.terms else 0

    def __repr__(self):
        body = " + ".join(f"{c}*{'.'.join(p) if p else 'e'}" for p, c in sorted(self.terms.items()))
        return f"PathExpr({body or '0'})"


class Potential:
    """A linear combination of cycles; terms need not be parallel."""

    def __init__(self, quiver: Quiver, field: PrimeField, terms: Sequence[Tuple[int, Sequence[str]]]):
        self.quiver = quiver
        self.field = field
        merged: Dict[Tuple[str, ...], int] = {}
        for coeff, path in terms:
            path = tuple(path)
            if not path:
                raise ValueError("potential terms must be nonempty cycles")
            s, t = quiver.path_endpoints(path)
            if s != t:
                raise ValueError(f"potential term {'.'.join(path)} is not a cycle")
            c = (merged.get(path, 0) + coeff) % field.p
            if c:
                merged[path] = c
            else:
                merged.pop(path, None)
        self.terms = merged

    def is_zero(self) -> bool:
        return not self.terms

    def cycle_count(self) -> int:
        return len(self.terms)


class AlgebraPresentation:
    """Quiver with relations, and optionally a potential, over F_p."""

    def __init__(self, quiver: Quiver, field: PrimeField, relations: Sequence[PathExpr],
                 potential: Optional[Potential] = None, degree_bound: Optional[int] = None,
                 name: str = "", params: Optional[Dict[str, int]] = None):
        self.quiver = quiver
        self.field = field
        for r in relations:
            if r.is_zero():
                raise ValueError("relations must be nonzero")
        self.relations = list(relations)
        self.potential = potential
        self.degree_bound = degree_bound if degree_bound is not None else 2 * len(quiver.vertices) + 2
        self.name = name
        self.params = dict(params or {})

    def all_relations(self) -> List[PathExpr]:
        """Explicit relations plus the cyclic derivatives of the potential."""
        rels = list(self.relations)
        if self.potential is not None:
            rels.extend(jacobi_relations(self))
        return rels

    def __repr__(self):
        return f"AlgebraPresentation({self.name or 'unnamed'}, |Q0|={len(self.quiver.vertices)})"


def cyclic_derivative(potential: Potential, arrow: str) -> List[Tuple[int, Tuple[str, ...]]]:
    """d/d-arrow: rotate each occurrence of the arrow to the front, delete it."""
    out: List[Tuple[int, Tuple[str, ...]]] = []
    for path, coeff in potential.terms.items():
        for k, a in enumerate(path):
            if a == arrow:
                rotated = path[k:] + path[:k]
                out.append((coeff, rotated[1:]))
    return out


def jacobi_relations(presentation: AlgebraPresentation) -> List[PathExpr]:
    """One relation per arrow with nonzero cyclic derivative of the potential."""
    if presentation.potential is None:
        raise ValueError("presentation has no potential")
    quiver = presentation.quiver
    field = presentation.field
    rels: List[PathExpr] = []
    for name, _, _ in quiver.arrows:
        terms = cyclic_derivative(presentation.potential, name)
        if not terms:
            continue
        expr = PathExpr(quiver, terms, field)
        if not expr.is_zero():
            rels.append(expr)
    return rels


def _coeff_value(raw, params: Dict[str, int], p: int) -> int:
    if isinstance(raw, int):
        return raw % p
    if isinstance(raw, str):
        neg = raw.startswith("-")
        key = raw[1:] if neg else raw
        if key not in params:
            raise ValueError(f"unknown parameter {key!r} in coefficient")
        v = params[key] % p
        return (-v) % p if neg else v
    raise ValueError(f"bad coefficient {raw!r}")


def parse_presentation(text_or_data: Union[str, dict], name: str = "") -> AlgebraPresentation:
    """Parse the JSON presentation format.

    Schema: { "field": p, "degree_bound": d, "vertices": [..],
    "arrows": [{"name","source","target"}],
    "relations": [[{"coeff","path":[..]}]],
    "potential": [{"coeff","path":[..]}], "params": {"lambda": v} }
    """
    if isinstance(text_or_data, str):
        try:
            data = json.loads(text_or_data)
        except json.JSONDecodeError as e:
            raise ValueError(f"malformed presentation JSON: {e}") from e
    else:
        data = text_or_data
    if not isinstance(data, dict):
        raise ValueError("presentation must be a JSON object")
    try:
        field = PrimeField(data["field"])
        vertices = data["vertices"]
        arrows = [(a["name"], a["source"], a["target"]) for a in data.get("arrows", [])]
    except (KeyError, TypeError) as e:
        raise ValueError(f"missing or malformed presentation field: {e}") from e
    quiver = Quiver(vertices, arrows)
    params = {k: int(v) for k, v in data.get("params", {}).items()}
    p = field.p

    def build_terms(raw_terms):
        return [(_coeff_value(t.get("coeff", 1), params, p), tuple(t["path"])) for t in raw_terms]

    relations = []
    for raw in data.get("relations", []):
        expr = PathExpr(quiver, build_terms(raw), field)
        if expr.is_zero():
            raise ValueError("relation reduces to zero")
        relations.append(expr)
    potential = None
    if data.get("potential"):
        potential = Potential(quiver, field, build_terms(data["potential"]))
    degree_bound = int(data.get("degree_bound", 2 * len(vertices) + 2))
    if degree_bound < 2:
        raise ValueError("degree_bound must be at least 2")
    return AlgebraPresentation(quiver, field, relations, potential, degree_bound,
                               name=name or data.get("name", ""), params=params)
