"""Finite-dimensional based algebras: a fixed path-normal-form basis
plus right-multiplication tables.

``build_based_algebra`` quotients a path algebra by the two-sided ideal
of the relations, degree by degree, as kernels of linear maps on path
spaces.  Relations must be admissible (every term of length >= 2); the
closure must stabilize strictly below the presentation's degree bound.
Mixed-length relations are handled by a restart loop: an ideal element
that retroactively kills an already-accepted basis path is recorded as
an extra relation and the closure is rerun.
"""

from __future__ import annotations

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .field import Matrix, PrimeField
from .quivers import AlgebraPresentation, PathExpr, Quiver, Vertex


class BasisElement(NamedTuple):
    path: Tuple[str, ...]
    source: Vertex
    target: Vertex

    @property
    def degree(self) -> int:
        return len(self.path)


class ClosureError(ValueError):
    """Raised when the degreewise closure does not stabilize."""


class BasedAlgebra:
    """Algebra with a fixed basis of normal-form paths.

    The multiplication is encoded by right-multiplication-by-arrow
    matrices; products of arbitrary elements are derived from them.
    """

    def __init__(self, field: PrimeField, quiver: Quiver, basis: Sequence[BasisElement],
                 ext_vectors: Dict[Tuple[int, str], np.ndarray],
                 relations: Optional[Sequence[PathExpr]] = None,
                 presentation: Optional[AlgebraPresentation] = None, name: str = ""):
        self.field = field
        self.quiver = quiver
        self.basis: List[BasisElement] = list(basis)
        self.relations = list(relations or [])
        self.presentation = presentation
        self.name = name
        self.dim = len(self.basis)
        self.e_index: Dict[Vertex, int] = {}
        for i, b in enumerate(self.basis):
            if b.degree == 0:
                self.e_index[b.source] = i
        if set(self.e_index) != set(quiver.vertices):
            raise ValueError("basis must contain one idempotent per vertex")
        p = field.p
        # right multiplication by each arrow as a dim x dim matrix
        self.right_by_arrow: Dict[str, Matrix] = {}
        for name_, _, _ in quiver.arrows:
            m = np.zeros((self.dim, self.dim), dtype=np.int64)
            for i, b in enumerate(self.basis):
                if b.target == quiver.source(name_):
                    vec = ext_vectors[(i, name_)]
                    m[: len(vec), i] = vec % p
            self.right_by_arrow[name_] = Matrix(field, m)
        self.arrow_index: Dict[str, int] = {}
        for i, b in enumerate(self.basis):
            if b.degree == 1:
                self.arrow_index[b.path[0]] = i
        self._product_cache: Dict[Tuple[int, int], np.ndarray] = {}
        self._admissible: Optional[bool] = None

    # -- bookkeeping -----------------------------------------------------------

    def degrees(self) -> List[int]:
        return [b.degree for b in self.basis]

    def dims_by_degree(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for b in self.basis:
            out[b.degree] = out.get(b.degree, 0) + 1
        return out

    def radical_indices(self) -> List[int]:
        """Indices of basis elements spanning the radical (degree >= 1).

        Only meaningful for admissible quotients; every consumer that
        relies on this structural radical should assert is_admissible().
        """
        return [i for i, b in enumerate(self.basis) if b.degree >= 1]

    def is_admissible(self) -> bool:
        """True when the span of positive-degree basis paths is nilpotent."""
        if self._admissible is None:
            rad = self.radical_indices()
            span = np.zeros((self.dim, len(rad)), dtype=np.int64)
            for k, i in enumerate(rad):
                span[i, k] = 1
            p = self.field.p
            nilpotent = False
            for _ in range(self.dim + 1):
                if not span.any():
                    nilpotent = True
                    break
                cols = []
                for j in rad:
                    for k in range(span.shape[1]):
                        cols.append(self.mult(span[:, k], self.unit_vector(j)))
                stacked = np.stack(cols, axis=1) % p if cols else span[:, :0]
                from .field import column_space_basis

                span = column_space_basis(Matrix(self.field, stacked)).a
            self._admissible = nilpotent
        return self._admissible

    def unit_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def idempotent(self, v: Vertex) -> np.ndarray:
        return self.unit_vector(self.e_index[v])

    def unit(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        for i in self.e_index.values():
            out[i] = 1
        return out

    # -- multiplication ----------------------------------------------------------

    def apply_right_idempotent(self, vec: np.ndarray, v: Vertex) -> np.ndarray:
        out = vec.copy()
        for i, b in enumerate(self.basis):
            if b.target != v:
                out[i] = 0
        return out

    def apply_right_path(self, vec: np.ndarray, path: Sequence[str]) -> np.ndarray:
        p = self.field.p
        out = vec % p
        for a in path:
            out = (self.right_by_arrow[a].a @ out) % p
        return out

    def basis_product(self, i: int, j: int) -> np.ndarray:
        """Coordinates of basis[i] * basis[j]."""
        key = (i, j)
        if key not in self._product_cache:
            bj = self.basis[j]
            if self.basis[i].target != bj.source:
                out = np.zeros(self.dim, dtype=np.int64)
            elif bj.degree == 0:
                out = self.unit_vector(i)
            else:
                out = self.apply_right_path(self.unit_vector(i), bj.path)
            self._product_cache[key] = out
        return self._product_cache[key]

    def mult(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two coordinate vectors."""
        p = self.field.p
        out = np.zeros(self.dim, dtype=np.int64)
        for j in np.nonzero(y % p)[0]:
            yj = int(y[j]) % p
            for i in np.nonzero(x % p)[0]:
                out = (out + (int(x[i]) * yj % p) * self.basis_product(int(i), int(j))) % p
        return out

    def expr_coords(self, expr: PathExpr) -> np.ndarray:
        """Coordinates of a path expression (paths reduced to normal form)."""
        p = self.field.p
        out = np.zeros(self.dim, dtype=np.int64)
        for path, coeff in expr.terms.items():
            if not path:
                out = (out + coeff * self.idempotent(expr.base_vertex)) % p
            else:
                src = self.quiver.path_endpoints(path)[0]
                vec = self.apply_right_path(self.idempotent(src), path)
                out = (out + coeff * vec) % p
        return out

    def opposite(self) -> "BasedAlgebra":
        """The opposite algebra on the same basis (paths reversed)."""
        op_quiver = self.quiver.opposite()
        op_basis = [BasisElement(tuple(reversed(b.path)), b.target, b.source) for b in self.basis]
        ext: Dict[Tuple[int, str], np.ndarray] = {}
        for name_, _, _ in op_quiver.arrows:
            ai = self.arrow_index[name_]
            for i, b in enumerate(self.basis):
                if op_basis[i].target == op_quiver.source(name_):
                    # b_i *op a = (a * b_i)^op; same index labels on both sides
                    if b.degree == 0:
                        vec = self.apply_right_idempotent(self.unit_vector(ai), b.source)
                    else:
                        vec = self.apply_right_path(self.unit_vector(ai), b.path)
                    ext[(i, name_)] = vec
        return BasedAlgebra(self.field, op_quiver, op_basis, ext, name=f"{self.name}^op" if self.name else "")

    # -- checks ---------------------------------------------------------------

    def check_associativity(self) -> bool:
        """Associativity on all basis triples (exact)."""
        for i in range(self.dim):
            for j in range(self.dim):
                ij = self.basis_product(i, j)
                for k in range(self.dim):
                    left = self.mult(ij, self.unit_vector(k))
                    right = self.mult(self.unit_vector(i), self.basis_product(j, k))
                    if not np.array_equal(left, right):
                        return False
        return True

    def check_unit(self) -> bool:
        one = self.unit()
        for i in range(self.dim):
            v = self.unit_vector(i)
            if not np.array_equal(self.mult(one, v), v) or not np.array_equal(self.mult(v, one), v):
                return False
        return True

    def __repr__(self):
        return f"BasedAlgebra({self.name or 'unnamed'}, dim={self.dim})"


def _closure_pass(quiver: Quiver, field: PrimeField, relations: List[List[Tuple[int, Tuple[str, ...]]]],
                  degree_bound: int):
    """One degreewise closure pass.

    Returns (basis, ext_vectors) on success, or a list of retro-kill
    relations (ideal elements supported on already-accepted basis paths)
    that force a restart.
    """
    p = field.p
    basis: List[BasisElement] = [BasisElement((), v, v) for v in quiver.vertices]
    ext: Dict[Tuple[int, str], np.ndarray] = {}
    max_top = max((max(len(t[1]) for t in r) for r in relations), default=2)

    def pad(vec: np.ndarray) -> np.ndarray:
        if len(vec) < len(basis):
            out = np.zeros(len(basis), dtype=np.int64)
            out[: len(vec)] = vec
            return out
        return vec

    def reduce_path_vector(vec: np.ndarray, path: Sequence[str]) -> np.ndarray:
        """Right-multiply a reduced vector by a path using completed ext tables."""
        cur = pad(vec.copy())
        for a in path:
            nxt = np.zeros(len(basis), dtype=np.int64)
            for i in np.nonzero(cur)[0]:
                i = int(i)
                if basis[i].target != quiver.source(a):
                    continue
                nxt = (nxt + int(cur[i]) * pad(ext[(i, a)])) % p
            cur = nxt % p
        return cur

    d = 1
    while True:
        max_deg = max(b.degree for b in basis)
        if d > max_deg + max_top:
            break
        # candidate extensions of the degree d-1 basis elements
        cands: List[Tuple[int, str]] = []
        for i, b in enumerate(basis):
            if b.degree == d - 1:
                for a in quiver.arrows_from(b.target):
                    cands.append((i, a))
        cand_pos = {c: k for k, c in enumerate(cands)}
        nb = len(basis)
        width = len(cands) + nb
        rows: List[np.ndarray] = []
        for rel in relations:
            top = max(len(t[1]) for t in rel)
            u_deg = d - top
            if u_deg < 0:
                continue
            rel_src = quiver.path_endpoints(rel[0][1])[0]
            for ui, ub in enumerate(basis):
                if ub.degree != u_deg or ub.target != rel_src:
                    continue
                row = np.zeros(width, dtype=np.int64)
                for coeff, term in rel:
                    if len(term) == top:
                        # final arrow step may land on new candidates
                        prefix_vec = reduce_path_vector(np.eye(1, nb, ui, dtype=np.int64)[0], term[:-1])
                        last = term[-1]
                        for i in np.nonzero(prefix_vec)[0]:
                            i = int(i)
                            if basis[i].target != quiver.source(last):
                                continue
                            c = int(prefix_vec[i]) * coeff % p
                            if basis[i].degree == d - 1 and (i, last) in cand_pos:
                                row[cand_pos[(i, last)]] = (row[cand_pos[(i, last)]] + c) % p
                            else:
                                red = pad(ext[(i, last)])
                                row[len(cands):] = (row[len(cands):] + c * red) % p
                    else:
                        vec = reduce_path_vector(np.eye(1, nb, ui, dtype=np.int64)[0], term)
                        row[len(cands):] = (row[len(cands):] + coeff * vec) % p
                if row.any():
                    rows.append(row)
        # row-reduce with candidate columns first
        retro: List[np.ndarray] = []
        pivots: Dict[int, np.ndarray] = {}
        for row in rows:
            row = row % p
            while True:
                nz = np.nonzero(row)[0]
                if nz.size == 0:
                    break
                lead = int(nz[0])
                if lead in pivots:
                    row = (row - int(row[lead]) * pivots[lead]) % p
                else:
                    inv = pow(int(row[lead]), p - 2, p)
                    row = (row * inv) % p
                    pivots[lead] = row
                    if lead >= len(cands):
                        retro.append(row)
                    break
        if retro:
            out = []
            for row in retro:
                terms = []
                for i in np.nonzero(row[len(cands):])[0]:
                    i = int(i)
                    terms.append((int(row[len(cands) + i]), basis[i].path, basis[i].source))
                out.append(terms)
            return None, out
        # back-substitute candidate reductions so they reference only
        # surviving candidates and old basis
        pivot_cols = sorted(c for c in pivots if c < len(cands))
        new_cands = [c for k, c in enumerate(cands) if k not in set(pivot_cols)]
        if new_cands and d >= degree_bound:
            raise ClosureError(
                f"dimension did not stabilize: new basis paths at degree {d} (bound {degree_bound})")
        # fully reduce pivot rows against each other (they are already in
        # echelon form over candidate columns; eliminate candidate pivots
        # from every row)
        for col in reversed(pivot_cols):
            prow = pivots[col]
            for col2 in pivot_cols:
                if col2 == col:
                    continue
                r2 = pivots[col2]
                if r2[col]:
                    pivots[col2] = (r2 - int(r2[col]) * prow) % p
        # accept new basis elements
        new_index: Dict[Tuple[int, str], int] = {}
        for (i, a) in new_cands:
            be = BasisElement(basis[i].path + (a,), basis[i].source, quiver.target(a))
            new_index[(i, a)] = len(basis)
            basis.append(be)
        nb2 = len(basis)
        for (i, a) in new_cands:
            vec = np.zeros(nb2, dtype=np.int64)
            vec[new_index[(i, a)]] = 1
            ext[(i, a)] = vec
        for col in pivot_cols:
            prow = pivots[col]
            i, a = cands[col]
            vec = np.zeros(nb2, dtype=np.int64)
            # row reads: cand + sum(other cands) + sum(basis) = 0
            for k, c in enumerate(cands):
                if k == col or not prow[k]:
                    continue
                if c in new_index:
                    vec[new_index[c]] = (vec[new_index[c]] - int(prow[k])) % p
            old = prow[len(cands):]
            vec[: len(old)] = (vec[: len(old)] - old) % p
            ext[(i, a)] = vec
        d += 1
    return (basis, ext), None


def build_based_algebra(presentation: AlgebraPresentation, name: str = "") -> BasedAlgebra:
    """Basis = paths modulo the two-sided ideal of the relations."""
    raw_relations = presentation.all_relations()
    rel_lists: List[List[Tuple[int, Tuple[str, ...]]]] = []
    for r in raw_relations:
        for path in r.terms:
            if len(path) < 2:
                raise ValueError(
                    f"relation term {'.'.join(path) or 'e'} has length < 2; only admissible relations are supported")
        rel_lists.append([(c, path) for path, c in sorted(r.terms.items())])
    quiver = presentation.quiver
    field = presentation.field
    work = list(rel_lists)
    for _ in range(64):
        result, retro = _closure_pass(quiver, field, work, presentation.degree_bound)
        if result is not None:
            basis, ext = result
            return BasedAlgebra(field, quiver, basis, ext, relations=raw_relations,
                                presentation=presentation, name=name or presentation.name)
        for terms in retro:
            converted = []
            for coeff, path, src in terms:
                if len(path) < 2:
                    raise ClosureError(
                        "ideal element touches a path of length < 2; presentation is not admissible")
                converted.append((coeff, path))
            work.append(converted)
    raise ClosureError("closure did not reach a fixpoint after 64 restarts")
