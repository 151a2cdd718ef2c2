"""Modules over a based algebra and their maps.

A module assigns a vector space to every vertex and a matrix to every
arrow; a path acts by composing its arrow matrices left to right.  A
module map is a family of vertex matrices making every arrow square
commute.  Kernels, cokernels, images, duals, socles, radicals, and the
Nakayama functor are all computed exactly.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebras import BasedAlgebra
from .field import Matrix, block_matrix, column_space_basis, kernel_basis, rank, solve
from .quivers import Vertex


class Module:
    """Representation of a based algebra."""

    def __init__(self, algebra: BasedAlgebra, dims: Dict[Vertex, int],
                 act: Dict[str, Matrix], name: str = "", check: bool = True):
        self.algebra = algebra
        self.dims = {v: int(dims.get(v, 0)) for v in algebra.quiver.vertices}
        if any(d < 0 for d in self.dims.values()):
            raise ValueError("negative dimension")
        self.act: Dict[str, Matrix] = {}
        for name_, s, t in algebra.quiver.arrows:
            m = act.get(name_)
            if m is None:
                m = algebra.field.zeros(self.dims[t], self.dims[s])
            if m.a.shape != (self.dims[t], self.dims[s]):
                raise ValueError(
                    f"arrow {name_}: matrix shape {m.a.shape} != {(self.dims[t], self.dims[s])}")
            self.act[name_] = m
        self.name = name
        if check:
            bad = self.failing_relation()
            if bad is not None:
                raise ValueError(f"relation does not vanish on module: {bad}")

    @property
    def field(self):
        return self.algebra.field

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def dim_vector(self) -> Tuple[int, ...]:
        return tuple(self.dims[v] for v in self.algebra.quiver.vertices)

    def key(self) -> tuple:
        return (self.dim_vector(),
                tuple(self.act[a[0]].a.tobytes() for a in self.algebra.quiver.arrows))

    def path_action(self, path: Sequence[str], source: Vertex) -> Matrix:
        """Matrix of a path acting M_source -> M_target."""
        if not path:
            return self.field.identity(self.dims[source])
        s, _ = self.algebra.quiver.path_endpoints(path)
        if s != source:
            return self.field.zeros(self.dims[self.algebra.quiver.path_endpoints(path)[1]],
                                    self.dims[source])
        out = self.field.identity(self.dims[source])
        for a in path:
            out = self.act[a].mul(out)
        return out

    def element_action(self, coords: np.ndarray, src: Vertex, tgt: Vertex) -> Matrix:
        """Action M_src -> M_tgt of an algebra element supported on src->tgt paths."""
        out = self.field.zeros(self.dims[tgt], self.dims[src])
        p = self.field.p
        for i in np.nonzero(coords % p)[0]:
            b = self.algebra.basis[int(i)]
            c = int(coords[int(i)]) % p
            if b.degree == 0:
                if b.source == src == tgt:
                    out = out + self.field.identity(self.dims[src]).scale(c)
                elif b.source == src or b.source == tgt:
                    raise ValueError("element not homogeneous for (src, tgt)")
                continue
            if (b.source, b.target) != (src, tgt):
                raise ValueError(f"element has support outside {src}->{tgt}")
            out = out + self.path_action(b.path, src).scale(c)
        return out

    def failing_relation(self) -> Optional[str]:
        """First relation of the presentation that does not act as zero."""
        for r in self.algebra.relations:
            m = self.field.zeros(self.dims[r.target], self.dims[r.source])
            for path, coeff in r.terms.items():
                m = m + self.path_action(path, r.source).scale(coeff)
            if not m.is_zero():
                return repr(r)
        return None

    def __repr__(self):
        return f"Module({self.name or 'M'}, dims={self.dims})"


class ModuleMap:
    """Intertwiner between modules over the same algebra."""

    def __init__(self, source: Module, target: Module, mats: Dict[Vertex, Matrix], check: bool = True):
        if source.algebra is not target.algebra and source.algebra.basis != target.algebra.basis:
            raise ValueError("modules over different algebras")
        self.source = source
        self.target = target
        self.mats: Dict[Vertex, Matrix] = {}
        for v in source.algebra.quiver.vertices:
            m = mats.get(v)
            if m is None:
                m = source.field.zeros(target.dims[v], source.dims[v])
            if m.a.shape != (target.dims[v], source.dims[v]):
                raise ValueError(f"vertex {v}: shape {m.a.shape} != {(target.dims[v], source.dims[v])}")
            self.mats[v] = m
        if check and not self.commutes():
            raise ValueError("map does not commute with the arrow actions")

    @property
    def field(self):
        return self.source.field

    def commutes(self) -> bool:
        for name_, s, t in self.source.algebra.quiver.arrows:
            left = self.target.act[name_].mul(self.mats[s])
            right = self.mats[t].mul(self.source.act[name_])
            if left != right:
                return False
        return True

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """self followed by other (self first)."""
        if other.source is not self.target and other.source.key() != self.target.key():
            raise ValueError("maps not composable")
        return ModuleMap(self.source, other.target,
                         {v: other.mats[v].mul(self.mats[v]) for v in self.mats}, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         {v: self.mats[v] + other.mats[v] for v in self.mats}, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         {v: self.mats[v] - other.mats[v] for v in self.mats}, check=False)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         {v: self.mats[v].scale(c) for v in self.mats}, check=False)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.mats.values())

    def is_iso(self) -> bool:
        from .field import invert
        for v, m in self.mats.items():
            if m.rows != m.cols:
                return False
            if m.rows and invert(m) is None:
                return False
        return True

    def inverse(self) -> "ModuleMap":
        from .field import invert
        mats = {}
        for v, m in self.mats.items():
            inv = invert(m) if m.rows else m.transpose()
            if inv is None:
                raise ValueError("map is not invertible")
            mats[v] = inv
        return ModuleMap(self.target, self.source, mats, check=False)

    def vec(self) -> np.ndarray:
        """Row-major flattening of all vertex blocks, in vertex order."""
        parts = [self.mats[v].a.reshape(-1) for v in self.source.algebra.quiver.vertices]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def key(self) -> tuple:
        return (self.source.key(), self.target.key(), self.vec().tobytes())

    def __eq__(self, other):
        return isinstance(other, ModuleMap) and self.mats == other.mats \
            and self.source.dims == other.source.dims and self.target.dims == other.target.dims

    def __repr__(self):
        return f"ModuleMap({self.source.name or '?'} -> {self.target.name or '?'})"


def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, {v: m.field.identity(m.dims[v]) for v in m.dims}, check=False)


def zero_map(source: Module, target: Module) -> ModuleMap:
    return ModuleMap(source, target, {}, check=False)


def map_from_vec(source: Module, target: Module, vec: np.ndarray, check: bool = False) -> ModuleMap:
    mats = {}
    pos = 0
    for v in source.algebra.quiver.vertices:
        r, c = target.dims[v], source.dims[v]
        block = vec[pos : pos + r * c].reshape(r, c)
        mats[v] = Matrix(source.field, block % source.field.p)
        pos += r * c
    return ModuleMap(source, target, mats, check=check)


# -- constructions --------------------------------------------------------------


def zero_module(algebra: BasedAlgebra) -> Module:
    return Module(algebra, {}, {}, name="0", check=False)


def simple_module(algebra: BasedAlgebra, v: Vertex) -> Module:
    return Module(algebra, {v: 1}, {}, name=f"S({v})", check=False)


def projective_module(algebra: BasedAlgebra, v: Vertex) -> Module:
    """P_v: basis paths starting at v, graded by endpoint."""
    idx = [i for i, b in enumerate(algebra.basis) if b.source == v]
    by_target: Dict[Vertex, List[int]] = {w: [] for w in algebra.quiver.vertices}
    for i in idx:
        by_target[algebra.basis[i].target].append(i)
    dims = {w: len(by_target[w]) for w in by_target}
    pos = {i: k for w in algebra.quiver.vertices for k, i in enumerate(by_target[w])}
    act = {}
    p = algebra.field.p
    for name_, s, t in algebra.quiver.arrows:
        m = np.zeros((dims[t], dims[s]), dtype=np.int64)
        for i in by_target[s]:
            col = algebra.right_by_arrow[name_].a[:, i]
            for j in np.nonzero(col)[0]:
                j = int(j)
                if algebra.basis[j].source != v:
                    raise ValueError("right multiplication left the projective block")
                m[pos[j], pos[i]] = col[j] % p
        act[name_] = Matrix(algebra.field, m)
    mod = Module(algebra, dims, act, name=f"P({v})", check=False)
    mod.basis_index = {i: pos[i] for i in idx}  # algebra basis index -> column
    return mod


def dual_module(m: Module, op_algebra: BasedAlgebra) -> Module:
    """Linear dual, a module over the opposite algebra."""
    act = {}
    for name_, s, t in m.algebra.quiver.arrows:
        act[name_] = m.act[name_].transpose()  # maps (DM)_t -> (DM)_s over op
    return Module(op_algebra, dict(m.dims), act, name=f"D({m.name})" if m.name else "", check=False)


def dual_map(f: ModuleMap, op_algebra: BasedAlgebra) -> ModuleMap:
    src = dual_module(f.target, op_algebra)
    tgt = dual_module(f.source, op_algebra)
    return ModuleMap(src, tgt, {v: f.mats[v].transpose() for v in f.mats}, check=False)


def injective_module(algebra: BasedAlgebra, v: Vertex) -> Module:
    """I_v: dual of the opposite projective at v."""
    op = algebra.opposite()
    pv = projective_module(op, v)
    mod = dual_module(pv, algebra)
    mod.name = f"I({v})"
    return mod


def regular_module(algebra: BasedAlgebra) -> Tuple[Module, List[Module]]:
    """The direct sum of all P_v in vertex order, with the summand list."""
    projs = [projective_module(algebra, v) for v in algebra.quiver.vertices]
    total, incls, projections = direct_sum(projs)
    return total, projs


# -- direct sums ------------------------------------------------------------------


def direct_sum(mods: Sequence[Module]) -> Tuple[Module, List[ModuleMap], List[ModuleMap]]:
    """Block-diagonal sum with canonical inclusions and projections."""
    if not mods:
        raise ValueError("empty direct sum needs an algebra; use zero_module")
    algebra = mods[0].algebra
    field = algebra.field
    dims = {v: sum(m.dims[v] for m in mods) for v in algebra.quiver.vertices}
    act = {}
    for name_, s, t in algebra.quiver.arrows:
        blocks = [[m.act[name_] if i == j else None for j, _ in enumerate(mods)] for i, m in enumerate(mods)]
        act[name_] = block_matrix(field, blocks, [m.dims[t] for m in mods], [m.dims[s] for m in mods])
    total = Module(algebra, dims, act, name="(+)".join(m.name or "?" for m in mods), check=False)
    incls, projs = [], []
    for i, m in enumerate(mods):
        inc, prj = {}, {}
        for v in algebra.quiver.vertices:
            before = sum(mods[j].dims[v] for j in range(i))
            e = np.zeros((dims[v], m.dims[v]), dtype=np.int64)
            for k in range(m.dims[v]):
                e[before + k, k] = 1
            inc[v] = Matrix(field, e)
            prj[v] = Matrix(field, e.T.copy())
        incls.append(ModuleMap(m, total, inc, check=False))
        projs.append(ModuleMap(total, m, prj, check=False))
    return total, incls, projs


# -- kernels, cokernels, images -----------------------------------------------------


def kernel(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    """(K, inclusion) with K_v = ker(f_v) and induced arrow action."""
    algebra = f.source.algebra
    kmats = {v: kernel_basis(f.mats[v]) for v in f.mats}
    dims = {v: kmats[v].cols for v in kmats}
    act = {}
    for name_, s, t in algebra.quiver.arrows:
        image_of_kernel = f.source.act[name_].mul(kmats[s])
        sol = solve(kmats[t], image_of_kernel)
        if sol is None:
            raise ValueError("kernel is not a submodule; map does not commute")
        act[name_] = sol[0]
    K = Module(algebra, dims, act, name=f"ker", check=False)
    incl = ModuleMap(K, f.source, kmats, check=False)
    return K, incl


def cokernel(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    """(C, projection) with C_v = coker(f_v) and induced arrow action."""
    algebra = f.target.algebra
    qmats = {}
    for v in f.mats:
        ann = kernel_basis(f.mats[v].transpose())
        qmats[v] = ann.transpose()
    dims = {v: qmats[v].rows for v in qmats}
    act = {}
    for name_, s, t in algebra.quiver.arrows:
        rhs = qmats[t].mul(f.target.act[name_])
        sol = solve(qmats[s].transpose(), rhs.transpose())
        if sol is None:
            raise ValueError("cokernel action not induced; map does not commute")
        act[name_] = sol[0].transpose()
    C = Module(algebra, dims, act, name="coker", check=False)
    proj = ModuleMap(f.target, C, qmats, check=False)
    return C, proj


def image(f: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """(I, inclusion into target, epi from source)."""
    algebra = f.source.algebra
    imats = {v: column_space_basis(f.mats[v]) for v in f.mats}
    dims = {v: imats[v].cols for v in imats}
    act = {}
    for name_, s, t in algebra.quiver.arrows:
        pushed = f.target.act[name_].mul(imats[s])
        sol = solve(imats[t], pushed)
        if sol is None:
            raise ValueError("image is not a submodule")
        act[name_] = sol[0]
    I = Module(algebra, dims, act, name="im", check=False)
    incl = ModuleMap(I, f.target, imats, check=False)
    epi_mats = {}
    for v in f.mats:
        sol = solve(imats[v], f.mats[v])
        epi_mats[v] = sol[0]
    epi = ModuleMap(f.source, I, epi_mats, check=False)
    return I, incl, epi


def submodule_from_columns(m: Module, cols: Dict[Vertex, Matrix]) -> Tuple[Module, ModuleMap]:
    """Smallest submodule containing the given column spans, with inclusion."""
    algebra = m.algebra
    field = m.field
    spans = {v: cols.get(v, field.zeros(m.dims[v], 0)) for v in m.dims}
    changed = True
    while changed:
        changed = False
        for name_, s, t in algebra.quiver.arrows:
            pushed = m.act[name_].mul(spans[s])
            combined = column_space_basis(spans[t].hstack(pushed))
            if combined.cols != spans[t].cols:
                spans[t] = combined
                changed = True
    incl_mats = {v: column_space_basis(spans[v]) for v in spans}
    dims = {v: incl_mats[v].cols for v in incl_mats}
    act = {}
    for name_, s, t in algebra.quiver.arrows:
        pushed = m.act[name_].mul(incl_mats[s])
        act[name_] = solve(incl_mats[t], pushed)[0]
    sub = Module(algebra, dims, act, check=False)
    return sub, ModuleMap(sub, m, incl_mats, check=False)


# -- hom spaces -----------------------------------------------------------------


def hom(m: Module, n: Module) -> List[ModuleMap]:
    """Basis of the space of module maps m -> n.

    One kernel computation on the assembled commuting-square system.
    """
    algebra = m.algebra
    field = m.field
    verts = algebra.quiver.vertices
    sizes = [n.dims[v] * m.dims[v] for v in verts]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    if total == 0:
        return []
    rows = []
    vpos = {v: i for i, v in enumerate(verts)}
    for name_, s, t in algebra.quiver.arrows:
        r = n.dims[t] * m.dims[s]
        if r == 0:
            continue
        block = np.zeros((r, total), dtype=np.int64)
        # N_a f_s - f_t M_a = 0, row-major vec
        a_part = np.kron(n.act[name_].a, np.eye(m.dims[s], dtype=np.int64))
        b_part = np.kron(np.eye(n.dims[t], dtype=np.int64), m.act[name_].a.T)
        si, ti = vpos[s], vpos[t]
        block[:, offsets[si] : offsets[si + 1]] = a_part
        block[:, offsets[ti] : offsets[ti + 1]] = (block[:, offsets[ti] : offsets[ti + 1]] - b_part) % field.p
        rows.append(block % field.p)
    if rows:
        system = Matrix(field, np.vstack(rows))
        kb = kernel_basis(system)
    else:
        kb = field.identity(total)
    out = []
    for k in range(kb.cols):
        out.append(map_from_vec(m, n, kb.a[:, k].copy()))
    return out


def hom_dim(m: Module, n: Module) -> int:
    return len(hom(m, n))


def coordinates_in_hom_basis(basis: List[ModuleMap], f: ModuleMap) -> np.ndarray:
    """Coordinates of f in a hom basis; raises when not in the span."""
    if not basis:
        if f.is_zero():
            return np.zeros(0, dtype=np.int64)
        raise ValueError("nonzero map in zero hom space")
    field = f.field
    mat = Matrix(field, np.stack([b.vec() for b in basis], axis=1))
    target = Matrix(field, f.vec().reshape(-1, 1))
    sol = solve(mat, target)
    if sol is None:
        raise ValueError("map not in span of hom basis")
    return sol[0].a[:, 0].copy()


# -- socle, radical, top -----------------------------------------------------------


def socle(m: Module) -> Tuple[Module, ModuleMap]:
    """Largest submodule killed by every arrow out of its vertex."""
    field = m.field
    incl_mats = {}
    for v in m.dims:
        outs = m.algebra.quiver.arrows_from(v)
        if not outs or m.dims[v] == 0:
            incl_mats[v] = field.identity(m.dims[v])
            continue
        stacked = Matrix(field, np.vstack([m.act[a].a for a in outs]))
        incl_mats[v] = kernel_basis(stacked)
    dims = {v: incl_mats[v].cols for v in incl_mats}
    act = {name_: field.zeros(dims[t], dims[s]) for name_, s, t in m.algebra.quiver.arrows}
    soc = Module(m.algebra, dims, act, name=f"soc({m.name})", check=False)
    return soc, ModuleMap(soc, m, incl_mats, check=False)


def radical_submodule(m: Module) -> Tuple[Module, ModuleMap]:
    """rad M = sum of images of all arrows."""
    field = m.field
    incl_mats = {}
    for v in m.dims:
        ins = m.algebra.quiver.arrows_into(v)
        if not ins or m.dims[v] == 0:
            incl_mats[v] = field.zeros(m.dims[v], 0)
            continue
        stacked = Matrix(field, np.hstack([m.act[a].a for a in ins]))
        incl_mats[v] = column_space_basis(stacked)
    dims = {v: incl_mats[v].cols for v in incl_mats}
    act = {}
    for name_, s, t in m.algebra.quiver.arrows:
        pushed = m.act[name_].mul(incl_mats[s])
        act[name_] = solve(incl_mats[t], pushed)[0]
    rad = Module(m.algebra, dims, act, name=f"rad({m.name})", check=False)
    return rad, ModuleMap(rad, m, incl_mats, check=False)


def top_dims(m: Module) -> Dict[Vertex, int]:
    rad, _ = radical_submodule(m)
    return {v: m.dims[v] - rad.dims[v] for v in m.dims}


# -- Nakayama functor ----------------------------------------------------------------


def _hom_to_projective_bases(m: Module, algebra: BasedAlgebra):
    projs = {v: projective_module(algebra, v) for v in algebra.quiver.vertices}
    return {v: hom(m, projs[v]) for v in algebra.quiver.vertices}, projs


def nakayama(m: Module, op_algebra: Optional[BasedAlgebra] = None) -> Module:
    """nu(M) = D Hom(M, A): sends P_v to I_v."""
    algebra = m.algebra
    field = m.field
    op = op_algebra or algebra.opposite()
    bases, projs = _hom_to_projective_bases(m, algebra)
    dims = {v: len(bases[v]) for v in bases}
    # left multiplication rho_a: P_w -> P_v for a: v -> w
    act_op = {}
    for name_, v, w in algebra.quiver.arrows:
        rho = _left_mult_map(algebra, name_, projs[w], projs[v])
        cols = []
        for f in bases[w]:
            g = f.then(rho)
            cols.append(coordinates_in_hom_basis(bases[v], g))
        mat = np.stack(cols, axis=1) if cols else np.zeros((dims[v], 0), dtype=np.int64)
        act_op[name_] = Matrix(field, mat % field.p)
    # act_op[a]: (M^dual)_w -> (M^dual)_v over the opposite; dualize back
    act = {name_: act_op[name_].transpose() for name_ in act_op}
    return Module(algebra, dims, act, name=f"nu({m.name})" if m.name else "", check=False)


def _left_mult_map(algebra: BasedAlgebra, arrow: str, p_w: Module, p_v: Module) -> ModuleMap:
    """rho_arrow: P_w -> P_v, x -> arrow * x, for arrow: v -> w."""
    field = algebra.field
    ai = algebra.arrow_index[arrow]
    mats = {}
    for u in algebra.quiver.vertices:
        m = np.zeros((p_v.dims[u], p_w.dims[u]), dtype=np.int64)
        for bidx, col in p_w.basis_index.items():
            if algebra.basis[bidx].target != u:
                continue
            prod = algebra.basis_product(ai, bidx)
            for j in np.nonzero(prod)[0]:
                j = int(j)
                m[p_v.basis_index[j], col] = prod[j]
        mats[u] = Matrix(field, m)
    return ModuleMap(p_w, p_v, mats, check=False)


def nakayama_map(f: ModuleMap, nu_src: Module, nu_tgt: Module) -> ModuleMap:
    """Functorial action of nu on a map, given nu of its endpoints."""
    algebra = f.source.algebra
    bases_m, _ = _hom_to_projective_bases(f.source, algebra)
    bases_n, _ = _hom_to_projective_bases(f.target, algebra)
    mats = {}
    for v in algebra.quiver.vertices:
        cols = []
        for g in bases_n[v]:
            cols.append(coordinates_in_hom_basis(bases_m[v], f.then(g)))
        mat = np.stack(cols, axis=1) if cols else np.zeros((len(bases_m[v]), 0), dtype=np.int64)
        mats[v] = Matrix(f.field, mat % f.field.p).transpose()
    return ModuleMap(nu_src, nu_tgt, mats, check=False)


def is_selfinjective(algebra: BasedAlgebra) -> Optional[Dict[Vertex, Vertex]]:
    """Nakayama vertex permutation nu with P_v isomorphic to I_{nu(v)}, if any.

    A basic algebra is self-injective iff every P_v has a simple socle
    and the socle vertices are pairwise distinct.
    """
    perm: Dict[Vertex, Vertex] = {}
    for v in algebra.quiver.vertices:
        pv = projective_module(algebra, v)
        soc, _ = socle(pv)
        support = [w for w in soc.dims if soc.dims[w] > 0]
        if len(support) != 1 or soc.dims[support[0]] != 1:
            return None
        perm[v] = support[0]
    if len(set(perm.values())) != len(perm):
        return None
    return perm
