"""The module category of a finite additive subcategory.

Given an additive generator (a list of pairwise non-isomorphic
indecomposables), builds the endomorphism algebra E as a based algebra
over a Hom basis, together with the dictionary sending an object X to
the E-module of all maps from the generators into X.  Hom spaces are
taken in the stable category (the cluster-tilting setting) or as plain
module maps (the projectives-over-a-self-injective-algebra setting).

Conventions: an E-quiver arrow i -> j carries a hom T_j -> T_i, so the
dictionary X |-> (v |-> Hom(T_v, X)) is covariant and sends T_i to the
indecomposable projective at vertex i.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebras import BasedAlgebra, BasisElement
from .decompose import DecompositionError, local_radical_coords, local_residue_scalar
from .field import Matrix, column_space_basis, rank, rref, solve
from .modules import (
    Module,
    ModuleMap,
    coordinates_in_hom_basis,
    hom,
    identity_map,
    zero_map,
)
from .quivers import Quiver
from .stable import StableContext


class FunctorCategoryError(ValueError):
    pass


class FunctorCategoryModel:
    """E = End of the additive generator, with the object dictionary."""

    def __init__(self, summands: Sequence[Module], ambient: Optional[StableContext] = None,
                 name: str = ""):
        if not summands:
            raise FunctorCategoryError("additive generator must be nonempty")
        self.summands: List[Module] = list(summands)
        self.ambient = ambient
        self.stable = ambient is not None
        self.base_algebra = summands[0].algebra
        self.field = summands[0].field
        self.name = name
        m = len(summands)
        if self.stable:
            stripped = [ambient.strip_projectives(t)[0] for t in summands]
            if any(t.total_dim() == 0 for t in stripped):
                raise FunctorCategoryError("stable-mode summands must be non-projective")
            self.summands = stripped
        # pairwise non-isomorphic check via dimension vectors + iso search
        from .decompose import find_iso

        for i in range(m):
            for j in range(i + 1, m):
                if self.summands[i].dim_vector() == self.summands[j].dim_vector() \
                        and find_iso(self.summands[i], self.summands[j]) is not None:
                    raise FunctorCategoryError(f"summands {i} and {j} are isomorphic")
        self._hom_reps: Dict[Tuple[int, int], List[ModuleMap]] = {}
        self._hom_nf: Dict[Tuple[int, int], np.ndarray] = {}
        for i in range(m):
            for j in range(m):
                reps, nfmat = self._compute_hom_basis(self.summands[i], self.summands[j])
                self._hom_reps[(i, j)] = reps
                self._hom_nf[(i, j)] = nfmat
        self._build_algebra()
        self._dict_cache: Dict[tuple, Module] = {}
        self._e_selfinjective: Optional[Dict] = None

    # -- hom spaces of the category -----------------------------------------------------

    def _compute_hom_basis(self, x: Module, y: Module) -> Tuple[List[ModuleMap], np.ndarray]:
        if self.stable:
            stable_maps = self.ambient.stable_hom(x, y)
            reps = [sm.rep for sm in stable_maps]
            if reps:
                nfmat = np.stack([sm.nf for sm in stable_maps], axis=1)
            else:
                nfmat = np.zeros((0, 0), dtype=np.int64)
            return reps, nfmat
        reps = hom(x, y)
        if reps:
            nfmat = np.stack([f.vec() for f in reps], axis=1)
        else:
            nfmat = np.zeros((0, 0), dtype=np.int64)
        return reps, nfmat

    def hom_basis(self, i: int, j: int) -> List[ModuleMap]:
        """Basis of Hom_F(T_i, T_j)."""
        return self._hom_reps[(i, j)]

    def hom_dim(self, i: int, j: int) -> int:
        return len(self._hom_reps[(i, j)])

    def hom_coords(self, i: int, j: int, rep: ModuleMap) -> np.ndarray:
        """Coordinates of a map T_i -> T_j in the chosen hom basis."""
        reps = self._hom_reps[(i, j)]
        nfmat = self._hom_nf[(i, j)]
        if not reps:
            if self._map_is_zero(rep):
                return np.zeros(0, dtype=np.int64)
            raise FunctorCategoryError("nonzero map in zero hom space")
        target = self.ambient.normalize(rep) if self.stable else rep.vec()
        sol = solve(Matrix(self.field, nfmat), Matrix(self.field, target.reshape(-1, 1)))
        if sol is None:
            raise FunctorCategoryError("map not in hom space span")
        return sol[0].a[:, 0].copy()

    def _map_is_zero(self, rep: ModuleMap) -> bool:
        if self.stable:
            return not self.ambient.normalize(rep).any()
        return rep.is_zero()

    # -- the endomorphism algebra -------------------------------------------------------

    def _radical_value_reps(self, i: int, j: int) -> List[ModuleMap]:
        """Representatives spanning rad Hom(T_j, T_i) (values of arrows i -> j)."""
        reps = self._hom_reps[(j, i)]
        if i != j:
            return list(reps)
        if not reps:
            return []
        rad_rows = local_radical_coords(reps)
        out = []
        for row in rad_rows:
            f = None
            for c, b in zip(row, reps):
                if c:
                    term = b.scale(int(c))
                    f = term if f is None else f + term
            if f is not None:
                out.append(f)
        return out

    def _build_algebra(self):
        m = len(self.summands)
        field = self.field
        p = field.p
        # choose Gabriel arrows: complement of rad^2 inside rad per pair
        rad_reps: Dict[Tuple[int, int], List[ModuleMap]] = {}
        for i in range(m):
            for j in range(m):
                rad_reps[(i, j)] = self._radical_value_reps(i, j)
        arrow_specs: List[Tuple[str, int, int, ModuleMap]] = []
        for i in range(m):
            for j in range(m):
                rads = rad_reps[(i, j)]
                if not rads:
                    continue
                vdim = self.hom_dim(j, i)
                rad2_cols = []
                for l in range(m):
                    for f in rad_reps[(l, j)]:
                        for g in rad_reps[(i, l)]:
                            # path i -> l -> j has value g_val . f_val... compose reps:
                            comp = f.then(g)
                            rad2_cols.append(self.hom_coords(j, i, comp))
                base = np.stack(rad2_cols, axis=1) if rad2_cols else np.zeros((vdim, 0), dtype=np.int64)
                aug_cols = [self.hom_coords(j, i, f) for f in rads]
                aug = np.concatenate([base] + [np.stack(aug_cols, axis=1)], axis=1)
                _, _, pivots = rref(Matrix(field, aug))
                chosen = [c - base.shape[1] for c in pivots if c >= base.shape[1]]
                for k in chosen:
                    arrow_specs.append((f"g{i}_{j}_{k}", i, j, rads[k]))
        quiver = Quiver(list(range(m)), [(n, s, t) for n, s, t, _ in arrow_specs])
        arrow_value = {n: rep for n, _, _, rep in arrow_specs}
        # monomial closure over hom values
        monomials: List[Tuple[Tuple[str, ...], int, int, ModuleMap]] = []
        accepted: Dict[Tuple[int, int], List[int]] = {}
        vmats: Dict[Tuple[int, int], np.ndarray] = {}
        ext: Dict[Tuple[int, str], np.ndarray] = {}

        def try_accept(path, i, j, rep) -> Tuple[bool, np.ndarray]:
            coords = self.hom_coords(j, i, rep)
            key = (i, j)
            cur = accepted.setdefault(key, [])
            vmat = vmats.get(key)
            if vmat is None:
                vmat = np.zeros((len(coords), 0), dtype=np.int64)
            if coords.size == 0:
                return False, np.zeros(len(monomials), dtype=np.int64)
            sol = solve(Matrix(field, vmat), Matrix(field, coords.reshape(-1, 1)))
            if sol is not None:
                out = np.zeros(len(monomials), dtype=np.int64)
                for c, idx in zip(sol[0].a[:, 0], cur):
                    out[idx] = int(c) % p
                return False, out
            monomials.append((path, i, j, rep))
            cur.append(len(monomials) - 1)
            vmats[key] = np.concatenate([vmat, coords.reshape(-1, 1)], axis=1)
            return True, np.zeros(0, dtype=np.int64)

        for i in range(m):
            ident = identity_map(self.summands[i])
            ok, _ = try_accept((), i, i, ident)
            if not ok:
                raise FunctorCategoryError(f"identity of summand {i} is stably zero")
        prev_new = list(range(len(monomials)))
        while prev_new:
            new_now = []
            for bidx in prev_new:
                path, i, j, brep = monomials[bidx]
                for aname, asrc, atgt, arep in arrow_specs:
                    if asrc != j:
                        continue
                    comp = arep.then(brep)  # value of path.(arrow): T_atgt -> T_i
                    is_new, red = try_accept(path + (aname,), i, atgt, comp)
                    if is_new:
                        nidx = len(monomials) - 1
                        vec = np.zeros(nidx + 1, dtype=np.int64)
                        vec[nidx] = 1
                        ext[(bidx, aname)] = vec
                        new_now.append(nidx)
                    else:
                        ext[(bidx, aname)] = red
            prev_new = new_now
        # completeness: monomial values must span every hom space
        expected = sum(self.hom_dim(j, i) for i in range(m) for j in range(m))
        if len(monomials) != expected:
            raise FunctorCategoryError(
                f"generators span {len(monomials)} of {expected} dimensions; "
                "residue fields may exceed F_p (field too small to split)")
        basis = [BasisElement(path, i, j) for path, i, j, _ in monomials]
        self.E = BasedAlgebra(field, quiver, basis, ext, name=self.name or "End(G)")
        self.monomial_values: List[ModuleMap] = [rep for _, _, _, rep in monomials]
        self._accepted = accepted
        self._vmats = vmats

    def value_to_coords(self, i: int, j: int, rep: ModuleMap) -> np.ndarray:
        """E-coordinates (supported on i->j monomials) of a hom T_j -> T_i."""
        coords = self.hom_coords(j, i, rep)
        key = (i, j)
        cur = self._accepted.get(key, [])
        out = np.zeros(self.E.dim, dtype=np.int64)
        if coords.size == 0:
            return out
        vmat = self._vmats[key]
        sol = solve(Matrix(self.field, vmat), Matrix(self.field, coords.reshape(-1, 1)))
        if sol is None:
            raise FunctorCategoryError("value outside monomial span")
        for c, idx in zip(sol[0].a[:, 0], cur):
            out[idx] = int(c)
        return out

    # -- dictionary ----------------------------------------------------------------------

    def _hom_into(self, x: Module) -> Dict[int, Tuple[List[ModuleMap], np.ndarray]]:
        out = {}
        for v in range(len(self.summands)):
            reps, nfmat = self._compute_hom_basis(self.summands[v], x)
            out[v] = (reps, nfmat)
        return out

    def _coords_into(self, x: Module, v: int, data, rep: ModuleMap) -> np.ndarray:
        reps, nfmat = data[v]
        if not reps:
            if self._map_is_zero(rep):
                return np.zeros(0, dtype=np.int64)
            raise FunctorCategoryError("nonzero map in zero hom space")
        target = self.ambient.normalize(rep) if self.stable else rep.vec()
        sol = solve(Matrix(self.field, nfmat), Matrix(self.field, target.reshape(-1, 1)))
        if sol is None:
            raise FunctorCategoryError("map not in span")
        return sol[0].a[:, 0].copy()

    def to_module(self, x: Module) -> Module:
        """Y(X): vertex v carries Hom(T_v, X); arrows act by precomposition."""
        key = x.key()
        if key in self._dict_cache:
            return self._dict_cache[key]
        data = self._hom_into(x)
        dims = {v: len(data[v][0]) for v in data}
        act = {}
        for aname, i, j, arep in self._arrow_specs():
            cols = []
            for g in data[i][0]:
                comp = arep.then(g)  # T_j -> T_i -> X
                cols.append(self._coords_into(x, j, data, comp))
            mat = np.stack(cols, axis=1) if cols else np.zeros((dims[j], 0), dtype=np.int64)
            act[aname] = Matrix(self.field, mat % self.field.p)
        mod = Module(self.E, dims, act, name=f"Y({x.name})" if x.name else "Y", check=False)
        mod.dict_source = x
        mod.dict_data = data
        self._dict_cache[key] = mod
        return mod

    def _arrow_specs(self):
        for name_, i, j in self.E.quiver.arrows:
            idx = self.E.arrow_index[name_]
            yield name_, i, j, self.monomial_values[idx]

    def to_map(self, f: ModuleMap, ysrc: Optional[Module] = None, ytgt: Optional[Module] = None) -> ModuleMap:
        """Y(f) by postcomposition on the hom bases."""
        ysrc = ysrc if ysrc is not None else self.to_module(f.source)
        ytgt = ytgt if ytgt is not None else self.to_module(f.target)
        sdata, tdata = ysrc.dict_data, ytgt.dict_data
        mats = {}
        for v in range(len(self.summands)):
            cols = []
            for g in sdata[v][0]:
                comp = g.then(f)
                cols.append(self._coords_into(f.target, v, tdata, comp))
            mat = np.stack(cols, axis=1) if cols else np.zeros((ytgt.dims[v], 0), dtype=np.int64)
            mats[v] = Matrix(self.field, mat % self.field.p)
        return ModuleMap(ysrc, ytgt, mats, check=False)

    def from_map(self, psi: ModuleMap, x: Module, y: Module) -> ModuleMap:
        """Inverse dictionary on maps: the F-map with Y(f) = psi."""
        basis = self._compute_hom_basis(x, y)[0]
        ysrc = self.to_module(x)
        ytgt = self.to_module(y)
        if not basis:
            if psi.is_zero():
                return zero_map(x, y)
            raise FunctorCategoryError("nonzero E-map with zero hom space")
        cols = np.stack([self.to_map(f, ysrc, ytgt).vec() for f in basis], axis=1)
        sol = solve(Matrix(self.field, cols), Matrix(self.field, psi.vec().reshape(-1, 1)))
        if sol is None:
            raise FunctorCategoryError("E-map is not in the image of the dictionary")
        out = None
        for c, f in zip(sol[0].a[:, 0], basis):
            term = f.scale(int(c))
            out = term if out is None else out + term
        return out

    def projective(self, i: int) -> Module:
        return self.to_module(self.summands[i])

    def e_selfinjective(self) -> Dict:
        """Nakayama permutation of E; raises FunctorCategoryError when absent."""
        from .modules import is_selfinjective

        if self._e_selfinjective is None:
            perm = is_selfinjective(self.E)
            if perm is None:
                raise FunctorCategoryError("E not self-injective")
            self._e_selfinjective = perm
        return self._e_selfinjective


class Twist:
    """The suspension as an automorphism of E-mod: a vertex permutation
    plus an algebra automorphism twisting the action."""

    def __init__(self, model: FunctorCategoryModel, perm: Dict[int, int], s_matrix: Matrix):
        self.model = model
        self.perm = dict(perm)
        self.inv_perm = {v: k for k, v in perm.items()}
        self.s = s_matrix
        from .field import invert

        self.s_inv = invert(s_matrix)
        if self.s_inv is None:
            raise ValueError("twist matrix is singular")
        self._order: Optional[int] = None

    @classmethod
    def identity(cls, model: FunctorCategoryModel) -> "Twist":
        m = len(model.summands)
        return cls(model, {i: i for i in range(m)}, model.field.identity(model.E.dim))

    @classmethod
    def from_suspension(cls, model: FunctorCategoryModel, power: int,
                        rng: Optional[random.Random] = None) -> "Twist":
        """Twist induced by the ambient cosyzygy power on the summands."""
        if not model.stable:
            raise ValueError("suspension twists need a stable ambient category")
        amb = model.ambient
        m = len(model.summands)
        perm: Dict[int, int] = {}
        u_reps: List[ModuleMap] = []
        for i, t in enumerate(model.summands):
            st = amb.cosyzygy_power(t, power)
            found = None
            for j, t2 in enumerate(model.summands):
                u = amb.stable_iso(st, t2, rng=rng)
                if u is not None:
                    found = (j, u)
                    break
            if found is None:
                raise ValueError(f"summand {i} is not stable under the suspension power {power}")
            perm[i] = found[0]
            u_reps.append(found[1])
        if len(set(perm.values())) != m:
            raise ValueError("suspension does not permute the summands")
        u_invs = [_stable_inverse(amb, u) for u in u_reps]
        p = model.field.p
        s = np.zeros((model.E.dim, model.E.dim), dtype=np.int64)
        for idx, rep in enumerate(model.monomial_values):
            b = model.E.basis[idx]
            i, j = b.source, b.target
            big = amb.cosyzygy_power_map(rep, power)
            val = u_invs[j].then(big).then(u_reps[i])
            s[:, idx] = model.value_to_coords(perm[i], perm[j], val)
        return cls(model, perm, Matrix(model.field, s % p))

    def order(self) -> int:
        if self._order is None:
            ident = self.model.field.identity(self.model.E.dim)
            cur_perm = dict(self.perm)
            cur_s = self.s
            k = 1
            while k < 100000:
                if all(cur_perm[i] == i for i in cur_perm) and cur_s == ident:
                    break
                cur_perm = {i: self.perm[cur_perm[i]] for i in cur_perm}
                cur_s = self.s.mul(cur_s)
                k += 1
            else:
                raise RuntimeError("twist order exceeded bound")
            self._order = k
        return self._order

    def permutation_order(self) -> int:
        k = 1
        cur = dict(self.perm)
        while any(cur[i] != i for i in cur):
            cur = {i: self.perm[cur[i]] for i in cur}
            k += 1
        return k

    def apply_element(self, coords: np.ndarray) -> np.ndarray:
        return (self.s.a @ (coords % self.model.field.p)) % self.model.field.p

    def module(self, m: Module) -> Module:
        """Twist functor on modules: relabel vertices, act through s^{-1}."""
        E = self.model.E
        dims = {v: m.dims[self.inv_perm[v]] for v in E.quiver.vertices}
        act = {}
        for name_, i, j in E.quiver.arrows:
            coords = self.s_inv.a[:, E.arrow_index[name_]].copy()
            act[name_] = m.element_action(coords, self.inv_perm[i], self.inv_perm[j])
        out = Module(E, dims, act, name=f"Sig({m.name})" if m.name else "", check=False)
        return out

    def map(self, f: ModuleMap, tsrc: Optional[Module] = None, ttgt: Optional[Module] = None) -> ModuleMap:
        tsrc = tsrc if tsrc is not None else self.module(f.source)
        ttgt = ttgt if ttgt is not None else self.module(f.target)
        mats = {v: f.mats[self.inv_perm[v]] for v in tsrc.dims}
        return ModuleMap(tsrc, ttgt, mats, check=False)

    def inverse(self) -> "Twist":
        return Twist(self.model, self.inv_perm, self.s_inv)

    def power_module(self, m: Module, k: int) -> Module:
        tw = self if k >= 0 else self.inverse()
        out = m
        for _ in range(abs(k)):
            out = tw.module(out)
        return out

    def power_map(self, f: ModuleMap, k: int) -> ModuleMap:
        tw = self if k >= 0 else self.inverse()
        out = f
        for _ in range(abs(k)):
            out = tw.map(out)
        return out


def _stable_inverse(ctx: StableContext, u: ModuleMap) -> ModuleMap:
    """A representative of the stable inverse of a stable isomorphism."""
    basis = hom(u.target, u.source)
    if not basis:
        if ctx.is_stably_zero_object(u.source) and ctx.is_stably_zero_object(u.target):
            return zero_map(u.target, u.source)
        raise ValueError("no candidate inverses")
    field = u.field
    id_src = identity_map(u.source)
    id_tgt = identity_map(u.target)
    cols_left = [ctx.normalize(u.then(g)) for g in basis]
    cols_right = [ctx.normalize(g.then(u)) for g in basis]
    mat = np.concatenate([np.stack(cols_left, axis=1), np.stack(cols_right, axis=1)], axis=0)
    target = np.concatenate([ctx.normalize(id_src), ctx.normalize(id_tgt)])
    sol = solve(Matrix(field, mat), Matrix(field, target.reshape(-1, 1)))
    if sol is None:
        raise ValueError("map is not a stable isomorphism")
    out = None
    for c, g in zip(sol[0].a[:, 0], basis):
        term = g.scale(int(c))
        out = term if out is None else out + term
    return out
