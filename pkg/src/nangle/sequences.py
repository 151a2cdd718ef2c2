"""The n-angle calculus: n-Sigma-sequences over a based additive
category realized as projective modules over the functor-category
algebra E, with the suspension acting as a twist.

A sequence is X_1 -> ... -> X_n -> Sigma X_1; its left rotation ends in
(-1)^n Sigma(alpha_1).  Exactness means exactness of every vertex
component of the induced periodic complex (one full period plus one
overlap position).  Cones follow the displayed two-by-two block
matrices, including the leading minus on the diagonal.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .field import Matrix, rank, solve
from .functorcat import FunctorCategoryModel, Twist
from .modules import (
    Module,
    ModuleMap,
    direct_sum,
    hom,
    identity_map,
    image,
    kernel,
    map_from_vec,
    zero_map,
    zero_module,
)


class SigmaCategory:
    """(F, Sigma, n): the functor-category model, its twist, and the arity."""

    def __init__(self, model: FunctorCategoryModel, twist: Twist, n: int):
        if n < 3:
            raise ValueError("arity must be at least 3")
        self.model = model
        self.twist = twist
        self.n = n
        self.E = model.E
        self.field = model.field
        self._stable = None

    @property
    def stable(self):
        """Stable context over E (requires E self-injective)."""
        if self._stable is None:
            from .functorcat import FunctorCategoryError
            from .modules import is_selfinjective
            from .stable import StableContext

            if is_selfinjective(self.E) is None:
                raise FunctorCategoryError("E not self-injective")
            self._stable = StableContext(self.E)
        return self._stable

    def zero_object(self) -> Module:
        return zero_module(self.E)

    def sigma(self, m: Module) -> Module:
        return self.twist.module(m)

    def sigma_map(self, f: ModuleMap) -> ModuleMap:
        return self.twist.map(f)

    def sigma_inv(self, m: Module) -> Module:
        return self.twist.inverse().module(m)

    def sigma_inv_map(self, f: ModuleMap) -> ModuleMap:
        return self.twist.inverse().map(f)


class NSigmaSequence:
    """Objects X_1..X_n and maps alpha_1..alpha_n with alpha_n into Sigma X_1."""

    def __init__(self, category: SigmaCategory, objects: Sequence[Module],
                 maps: Sequence[ModuleMap], check: bool = True):
        n = category.n
        if len(objects) != n or len(maps) != n:
            raise ValueError(f"arity mismatch: expected {n} objects and maps")
        self.category = category
        self.objects = list(objects)
        self.maps = list(maps)
        if check:
            for i in range(n - 1):
                if maps[i].source.key() != objects[i].key() or maps[i].target.key() != objects[i + 1].key():
                    raise ValueError(f"map {i + 1} endpoints do not match the objects")
            closing = category.sigma(objects[0])
            if maps[n - 1].source.key() != objects[n - 1].key() or maps[n - 1].target.key() != closing.key():
                raise ValueError("closing map must land in Sigma X_1")

    @property
    def n(self) -> int:
        return self.category.n

    def key(self) -> tuple:
        return (tuple(o.key() for o in self.objects), tuple(m.key() for m in self.maps))

    def composite_is_complex(self) -> bool:
        """alpha_{i+1} alpha_i = 0 for all i, including the wrap."""
        for i in range(self.n - 1):
            if not self.maps[i].then(self.maps[i + 1]).is_zero():
                return False
        wrap = self.maps[self.n - 1].then(self.category.sigma_map(self.maps[0]))
        return wrap.is_zero()

    def to_dict(self) -> dict:
        return {
            "objects": [{"dims": {str(v): d for v, d in o.dims.items()}} for o in self.objects],
            "maps": [{str(v): m.mats[v].tolist() for v in m.mats} for m in self.maps],
        }

    def __repr__(self):
        dims = [o.total_dim() for o in self.objects]
        return f"NSigmaSequence(n={self.n}, dims={dims})"


def trivial_sequence(category: SigmaCategory, x: Module, slot: int = 1) -> NSigmaSequence:
    """Identity in the given slot, zeros elsewhere (a rotation of (TX))."""
    n = category.n
    if not 1 <= slot <= n:
        raise ValueError("slot out of range")
    zero = category.zero_object()
    objects = [x, x] + [zero] * (n - 2)
    maps = [identity_map(x)]
    for i in range(1, n - 1):
        maps.append(zero_map(objects[i], objects[i + 1]))
    maps.append(zero_map(zero if n > 2 else x, category.sigma(x)))
    seq = NSigmaSequence(category, objects, maps)
    for _ in range(slot - 1):
        seq = rotate_right(seq)
    return seq


def rotate_left(seq: NSigmaSequence) -> NSigmaSequence:
    """(X_2 -> ... -> Sigma X_1 -> (-1)^n Sigma alpha_1 -> Sigma X_2)."""
    cat = seq.category
    n = cat.n
    sx1 = cat.sigma(seq.objects[0])
    sx2 = cat.sigma(seq.objects[1])
    objects = seq.objects[1:] + [sx1]
    sign = 1 if n % 2 == 0 else -1
    last = cat.twist.map(seq.maps[0], sx1, sx2).scale(sign)
    maps = seq.maps[1:] + [last]
    return NSigmaSequence(cat, objects, maps)


def rotate_right(seq: NSigmaSequence) -> NSigmaSequence:
    """Exact inverse of rotate_left."""
    cat = seq.category
    n = cat.n
    inv = cat.twist.inverse()
    sxn = inv.module(seq.objects[n - 1])
    first = inv.map(seq.maps[n - 1], sxn, seq.objects[0]).scale(1 if n % 2 == 0 else -1)
    objects = [sxn] + seq.objects[: n - 1]
    maps = [first] + seq.maps[: n - 1]
    return NSigmaSequence(cat, objects, maps)


def sequence_direct_sum(a: NSigmaSequence, b: NSigmaSequence) -> Tuple[NSigmaSequence, "SequenceMorphism", "SequenceMorphism"]:
    """Blockwise sum, with the two canonical inclusion morphisms."""
    cat = a.category
    n = cat.n
    objects = []
    incl_a, incl_b, proj_a, proj_b = [], [], [], []
    for i in range(n):
        total, incls, projs = direct_sum([a.objects[i], b.objects[i]])
        objects.append(total)
        incl_a.append(incls[0])
        incl_b.append(incls[1])
        proj_a.append(projs[0])
        proj_b.append(projs[1])
    maps = []
    for i in range(n):
        if i < n - 1:
            tgt = objects[i + 1]
            ia, ib = incl_a[i + 1], incl_b[i + 1]
        else:
            tgt = cat.sigma(objects[0])
            # Sigma of a block sum is the block sum of the Sigmas on the nose
            ia = cat.twist.map(incl_a[0], cat.sigma(a.objects[0]), tgt)
            ib = cat.twist.map(incl_b[0], cat.sigma(b.objects[0]), tgt)
        f = proj_a[i].then(a.maps[i]).then(ia) + proj_b[i].then(b.maps[i]).then(ib)
        maps.append(f)
    total_seq = NSigmaSequence(cat, objects, maps)
    ma = SequenceMorphism(a, total_seq, incl_a)
    mb = SequenceMorphism(b, total_seq, incl_b)
    return total_seq, ma, mb


class SequenceMorphism:
    """phi_1..phi_n with all squares commuting (last square closed by Sigma phi_1)."""

    def __init__(self, source: NSigmaSequence, target: NSigmaSequence,
                 phis: Sequence[ModuleMap], check: bool = True):
        self.source = source
        self.target = target
        self.phis = list(phis)
        cat = source.category
        n = cat.n
        if len(self.phis) != n:
            raise ValueError("morphism needs one component per slot")
        if check:
            for i in range(n - 1):
                left = self.phis[i].then(target.maps[i])
                right = source.maps[i].then(self.phis[i + 1])
                if not (left - right).is_zero():
                    raise ValueError(f"square {i + 1} does not commute")
            sphi1 = cat.twist.map(self.phis[0],
                                  cat.sigma(source.objects[0]), cat.sigma(target.objects[0]))
            left = self.phis[n - 1].then(target.maps[n - 1])
            right = source.maps[n - 1].then(sphi1)
            if not (left - right).is_zero():
                raise ValueError("closing square does not commute")

    def is_weak_iso(self) -> bool:
        """Two consecutive components (cyclically) are isomorphisms."""
        n = len(self.phis)
        iso = [p.is_iso() for p in self.phis]
        iso_next = iso[1:] + [iso[0]]  # phi_{n+1} = Sigma phi_1 is iso iff phi_1 is
        return any(a and b for a, b in zip(iso, iso_next))

    def is_iso(self) -> bool:
        return all(p.is_iso() for p in self.phis)

    def is_idempotent(self) -> bool:
        if self.source is not self.target and self.source.key() != self.target.key():
            return False
        return all((p.then(p) - p).is_zero() for p in self.phis)

    def then(self, other: "SequenceMorphism") -> "SequenceMorphism":
        return SequenceMorphism(self.source, other.target,
                                [a.then(b) for a, b in zip(self.phis, other.phis)], check=False)

    def to_dict(self) -> dict:
        return {"phis": [{str(v): m.mats[v].tolist() for v in m.mats} for m in self.phis]}


def identity_morphism(seq: NSigmaSequence) -> SequenceMorphism:
    return SequenceMorphism(seq, seq, [identity_map(o) for o in seq.objects], check=False)


def split_summand(seq: NSigmaSequence, idem: SequenceMorphism) -> NSigmaSequence:
    """The direct summand cut out by an idempotent endomorphism of the sequence."""
    if not idem.is_idempotent():
        raise ValueError("endomorphism is not idempotent")
    cat = seq.category
    n = cat.n
    pieces = []
    incls = []
    for i in range(n):
        piece, incl, _ = image(idem.phis[i])
        pieces.append(piece)
        incls.append(incl)
    maps = []
    for i in range(n):
        if i < n - 1:
            tgt_incl = incls[i + 1]
            tgt = pieces[i + 1]
        else:
            tgt = cat.sigma(pieces[0])
            tgt_incl = cat.twist.map(incls[0], tgt, cat.sigma(seq.objects[0]))
        composite = incls[i].then(seq.maps[i])
        basis = hom(pieces[i], tgt)
        restricted = _solve_in_span(basis, lambda b: b.then(tgt_incl), composite, pieces[i], tgt)
        if restricted is None:
            raise ValueError("idempotent image is not a subsequence")
        maps.append(restricted)
    return NSigmaSequence(cat, pieces, maps)


def cone(phi: SequenceMorphism) -> NSigmaSequence:
    """The two-by-two block sequence of the octahedral-style axiom."""
    cat = phi.source.category
    n = cat.n
    X, Y = phi.source, phi.target
    xs = X.objects + [cat.sigma(X.objects[0]), cat.sigma(X.objects[1])]
    ys = Y.objects + [cat.sigma(Y.objects[0])]
    alphas = X.maps + [cat.twist.map(X.maps[0], xs[n], xs[n + 1])]
    betas = Y.maps
    phis = phi.phis + [cat.twist.map(phi.phis[0], xs[n], ys[n])]
    objects = []
    sums = []
    for k in range(n):
        total, incls, projs = direct_sum([xs[k + 1], ys[k]])
        objects.append(total)
        sums.append((total, incls, projs))
    maps = []
    for k in range(n):
        if k < n - 1:
            tgt_total, tgt_incls, _ = sums[k + 1]
        else:
            tgt_total = cat.sigma(objects[0])
            sx2 = cat.sigma(xs[1])
            sy1 = cat.sigma(ys[0])
            tgt_incls = [cat.twist.map(sums[0][1][0], sx2, tgt_total),
                         cat.twist.map(sums[0][1][1], sy1, tgt_total)]
        src_total, _, projs = sums[k]
        top = projs[0].then(alphas[k + 1].scale(-1)).then(tgt_incls[0])
        mid = projs[0].then(phis[k + 1]).then(tgt_incls[1])
        bot = projs[1].then(betas[k]).then(tgt_incls[1])
        maps.append(top + mid + bot)
    return NSigmaSequence(cat, objects, maps)


# -- exactness ------------------------------------------------------------------------


def is_exact_sequence(seq: NSigmaSequence) -> bool:
    """Exactness of the induced periodic complexes of vertex components.

    Checks rank(in) + rank(out) = dim at every position over one full
    period plus one overlap position, and that composites vanish.
    """
    if not seq.composite_is_complex():
        return False
    cat = seq.category
    n = cat.n
    perm = cat.twist.perm
    verts = cat.E.quiver.vertices
    for v in verts:
        # positions 2..n
        for k in range(2, n + 1):
            inc = seq.maps[k - 2].mats[v]
            out = seq.maps[k - 1].mats[v]
            if rank(inc) + rank(out) != seq.objects[k - 1].dims[v]:
                return False
        # position 1: incoming from the previous period
        inc = seq.maps[n - 1].mats[perm[v]]
        out = seq.maps[0].mats[v]
        if rank(inc) + rank(out) != seq.objects[0].dims[v]:
            return False
        # overlap position n+1 (Sigma X_1)
        inc = seq.maps[n - 1].mats[v]
        out = seq.maps[0].mats[cat.twist.inv_perm[v]]
        if rank(inc) + rank(out) != seq.objects[0].dims[cat.twist.inv_perm[v]]:
            return False
    return True


# -- morphism completion ---------------------------------------------------------------


def _hom_vec_matrix(basis: List[ModuleMap], transform) -> np.ndarray:
    if not basis:
        sample = None
        return np.zeros((0, 0), dtype=np.int64)
    cols = [transform(b).vec() for b in basis]
    return np.stack(cols, axis=1)


def _solve_in_span(basis: List[ModuleMap], transform, target: ModuleMap,
                   src=None, tgt=None) -> Optional[ModuleMap]:
    if not basis:
        if target.is_zero() and src is not None and tgt is not None:
            return zero_map(src, tgt)
        return None
    field = target.field
    mat = _hom_vec_matrix(basis, transform)
    sol = solve(Matrix(field, mat), Matrix(field, target.vec().reshape(-1, 1)))
    if sol is None:
        return None
    out = None
    for c, b in zip(sol[0].a[:, 0], basis):
        term = b.scale(int(c))
        out = term if out is None else out + term
    return out


class CompletionSpace:
    """The affine space of completions (phi_3, ..., phi_n) of a square."""

    def __init__(self, source: NSigmaSequence, target: NSigmaSequence,
                 phi1: ModuleMap, phi2: ModuleMap,
                 particular: Optional[List[ModuleMap]], bases: List[List[ModuleMap]],
                 kernel_cols: np.ndarray):
        self.source = source
        self.target = target
        self.phi1 = phi1
        self.phi2 = phi2
        self.particular = particular
        self.bases = bases  # hom bases for slots 3..n
        self.kernel_cols = kernel_cols

    @property
    def solvable(self) -> bool:
        return self.particular is not None

    def kernel_dim(self) -> int:
        return int(self.kernel_cols.shape[1]) if self.kernel_cols.size else 0

    def morphism(self, coeffs: Optional[np.ndarray] = None) -> SequenceMorphism:
        if self.particular is None:
            raise ValueError("square admits no completion")
        phis = [self.phi1, self.phi2] + [m for m in self.particular]
        if coeffs is not None and coeffs.size:
            delta = self.kernel_cols @ (coeffs % self.phi1.field.p)
            pos = 0
            for slot, basis in enumerate(self.bases):
                dim = len(basis)
                extra = None
                for c, b in zip(delta[pos : pos + dim], basis):
                    if int(c) % self.phi1.field.p:
                        term = b.scale(int(c))
                        extra = term if extra is None else extra + term
                if extra is not None:
                    phis[slot + 2] = phis[slot + 2] + extra
                pos += dim
        return SequenceMorphism(self.source, self.target, phis)


def completion_space(source: NSigmaSequence, target: NSigmaSequence,
                     phi1: ModuleMap, phi2: ModuleMap) -> CompletionSpace:
    """Solve all commuting squares for phi_3..phi_n as one joint system."""
    cat = source.category
    n = cat.n
    field = cat.field
    check = phi1.then(target.maps[0]) - source.maps[0].then(phi2)
    if not check.is_zero():
        raise ValueError("the given square does not commute")
    bases = [hom(source.objects[i], target.objects[i]) for i in range(2, n)]
    sizes = [len(b) for b in bases]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offsets[-1])
    # build equations square by square; unknown slots are 3..n (indices 2..n-1)
    p = field.p
    eqs = []
    # square k (map index k-1), for k = 2..n-1: phi_{k+1} . alpha_k = beta_k . phi_k
    for k in range(2, n):
        unk_next = k - 2  # phi_{k+1} lives in bases[k-2]
        lhs_cols = _hom_vec_matrix(bases[unk_next], lambda b, kk=k: source.maps[kk - 1].then(b))
        veclen = lhs_cols.shape[0] if lhs_cols.size else (
            zero_map(source.objects[k - 1], target.objects[k]).vec().shape[0])
        block = np.zeros((veclen, total), dtype=np.int64)
        if lhs_cols.size:
            block[:, offsets[unk_next] : offsets[unk_next + 1]] = lhs_cols
        if k == 2:
            rhs = phi2.then(target.maps[1]).vec()
        else:
            unk_cur = k - 3
            cur_cols = _hom_vec_matrix(bases[unk_cur], lambda b, kk=k: b.then(target.maps[kk - 1]))
            if cur_cols.size:
                block[:, offsets[unk_cur] : offsets[unk_cur + 1]] = (
                    block[:, offsets[unk_cur] : offsets[unk_cur + 1]] - cur_cols) % p
            rhs = np.zeros(veclen, dtype=np.int64)
        eqs.append((block % p, rhs % p))
    # closing square: Sigma phi_1 . alpha_n = beta_n . phi_n
    sphi1 = cat.twist.map(phi1, cat.sigma(source.objects[0]), cat.sigma(target.objects[0]))
    rhs_map = source.maps[n - 1].then(sphi1)
    unk_last = n - 3
    last_cols = _hom_vec_matrix(bases[unk_last], lambda b: b.then(target.maps[n - 1]))
    veclen = rhs_map.vec().shape[0]
    block = np.zeros((veclen, total), dtype=np.int64)
    if last_cols.size:
        block[:, offsets[unk_last] : offsets[unk_last + 1]] = last_cols
    eqs.append((block % p, rhs_map.vec() % p))
    big = np.vstack([e[0] for e in eqs]) if eqs else np.zeros((0, total), dtype=np.int64)
    rhs = np.concatenate([e[1] for e in eqs]) if eqs else np.zeros(0, dtype=np.int64)
    sol = solve(Matrix(field, big), Matrix(field, rhs.reshape(-1, 1)))
    if sol is None:
        return CompletionSpace(source, target, phi1, phi2, None, bases,
                               np.zeros((total, 0), dtype=np.int64))
    coeffs = sol[0].a[:, 0]
    particular = []
    for slot, basis in enumerate(bases):
        f = None
        for c, b in zip(coeffs[offsets[slot] : offsets[slot + 1]], basis):
            term = b.scale(int(c))
            f = term if f is None else f + term
        if f is None:
            f = zero_map(source.objects[slot + 2], target.objects[slot + 2])
        particular.append(f)
    return CompletionSpace(source, target, phi1, phi2, particular, bases, sol[1].a)


def complete_morphism(source: NSigmaSequence, target: NSigmaSequence,
                      phi1: ModuleMap, phi2: ModuleMap) -> Optional[SequenceMorphism]:
    space = completion_space(source, target, phi1, phi2)
    if not space.solvable:
        return None
    return space.morphism()


def complete_with_exact_cone(source: NSigmaSequence, target: NSigmaSequence,
                             phi1: ModuleMap, phi2: ModuleMap, oracle,
                             sweep_budget: int = 2**16,
                             samples: int = 256,
                             rng: Optional[random.Random] = None,
                             cone_fn=None) -> Optional[SequenceMorphism]:
    """Search the affine completion space for one whose cone the oracle accepts."""
    space = completion_space(source, target, phi1, phi2)
    if not space.solvable:
        return None
    p = source.category.field.p
    kdim = space.kernel_dim()
    rng = rng or random.Random(23)
    build_cone = cone_fn or cone

    def attempt(coeffs) -> Optional[SequenceMorphism]:
        phi = space.morphism(coeffs)
        if oracle.contains(build_cone(phi)):
            return phi
        return None

    hit = attempt(None)
    if hit is not None:
        return hit
    if p**kdim <= sweep_budget:
        for code in range(1, p**kdim):
            coeffs = np.zeros(kdim, dtype=np.int64)
            c = code
            for i in range(kdim):
                coeffs[i] = c % p
                c //= p
            hit = attempt(coeffs)
            if hit is not None:
                return hit
        return None
    for _ in range(samples):
        coeffs = np.array([rng.randrange(p) for _ in range(kdim)], dtype=np.int64)
        hit = attempt(coeffs)
        if hit is not None:
            return hit
    return None


# -- weak isomorphisms ------------------------------------------------------------------


def morphism_space(source: NSigmaSequence, target: NSigmaSequence) -> List[SequenceMorphism]:
    """Basis of the space of all sequence morphisms source -> target."""
    cat = source.category
    n = cat.n
    field = cat.field
    bases = [hom(source.objects[i], target.objects[i]) for i in range(n)]
    sizes = [len(b) for b in bases]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offsets[-1])
    if total == 0:
        return []
    p = field.p
    eqs = []
    for k in range(1, n + 1):
        # square k: phi_{k+1} . alpha_k = beta_k . phi_k (phi_{n+1} = Sigma phi_1)
        src_map = source.maps[k - 1]
        tgt_map = target.maps[k - 1]
        if k < n:
            next_slot = k
            next_cols = _hom_vec_matrix(bases[next_slot], lambda b: src_map.then(b))
        else:
            next_slot = 0
            next_cols = _hom_vec_matrix(
                bases[0],
                lambda b: src_map.then(cat.twist.map(
                    b, cat.sigma(source.objects[0]), cat.sigma(target.objects[0]))))
        cur_slot = k - 1
        cur_cols = _hom_vec_matrix(bases[cur_slot], lambda b: b.then(tgt_map))
        veclen = max(next_cols.shape[0] if next_cols.size else 0,
                     cur_cols.shape[0] if cur_cols.size else 0)
        if veclen == 0:
            veclen = zero_map(source.objects[k - 1],
                              tgt_map.target).vec().shape[0]
        block = np.zeros((veclen, total), dtype=np.int64)
        if next_cols.size:
            block[:, offsets[next_slot] : offsets[next_slot + 1]] = next_cols
        if cur_cols.size:
            block[:, offsets[cur_slot] : offsets[cur_slot + 1]] = (
                block[:, offsets[cur_slot] : offsets[cur_slot + 1]] - cur_cols) % p
        eqs.append(block % p)
    big = np.vstack(eqs)
    from .field import kernel_basis

    kb = kernel_basis(Matrix(field, big))
    out = []
    for c in range(kb.cols):
        coeffs = kb.a[:, c]
        phis = []
        for slot, basis in enumerate(bases):
            f = None
            for cc, b in zip(coeffs[offsets[slot] : offsets[slot + 1]], basis):
                term = b.scale(int(cc))
                f = term if f is None else f + term
            if f is None:
                f = zero_map(source.objects[slot], target.objects[slot])
            phis.append(f)
        out.append(SequenceMorphism(source, target, phis))
    return out


def find_weak_iso(source: NSigmaSequence, target: NSigmaSequence,
                  rng: Optional[random.Random] = None,
                  sweep_budget: int = 4096, samples: int = 200) -> Optional[SequenceMorphism]:
    """A weak isomorphism source -> target in the morphism space, if found."""
    basis = morphism_space(source, target)
    if not basis:
        return None
    for m in basis:
        if m.is_weak_iso():
            return m
    p = source.category.field.p
    d = len(basis)
    rng = rng or random.Random(11)

    def combo(coeffs) -> SequenceMorphism:
        phis = None
        for c, b in zip(coeffs, basis):
            scaled = [x.scale(int(c)) for x in b.phis]
            if phis is None:
                phis = scaled
            else:
                phis = [x + y for x, y in zip(phis, scaled)]
        return SequenceMorphism(source, target, phis, check=False)

    if p**d <= sweep_budget:
        for code in range(1, p**d):
            coeffs = []
            c = code
            for _ in range(d):
                coeffs.append(c % p)
                c //= p
            m = combo(coeffs)
            if m.is_weak_iso():
                return m
        return None
    for _ in range(samples):
        coeffs = [rng.randrange(p) for _ in range(d)]
        m = combo(coeffs)
        if m.is_weak_iso():
            return m
    return None


def weakly_isomorphic(a: NSigmaSequence, b: NSigmaSequence, depth: int = 2,
                      intermediates: Optional[List[NSigmaSequence]] = None,
                      rng: Optional[random.Random] = None) -> Optional[List[Tuple[str, SequenceMorphism]]]:
    """A zigzag of weak isomorphisms linking a and b, of length <= depth.

    Returns a list of ("fwd"|"bwd", morphism) steps, or None when not
    found within the depth (a regular outcome, not an error).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    direct = find_weak_iso(a, b, rng=rng)
    if direct is not None:
        return [("fwd", direct)]
    direct = find_weak_iso(b, a, rng=rng)
    if direct is not None:
        return [("bwd", direct)]
    if depth < 2:
        return None
    for z in intermediates or []:
        left = find_weak_iso(z, a, rng=rng)
        right = find_weak_iso(z, b, rng=rng)
        if left is not None and right is not None:
            return [("bwd", left), ("fwd", right)]
        left = find_weak_iso(a, z, rng=rng)
        right = find_weak_iso(b, z, rng=rng)
        if left is not None and right is not None:
            return [("fwd", left), ("bwd", right)]
    return None


# -- periodic contractions ----------------------------------------------------------------


def periodic_contraction(seq: NSigmaSequence) -> Optional[List[ModuleMap]]:
    """eta_1..eta_n with d eta + eta d = 1 and the periodicity constraint.

    eta_k : X_{k+1} -> X_k (with X_{n+1} = Sigma X_1); the wrap uses
    eta_0 = Sigma^{-1} eta_n.  Only complexes can be contractible.
    """
    if not seq.composite_is_complex():
        return None
    cat = seq.category
    n = cat.n
    field = cat.field
    p = field.p
    targets = seq.objects[1:] + [cat.sigma(seq.objects[0])]
    bases = [hom(targets[k], seq.objects[k]) for k in range(n)]
    sizes = [len(b) for b in bases]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offsets[-1])
    eqs = []
    rhss = []
    inv = cat.twist.inverse()
    for k in range(1, n + 1):
        ident = identity_map(seq.objects[k - 1])
        veclen = ident.vec().shape[0]
        block = np.zeros((veclen, total), dtype=np.int64)
        # eta_k . d_k part: d_k = maps[k-1]: X_k -> X_{k+1}; eta_k: X_{k+1} -> X_k
        cols = _hom_vec_matrix(bases[k - 1], lambda b: seq.maps[k - 1].then(b))
        if cols.size:
            block[:, offsets[k - 1] : offsets[k]] = cols
        # d_{k-1} . eta_{k-1} part
        if k >= 2:
            cols2 = _hom_vec_matrix(bases[k - 2], lambda b: b.then(seq.maps[k - 2]))
            if cols2.size:
                block[:, offsets[k - 2] : offsets[k - 1]] = (
                    block[:, offsets[k - 2] : offsets[k - 1]] + cols2) % p
        else:
            # d_0 . eta_0 with eta_0 = Sigma^{-1} eta_n, d_0 = Sigma^{-1} d_n
            d0 = inv.map(seq.maps[n - 1], inv.module(seq.objects[n - 1]), seq.objects[0])
            cols2 = _hom_vec_matrix(
                bases[n - 1],
                lambda b: inv.map(b, seq.objects[0], inv.module(seq.objects[n - 1])).then(d0))
            if cols2.size:
                block[:, offsets[n - 1] : offsets[n]] = (
                    block[:, offsets[n - 1] : offsets[n]] + cols2) % p
        eqs.append(block % p)
        rhss.append(ident.vec() % p)
    big = np.vstack(eqs)
    rhs = np.concatenate(rhss)
    sol = solve(Matrix(field, big), Matrix(field, rhs.reshape(-1, 1)))
    if sol is None:
        return None
    coeffs = sol[0].a[:, 0]
    etas = []
    for slot, basis in enumerate(bases):
        f = None
        for c, b in zip(coeffs[offsets[slot] : offsets[slot + 1]], basis):
            term = b.scale(int(c))
            f = term if f is None else f + term
        if f is None:
            f = zero_map(targets[slot], seq.objects[slot])
        etas.append(f)
    return etas


def decompose_contractible(seq: NSigmaSequence) -> Optional[List[NSigmaSequence]]:
    """Split a contractible sequence into trivial pieces via the sections.

    The piece attached to the image of alpha_k has its identity in slot
    k; the direct sum of the pieces is isomorphic to the input.
    """
    etas = periodic_contraction(seq)
    if etas is None:
        return None
    cat = seq.category
    n = cat.n
    pieces = []
    for k in range(n):
        img, incl, epi = image(seq.maps[k])
        if img.total_dim() == 0:
            continue
        pieces.append(trivial_sequence(cat, img, slot=k + 1))
    return pieces


def find_sequence_iso(a: NSigmaSequence, b: NSigmaSequence,
                      rng: Optional[random.Random] = None,
                      sweep_budget: int = 4096, samples: int = 300) -> Optional[SequenceMorphism]:
    """An isomorphism of sequences (every slot invertible), if found."""
    basis = morphism_space(a, b)
    if not basis:
        return None
    for m in basis:
        if m.is_iso():
            return m
    p = a.category.field.p
    d = len(basis)
    rng = rng or random.Random(29)

    def combo(coeffs) -> SequenceMorphism:
        phis = None
        for c, bb in zip(coeffs, basis):
            scaled = [x.scale(int(c)) for x in bb.phis]
            phis = scaled if phis is None else [x + y for x, y in zip(phis, scaled)]
        return SequenceMorphism(a, b, phis, check=False)

    if p**d <= sweep_budget:
        for code in range(1, p**d):
            coeffs = []
            c = code
            for _ in range(d):
                coeffs.append(c % p)
                c //= p
            m = combo(coeffs)
            if m.is_iso():
                return m
        return None
    for _ in range(samples):
        m = combo([rng.randrange(p) for _ in range(d)])
        if m.is_iso():
            return m
    return None
