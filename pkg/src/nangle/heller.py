"""The delta-invariant and the Heller parametrization of
pre-n-angulations.

delta of an exact sequence compares it with the standard injective
resolution of the kernel of its first map and reads off a stable map
Sigma Ker -> Omega^{-n} Ker.  Families Theta of such stable
isomorphisms index candidate pre-n-angulations; units of the n-th
cosyzygy act on them.  Envelope choices are transported along the
twist orbit, so the comparison iso between Sigma Omega^{-1} and
Omega^{-1} Sigma is the identity at the data level.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .decompose import decompose, find_iso, iso_indecomposables
from .field import Matrix, rank, solve
from .functorcat import _stable_inverse
from .modules import (
    Module,
    ModuleMap,
    direct_sum,
    hom,
    identity_map,
    image,
    kernel,
    projective_module,
    zero_map,
)
from .sequences import NSigmaSequence, SigmaCategory, is_exact_sequence
from .stable import StableContext, StableMap, _solve_through


class Resolutions:
    """Twist-equivariant standard injective resolutions over E."""

    def __init__(self, category: SigmaCategory):
        self.category = category
        self.ctx: StableContext = category.stable
        self.twist = category.twist
        self._order = self.twist.order()
        self._env_cache: Dict[tuple, Tuple[Module, ModuleMap]] = {}
        self._step_cache: Dict[tuple, Tuple[Module, ModuleMap, Module, ModuleMap]] = {}
        self._at_cache: Dict[tuple, Dict] = {}

    def _orbit_rep(self, m: Module) -> Tuple[Module, int]:
        """Lexicographically smallest twist-iterate, with the shift."""
        best = (m.key(), 0, m)
        cur = m
        for k in range(1, self._order):
            cur = self.twist.module(cur)
            key = cur.key()
            if key < best[0]:
                best = (key, k, cur)
        return best[2], best[1]

    def envelope(self, m: Module) -> Tuple[Module, ModuleMap]:
        """Injective envelope chosen compatibly with the twist orbit."""
        key = m.key()
        if key in self._env_cache:
            return self._env_cache[key]
        rep, k = self._orbit_rep(m)
        # rep = twist^k(m), so m = twist^(order - k)(rep)
        shift = (self._order - k) % self._order
        env0, mono0 = self.ctx.injective_envelope(rep)
        env, mono = env0, mono0
        cur_src = rep
        for _ in range(shift):
            new_src = self.twist.module(cur_src)
            new_env = self.twist.module(env)
            mono = self.twist.map(mono, new_src, new_env)
            env = new_env
            cur_src = new_src
        if cur_src.key() != m.key():
            raise RuntimeError("orbit transport failed to return to the input module")
        result = (env, mono)
        self._env_cache[key] = result
        return result

    def step(self, m: Module) -> Tuple[Module, ModuleMap, Module, ModuleMap]:
        """(I, mono, Omega^{-1} m, epi) from the chosen envelope."""
        key = m.key()
        if key in self._step_cache:
            return self._step_cache[key]
        from .modules import cokernel

        env, mono = self.envelope(m)
        cok, epi = cokernel(mono)
        result = (env, mono, cok, epi)
        self._step_cache[key] = result
        return result

    def chain(self, m: Module, length: int) -> List[Tuple[Module, Module, ModuleMap, ModuleMap]]:
        """length steps of the standard resolution: (A_k, I_k, mono_k, epi_k)."""
        out = []
        cur = m
        for _ in range(length):
            env, mono, nxt, epi = self.step(cur)
            out.append((cur, env, mono, epi))
            cur = nxt
        return out

    def omega_inv(self, m: Module, power: int = 1) -> Module:
        cur = m
        for _ in range(power):
            cur = self.step(cur)[2]
        return cur

    def omega_inv_map(self, f: ModuleMap) -> ModuleMap:
        """Induced map on the chosen cosyzygies."""
        env_m, mono_m, cm, epi_m = self.step(f.source)
        env_n, mono_n, cn, epi_n = self.step(f.target)
        if f.source.total_dim() == 0:
            return zero_map(cm, cn)
        lift = _solve_through(hom(env_m, env_n), lambda g: mono_m.then(g), f.then(mono_n), env_m, env_n)
        if lift is None:
            raise RuntimeError("envelope lift failed")
        basis = hom(cm, cn)
        induced = _solve_through(basis, lambda b: epi_m.then(b), lift.then(epi_n), cm, cn)
        if induced is None:
            raise RuntimeError("cosyzygy map did not descend")
        return induced

    def omega_inv_power_map(self, f: ModuleMap, power: int) -> ModuleMap:
        cur = f
        for _ in range(power):
            cur = self.omega_inv_map(cur)
        return cur

    def stable(self, f: ModuleMap) -> StableMap:
        return self.ctx.stable_map(f)

    def stable_inverse(self, f: ModuleMap) -> ModuleMap:
        return _stable_inverse(self.ctx, f)

    def is_stable_iso(self, f: ModuleMap) -> bool:
        try:
            self.stable_inverse(f)
            return True
        except ValueError:
            return False


def sequence_kernel(seq: NSigmaSequence) -> Tuple[Module, ModuleMap]:
    return kernel(seq.maps[0])


def delta_of(res: Resolutions, seq: NSigmaSequence) -> StableMap:
    """The stable map Sigma Ker(alpha_1) -> Omega^{-n} Ker(alpha_1).

    Lifts the identity of the kernel along the sequence against the
    standard resolution and reads the induced map off the factorization
    of the closing map.  Raises on non-exact input.
    """
    if not is_exact_sequence(seq):
        raise ValueError("delta is only defined for exact sequences")
    cat = seq.category
    n = cat.n
    a, kappa = sequence_kernel(seq)
    sigma_a = cat.twist.module(a)
    chain = res.chain(a, n)
    omega_n_a = res.omega_inv(a, n)
    if a.total_dim() == 0:
        return res.stable(zero_map(sigma_a, omega_n_a))
    # comparison maps c_i: X_i -> J_{i-1}
    comparisons: List[ModuleMap] = []
    j0, mono0 = chain[0][1], chain[0][2]
    c1 = _solve_through(hom(seq.objects[0], j0), lambda g: kappa.then(g), chain[0][2], seq.objects[0], j0)
    if c1 is None:
        raise RuntimeError("comparison lift c_1 failed")
    comparisons.append(c1)
    for i in range(1, n):
        # nu_i = epi_{i-1} then mono_i : J_{i-1} -> J_i
        epi_prev = chain[i - 1][3]
        mono_i = chain[i][2]
        nu = epi_prev.then(mono_i)
        target = comparisons[-1].then(nu)
        ci = _solve_through(hom(seq.objects[i], chain[i][1]),
                            lambda g, mm=seq.maps[i - 1]: mm.then(g), target,
                            seq.objects[i], chain[i][1])
        if ci is None:
            raise RuntimeError(f"comparison lift c_{i + 1} failed")
        comparisons.append(ci)
    # factor the closing map through Sigma Ker
    sigma_kappa = cat.twist.map(kappa, sigma_a, cat.sigma(seq.objects[0]))
    e = _solve_through(hom(seq.objects[n - 1], sigma_a),
                       lambda g: g.then(sigma_kappa), seq.maps[n - 1],
                       seq.objects[n - 1], sigma_a)
    if e is None:
        raise RuntimeError("closing map does not factor through Sigma Ker")
    final_epi = chain[n - 1][3]
    composite = comparisons[-1].then(final_epi)
    delta_rep = _solve_through(hom(sigma_a, omega_n_a), lambda g: e.then(g), composite, sigma_a, omega_n_a)
    if delta_rep is None:
        raise RuntimeError("delta did not descend through the factorization")
    return res.stable(delta_rep)


class ThetaIso:
    """A family of stable isomorphisms Sigma M -> Omega^{-n} M indexed by
    the indecomposable non-projectives of mod E."""

    def __init__(self, res: Resolutions, table: Sequence[Tuple[Module, ModuleMap]]):
        self.res = res
        self.category = res.category
        # canonical indecomposables with their theta representatives
        self.table: List[Tuple[Module, ModuleMap]] = list(table)
        self._at_cache: Dict[tuple, StableMap] = {}

    def modules(self) -> List[Module]:
        return [m for m, _ in self.table]

    def entry(self, m: Module) -> Optional[Tuple[Module, ModuleMap]]:
        for mod, rep in self.table:
            if mod.key() == m.key():
                return mod, rep
        return None

    def at(self, x: Module) -> StableMap:
        """Theta at an arbitrary module, assembled over its decomposition."""
        key = x.key()
        if key in self._at_cache:
            return self._at_cache[key]
        cat = self.category
        res = self.res
        n = cat.n
        sigma_x = cat.twist.module(x)
        omega_x = x
        for _ in range(n):
            omega_x = res.step(omega_x)[2]
        total = zero_map(sigma_x, omega_x)
        if x.total_dim() > 0:
            dec = decompose(x)
            for piece, incls in dec.pieces:
                if res.ctx.is_stably_zero_object(piece):
                    continue
                match = None
                for mod, rep in self.table:
                    if piece.dim_vector() == mod.dim_vector():
                        phi = iso_indecomposables(piece, mod)
                        if phi is not None:
                            match = (mod, rep, phi)
                            break
                if match is None:
                    raise ValueError("Theta family does not cover a kernel piece")
                mod, rep, phi = match
                phi_inv = phi.inverse()
                omega_phi_inv = res.omega_inv_power_map(phi_inv, n)
                for incl in incls:
                    from .decompose import _retraction

                    retr = _retraction(incl)
                    omega_incl = res.omega_inv_power_map(incl, n)
                    sigma_retr = cat.twist.map(retr, sigma_x, cat.twist.module(piece))
                    sigma_phi = cat.twist.map(phi, cat.twist.module(piece), cat.twist.module(mod))
                    term = sigma_retr.then(sigma_phi).then(rep).then(omega_phi_inv).then(omega_incl)
                    total = total + term
        out = res.stable(total)
        self._at_cache[key] = out
        return out

    def validate(self, strict: bool = True) -> Dict[str, bool]:
        """Invariants: stable isos, naturality, triangle compatibility."""
        res = self.res
        cat = self.category
        n = cat.n
        report = {"iso": True, "natural": True, "compatible": True}
        for mod, rep in self.table:
            if not res.is_stable_iso(rep):
                report["iso"] = False
        for msrc, _ in self.table:
            for mtgt, _ in self.table:
                for f in res.ctx.stable_hom(msrc, mtgt):
                    lhs = cat.twist.map(f.rep).then(self.at(mtgt).rep)
                    rhs = self.at(msrc).rep.then(res.omega_inv_power_map(f.rep, n))
                    if res.stable(lhs) != res.stable(rhs):
                        report["natural"] = False
        if strict:
            sign = 1 if n % 2 == 0 else -1
            for mod, rep in self.table:
                om = res.step(mod)[2]
                lhs = self.at(om).scale(sign)
                rhs = res.stable(res.omega_inv_map(rep))
                if lhs != rhs:
                    report["compatible"] = False
        return report

    def scaled(self, m: Module, unit: int) -> "ThetaIso":
        """Scale the component at one listed module (fault-injection helper)."""
        table = []
        for mod, rep in self.table:
            if mod.key() == m.key():
                table.append((mod, rep.scale(unit)))
            else:
                table.append((mod, rep))
        return ThetaIso(self.res, table)

    def equal_on_table(self, other: "ThetaIso") -> bool:
        if len(self.table) != len(other.table):
            return False
        for (m1, r1), (m2, r2) in zip(self.table, other.table):
            if m1.key() != m2.key():
                return False
            if self.res.stable(r1) != self.res.stable(r2):
                return False
        return True


class UnitFamily:
    """A natural family of stable units of Omega^{-n} at the listed modules."""

    def __init__(self, res: Resolutions, table: Sequence[Tuple[Module, ModuleMap]]):
        self.res = res
        self.table = list(table)

    @classmethod
    def scalar(cls, res: Resolutions, modules: Sequence[Module], scalars: Sequence[int]) -> "UnitFamily":
        table = []
        for m, c in zip(modules, scalars):
            omega_n = m
            for _ in range(res.category.n):
                omega_n = res.step(omega_n)[2]
            table.append((m, identity_map(omega_n).scale(c)))
        return cls(res, table)

    def entry(self, m: Module) -> ModuleMap:
        for mod, rep in self.table:
            if mod.key() == m.key():
                return rep
        raise KeyError("module not in unit family")

    def is_identity(self) -> bool:
        return all(self.res.stable(rep) == self.res.stable(identity_map(rep.source))
                   for _, rep in self.table)

    def validate(self) -> Dict[str, bool]:
        res = self.res
        n = self.res.category.n
        report = {"iso": True, "natural": True, "compatible": True}
        for mod, rep in self.table:
            if not res.is_stable_iso(rep):
                report["iso"] = False
        for msrc, usrc in self.table:
            for mtgt, utgt in self.table:
                for f in res.ctx.stable_hom(msrc, mtgt):
                    om_f = res.omega_inv_power_map(f.rep, n)
                    if res.stable(usrc.then(om_f)) != res.stable(om_f.then(utgt)):
                        report["natural"] = False
        return report

    def equals(self, other: "UnitFamily") -> bool:
        if len(self.table) != len(other.table):
            return False
        for (m1, r1), (m2, r2) in zip(self.table, other.table):
            if m1.key() != m2.key() or self.res.stable(r1) != self.res.stable(r2):
                return False
        return True


def act_on_class(u: UnitFamily, theta: ThetaIso) -> ThetaIso:
    """(u . Theta)_M = u_M after Theta_M."""
    report = u.validate()
    if not (report["iso"] and report["natural"]):
        raise ValueError("invalid unit family (naturality failure)")
    table = []
    for mod, rep in theta.table:
        table.append((mod, rep.then(u.entry(mod))))
    return ThetaIso(theta.res, table)


def quotient_unit(theta1: ThetaIso, theta2: ThetaIso) -> UnitFamily:
    """The unit family u with u . theta1 = theta2."""
    res = theta1.res
    table = []
    for (m1, r1), (m2, r2) in zip(theta1.table, theta2.table):
        if m1.key() != m2.key():
            raise ValueError("theta families indexed by different modules")
        inv = res.stable_inverse(r1)
        table.append((m1, inv.then(r2)))
    return UnitFamily(res, table)


def base_theta(res: Resolutions, modules: Sequence[Module]) -> Optional[ThetaIso]:
    """A seed family of stable isos Sigma M -> Omega^{-n} M, if they exist."""
    cat = res.category
    n = cat.n
    table = []
    for m in modules:
        sigma_m = cat.twist.module(m)
        omega_m = m
        for _ in range(n):
            omega_m = res.step(omega_m)[2]
        iso = res.ctx.stable_iso(sigma_m, omega_m)
        if iso is None:
            return None
        table.append((m, iso))
    return ThetaIso(res, table)


def theta_membership(theta: ThetaIso, seq: NSigmaSequence) -> bool:
    """Exact and with delta equal to Theta at the kernel."""
    if not is_exact_sequence(seq):
        return False
    res = theta.res
    d = delta_of(res, seq)
    a, _ = sequence_kernel(seq)
    try:
        expected = theta.at(a)
    except ValueError:
        return False
    return d == expected


class ThetaOracle:
    """Membership oracle of the class attached to a Theta family."""

    tag = "theta-class"

    def __init__(self, theta: ThetaIso):
        self.theta = theta
        self.res = theta.res
        self.category = theta.category

    def contains(self, seq: NSigmaSequence) -> bool:
        return theta_membership(self.theta, seq)

    def member_starting_with(self, alpha1: ModuleMap) -> NSigmaSequence:
        """The Lemma-style construction of a member with first map alpha1."""
        cat = self.category
        res = self.res
        n = cat.n
        a, kappa = kernel(alpha1)
        x_objects = [alpha1.source, alpha1.target]
        maps = [alpha1]
        from .modules import cokernel

        prev = alpha1
        for i in range(3, n):
            cok, quot = cokernel(prev)
            env, mono = res.envelope(cok)
            nxt = quot.then(mono)
            x_objects.append(env)
            maps.append(nxt)
            prev = nxt
        c_final, quot_final = cokernel(prev)
        # comparison with the standard resolution of the kernel
        chain = res.chain(a, n)
        comparisons: List[ModuleMap] = []
        if a.total_dim() == 0:
            comparisons = None
        else:
            c1 = _solve_through(hom(x_objects[0], chain[0][1]),
                                lambda g: kappa.then(g), chain[0][2],
                                x_objects[0], chain[0][1])
            if c1 is None:
                raise RuntimeError("comparison failed")
            comparisons = [c1]
            for i in range(1, n - 1):
                nu = chain[i - 1][3].then(chain[i][2])
                target = comparisons[-1].then(nu)
                ci = _solve_through(hom(x_objects[i], chain[i][1]),
                                    lambda g, mm=maps[i - 1]: mm.then(g), target,
                                    x_objects[i], chain[i][1])
                if ci is None:
                    raise RuntimeError("comparison failed")
                comparisons.append(ci)
        # phi: coker(alpha_{n-2}) -> Omega^{1-n} A, a stable iso
        omega_n_minus_1_a = chain[n - 1][0]
        if a.total_dim() == 0:
            phi = None
        else:
            towards = comparisons[-1].then(chain[n - 2][3])
            phi = _solve_through(hom(c_final, omega_n_minus_1_a),
                                 lambda g: quot_final.then(g), towards,
                                 c_final, omega_n_minus_1_a)
            if phi is None:
                raise RuntimeError("phi did not descend")
        # theta step: X_n as a pullback of the envelope of C along theta
        env_c, mono_c, omega_c, epi_c = res.step(c_final)
        sigma_a = cat.twist.module(a)
        if a.total_dim() == 0:
            theta_rep = zero_map(sigma_a, omega_c)
        else:
            omega_phi = res.omega_inv_map(phi)
            omega_phi_inv = res.stable_inverse(omega_phi)
            theta_rep = self.theta.at(a).rep.then(omega_phi_inv)
        total, incls, projs = direct_sum([env_c, sigma_a])
        combined = projs[0].then(epi_c) - projs[1].then(theta_rep)
        xn, xincl = kernel(combined)
        # C -> X_n (corestriction of the envelope inclusion)
        into_total = mono_c.then(incls[0])
        iota_n = _solve_through(hom(c_final, xn), lambda g: g.then(xincl), into_total, c_final, xn)
        if iota_n is None:
            raise RuntimeError("pullback corestriction failed")
        pi_n = xincl.then(projs[1])
        alpha_n_minus_1 = quot_final.then(iota_n)
        sigma_kappa = cat.twist.map(kappa, sigma_a, cat.sigma(x_objects[0]))
        alpha_n = pi_n.then(sigma_kappa)
        x_objects.append(xn)
        maps.append(alpha_n_minus_1)
        maps.append(alpha_n)
        seq = NSigmaSequence(cat, x_objects, maps)
        return seq


def scalar_theta_candidates(res: Resolutions, modules: Sequence[Module]) -> List[ThetaIso]:
    """All unit-scalar multiples of a base family (empty when no base exists)."""
    base = base_theta(res, modules)
    if base is None:
        return []
    p = res.category.field.p
    out = []
    units = list(range(1, p))
    import itertools

    for combo in itertools.product(units, repeat=len(modules)):
        table = [(mod, rep.scale(c)) for (mod, rep), c in zip(base.table, combo)]
        out.append(ThetaIso(res, table))
    return out


def scalar_unit_families(res: Resolutions, modules: Sequence[Module]) -> List[UnitFamily]:
    p = res.category.field.p
    import itertools

    out = []
    for combo in itertools.product(range(1, p), repeat=len(modules)):
        fam = UnitFamily.scalar(res, modules, list(combo))
        rep = fam.validate()
        if rep["iso"] and rep["natural"]:
            out.append(fam)
    return out


def heller_orbit_check(res: Resolutions, thetas: Sequence[ThetaIso],
                       sequences: Sequence[NSigmaSequence]) -> Dict:
    """Disjointness of classes, freeness of the unit action, transitivity."""
    report: Dict = {"theta_count": len(thetas)}
    if not thetas:
        report.update({"unit_count": 0, "classes_disjoint": True,
                       "action_free": True, "action_transitive": True,
                       "members_assigned": 0, "sequences_checked": len(sequences)})
        return report
    modules = thetas[0].modules()
    units = scalar_unit_families(res, modules)
    report["unit_count"] = len(units)
    memberships = []
    kernels = []
    for i, seq in enumerate(sequences):
        a, _ = sequence_kernel(seq)
        kernels.append(a)
    for th in thetas:
        members = set()
        for i, seq in enumerate(sequences):
            if theta_membership(th, seq):
                members.add(i)
        memberships.append(members)
    # distinct classes may share members whose kernel the two families agree
    # on (all trivial sequences, in particular); they must be disjoint
    # exactly where the families differ
    disjoint = True
    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            if thetas[i].equal_on_table(thetas[j]):
                continue
            for idx in memberships[i] & memberships[j]:
                if thetas[i].at(kernels[idx]) != thetas[j].at(kernels[idx]):
                    disjoint = False
    report["classes_disjoint"] = disjoint
    covered = set()
    for mem in memberships:
        covered |= mem
    report["members_assigned"] = len(covered)
    report["sequences_checked"] = len(sequences)
    # freeness: u . Theta != Theta for u != id
    free = True
    for th in thetas[:1] or []:
        for u in units:
            if u.is_identity():
                continue
            acted = act_on_class(u, th)
            if acted.equal_on_table(th):
                free = False
    report["action_free"] = free
    # transitivity: any two thetas differ by exactly one unit family
    transitive = True
    for i in range(len(thetas)):
        for j in range(len(thetas)):
            if i == j:
                continue
            u = quotient_unit(thetas[i], thetas[j])
            matches = [v for v in units if v.equals(u)]
            if len(matches) != 1:
                transitive = False
            if not act_on_class(u, thetas[i]).equal_on_table(thetas[j]):
                transitive = False
    report["action_transitive"] = transitive
    return report


class MicroScanReport:
    """Aggregated results of the exhaustive micro-category scan."""

    def __init__(self):
        self.total = 0
        self.by_shape: Dict = {}
        self.kernel_classes: Dict[tuple, set] = {}
        self.kernel_indec: Dict[tuple, bool] = {}
        self.memberships: List[int] = []
        self.consistency_failures = 0
        self.spot_checks = 0
        self.spot_check_failures = 0

    def delta_classes_per_indec_kernel(self) -> List[int]:
        return sorted(len(v) for k, v in self.kernel_classes.items()
                      if self.kernel_indec.get(k))


def heller_micro_scan(category: SigmaCategory, max_rank: int,
                      thetas: Sequence[ThetaIso],
                      res: Optional[Resolutions] = None,
                      spot_check_every: int = 5000) -> MicroScanReport:
    """Exhaustively scan exact 3-sequences over a one-vertex category.

    Streams every exact sequence with all objects of free rank at most
    max_rank.  Delta is computed once per (alpha_1, alpha_2) fiber and
    translated along the closing isomorphism g via
    delta_g = g^{-1} . g_0 . delta_{g_0}; memberships are decided in a
    canonical frame per kernel isomorphism class, which is sound for
    natural Theta families.  Every spot_check_every-th sequence is
    re-verified against the direct delta and membership computations.
    """
    cat = category
    if cat.n != 3:
        raise ValueError("micro scan is implemented for n = 3")
    if len(cat.model.summands) != 1:
        raise ValueError("micro scan requires a single additive generator")
    if any(cat.twist.perm[i] != i for i in cat.twist.perm) or not cat.twist.s.is_identity():
        raise ValueError("micro scan requires the identity twist")
    res = res or Resolutions(cat)
    ctx = cat.stable
    p = cat.field.p
    vtx = cat.E.quiver.vertices[0]
    gen = cat.model.projective(0)
    from .modules import cokernel, zero_module

    objects = {0: zero_module(cat.E)}
    for r in range(1, max_rank + 1):
        objects[r] = direct_sum([gen] * r)[0] if r > 1 else gen

    hom_cache: Dict[tuple, np.ndarray] = {}

    def hom_mats(src: Module, tgt: Module) -> np.ndarray:
        key = (src.key(), tgt.key())
        if key not in hom_cache:
            basis = hom(src, tgt)
            if basis:
                hom_cache[key] = np.stack([b.mats[vtx].a for b in basis])
            else:
                hom_cache[key] = np.zeros((0, tgt.dims[vtx], src.dims[vtx]), dtype=np.int64)
        return hom_cache[key]

    import itertools as it

    def all_elements(mats: np.ndarray) -> np.ndarray:
        d = mats.shape[0]
        if d == 0:
            return np.zeros((1,) + mats.shape[1:], dtype=np.int64)
        coeffs = np.array(list(it.product(range(p), repeat=d)), dtype=np.int64)
        return np.tensordot(coeffs, mats, axes=(1, 0)) % p

    def raw_rank(m: np.ndarray) -> int:
        work = (m % p).copy()
        rows, cols = work.shape
        rk = 0
        for c in range(cols):
            if rk == rows:
                break
            nz = np.nonzero(work[rk:, c])[0]
            if nz.size == 0:
                continue
            i = rk + int(nz[0])
            if i != rk:
                work[[rk, i]] = work[[i, rk]]
            inv = pow(int(work[rk, c]), p - 2, p)
            if inv != 1:
                work[rk] = (work[rk] * inv) % p
            below = work[rk + 1 :, c]
            nzr = np.nonzero(below)[0]
            if nzr.size:
                work[rk + 1 + nzr] = (work[rk + 1 + nzr] - np.outer(below[nzr], work[rk])) % p
            rk += 1
        return rk

    def raw_inverse(m: np.ndarray) -> Optional[np.ndarray]:
        n = m.shape[0]
        if n == 0:
            return m.reshape(0, 0)
        aug = np.concatenate([m % p, np.eye(n, dtype=np.int64)], axis=1)
        rk = 0
        for c in range(n):
            nz = np.nonzero(aug[rk:, c])[0]
            if nz.size == 0:
                return None
            i = rk + int(nz[0])
            if i != rk:
                aug[[rk, i]] = aug[[i, rk]]
            inv = pow(int(aug[rk, c]), p - 2, p)
            if inv != 1:
                aug[rk] = (aug[rk] * inv) % p
            col = aug[:, c].copy()
            col[rk] = 0
            nzr = np.nonzero(col)[0]
            if nzr.size:
                aug[nzr] = (aug[nzr] - np.outer(col[nzr], aug[rk])) % p
            rk += 1
        return aug[:, n:]

    report = MicroScanReport()
    report.memberships = [0] * len(thetas)
    # canonical frames per kernel isomorphism class
    canon: List[dict] = []  # {"module": K0, "theta_nf": [bytes per theta], "indec": bool}

    def kernel_frame(ker1: Module):
        """(theta_nf_list, indec, conj) with conj mapping a raw delta matrix
        of ker1 into the canonical frame."""
        stripped_dim = ctx.strip_projectives(ker1)[0].total_dim()
        for entry in canon:
            k0 = entry["module"]
            if k0.dim_vector() != ker1.dim_vector():
                continue
            psi = find_iso(ker1, k0)
            if psi is None:
                continue
            omega_psi = res.omega_inv_power_map(psi, cat.n)
            psi_inv = psi.inverse()
            sig_psi_inv = cat.twist.map(psi_inv)
            a_pre = sig_psi_inv.mats[vtx].a  # Sigma K0 -> Sigma K
            a_post = omega_psi.mats[vtx].a  # Omega^n K -> Omega^n K0
            reducer = ctx._stable_data(sig_psi_inv.source, omega_psi.target)[1]

            def conj(delta_mat, a_pre=a_pre, a_post=a_post, reducer=reducer):
                return reducer.reduce(((a_post @ delta_mat @ a_pre) % p).reshape(-1))

            return entry["theta_nf"], entry["indec"], conj
        # new canonical class: ker1 itself is the frame
        theta_nf = [th.at(ker1).nf.tobytes() for th in thetas]
        dec = decompose(ctx.strip_projectives(ker1)[0]) if stripped_dim else None
        indec = bool(dec and sum(len(i) for _, i in dec.pieces) == 1)
        entry = {"module": ker1, "theta_nf": theta_nf, "indec": indec}
        canon.append(entry)
        reducer = ctx._stable_data(cat.twist.module(ker1), res.omega_inv(ker1, cat.n))[1]

        def conj_id(delta_mat, reducer=reducer):
            return reducer.reduce((delta_mat % p).reshape(-1))

        return theta_nf, indec, conj_id

    for r1 in range(0, max_rank + 1):
        for r2 in range(0, max_rank + 1):
            x1, x2 = objects[r1], objects[r2]
            alpha1_batch = all_elements(hom_mats(x1, x2))
            for a1_mat in alpha1_batch:
                alpha1 = ModuleMap(x1, x2, {vtx: Matrix(cat.field, a1_mat)}, check=False)
                ker1, kincl = kernel(alpha1)
                kdim = ker1.dims[vtx]
                k_key = ker1.key()
                k_stably_zero = ctx.is_stably_zero_object(ker1)
                theta_nf = indec = conj = None
                if not k_stably_zero:
                    theta_nf, indec, conj = kernel_frame(ker1)
                cok2, quot2 = cokernel(alpha1)
                q2dim = cok2.dims[vtx]
                for r3 in range(0, max_rank + 1):
                    x3 = objects[r3]
                    n3, n2 = x3.dims[vtx], x2.dims[vtx]
                    shape_key = (r1, r2, r3)
                    mono_batch = all_elements(hom_mats(cok2, x3))
                    for mono_mat in mono_batch:
                        if q2dim and raw_rank(mono_mat) != q2dim:
                            continue
                        alpha2_mat = (mono_mat @ quot2.mats[vtx].a) % p if q2dim \
                            else np.zeros((n3, n2), dtype=np.int64)
                        alpha2 = ModuleMap(x2, x3, {vtx: Matrix(cat.field, alpha2_mat)}, check=False)
                        cok3, quot3 = cokernel(alpha2)
                        if cok3.dims[vtx] != kdim:
                            continue
                        g_batch = all_elements(hom_mats(cok3, ker1))
                        base = None
                        for g_mat in g_batch:
                            if kdim:
                                g_inv = raw_inverse(g_mat)
                                if g_inv is None:
                                    continue
                            else:
                                g_inv = g_mat.reshape(0, 0)
                            report.total += 1
                            report.by_shape[shape_key] = report.by_shape.get(shape_key, 0) + 1
                            if base is None:
                                base = _micro_delta_base(cat, res, ctx, vtx, x1, x2, x3,
                                                         alpha1, alpha2, ker1, kincl,
                                                         quot3, g_mat)
                            g0_mat, delta0_mat, base_reducer = base
                            if kdim:
                                trans = (delta0_mat @ g0_mat @ g_inv) % p
                            else:
                                trans = delta0_mat
                            if not k_stably_zero:
                                nf_bytes = conj(trans).tobytes()
                                report.kernel_classes.setdefault(k_key, set()).add(nf_bytes)
                                report.kernel_indec[k_key] = indec
                                for ti in range(len(thetas)):
                                    if theta_nf[ti] == nf_bytes:
                                        report.memberships[ti] += 1
                            else:
                                for ti in range(len(thetas)):
                                    report.memberships[ti] += 1
                            if spot_check_every and report.total % spot_check_every == 0:
                                report.spot_checks += 1
                                seq = _micro_sequence(cat, x1, x2, x3, alpha1, alpha2,
                                                      quot3, g_mat, kincl, vtx)
                                direct = delta_of(res, seq)
                                own_nf = base_reducer.reduce(trans.reshape(-1))
                                if direct.nf.tobytes() != own_nf.tobytes():
                                    report.spot_check_failures += 1
                                for ti, th in enumerate(thetas):
                                    member = theta_membership(th, seq)
                                    if k_stably_zero:
                                        fast = True
                                    else:
                                        fast = theta_nf[ti] == conj(trans).tobytes()
                                    if member != fast:
                                        report.consistency_failures += 1
    return report


def invert_matrix(field, m: np.ndarray) -> Optional[np.ndarray]:
    from .field import invert

    out = invert(Matrix(field, m))
    return None if out is None else out.a


def _micro_sequence(cat, x1, x2, x3, alpha1, alpha2, quot3, g_mat, kincl, vtx) -> NSigmaSequence:
    p = cat.field.p
    sig_k = cat.twist.module(kincl.source)
    sig_kincl = cat.twist.map(kincl, sig_k, cat.sigma(x1))
    a3 = (sig_kincl.mats[vtx].a @ g_mat @ quot3.mats[vtx].a) % p
    alpha3 = ModuleMap(x3, cat.sigma(x1), {vtx: Matrix(cat.field, a3)}, check=False)
    return NSigmaSequence(cat, [x1, x2, x3], [alpha1, alpha2, alpha3], check=False)


def _micro_delta_base(cat, res, ctx, vtx, x1, x2, x3, alpha1, alpha2,
                      ker1, kincl, quot3, g0_mat):
    """delta of the fiber base sequence, plus the stable reducer."""
    p = cat.field.p
    seq0 = _micro_sequence(cat, x1, x2, x3, alpha1, alpha2, quot3, g0_mat, kincl, vtx)
    d0 = delta_of(res, seq0)
    _, reducer = ctx._stable_data(d0.source, d0.target)
    base_rep = d0.rep.mats[vtx].a % p
    return (g0_mat, base_rep, reducer)


# -- exhaustive enumeration for the micro scenario (n = 3) ---------------------------


def _all_hom_combos(basis: List[ModuleMap], p: int):
    """Iterate every element of the hom space (including zero)."""
    d = len(basis)
    total = p**d
    for code in range(total):
        f = None
        c = code
        for i in range(d):
            ci = c % p
            c //= p
            if ci:
                term = basis[i].scale(ci)
                f = term if f is None else f + term
        yield f


def enumerate_exact_3_sequences(category: SigmaCategory, max_rank: int,
                                on_sequence=None, limit: Optional[int] = None) -> Dict:
    """Exhaustively enumerate exact 3-Sigma-sequences with all objects of
    free rank at most max_rank, calling on_sequence(seq) for each.

    Parametrization: alpha_1 arbitrary; alpha_2 = (mono out of
    X_2/im(alpha_1)); alpha_3 = (iso from X_3/im(alpha_2) onto
    Sigma Ker(alpha_1)) followed by the kernel inclusion.  Each exact
    sequence arises exactly once.
    """
    if category.n != 3:
        raise ValueError("enumeration is implemented for n = 3")
    cat = category
    p = cat.field.p
    gens = [cat.model.projective(i) for i in range(len(cat.model.summands))]
    if len(gens) != 1:
        raise ValueError("enumeration requires a single additive generator")
    gen = gens[0]
    from .modules import cokernel

    objects_by_rank = {}
    from .modules import zero_module

    objects_by_rank[0] = zero_module(cat.E)
    for r in range(1, max_rank + 1):
        objects_by_rank[r] = direct_sum([gen] * r)[0]
    count = 0
    stats: Dict = {"total": 0, "by_shape": {}}
    for r1 in range(0, max_rank + 1):
        for r2 in range(0, max_rank + 1):
            for r3 in range(0, max_rank + 1):
                x1, x2, x3 = objects_by_rank[r1], objects_by_rank[r2], objects_by_rank[r3]
                shape_count = 0
                h12 = hom(x1, x2)
                for alpha1 in _all_hom_combos(h12, p):
                    if alpha1 is None:
                        alpha1 = zero_map(x1, x2)
                    ker1, kincl = kernel(alpha1)
                    sigma_ker = cat.twist.module(ker1)
                    sigma_kincl = cat.twist.map(kincl, sigma_ker, cat.sigma(x1))
                    cok2, quot2 = cokernel(alpha1)
                    for mono in _all_hom_combos(hom(cok2, x3), p):
                        if mono is None:
                            mono = zero_map(cok2, x3)
                        if any(rank(mono.mats[v]) != cok2.dims[v] for v in cok2.dims):
                            continue
                        alpha2 = quot2.then(mono)
                        cok3, quot3 = cokernel(alpha2)
                        if cok3.total_dim() != sigma_ker.total_dim():
                            continue
                        for g in _all_hom_combos(hom(cok3, sigma_ker), p):
                            if g is None:
                                g = zero_map(cok3, sigma_ker)
                            if not g.is_iso():
                                continue
                            alpha3 = quot3.then(g).then(sigma_kincl)
                            seq = NSigmaSequence(cat, [x1, x2, x3],
                                                 [alpha1, alpha2, alpha3], check=False)
                            shape_count += 1
                            count += 1
                            if on_sequence is not None:
                                on_sequence(seq)
                            if limit is not None and count >= limit:
                                stats["total"] = count
                                stats["by_shape"][(r1, r2, r3)] = shape_count
                                stats["truncated"] = True
                                return stats
                stats["by_shape"][(r1, r2, r3)] = shape_count
    stats["total"] = count
    return stats
