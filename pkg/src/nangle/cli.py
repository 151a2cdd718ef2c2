"""Command-line front end.

Commands: algebra info, verify, suspension-order, cy, heller, and
angle construct.  Machine-readable JSON lines go to stdout (one object
per check plus a final summary); a human summary goes to stderr.

Exit codes: 0 pass, 1 check failure, 2 budget exhaustion, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

from . import __version__
from .algebras import ClosureError, build_based_algebra
from .axioms import Budget, verify_axioms
from .decompose import enumerate_indecomposables_nakayama, is_nakayama
from .functorcat import FunctorCategoryError
from .heller import (
    Resolutions,
    ThetaOracle,
    delta_of,
    enumerate_exact_3_sequences,
    heller_orbit_check,
    scalar_theta_candidates,
    sequence_kernel,
    theta_membership,
)
from .modules import is_selfinjective, projective_module, simple_module
from .quivers import parse_presentation
from .scenarios import Scenario, ScenarioError, load_presentation, load_scenario
from .sequences import SigmaCategory, is_exact_sequence
from .stable import StableContext
from .tilting import (
    ClusterTiltingData,
    ClusterTiltingError,
    StandardOracle,
    build_angulation,
    calabi_yau_report,
    construct_angle,
    lemma_vanishing_check,
    standard_theta,
    suspension_order,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NANGLE_THREADS", "1")))
    except ValueError:
        return 1


class Reporter:
    def __init__(self, scenario_name: str, seed: Optional[int] = None):
        self.scenario = scenario_name
        self.seed = seed
        self.t0 = time.time()
        self.checks: List[dict] = []

    def check(self, name: str, status: str, **extra):
        entry = {"check": name, "status": status}
        entry.update(extra)
        self.checks.append(entry)
        print(json.dumps(entry, default=str), flush=True)

    def summary(self) -> dict:
        statuses = [c["status"] for c in self.checks]
        overall = "pass"
        if any(s == "fail" for s in statuses):
            overall = "fail"
        elif any(s == "budget" for s in statuses):
            overall = "budget"
        out = {
            "summary": True,
            "scenario": self.scenario,
            "status": overall,
            "checks": len(self.checks),
            "seed": self.seed,
            "elapsed_s": round(time.time() - self.t0, 3),
            "version": __version__,
        }
        print(json.dumps(out), flush=True)
        failed = [c["check"] for c in self.checks if c["status"] != "pass"]
        msg = f"[nangle] {self.scenario}: {overall} ({len(self.checks)} checks"
        if failed:
            msg += f"; not passing: {', '.join(failed)}"
        msg += f", {out['elapsed_s']}s)"
        print(msg, file=sys.stderr)
        return out

    def exit_code(self) -> int:
        statuses = [c["status"] for c in self.checks]
        if any(s == "fail" for s in statuses):
            return EXIT_FAIL
        if any(s == "budget" for s in statuses):
            return EXIT_BUDGET
        return EXIT_PASS


def cmd_algebra_info(args) -> int:
    try:
        pres = load_presentation(args.file)
        algebra = build_based_algebra(pres)
    except (ScenarioError, ClosureError, ValueError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = Reporter(f"algebra:{pres.name}")
    nak = is_selfinjective(algebra)
    proj_dims = {}
    for v in algebra.quiver.vertices:
        proj_dims[str(v)] = list(projective_module(algebra, v).dim_vector())
    rep.check("build", "pass",
              dimension=algebra.dim,
              dims_by_degree={str(k): v for k, v in sorted(algebra.dims_by_degree().items())},
              selfinjective=nak is not None,
              nakayama_permutation={str(k): str(v) for k, v in nak.items()} if nak else None,
              projective_dim_vectors=proj_dims)
    rep.summary()
    return rep.exit_code()


def _standard_setup(scenario: Scenario):
    ctx = scenario.stable_context()
    ctd = ClusterTiltingData(ctx, scenario.summands, scenario.n)
    amb = build_angulation(ctd, rng=scenario.rng())
    return ctx, ctd, amb


def _apply_theta_fault(amb, oracle):
    theta = standard_theta(amb, oracle)
    mod0 = theta.table[0][0]
    unit = 2 % amb.model.field.p
    if unit in (0, 1):
        raise ClusterTiltingError("theta fault needs a field with a unit other than 1")
    return ThetaOracle(theta.scaled(mod0, unit))


def cmd_verify(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else scenario.budget.seed
    budget = Budget(samples=scenario.budget.samples, max_rank=scenario.budget.max_rank,
                    seed=seed, sweep=scenario.budget.sweep,
                    cone_samples=scenario.budget.cone_samples)
    rep = Reporter(scenario.name, seed=seed)
    axioms = [a.strip() for a in args.axioms.split(",")] if args.axioms else None
    try:
        if scenario.kind == "standard":
            ctx, ctd, amb = _standard_setup(scenario)
            tilt = ctd.check(witnesses=scenario.witnesses, rng=scenario.rng())
            rep.check("cluster-tilting", "pass" if tilt["ok"] else "fail",
                      failures=tilt["failures"], witnesses=tilt["witnesses"])
            oracle = StandardOracle(amb, rng=scenario.rng())
            fault = scenario.fault if args.fault is None else args.fault
            if fault == "theta_value":
                oracle = _apply_theta_fault(amb, oracle)
                fault = None
            report = verify_axioms(amb.category, oracle, budget, axioms=axioms, fault=fault)
        else:
            cat = _heller_category(scenario)
            res = Resolutions(cat)
            thetas = scalar_theta_candidates(res, _heller_indecs(cat))
            if not thetas:
                rep.check("theta-exists", "fail")
                rep.summary()
                return rep.exit_code()
            oracle = ThetaOracle(thetas[0])
            fault = scenario.fault if args.fault is None else args.fault
            if fault == "theta_value":
                mods = thetas[0].modules()
                unit = 2 % cat.field.p
                oracle = ThetaOracle(thetas[0].scaled(mods[0], unit))
                fault = None
            default_axioms = ["F1a", "F1b", "F1c", "F2", "F3", "exactness"]
            report = verify_axioms(cat, oracle, budget,
                                   axioms=axioms or default_axioms, fault=fault)
        for r in report.results:
            extra = {"samples": r.samples}
            if r.counterexample is not None:
                extra["counterexample"] = r.counterexample
            rep.check(r.axiom, r.status, **extra)
    except (ClusterTiltingError, FunctorCategoryError, ValueError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep.summary()
    return rep.exit_code()


def _heller_category(scenario: Scenario) -> SigmaCategory:
    from .functorcat import FunctorCategoryModel, Twist

    algebra = scenario.algebra
    model = FunctorCategoryModel(
        [projective_module(algebra, v) for v in algebra.quiver.vertices], ambient=None,
        name=scenario.name)
    return SigmaCategory(model, Twist.identity(model), scenario.n)


def _heller_indecs(cat: SigmaCategory):
    ctx = cat.stable
    return [m for m in enumerate_indecomposables_nakayama(cat.E)
            if not ctx.is_stably_zero_object(m)]


def cmd_suspension_order(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if scenario.kind != "standard":
            raise ScenarioError("suspension-order needs a standard scenario")
    except ScenarioError as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = Reporter(scenario.name, seed=scenario.budget.seed)
    try:
        ctx = scenario.stable_context()
        ctd = ClusterTiltingData(ctx, scenario.summands, scenario.n)
        order = suspension_order(ctd, rng=scenario.rng())
    except (ClusterTiltingError, ValueError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    expected = scenario.expected.get("suspension_order")
    status = "pass" if (expected is None or expected == order) else "fail"
    rep.check("suspension-order", status, computed=order, expected=expected)
    rep.summary()
    return rep.exit_code()


def cmd_cy(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if scenario.kind != "standard":
            raise ScenarioError("cy needs a standard scenario")
    except ScenarioError as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = Reporter(scenario.name, seed=scenario.budget.seed)
    try:
        ctx, ctd, amb = _standard_setup(scenario)
        report = calabi_yau_report(amb, rng=scenario.rng())
    except (ClusterTiltingError, FunctorCategoryError, ValueError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if "error" in report:
        rep.check("calabi-yau", "fail", error=report["error"])
        rep.summary()
        return rep.exit_code()
    expected = scenario.expected.get("cy_dimension")
    ok = report.get("verified") in (True, None)
    if expected is not None and report.get("cy_dimension") != expected:
        ok = False
    rep.check("calabi-yau", "pass" if ok else "fail", **report)
    rep.summary()
    return rep.exit_code()


def cmd_heller(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if scenario.kind != "heller":
            raise ScenarioError("heller needs a heller scenario")
    except ScenarioError as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = Reporter(scenario.name, seed=scenario.budget.seed)
    cat = _heller_category(scenario)
    res = Resolutions(cat)
    mods = _heller_indecs(cat)
    thetas = scalar_theta_candidates(res, mods)
    expected = scenario.expected
    rep.check("theta-candidates",
              "pass" if expected.get("theta_count") in (None, len(thetas)) else "fail",
              count=len(thetas))
    compat = [t.validate(strict=True)["compatible"] for t in thetas]
    exp_compat = expected.get("compatible")
    status = "pass"
    if exp_compat is not None and any(c != exp_compat for c in compat):
        status = "fail"
    rep.check("theta-compatibility", status, values=compat)
    from .heller import heller_micro_scan

    scan = heller_micro_scan(cat, scenario.max_rank, thetas, res=res)
    scan_ok = scan.spot_check_failures == 0 and scan.consistency_failures == 0
    rep.check("enumeration", "pass" if scan_ok else "fail", total=scan.total,
              spot_checks=scan.spot_checks,
              memberships=scan.memberships)
    # delta classes per kernel type with indecomposable stable part: the
    # values of a Theta family are determined there
    per_kernel = scan.delta_classes_per_indec_kernel()
    exp_classes = expected.get("delta_classes_per_kernel")
    status = "pass"
    if exp_classes is not None and any(c != exp_classes for c in per_kernel):
        status = "fail"
    rep.check("delta-classes", status, per_indec_kernel_type=sorted(set(per_kernel)))
    # unit-action structure, plus class disjointness on a small full sample
    sample = []
    enumerate_exact_3_sequences(cat, 1, on_sequence=sample.append)
    orbit = heller_orbit_check(res, thetas, sample)
    ok = orbit["classes_disjoint"] and orbit["action_free"] and orbit["action_transitive"]
    if expected.get("unit_count") is not None and orbit["unit_count"] != expected["unit_count"]:
        ok = False
    rep.check("orbit", "pass" if ok else "fail", **orbit)
    rep.summary()
    return rep.exit_code()


def cmd_angle_construct(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if scenario.kind != "standard":
            raise ScenarioError("angle construct needs a standard scenario")
        spec = json.loads(args.from_spec)
    except (ScenarioError, json.JSONDecodeError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = Reporter(scenario.name, seed=scenario.budget.seed)
    try:
        ctx, ctd, amb = _standard_setup(scenario)
        i = int(spec["from"])
        j = int(spec["to"])
        coeffs = spec.get("coeffs", [])
        basis = ctx.stable_hom(ctd.summands[i], ctd.summands[j])
        from .modules import zero_map

        f = zero_map(ctd.summands[i], ctd.summands[j])
        for c, b in zip(coeffs, basis):
            if c:
                f = f + b.rep.scale(int(c))
        seq, tower = construct_angle(amb, f)
        exact = is_exact_sequence(seq)
        vanish = lemma_vanishing_check(amb, tower)
        oracle = StandardOracle(amb, rng=scenario.rng())
        member = oracle.contains(seq)
        status = "pass" if (exact and vanish and member) else "fail"
        rep.check("angle-construct", status, exact=exact, vanishing=vanish,
                  member=member, objects=[list(o.dim_vector()) for o in seq.objects])
    except (ClusterTiltingError, FunctorCategoryError, ValueError, IndexError, KeyError) as e:
        print(f"[nangle] input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep.summary()
    return rep.exit_code()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nangle",
                                     description="exact computations in n-angulated categories")
    sub = parser.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="algebra commands")
    alg_sub = alg.add_subparsers(dest="subcommand", required=True)
    info = alg_sub.add_parser("info", help="build an algebra and report its invariants")
    info.add_argument("file")
    info.set_defaults(func=cmd_algebra_info)

    ver = sub.add_parser("verify", help="run the axiom checks of a scenario")
    ver.add_argument("scenario")
    ver.add_argument("--axioms", default=None, help="comma-separated filter, e.g. F1,F2")
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--fault", default=None,
                     choices=["rotation_sign", "cone_entry", "theta_value"])
    ver.set_defaults(func=cmd_verify)

    sus = sub.add_parser("suspension-order", help="order of the n-angulated suspension")
    sus.add_argument("scenario")
    sus.set_defaults(func=cmd_suspension_order)

    cy = sub.add_parser("cy", help="Calabi-Yau dimension report")
    cy.add_argument("scenario")
    cy.set_defaults(func=cmd_cy)

    hel = sub.add_parser("heller", help="delta-parametrization report on a micro scenario")
    hel.add_argument("scenario")
    hel.set_defaults(func=cmd_heller)

    ang = sub.add_parser("angle", help="angle commands")
    ang_sub = ang.add_subparsers(dest="subcommand", required=True)
    cons = ang_sub.add_parser("construct", help="build an n-angle from a morphism")
    cons.add_argument("scenario")
    cons.add_argument("--from", dest="from_spec", required=True,
                      help='JSON like {"from": 0, "to": 0, "coeffs": [1]}')
    cons.set_defaults(func=cmd_angle_construct)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
