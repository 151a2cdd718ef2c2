"""Freeze the bundled scenario JSON files (summand matrices included).

Run from the repository root after make_presentations.py:
    python3 tools/make_scenarios.py
"""

import json
import os
import sys

sys.path.insert(0, "src")

from nangle.algebras import build_based_algebra
from nangle.modules import simple_module
from nangle.scenarios import load_presentation, module_to_spec
from nangle.stable import StableContext

OUT = os.path.join("src", "nangle", "data")


def write(name, data):
    with open(os.path.join(OUT, name), "w", encoding="utf-8") as f:
        json.dump(data, f, indent=1)
    print("wrote", name)


def pia2_scenario():
    algebra = build_based_algebra(load_presentation("pi_a2_f2.json"))
    ctx = StableContext(algebra)
    s1 = ctx.strip_projectives(simple_module(algebra, 1))[0]
    s2 = ctx.strip_projectives(simple_module(algebra, 2))[0]
    return {
        "name": "pia2_n4",
        "kind": "standard",
        "algebra": "pi_a2_f2.json",
        "n": 4,
        "summands": [module_to_spec(s1)],
        "maximality_witnesses": [module_to_spec(s2)],
        "expected": {"suspension_order": 1, "cy_dimension": 3, "d": 1},
        "budgets": {"samples": 5, "max_rank": 2, "seed": 11, "sweep": 65536},
    }


def pia3_scenario(p, name):
    algebra = build_based_algebra(load_presentation(f"pi_a3_f{p}.json"))
    ctx = StableContext(algebra)
    s1 = ctx.strip_projectives(simple_module(algebra, 1))[0]
    t2 = ctx.cosyzygy_power(s1, 2)
    t3 = ctx.cosyzygy_power(s1, 4)
    s2 = ctx.strip_projectives(simple_module(algebra, 2))[0]
    return {
        "name": name,
        "kind": "standard",
        "algebra": f"pi_a3_f{p}.json",
        "n": 4,
        "summands": [module_to_spec(m) for m in (s1, t2, t3)],
        "maximality_witnesses": [module_to_spec(s2)],
        "expected": {"suspension_order": 3, "cy_dimension": 3, "d": 1},
        "budgets": {"samples": 4, "max_rank": 1, "seed": 5, "sweep": 65536},
    }


def pia5_scenario():
    summands = json.load(open("/tmp/pia5_summands.json"))
    algebra = build_based_algebra(load_presentation("pi_a5_f2.json"))
    ctx = StableContext(algebra)
    s2 = ctx.strip_projectives(simple_module(algebra, 2))[0]
    return {
        "name": "pia5_triangle",
        "kind": "standard",
        "algebra": "pi_a5_f2.json",
        "n": 4,
        "summands": summands,
        "maximality_witnesses": [module_to_spec(s2)],
        "expected": {"suspension_order": 3, "endomorphism_dim": 56, "d": 1},
        "budgets": {"samples": 2, "max_rank": 1, "seed": 3, "sweep": 4096},
    }


def heller_scenario(p, name, expected):
    return {
        "name": name,
        "kind": "heller",
        "algebra": f"dual_numbers_f{p}.json",
        "n": 3,
        "max_rank": 2,
        "expected": expected,
        "budgets": {"samples": 4, "max_rank": 2, "seed": 2},
    }


def fault_scenario(base, fault, name):
    data = dict(base)
    data["name"] = name
    data["fault"] = fault
    return data


if __name__ == "__main__":
    write("scenario_pia2_n4.json", pia2_scenario())
    write("scenario_pia3_n4.json", pia3_scenario(2, "pia3_n4"))
    pia3_f3 = pia3_scenario(3, "pia3_f3_n4")
    write("scenario_pia3_f3_n4.json", pia3_f3)
    write("scenario_pia5_triangle.json", pia5_scenario())
    write("scenario_heller_micro_f2.json", heller_scenario(
        2, "heller_micro_f2",
        {"theta_count": 1, "compatible": True, "unit_count": 1,
         "action_free": True, "action_transitive": True, "delta_classes_per_kernel": 1}))
    write("scenario_heller_micro_f3.json", heller_scenario(
        3, "heller_micro_f3",
        {"theta_count": 2, "compatible": False, "unit_count": 2,
         "action_free": True, "action_transitive": True, "delta_classes_per_kernel": 2}))
    write("scenario_fault_rotation.json", fault_scenario(pia3_f3, "rotation_sign", "fault_rotation"))
    write("scenario_fault_cone.json", fault_scenario(pia3_f3, "cone_entry", "fault_cone"))
    theta_fault = dict(pia3_f3)
    theta_fault["name"] = "fault_theta"
    theta_fault["fault"] = "theta_value"
    write("scenario_fault_theta.json", theta_fault)
