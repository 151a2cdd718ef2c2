"""Scenario files: bundled algebra presentations plus the data needed
to run verifications and constructions on them.

A scenario references a presentation file, an arity, cluster-tilting
summand matrices (for standard-construction scenarios) or enumeration
bounds (for Heller micro scenarios), expected results, and budgets.
All bundled data lives in the package's data directory.
"""

from __future__ import annotations

import json
import os
import random
from typing import Dict, List, Optional

from .algebras import BasedAlgebra, build_based_algebra
from .axioms import Budget
from .field import Matrix
from .modules import Module, simple_module
from .quivers import AlgebraPresentation, parse_presentation
from .stable import StableContext

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class ScenarioError(ValueError):
    pass


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def list_bundled() -> Dict[str, List[str]]:
    out = {"presentations": [], "scenarios": []}
    for f in sorted(os.listdir(DATA_DIR)):
        if f.endswith(".json"):
            kind = "scenarios" if f.startswith("scenario_") else "presentations"
            out[kind].append(f)
    return out


def load_presentation(path: str) -> AlgebraPresentation:
    """Load a presentation from an explicit path or a bundled file name."""
    if not os.path.exists(path):
        bundled = data_path(path)
        if os.path.exists(bundled):
            path = bundled
        else:
            raise ScenarioError(f"presentation file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_presentation(text, name=os.path.basename(path))


def module_from_spec(algebra: BasedAlgebra, spec: dict, check: bool = True) -> Module:
    """Module from {"dims": {vertex: d}, "arrows": {name: rows}}.

    Empty matrices are rebuilt from the dimension data so that zero
    rows and columns survive the JSON round trip.
    """
    raw_dims = spec.get("dims", {})
    dims = {}
    for v in algebra.quiver.vertices:
        key = str(v)
        dims[v] = int(raw_dims.get(key, raw_dims.get(v, 0)))
    field = algebra.field
    act = {}
    for name, s, t in algebra.quiver.arrows:
        raw = spec.get("arrows", {}).get(name)
        rows, cols = dims[t], dims[s]
        if raw is None or rows == 0 or cols == 0:
            act[name] = field.zeros(rows, cols)
        else:
            m = field.matrix(raw)
            if m.a.shape != (rows, cols):
                raise ScenarioError(f"arrow {name}: matrix shape {m.a.shape} != {(rows, cols)}")
            act[name] = m
    return Module(algebra, dims, act, check=check)


def module_to_spec(m: Module) -> dict:
    return {"dims": {str(v): m.dims[v] for v in m.dims},
            "arrows": {a: m.act[a].tolist() for a in m.act if m.act[a].a.size}}


class Scenario:
    """A bundled or user-supplied scenario."""

    def __init__(self, data: dict, base_dir: Optional[str] = None):
        try:
            self.name = data["name"]
            self.kind = data["kind"]
            algebra_ref = data["algebra"]
        except KeyError as e:
            raise ScenarioError(f"scenario missing field: {e}")
        if self.kind not in ("standard", "heller"):
            raise ScenarioError(f"unknown scenario kind {self.kind!r}")
        self.n = int(data.get("n", 3))
        if base_dir and not os.path.exists(algebra_ref):
            cand = os.path.join(base_dir, algebra_ref)
            if os.path.exists(cand):
                algebra_ref = cand
        self.presentation = load_presentation(algebra_ref)
        self.algebra = build_based_algebra(self.presentation)
        self.raw = data
        self.expected = data.get("expected", {})
        budgets = data.get("budgets", {})
        self.budget = Budget.from_dict(budgets)
        if self.budget.samples <= 0:
            raise ScenarioError("budgets must be positive")
        self.fault = data.get("fault")
        self.max_rank = int(data.get("max_rank", 1))
        self._summands: Optional[List[Module]] = None
        self._witnesses: Optional[List[Module]] = None

    @property
    def summands(self) -> List[Module]:
        if self._summands is None:
            specs = self.raw.get("summands", [])
            if not specs and self.kind == "standard":
                raise ScenarioError("standard scenario needs summands")
            self._summands = [module_from_spec(self.algebra, s) for s in specs]
        return self._summands

    @property
    def witnesses(self) -> List[Module]:
        if self._witnesses is None:
            specs = self.raw.get("maximality_witnesses", [])
            self._witnesses = [module_from_spec(self.algebra, s) for s in specs]
        return self._witnesses

    def rng(self) -> random.Random:
        return random.Random(self.budget.seed)

    def stable_context(self) -> StableContext:
        return StableContext(self.algebra)


def load_scenario(path: str) -> Scenario:
    if not os.path.exists(path):
        bundled = data_path(path)
        if not os.path.exists(bundled):
            bundled = data_path(f"scenario_{path}.json")
        if os.path.exists(bundled):
            path = bundled
        else:
            raise ScenarioError(f"scenario file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"malformed scenario JSON: {e}")
    return Scenario(data, base_dir=os.path.dirname(path))
