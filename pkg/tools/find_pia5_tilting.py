"""Search stable mod Pi(A5) for the ten-summand rigid object of the
triangle-quiver scenario and freeze it as JSON.

Run from the repository root:  python3 tools/find_pia5_tilting.py
"""

import itertools
import json
import pickle
import sys
import time

sys.path.insert(0, "tests")
sys.path.insert(0, "src")

from helpers import preprojective_an

from nangle.algebras import build_based_algebra
from nangle.decompose import find_iso
from nangle.modules import Module, simple_module
from nangle.stable import StableContext

t0 = time.time()
A = build_based_algebra(preprojective_an(5, degree_bound=10))
ctx = StableContext(A)
F = A.field
data = pickle.load(open("/tmp/pia5_pool2.pkl", "rb"))


def load_module(dims, act):
    mats = {}
    for name, s, t in A.quiver.arrows:
        raw = act.get(name)
        rows, cols = dims.get(t, 0), dims.get(s, 0)
        mats[name] = F.zeros(rows, cols) if (raw is None or rows == 0 or cols == 0) else F.matrix(raw)
    return Module(A, dims, mats, check=False)


pool = [load_module(d, a) for d, a in data.values()]
pool = [m for m in pool if m.total_dim() <= 9]
print("pool:", len(pool), flush=True)

rigid = [m for m in pool if ctx.stable_hom_dim(m, ctx.cosyzygy(m)) == 0]
print("self-rigid:", len(rigid), f"({time.time()-t0:.1f}s)", flush=True)

iso_memo = {}


def same(x, y):
    if x.dim_vector() != y.dim_vector():
        return False
    key = (x.key(), y.key())
    if key not in iso_memo:
        iso_memo[key] = find_iso(x, y) is not None
    return iso_memo[key]


def canon_index(mods, m):
    for i, x in enumerate(mods):
        if same(x, m):
            return i
    return None


# dedupe the rigid list up to isomorphism
reps = []
for m in rigid:
    if canon_index(reps, m) is None:
        reps.append(m)
print("rigid up to iso:", len(reps), f"({time.time()-t0:.1f}s)", flush=True)

# omega^{-2} orbits
orbit_of = {}
orbits = []
for i, m in enumerate(reps):
    if i in orbit_of:
        continue
    orb = [i]
    cur = m
    for _ in range(5):
        cur = ctx.cosyzygy_power(cur, 2)
        j = canon_index(reps, cur)
        if j is None:
            orb = None
            break
        if j == i:
            break
        orb.append(j)
    if orb is None:
        continue
    oid = len(orbits)
    orbits.append(orb)
    for j in orb:
        orbit_of[j] = oid
print("orbits:", [(len(o), [reps[i].dim_vector() for i in o]) for o in orbits],
      f"({time.time()-t0:.1f}s)", flush=True)

hom_memo = {}


def sh(i, j):
    key = (i, j)
    if key not in hom_memo:
        hom_memo[key] = ctx.stable_hom_dim(reps[i], ctx.cosyzygy(reps[j]))
    return hom_memo[key]


def internally_rigid(orb):
    return all(sh(i, j) == 0 for i in orb for j in orb)


good = [o for o in orbits if internally_rigid(o)]
print("internally rigid orbits:", [(len(o), [reps[i].dim_vector() for i in o]) for o in good],
      f"({time.time()-t0:.1f}s)", flush=True)

G = len(good)
compat = [[all(sh(i, j) == 0 and sh(j, i) == 0 for i in good[a] for j in good[b])
           for b in range(G)] for a in range(G)]
sizes = [len(o) for o in good]
found = []
for r in range(1, G + 1):
    for combo in itertools.combinations(range(G), r):
        if sum(sizes[c] for c in combo) != 10:
            continue
        if all(compat[a][b] for a, b in itertools.combinations(combo, 2)):
            found.append(combo)
print("10-summand unions:", found, f"({time.time()-t0:.1f}s)", flush=True)

if found:
    combo = found[0]
    summands = [reps[i] for c in combo for i in good[c]]
    out = []
    for m in summands:
        out.append({"dims": {str(v): m.dims[v] for v in m.dims},
                    "arrows": {a: m.act[a].tolist() for a in m.act}})
    json.dump(out, open("/tmp/pia5_summands.json", "w"))
    table = [[ctx.stable_hom_dim(x, y) for y in summands] for x in summands]
    for row in table:
        print(row)
    print("E dim:", sum(map(sum, table)))
    print("saved /tmp/pia5_summands.json", flush=True)
