#!/usr/bin/env python3
"""Solve the d=2 trace-minimization instances with an interior-point solver
and freeze the results as a test fixture.

Usage:
  tests/uniphase_acceptance --dump-oracle-instances instances.json
  python3 tools/make_oracle.py instances.json tests/data/oracle_d2.json

The program per instance: minimize Tr(Gamma) over Hermitian PSD Gamma of
size d^2 with exact data agreement d * c_i^dag Gamma c_i = y_i (noiseless
instances, eta = 0) and both partial traces equal to (Tr Gamma / d) * I.
c_i = vec(C_i), row-major.
"""

import json
import sys

import cvxpy as cp
import numpy as np


def unpack_matrix(entries, d):
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(d, d)


def solve_instance(inst):
    d = inst["d"]
    y = np.array(inst["y"])
    cs = [unpack_matrix(u, d).reshape(-1) for u in inst["unitaries"]]

    n = d * d
    G = cp.Variable((n, n), hermitian=True)
    cons = [G >> 0]
    for c, yi in zip(cs, y):
        M = np.outer(c, c.conj())  # Tr(G M) = c^dag G c
        cons.append(d * cp.real(cp.trace(G @ M)) == yi)
    tr_scaled = cp.trace(G) / d
    # partial traces over each register of the composite index d*a + i
    pt1 = sum(G[d * a : d * a + d, d * a : d * a + d] for a in range(d))
    pt2_rows = []
    for a in range(d):
        pt2_rows.append(
            cp.hstack([cp.trace(G[d * a : d * a + d, d * b : d * b + d])
                       for b in range(d)]))
    pt2 = cp.vstack(pt2_rows)
    eye = np.eye(d)
    cons.append(pt1 == tr_scaled * eye)
    cons.append(pt2 == tr_scaled * eye)

    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(G))), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal",):
        raise RuntimeError(f"solver status {prob.status}")
    Gv = G.value
    Gv = 0.5 * (Gv + Gv.conj().T)
    return float(np.real(np.trace(Gv))), Gv


def main():
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    instances = json.load(open(sys.argv[1]))
    out = []
    for k, inst in enumerate(instances):
        obj, G = solve_instance(inst)
        entry = {
            "m": inst["m"],
            "seed": inst["seed"],
            "objective": obj,
            "gamma": [[float(z.real), float(z.imag)] for z in G.reshape(-1)],
        }
        out.append(entry)
        print(f"instance {k}: m={inst['m']} objective={obj:.12f}")
    with open(sys.argv[2], "w") as f:
        json.dump(out, f, indent=1)
        f.write("\n")
    print(f"wrote {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
