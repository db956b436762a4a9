#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Re-solve an SDP dump (docs/sdp_dump_format.md) with cvxpy and compare objectives.

usage: crosscheck_dump.py <dump> <expected objective> [relative tolerance]
"""

import sys

import cvxpy as cp
import numpy as np


def read_matrix(lines, pos, rows):
    out = []
    for r in range(rows):
        vals = [float(x) for x in lines[pos + r].split()]
        out.append([complex(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)])
    return np.array(out), pos + rows


def read_affine(lines, pos, dims):
    const = float(lines[pos].split()[1])
    pos += 1
    traces, scalars = [], []
    while lines[pos] != "end":
        head = lines[pos].split()
        if head[0] == "trace":
            var = int(head[1])
            c, pos = read_matrix(lines, pos + 1, dims[var])
            traces.append((var, c))
        else:
            scalars.append((int(head[1]), float(head[2])))
            pos += 1
    return (const, traces, scalars), pos + 1


def parse(path):
    lines = [ln.rstrip("\n") for ln in open(path)]
    assert lines[0] == "sdp-dump 1", "unknown dump version"
    pos = 1
    nmat = int(lines[pos].split()[1])
    mats = [lines[pos + 1 + i].split() for i in range(nmat)]
    pos += 1 + nmat
    nsc = int(lines[pos].split()[1])
    scs = [lines[pos + 1 + i].split() for i in range(nsc)]
    pos += 1 + nsc
    dims = [int(m[1]) for m in mats]
    assert lines[pos] == "objective"
    objective, pos = read_affine(lines, pos + 1, dims)
    nlmi = int(lines[pos].split()[1])
    pos += 1
    lmis = []
    for _ in range(nlmi):
        dim = int(lines[pos].split()[2])
        assert lines[pos + 1] == "constant"
        f0, pos = read_matrix(lines, pos + 2, dim)
        congr, scal = [], []
        while lines[pos] != "end":
            head = lines[pos].split()
            if head[0] == "congruence":
                var, coef = int(head[1]), float(head[2])
                w, pos = read_matrix(lines, pos + 1, dims[var])
                congr.append((var, coef, w))
            else:
                f, pos = read_matrix(lines, pos + 1, dim)
                scal.append((int(head[1]), f))
        lmis.append((f0, congr, scal))
        pos += 1
    ncon = int(lines[pos].split()[1])
    pos += 1
    cons = []
    for _ in range(ncon):
        rel = lines[pos].split()[2]
        aff, pos = read_affine(lines, pos + 1, dims)
        cons.append((rel, aff))
    return mats, scs, objective, lmis, cons


def build(mats, scs, objective, lmis, cons):
    xs = []
    for name, dim, field in mats:
        n = int(dim)
        xs.append(cp.Variable((n, n), hermitian=True) if field == "complex" else cp.Variable((n, n), symmetric=True))
    ss = [cp.Variable() for _ in scs]
    constraints = [x >> 0 for x in xs]
    constraints += [s >= 0 for s, (_, kind) in zip(ss, scs) if kind == "nonnegative"]

    def affine(a):
        const, traces, scalars = a
        e = const
        for var, c in traces:
            e = e + cp.real(cp.trace(c @ xs[var]))
        for var, coef in scalars:
            e = e + coef * ss[var]
        return e

    for f0, congr, scal in lmis:
        e = f0
        for var, coef, w in congr:
            e = e + coef * (w.conj().T @ xs[var] @ w)
        for var, f in scal:
            e = e + ss[var] * f
        constraints.append(0.5 * (e + e.H) >> 0)
    for rel, a in cons:
        e = affine(a)
        constraints.append(e == 0 if rel == "eq" else (e >= 0 if rel == "ge" else e <= 0))
    return cp.Problem(cp.Minimize(affine(objective)), constraints)


def main():
    if len(sys.argv) < 3:
        print(__doc__)
        return 2
    expected = float(sys.argv[2])
    tol = float(sys.argv[3]) if len(sys.argv) > 3 else 1e-3
    prob = build(*parse(sys.argv[1]))
    for solver in ("CLARABEL", "CVXOPT", "SCS"):
        if solver not in cp.installed_solvers():
            continue
        try:
            prob.solve(solver=solver)
        except cp.error.SolverError:
            continue
        if prob.status == "optimal":
            break
    rel = abs(prob.value - expected) / max(1.0, abs(expected))
    ok = prob.status == "optimal" and rel <= tol
    print(f"{'PASS' if ok else 'FAIL'} {solver} objective {prob.value:.10g} internal {expected:.10g} relative {rel:.3g}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
