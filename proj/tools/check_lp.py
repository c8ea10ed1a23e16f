#!/usr/bin/env python3
"""Solve a corrnet LP export with scipy's MILP solver and print the optimum as JSON.

Only the subset of the CPLEX LP format written by `corrnet export-mip` is
understood: one objective, linear rows with <= or =, two-sided bounds and a
Binary section.

Exit status: 0 on success, 3 when scipy is unavailable, 1 on solver failure.
"""

import argparse
import json
import sys


def parse_lp(text):
    sections = {}
    current = None
    for line in text.splitlines():
        if line.startswith("\\"):
            continue
        head = line.strip()
        if head in ("Maximize", "Minimize", "Subject To", "Bounds", "Binary", "End"):
            current = head
            sections[current] = []
            continue
        if current is not None:
            sections[current].extend(line.split())

    if "Maximize" in sections:
        sense, obj_tokens = -1.0, sections["Maximize"]
    else:
        sense, obj_tokens = 1.0, sections["Minimize"]

    names = {}

    def index(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    def terms(tokens):
        out = []
        for i in range(0, len(tokens), 3):
            sign, coef, var = tokens[i], float(tokens[i + 1]), tokens[i + 2]
            out.append((index(var), -coef if sign == "-" else coef))
        return out

    objective = terms(obj_tokens[1:])

    rows = []
    tokens = sections.get("Subject To", [])
    i = 0
    while i < len(tokens):
        name = tokens[i].rstrip(":")
        j = i + 1
        while tokens[j] not in ("<=", "=", ">="):
            j += 1
        rows.append((name, terms(tokens[i + 1:j]), tokens[j], float(tokens[j + 1])))
        i = j + 2

    bounds = {}
    tokens = sections.get("Bounds", [])
    for k in range(0, len(tokens), 5):
        lo, _, var, _, hi = tokens[k:k + 5]
        bounds[index(var)] = (float(lo), float(hi))

    binaries = [index(var) for var in sections.get("Binary", [])]
    return sense, names, objective, rows, bounds, binaries


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp", help="LP file written by corrnet export-mip")
    args = parser.parse_args()

    try:
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import lil_matrix
    except ImportError as exc:
        print(json.dumps({"status": "unavailable", "reason": str(exc)}))
        return 3

    with open(args.lp, encoding="utf-8") as fh:
        sense, names, objective, rows, bounds, binaries = parse_lp(fh.read())

    n = len(names)
    c = np.zeros(n)
    for var, coef in objective:
        c[var] += sense * coef

    a = lil_matrix((len(rows), n))
    lo = np.empty(len(rows))
    hi = np.empty(len(rows))
    for r, (_, row_terms, op, rhs) in enumerate(rows):
        for var, coef in row_terms:
            a[r, var] += coef
        lo[r] = rhs if op in ("=", ">=") else -np.inf
        hi[r] = rhs if op in ("=", "<=") else np.inf

    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    integrality = np.zeros(n)
    for var, (l, u) in bounds.items():
        lower[var], upper[var] = l, u
    for var in binaries:
        lower[var], upper[var], integrality[var] = 0.0, 1.0, 1

    res = milp(c, constraints=LinearConstraint(a.tocsr(), lo, hi), bounds=Bounds(lower, upper),
               integrality=integrality, options={"mip_rel_gap": 1e-9})
    if not res.success:
        print(json.dumps({"status": "failed", "message": res.message}))
        return 1

    by_index = {v: k for k, v in names.items()}
    chosen = sorted(by_index[v] for v in binaries if res.x[v] > 0.5)
    print(json.dumps({"status": "optimal", "objective": sense * res.fun, "binaries": chosen}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
