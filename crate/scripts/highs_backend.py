#!/usr/bin/env python3
"""Solve an MPS/LP model with HiGHS and write a nestmip solution file.

Usage:
    highs_backend.py MODEL SOL [--time S] [--gap G] [--threads N] [--seed K]

HiGHS has no SOS support, so an SOS section in an MPS file is removed and
each set is added back as a `sum(v) <= 1` row (members are binary).
"""

import argparse
import os
import sys
import tempfile
import time

import highspy


def split_sos(text):
    """Return (mps text without SOS section, list of member-name lists)."""
    out, sets, in_sos = [], [], False
    for line in text.splitlines():
        head = line.split()[0] if line.split() else ""
        if not line.startswith((" ", "\t")) and head:
            in_sos = head == "SOS"
            if in_sos:
                continue
        if in_sos:
            tok = line.split()
            if tok and tok[0] in ("S1", "S2"):
                sets.append([])
            elif tok and sets:
                sets[-1].append(tok[0])
            continue
        out.append(line)
    return "\n".join(out) + "\n", sets


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("sol")
    ap.add_argument("--time", type=float, default=3600.0)
    ap.add_argument("--gap", type=float, default=1e-4)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("random_seed", args.seed)

    sets = []
    path = args.model
    tmp = None
    if path.lower().endswith(".mps"):
        with open(path) as f:
            text, sets = split_sos(f.read())
        if sets:
            tmp = tempfile.NamedTemporaryFile("w", suffix=".mps", delete=False)
            tmp.write(text)
            tmp.close()
            path = tmp.name
    try:
        status = h.readModel(path)
    finally:
        if tmp is not None:
            os.unlink(tmp.name)
    if status == highspy.HighsStatus.kError:
        sys.exit("highs_backend: cannot read " + args.model)
    inf = highspy.kHighsInf
    for members in sets:
        idx = [h.getColByName(m)[1] for m in members]
        h.addRow(-inf, 1.0, len(idx), idx, [1.0] * len(idx))

    start = time.perf_counter()
    h.run()
    elapsed = time.perf_counter() - start

    ms = h.getModelStatus()
    info = h.getInfo()
    M = highspy.HighsModelStatus
    has_sol = info.primal_solution_status == 2
    if ms == M.kOptimal:
        status = "optimal"
    elif ms == M.kInfeasible:
        status = "infeasible"
    elif ms == M.kTimeLimit:
        status = "time_limit"
    else:
        status = "feasible" if has_sol else "no_solution"

    lines = [
        "status = " + status,
        "time = %r" % elapsed,
        "nodes = %d" % info.mip_node_count,
        "iterations = %d" % info.simplex_iteration_count,
    ]
    if has_sol:
        lines.append("objective = %r" % info.objective_function_value)
    if status != "infeasible":
        lines.append("bound = %r" % info.mip_dual_bound)
    if has_sol:
        values = h.getSolution().col_value
        names = h.getLp().col_names_
        for name, v in zip(names, values):
            lines.append("%s %r" % (name, v))
    with open(args.sol, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
