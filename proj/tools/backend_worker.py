#!/usr/bin/env python3
"""Line-oriented LP/MILP solving worker backed by scipy's HiGHS bindings.

Reads one JSON model per line on stdin and writes one JSON result per line on
stdout. Kept as a long-lived child process so the scipy import cost is paid
once per backend handle.

Request format (produced by OptModel::to_json plus an "options" object):
  vars:        [{name, lb, ub, integer}]   lb/ub null = unbounded
  constraints: [{name, sense, rhs, terms: [[var, coef]...]}]
  objective:   {sense: "min"|"max", terms: [[var, coef]...]}
  options:     {tolerance, time_limit, want_duals}

Result:
  status: optimal | time_limit | infeasible | unbounded | error
  objective, bound, values (per variable), duals (per constraint, absolute
  values; LP only), message
"""

import json
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

_STATUS = {0: "optimal", 1: "time_limit", 2: "infeasible", 3: "unbounded"}


def _bound(value, default):
    return default if value is None else float(value)


def solve(req):
    variables = req["vars"]
    constraints = req.get("constraints", [])
    for con in constraints:
        if con.get("bilinear"):
            return {"status": "error", "message": "bilinear unsupported"}

    nvars = len(variables)
    lb = np.array([_bound(v.get("lb"), -np.inf) for v in variables])
    ub = np.array([_bound(v.get("ub"), np.inf) for v in variables])
    integrality = np.array([1 if v.get("integer") else 0 for v in variables])

    c = np.zeros(nvars)
    for var, coef in req["objective"]["terms"]:
        c[var] += coef
    maximize = req["objective"]["sense"] == "max"
    if maximize:
        c = -c

    options = req.get("options", {})
    time_limit = options.get("time_limit") or None
    tolerance = options.get("tolerance", 1e-4)

    if integrality.any():
        lcs = []
        for con in constraints:
            row = np.zeros(nvars)
            for var, coef in con["terms"]:
                row[var] += coef
            rhs = con["rhs"]
            if con["sense"] == "<=":
                lcs.append(LinearConstraint(row[None, :], -np.inf, rhs))
            elif con["sense"] == ">=":
                lcs.append(LinearConstraint(row[None, :], rhs, np.inf))
            else:
                lcs.append(LinearConstraint(row[None, :], rhs, rhs))
        opts = {"mip_rel_gap": tolerance}
        if time_limit:
            opts["time_limit"] = time_limit
        res = milp(c=c, constraints=lcs, integrality=integrality,
                   bounds=Bounds(lb, ub), options=opts)
        status = _STATUS.get(res.status, "error")
        out = {"status": status, "message": res.message or ""}
        if res.x is not None:
            out["values"] = [float(v) for v in res.x]
            out["objective"] = float(-res.fun if maximize else res.fun)
            bound = getattr(res, "mip_dual_bound", None)
            out["bound"] = float(-bound if maximize else bound) if bound is not None else out["objective"]
        elif status == "time_limit":
            out["status"] = "error"
            out["message"] = "time limit reached with no incumbent"
        return out

    # Pure LP path via linprog; keeps row order so duals map back 1:1.
    a_ub, b_ub, ub_rows = [], [], []
    a_eq, b_eq, eq_rows = [], [], []
    for idx, con in enumerate(constraints):
        row = np.zeros(nvars)
        for var, coef in con["terms"]:
            row[var] += coef
        if con["sense"] == "<=":
            a_ub.append(row)
            b_ub.append(con["rhs"])
            ub_rows.append(idx)
        elif con["sense"] == ">=":
            a_ub.append(-row)
            b_ub.append(-con["rhs"])
            ub_rows.append(idx)
        else:
            a_eq.append(row)
            b_eq.append(con["rhs"])
            eq_rows.append(idx)

    opts = {}
    if time_limit:
        opts["time_limit"] = time_limit
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=np.column_stack([lb, ub]),
        method="highs",
        options=opts,
    )
    status = _STATUS.get(res.status, "error")
    out = {"status": status, "message": res.message or ""}
    if res.x is not None:
        out["values"] = [float(v) for v in res.x]
        out["objective"] = float(-res.fun if maximize else res.fun)
        out["bound"] = out["objective"]
    if status == "optimal" and options.get("want_duals"):
        duals = [0.0] * len(constraints)
        if ub_rows:
            for idx, marg in zip(ub_rows, res.ineqlin.marginals):
                duals[idx] = abs(float(marg))
        if eq_rows:
            for idx, marg in zip(eq_rows, res.eqlin.marginals):
                duals[idx] = abs(float(marg))
        out["duals"] = duals
    return out


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            result = solve(json.loads(line))
        except Exception as exc:  # report, never die mid-session
            result = {"status": "error", "message": f"{type(exc).__name__}: {exc}"}
        sys.stdout.write(json.dumps(result) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
