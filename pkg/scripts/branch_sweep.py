"""Trace G(u)=1/u branches over a grid of (s, c) in parallel and summarize the mu range.

Each trace is sequential; independent traces run in a process pool.  The summary
reports whether any fold appeared and the sign of mu over each traced branch.
"""

import argparse
import json
from concurrent.futures import ProcessPoolExecutor
from itertools import product

from fracperiodic.branch_tracer import BifurcationProblem, BranchConfig, trace_branch
from fracperiodic.errors import FracPeriodicError
from fracperiodic.nonlinearity import Nonlinearity
from fracperiodic.trig_field import PeriodicFunction


def one(job):
    s, c, amp, n_modes = job
    e = PeriodicFunction.from_modes(1.0, [(1, amp, 0.0)], n_modes)
    p = BifurcationProblem(c, Nonlinearity.from_terms([(1.0, -1.0)]), e, s)
    try:
        b = trace_branch(p, BranchConfig())
    except FracPeriodicError as exc:
        return {"s": s, "c": c, "amplitude": amp, "error": f"{type(exc).__name__}: {exc}"}
    worst = max(pt.mean_identity_residual for pt in b)
    return {"s": s, "c": c, "amplitude": amp, "points": len(b), "max_mean_identity_residual": worst, **b.mu_sign_summary()}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="+", default=[0.6, 0.75, 0.9])
    ap.add_argument("--c", type=float, nargs="+", default=[0.5, 1.0, 3.0])
    ap.add_argument("--amplitude", type=float, nargs="+", default=[0.2])
    ap.add_argument("--n-modes", type=int, default=32)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()
    jobs = [(s, c, a, args.n_modes) for s, c, a in product(args.s, args.c, args.amplitude)]
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for row in pool.map(one, jobs):
            print(json.dumps(row, sort_keys=True))


if __name__ == "__main__":
    main()
