"""Probe the acceptance branch for two-solution ranges near mu = 0.

Traces the bifurcation preset, then asks solutions_at for the number of distinct
corrected solutions at a log-spaced set of mu values.  Prints the counts and the
mean-identity bound mu * mean(u) - mean(G(u)) = mean(e) that fixes the sign of mu.
"""

import numpy as np

from fracperiodic import cli
from fracperiodic.branch_tracer import BranchConfig, solutions_at, trace_branch


def main():
    cfg = cli.load_config(preset="bifurcation")
    p = cli.build_problem(cfg)
    branch = trace_branch(p, BranchConfig(residual_tol=cfg.numerics.residual_tol))
    summary = branch.mu_sign_summary()
    print(f"points={len(branch)} folds={summary['n_folds']} mu in [{summary['mu_min']:.4e}, {summary['mu_max']:.4e}]")
    print(f"termination={branch.termination}")
    for mu in np.geomspace(summary["mu_min"] * 1.01, summary["mu_max"] * 0.99, 12):
        sols = solutions_at(branch, mu)
        sups = ", ".join(f"{np.max(np.abs(u.to_vector())):.3g}" for u in sols)
        print(f"mu={mu:.4e}  solutions={len(sols)}  coefficient max=[{sups}]")
    for pt in branch.points[:: max(1, len(branch) // 8)]:
        print(f"mu={pt.mu:.4e} sup={pt.sup_norm:.4e} sup*mu={pt.sup_norm * pt.mu:.4f} mean residual={pt.mean_identity_residual:.1e}")


if __name__ == "__main__":
    main()
