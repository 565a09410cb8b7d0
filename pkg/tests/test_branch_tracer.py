import math

import numpy as np
import pytest

from fracperiodic.branch_tracer import (
    BifurcationProblem,
    Branch,
    BranchConfig,
    seed_solution,
    solutions_at,
    trace_branch,
    verify_point,
)
from fracperiodic.errors import SeedFailure
from fracperiodic.frac_op import apply_spectral
from fracperiodic.nonlinearity import Nonlinearity
from fracperiodic.trig_field import PeriodicFunction, derivative, grid_min, synthesize

INV = Nonlinearity.from_terms([(1.0, -1.0)])


def preset(n_modes=32, **kw):
    args = dict(c=1.0, G=INV, e=PeriodicFunction.from_modes(1.0, [(1, 0.2, 0.0)], n_modes), s=0.75)
    args.update(kw)
    return BifurcationProblem(**args)


@pytest.fixture(scope="module")
def branch():
    return trace_branch(preset(), BranchConfig())


def test_conditions_and_seed_failure():
    assert all(v["holds"] for v in preset().validate().values())
    with pytest.raises(SeedFailure):
        trace_branch(preset(G=Nonlinearity.zero()))
    with pytest.raises(SeedFailure):
        preset(mu_range=(1.0, 0.5)).validate()


def test_seed_solves_the_equation():
    p = preset()
    u = seed_solution(p, 1.0)
    m = 8 * (2 * u.n_modes + 1)
    vals = synthesize(u, m)
    res = -synthesize(apply_spectral(u, 0.75), m) + synthesize(derivative(u), m) + vals - 1 / vals - synthesize(p.e, m)
    assert np.max(np.abs(res)) <= 1e-8 and vals.min() > 0


def test_every_point_verified(branch):
    p = branch.problem
    for pt in branch:
        assert pt.mean_identity_residual <= 1e-6
        assert grid_min(pt.solution) > 0 and pt.mu > 0
        residual, mean_res = verify_point(pt.solution, pt.mu, p)
        assert residual <= 1e-8
        # mean identity recomputed from scratch
        vals = synthesize(pt.solution, 8 * (2 * pt.solution.n_modes + 1))
        assert abs(pt.mu * pt.solution.a0 - np.mean(1 / vals) - p.ebar) == pytest.approx(mean_res, abs=1e-12)


def test_branch_geometry(branch):
    s = np.array([pt.arclength for pt in branch])
    assert s[0] == 0.0 and np.all(np.diff(s) > 0)
    assert branch[0].sup_norm > branch[-1].sup_norm
    assert branch.termination["seed_mu"] == 1.0
    lo, hi = branch.problem.mu_range
    assert min(pt.mu for pt in branch) <= lo * 1.01 or branch[0].sup_norm >= 1e3 * 0.99


def test_asymptote_band(branch):
    p = branch.problem
    cut = 50 * (1 + np.max(np.abs(synthesize(p.e, 256))))
    large = [pt for pt in branch if pt.sup_norm > cut]
    assert large
    for pt in large:
        assert 0.5 * p.ebar <= pt.sup_norm * pt.mu <= 2 * p.ebar


def test_mu_sign_summary(branch):
    summary = branch.mu_sign_summary()
    assert summary["all_positive"]
    assert summary["n_folds"] == len(branch.folds)
    assert summary["mu_min"] > 0


def test_solutions_at(branch):
    assert solutions_at(branch, 50.0) == []
    at_seed = solutions_at(branch, 1.0)
    assert len(at_seed) >= 1
    # a duplicated segment must collapse to one solution
    doubled = Branch(branch.problem, branch.points + branch.points[::-1], branch.termination)
    assert len(solutions_at(doubled, 1.0)) == len(at_seed)


def test_csv_layout(branch):
    lines = branch.to_csv().split("\n")
    assert lines[0] == "arclength,mu,sup_norm,l2_norm,fold_flag,mean_identity_residual"
    assert len(lines) == len(branch) + 2 and lines[-1] == ""
    assert lines[1].split(",")[4] in ("true", "false")


def test_fold_flag_marks_sign_change_of_dmu_ds(branch):
    signs = np.sign([pt.dmu_ds for pt in branch])
    for k, pt in enumerate(branch):
        if pt.fold_flag:
            assert signs[k] != signs[k - 1]


def test_sup_norm_cap_terminates():
    b = trace_branch(preset(), BranchConfig(sup_norm_cap=20.0))
    assert b.termination["decreasing_mu_end"] == "sup_norm_cap"
    assert max(pt.sup_norm for pt in b) <= 20.0 * 1.5
