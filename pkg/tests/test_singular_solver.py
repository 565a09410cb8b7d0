import math

import numpy as np
import pytest

from fracperiodic.errors import ConditionViolation, ContinuationStall, NoConstantRoot
from fracperiodic.frac_op import apply_spectral
from fracperiodic.lienard_solver import IterationConfig
from fracperiodic.nonlinearity import Nonlinearity
from fracperiodic.singular_solver import (
    AttractiveProblem,
    ContinuationConfig,
    RepulsiveProblem,
    bound_monitor,
    constant_root,
    find_sub_super,
    forbat_problem,
    mean_of,
    repulsive_residual,
    solve_attractive,
    solve_repulsive,
    threshold_beyond,
)
from fracperiodic.trig_field import PeriodicFunction, derivative, grid_max, grid_min, synthesize

INV = Nonlinearity.from_terms([(1.0, -1.0)])
QUAD = Nonlinearity.from_terms([(1.0, -2.0), (-1.0, 1.0)])


def cosine_forcing(mean, amp, n_modes=64):
    return PeriodicFunction.from_modes(mean, [(1, amp, 0.0)], n_modes)


def repulsive_preset(**kw):
    args = dict(c=1.0, g=QUAD, e=cosine_forcing(1.0, 0.3), s=0.9, g4_a=1.0, g4_b=0.0)
    args.update(kw)
    return RepulsiveProblem(**args)


# -- attractive ---------------------------------------------------------------------


def test_sub_super_examples():
    p = AttractiveProblem(Nonlinearity.zero(), INV, cosine_forcing(1.0, 0.5, 16), 0.75)
    ss = find_sub_super(p)
    assert ss.eta <= 2 / 3 and ss.eta == pytest.approx(2 / 3, rel=1e-9)
    assert ss.R_threshold == pytest.approx(1.0, rel=1e-9)
    assert grid_min(ss.beta) >= max(ss.eta, ss.R_threshold) - 1e-12


def test_threshold_beyond_is_monotone_inverse():
    assert threshold_beyond(INV, 1.0) == pytest.approx(1.0, rel=1e-10)
    assert threshold_beyond(INV, 0.25) == pytest.approx(4.0, rel=1e-10)
    assert threshold_beyond(Nonlinearity.constant(2.0), 1.0) is None


def test_forbat_transformation():
    p = forbat_problem(1.0, Nonlinearity.zero(), cosine_forcing(2.0, 0.5), 0.75)
    assert p.g.terms == ((1.0, -1.0),)
    assert p.ebar == pytest.approx(1.0)
    assert p.f.is_zero


def test_forbat_solution_properties():
    p = forbat_problem(1.0, Nonlinearity.zero(), cosine_forcing(2.0, 0.5), 0.75)
    rep = solve_attractive(p)
    u = rep.full_solution
    assert rep.converged and rep.residual <= 1e-9
    assert grid_min(u) > 0
    assert mean_of(INV, u) == pytest.approx(1.0, abs=1e-6)
    # independent residual: -A_s u + 1/u - (e - 1) on a fine grid
    m = 8 * (2 * u.n_modes + 1)
    res = -synthesize(apply_spectral(u, 0.75), m) + 1 / synthesize(u, m) - synthesize(p.e, m)
    assert np.max(np.abs(res)) <= 1e-8
    vals = synthesize(u, m)
    ss = find_sub_super(p)
    assert np.all(vals >= ss.eta - 1e-9)
    assert np.all(vals <= synthesize(ss.beta.resized(u.n_modes), m) + 1e-9)


def test_forbat_with_drift():
    f = Nonlinearity.from_terms([(0.5, 1.0)])
    p = forbat_problem(1.0, f, cosine_forcing(2.0, 0.5, 32), 0.75)
    rep = solve_attractive(p)
    assert rep.converged and rep.checks["mean_identity"] <= 1e-6
    assert rep.checks["order_gap_lower"] >= -1e-9 and rep.checks["order_gap_upper"] >= -1e-9


def test_constant_forcing_gives_constant_solution():
    p = AttractiveProblem(Nonlinearity.zero(), INV, PeriodicFunction.constant(2.5, 8), 0.75)
    u = solve_attractive(p).full_solution
    assert u.a0 == pytest.approx(0.4, abs=1e-10)
    assert np.max(np.abs(np.r_[u.a, u.b])) <= 1e-10


def test_attractive_condition_failures():
    flat = AttractiveProblem(Nonlinearity.zero(), Nonlinearity.constant(1.0), PeriodicFunction.constant(1.0, 4), 0.75)
    with pytest.raises(ConditionViolation):
        flat.validate()
    with pytest.raises(ConditionViolation):
        solve_attractive(flat)
    with pytest.raises(ConditionViolation):
        AttractiveProblem(Nonlinearity.zero(), INV, PeriodicFunction.constant(1.0, 4), 0.4)


# -- repulsive ----------------------------------------------------------------------


def test_constant_root_is_cubic_root():
    a = constant_root(repulsive_preset())
    real = [r.real for r in np.roots([1, -1, 0, -1]) if abs(r.imag) < 1e-12][0]
    assert a == pytest.approx(real, abs=1e-12)
    assert a == pytest.approx(1.465571, abs=1e-6)


def test_no_constant_root():
    p = repulsive_preset(g=Nonlinearity.from_terms([(1.0, -2.0)]))
    with pytest.raises(NoConstantRoot):
        constant_root(p)


def test_validation_rejects_bad_data():
    with pytest.raises(ConditionViolation):
        repulsive_preset(e=cosine_forcing(0.0, 0.3))
    with pytest.raises(ConditionViolation):
        repulsive_preset(c=0.0)
    with pytest.raises(ConditionViolation):
        repulsive_preset(operator_sign="sideways")


def test_conditions_hold_for_preset():
    cond = repulsive_preset().conditions()
    assert all(v["holds"] for v in cond.values())
    assert all(v["evidence"] == "checked numerically" for v in cond.values())
    # G4 fails without the linear allowance a = 1
    assert not repulsive_preset(g4_a=0.0).conditions()["G4"]["holds"]


def test_bound_monitor_constant_example():
    p = repulsive_preset()
    b = bound_monitor(PeriodicFunction.constant(1.2, 8), p)
    assert b.R0 == pytest.approx(1.0, rel=1e-10)
    assert b.R1 == pytest.approx(1.4655712, rel=1e-7)
    assert b.max_above_R0 and b.min_below_R1
    assert b.r is None


def test_repulsive_preset_solution():
    p = repulsive_preset()
    rep = solve_repulsive(p)
    u = rep.full_solution
    assert rep.converged and rep.checks["lambda_path"][-1] == 1.0
    assert rep.residual <= 1e-8 and rep.checks["mean_identity"] <= 1e-8
    assert grid_min(u) > 0
    # independent residual of -A_s u + c u' - g(u) - e
    m = 8 * (2 * u.n_modes + 1)
    vals = synthesize(u, m)
    res = -synthesize(apply_spectral(u, 0.9), m) + synthesize(derivative(u), m) - p.g(vals) - synthesize(p.e, m)
    assert np.max(np.abs(res)) <= 1e-8
    assert np.max(np.abs(synthesize(repulsive_residual(u, p), m))) <= 1e-8
    b = bound_monitor(u, p)
    assert b.max_below_R and b.g_l1_bound_holds and b.uprime_bound_holds
    assert b.uprime_ratio <= 1 / p.c
    assert grid_max(u) <= b.R


def test_homotopy_steps_are_continuous():
    rep = solve_repulsive(repulsive_preset())
    lam = rep.checks["lambda_path"]
    assert lam[0] == 0.0 and np.all(np.diff(lam) > 0)
    assert max(rep.checks["step_changes"]) < rep.checks["step_change_threshold"]


def test_plus_orientation_also_solves():
    p = repulsive_preset(operator_sign="plus")
    rep = solve_repulsive(p)
    u = rep.full_solution
    m = 8 * (2 * u.n_modes + 1)
    vals = synthesize(u, m)
    res = synthesize(apply_spectral(u, 0.9), m) + synthesize(derivative(u), m) - p.g(vals) - synthesize(p.e, m)
    assert np.max(np.abs(res)) <= 1e-8
    assert rep.checks["operator_orientation"] == "plus"


def test_continuation_stall_is_reported():
    cont = ContinuationConfig(initial_step=0.5, min_step=0.5, max_step=0.5, max_corrector_iterations=1)
    with pytest.raises(ContinuationStall) as info:
        solve_repulsive(repulsive_preset(e=cosine_forcing(1.0, 0.9)), IterationConfig(), cont)
    assert 0.0 <= info.value.last_lambda < 1.0
