import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import orders, trig_polys
from fracperiodic.errors import DomainViolation, GridTooCoarse
from fracperiodic.nonlinearity import Nonlinearity
from fracperiodic.trig_field import (
    PeriodicFunction,
    analyze,
    compose_nonlinearity,
    derivative,
    grid,
    hs_energy,
    l2_norm,
    norms,
    sup_norm,
    synthesize,
)

TWO_PI = 2 * math.pi


def test_synthesize_quarter_nodes():
    f = PeriodicFunction.from_modes(2.0, [(1, 1.0, 0.0)], 1)
    np.testing.assert_allclose(synthesize(f, 4), [3, 2, 1, 2], atol=1e-15)


def test_synthesize_zero():
    assert np.all(synthesize(PeriodicFunction.zero(3), 11) == 0)


def test_synthesize_rejects_coarse_grid():
    with pytest.raises(GridTooCoarse):
        synthesize(PeriodicFunction.zero(8), 16)
    with pytest.raises(GridTooCoarse):
        analyze(np.zeros(8), 4)


def test_analyze_examples():
    t = grid(9)
    f = analyze(np.cos(2 * t), 4)
    expected = np.zeros(4)
    expected[1] = 1
    np.testing.assert_allclose(f.a, expected, atol=1e-15)
    np.testing.assert_allclose(f.b, 0, atol=1e-15)
    assert abs(f.a0) < 1e-15

    f = analyze(np.full(9, 5.0), 4)
    assert f.a0 == pytest.approx(5.0, abs=1e-14)
    assert np.max(np.abs(np.r_[f.a, f.b])) < 1e-14

    t = grid(17)
    f = analyze(np.cos(t) ** 2, 4)
    assert f.a0 == pytest.approx(0.5, abs=1e-15)
    assert f.a[1] == pytest.approx(0.5, abs=1e-15)
    assert np.max(np.abs(np.r_[f.a[[0, 2, 3]], f.b])) < 1e-15


@given(trig_polys())
def test_roundtrip(f):
    for m in (2 * f.n_modes + 1, 2 * f.n_modes + 2, 64):
        g = analyze(synthesize(f, m), f.n_modes)
        assert f.max_coefficient_distance(g) <= 1e-12


def test_synthesize_matches_direct_sum():
    rng = np.random.default_rng(3)
    f = PeriodicFunction(0.7, rng.normal(size=5), rng.normal(size=5))
    t = grid(23)
    n = np.arange(1, 6)
    direct = 0.7 + np.cos(np.outer(t, n)) @ f.a + np.sin(np.outer(t, n)) @ f.b
    np.testing.assert_allclose(synthesize(f, 23), direct, atol=1e-13)


def test_derivative_examples():
    d = derivative(PeriodicFunction.from_modes(0, [(1, 1, 0)], 2))
    np.testing.assert_array_equal(d.b, [-1, 0])
    np.testing.assert_array_equal(d.a, [0, 0])
    c = derivative(PeriodicFunction.constant(4.0, 3))
    assert c.a0 == 0 and not np.any(c.a) and not np.any(c.b)
    d = derivative(PeriodicFunction.from_modes(0, [(3, 0, 1)], 3))
    np.testing.assert_array_equal(d.a, [0, 0, 3])


@given(trig_polys())
def test_derivative_mean_zero_and_matches_finite_difference(f):
    d = derivative(f)
    assert d.a0 == 0.0
    m = 4 * f.n_modes + 1
    t = grid(m)
    h = 1e-5
    shifted = lambda x: f.a0 + np.cos(np.outer(x, np.arange(1, f.n_modes + 1))) @ f.a + np.sin(
        np.outer(x, np.arange(1, f.n_modes + 1))
    ) @ f.b
    fd = (shifted(t + h) - shifted(t - h)) / (2 * h)
    scale = 1 + np.max(np.abs(fd))
    assert np.max(np.abs(synthesize(d, m) - fd)) <= 1e-6 * scale * f.n_modes**3


def test_compose_examples():
    f = PeriodicFunction.from_modes(0, [(1, 1, 0)], 4)
    sq = compose_nonlinearity(Nonlinearity.from_terms([(1, 2)]), f)
    assert sq.a0 == pytest.approx(0.5, abs=1e-14)
    np.testing.assert_allclose(sq.a, [0, 0.5, 0, 0], atol=1e-14)
    inv = compose_nonlinearity(Nonlinearity.from_terms([(1, -1)]), PeriodicFunction.constant(2.0, 4))
    assert inv.a0 == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainViolation):
        compose_nonlinearity(Nonlinearity.from_terms([(1, -1)]), f)


def test_compose_refinement_adequacy():
    f = PeriodicFunction.from_modes(2.0, [(1, 0.4, 0.1), (2, 0.1, 0.0)], 24)
    phi = Nonlinearity.from_terms([(1, -1), (0.5, 2)])
    r1 = compose_nonlinearity(phi, f, 3)
    r2 = compose_nonlinearity(phi, f, 6)
    assert r1.max_coefficient_distance(r2) <= 1e-8


def test_norm_examples():
    cos = PeriodicFunction.from_modes(0, [(1, 1, 0)], 2)
    for s in (0.3, 0.75, 0.99):
        assert hs_energy(cos, s) == pytest.approx(math.pi, rel=1e-15)
    three = PeriodicFunction.constant(3.0, 2)
    assert l2_norm(three) == pytest.approx(3 * math.sqrt(TWO_PI))
    assert hs_energy(three, 0.7) == 0.0
    cos2 = PeriodicFunction.from_modes(0, [(2, 1, 0)], 2)
    assert hs_energy(cos2, 0.5) == pytest.approx(TWO_PI)
    n = norms(three, 0.7)
    assert (n.mean, n.sup) == (3.0, pytest.approx(3.0))


@given(trig_polys(), orders)
def test_l2_norm_matches_quadrature(f, s):
    m = 4 * f.n_modes + 1
    quad = math.sqrt(TWO_PI * np.mean(synthesize(f, m) ** 2))
    assert l2_norm(f) == pytest.approx(quad, rel=1e-12, abs=1e-12)
    assert sup_norm(f) <= math.sqrt(2 * f.a0**2 + np.sum(f.a**2 + f.b**2)) * math.sqrt(f.n_modes + 1) + 1e-12
    assert hs_energy(f, s) >= 0


@given(trig_polys(mean=False), st.floats(0.01, 0.99))
def test_poincare_inequality(f, s):
    assert l2_norm(f) ** 2 <= TWO_PI ** (2 * s) * hs_energy(f, s) * (1 + 1e-14)


def test_hs_energy_zero_only_for_constants():
    assert hs_energy(PeriodicFunction.constant(1.0, 4), 0.6) == 0
    f = PeriodicFunction.from_modes(1.0, [(4, 0, 1e-6)], 4)
    assert hs_energy(f, 0.6) > 0


def test_serialization_roundtrip():
    rng = np.random.default_rng(0)
    f = PeriodicFunction(0.3, rng.normal(size=4), rng.normal(size=4))
    g = PeriodicFunction.from_dict(f.to_dict())
    assert f.max_coefficient_distance(g) == 0
    lines = f.to_csv(9).splitlines()
    assert lines[0].startswith("t") and len(lines) == 10
