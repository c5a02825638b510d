import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admissible.derivatives import (
    cauchy_estimate_check,
    directional_spherical,
    growth_fit,
    nabla_functional,
    spherical_derivative_1d,
    spherical_gradient,
    splitting_equivalence_check,
    trend_label,
)
from admissible.errors import FitError, GeometryError
from admissible.expr import catalog, function, reciprocal
from admissible.geometry import UnitBall, boundary_frame
from admissible.regions import RegionSpec, paper_parabola, sample_region

B2 = UnitBall(2)
F = catalog("paper_counterexample")


def test_spherical_1d_oracles():
    assert spherical_derivative_1d(function("z1", 1), 0) == 1
    assert spherical_derivative_1d(function("3", 1), 0.4) == 0
    assert spherical_derivative_1d(function("1/(1 - z1)", 1), 0.9) == pytest.approx(100 / 101)


def test_spherical_1d_at_pole_uses_reciprocal():
    f = function("1/z1", 1)
    assert spherical_derivative_1d(f, 0) == pytest.approx(1.0)


def test_counterexample_on_real_slice():
    # the gradient there is zero: d/dz2 z2^2 vanishes at z2 = 0
    ds = directional_spherical(F, B2, np.array([0.5, 0]))
    assert ds.normal == 0 and ds.tangential == 0


def test_counterexample_tangential_at_parabola():
    for j in (100, 10_000):
        z = paper_parabola(j)
        # gradient in ambient coordinates: d2 f = 2 sqrt j, |f| = 1
        G = spherical_gradient(F, z)
        assert abs(G[1]) == pytest.approx(math.sqrt(j), rel=1e-9)
        # in the frame at the nearest boundary point the tangential part halves
        ds = directional_spherical(F, B2, z)
        assert ds.tangential == pytest.approx(math.sqrt(j) / 2, rel=2 / j)


def test_constant_has_zero_directional():
    ds = directional_spherical(catalog("constant(2)"), B2, np.array([0.5, 0.3]))
    assert (ds.normal, ds.tangential) == (0, 0)


def test_directional_phase_invariance():
    rng = np.random.default_rng(0)
    z = np.array([0.7 + 0.1j, 0.3 - 0.2j])
    f = catalog("tangential_cubed")
    frame = boundary_frame(B2, z / np.linalg.norm(z))
    base = directional_spherical(f, B2, z, frame)
    for _ in range(100):
        ph = np.exp(1j * rng.uniform(0, 2 * np.pi, 1))
        other = directional_spherical(f, B2, z, frame.rephased(ph))
        assert other.normal == pytest.approx(base.normal, rel=1e-12)
        assert other.tangential == pytest.approx(base.tangential, rel=1e-12)


def test_nabla_functional_along_parabola():
    vals = [nabla_functional(F, B2, [1, 0], paper_parabola(j)) for j in (100, 1000, 10**5)]
    assert all(0.4 <= v <= 1.2 for v in vals)
    assert vals[-1] == pytest.approx(0.75, abs=0.01)


def test_nabla_functional_tangential_cubed_decays():
    f = catalog("tangential_cubed")
    vals = [nabla_functional(f, B2, [1, 0], paper_parabola(j)) for j in (100, 10**4, 10**6)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 0.01


def test_nabla_constant_zero():
    assert nabla_functional(catalog("constant(1+i)"), B2, [1, 0], [0.9, 0.1]) == 0


@given(st.complex_numbers(max_magnitude=0.9, allow_nan=False).filter(lambda z: abs(z - 1) > 1e-3 and abs(z) > 1e-3))
def test_chordal_invariance_1d(z):
    f = function("(z1 - 0.3)/(1 - z1)", 1)
    a, b = spherical_derivative_1d(f, z), spherical_derivative_1d(reciprocal(f), z)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


def test_splitting_normal_ray_ratio_one():
    z = np.array([[1 - t, 0] for t in (0.1, 0.01, 0.001)], dtype=complex)
    rep = splitting_equivalence_check(catalog("inv_normal"), B2, [1, 0], z)
    assert rep.min_ratio == pytest.approx(1) and rep.max_ratio == pytest.approx(1)


def test_splitting_generic_bounded():
    r = RegionSpec("real_adapted", 2, (1, 0), B2)
    pts = np.concatenate([sample_region(r, t, 50, seed=1).points for t in (1e-2, 1e-4, 1e-6)])
    rep = splitting_equivalence_check(catalog("tangential_cubed"), B2, [1, 0], pts)
    assert 1 <= rep.C < 10


def test_splitting_unitary_invariance():
    # rotating everything by a unitary leaves the ratios unchanged
    theta = 0.7
    Q = np.array([[math.cos(theta), -1j * math.sin(theta)], [-1j * math.sin(theta), math.cos(theta)]])
    f = catalog("tangential_cubed")
    r = RegionSpec("real_adapted", 2, (1, 0), B2)
    pts = sample_region(r, 1e-3, 30, seed=4).points
    rep = splitting_equivalence_check(f, B2, [1, 0], pts)
    from admissible.expr import AffinePullback

    g = AffinePullback(f, np.zeros(2), Q.conj().T)
    rep2 = splitting_equivalence_check(g, B2, Q[:, 0], pts @ Q.T)
    assert rep2.min_ratio == pytest.approx(rep.min_ratio, rel=1e-6)
    assert rep2.max_ratio == pytest.approx(rep.max_ratio, rel=1e-6)


def test_growth_fit_synthetic_oracles():
    d = np.logspace(-8, -2, 12)
    fit = growth_fit(d, d**-0.5)
    assert fit.exponent == pytest.approx(-0.5, abs=0.01) and fit.label(0.5) == "O"
    fit = growth_fit(d, d**-0.5 / np.log(1 / d))
    assert fit.label(0.5) == "o"
    fit = growth_fit(d, np.full_like(d, 3.0))
    assert fit.exponent == pytest.approx(0, abs=0.01)
    assert growth_fit(d, d**-1.5).label(1.0) == "diverges"


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([-1.0, -0.5, 0.0]), st.integers(0, 10**6))
def test_growth_fit_recovers_planted(p, seed):
    rng = np.random.default_rng(seed)
    d = np.logspace(-8, -2, 12)
    v = d**p * (1 + 0.01 * rng.standard_normal(12))
    assert growth_fit(d, v).exponent == pytest.approx(p, abs=0.02)


def test_growth_fit_errors_and_vanishing():
    with pytest.raises(FitError):
        growth_fit(np.logspace(-3, -2, 12), np.ones(12))
    with pytest.raises(FitError):
        growth_fit(np.logspace(-8, -2, 5), np.ones(5))
    fit = growth_fit(np.logspace(-8, -2, 12), np.zeros(12))
    assert fit.vanishing and fit.label(1.0) == "o"


def test_growth_fit_reproducible():
    d = np.logspace(-8, -2, 12)
    v = d**-0.3
    assert growth_fit(d, v) == growth_fit(d, v)


def test_trend_label_order_independent():
    d = np.logspace(-8, -2, 12)
    v = d**-1 * 2
    perm = np.random.default_rng(0).permutation(12)
    assert trend_label(d, v, 1.0) == trend_label(d[perm], v[perm], 1.0) == "O"


def test_cauchy_oracles():
    rep = cauchy_estimate_check(catalog("coordinate"), [0.9, 0], 0.1)
    assert rep.normal_lhs == pytest.approx(1) and rep.normal_rhs >= 1
    assert rep.holds
    assert cauchy_estimate_check(F, [0.9, 0], 0.1).holds
    rep = cauchy_estimate_check(catalog("constant(1)"), [0.5, 0.5], 0.1)
    assert rep.normal_lhs == 0 and rep.holds


def test_cauchy_polydisc_must_fit():
    with pytest.raises(GeometryError):
        cauchy_estimate_check(F, [0.9, 0.3], 0.9)


def test_cauchy_random_triples():
    rng = np.random.default_rng(11)
    names = ["paper_counterexample", "tangential_cubed", "inv_normal", "coordinate", "disc_linear"]
    count = 0
    while count < 100:
        z = rng.normal(size=4)
        z = (z[:2] + 1j * z[2:]) / np.linalg.norm(z) * rng.uniform(0.3, 0.99)
        c = float(rng.choice([0.05, 0.1, 0.2]))
        try:
            rep = cauchy_estimate_check(catalog(rng.choice(names)), z, c)
        except GeometryError:
            continue
        assert rep.holds
        count += 1
