import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathlattice.lattice import (PhysicalConstants, TimeSlicing, WaveFunction,
                                 build_grid, discrete_delta, gaussian_packet, inner, l2_norm,
                                 position_moments)


def test_two_point_grid():
    g = build_grid(0, 1, 2)
    assert g.spacing == 1.0
    assert g.nodes.tolist() == [0.0, 1.0]


def test_standard_grid_spacing_and_centre_node():
    g = build_grid(-20, 20, 801)
    assert g.spacing == pytest.approx(0.05, abs=1e-15)
    assert abs(g.node(400)) < 1e-12


@pytest.mark.parametrize("args", [(0, 1, 1), (0, 1, 0), (1, 0, 5), (0, math.inf, 5),
                                  (math.nan, 1, 5), (0, 1, 2.5)])
def test_bad_grids_rejected(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_nodes_reproducible_from_spacing():
    g = build_grid(-3.7, 11.3, 1234)
    i = np.arange(g.n_points)
    assert np.array_equal(g.nodes, g.x_min + i * g.spacing)
    assert np.all(np.diff(g.nodes) > 0)
    assert all(g.nodes[k] == g.node(k) for k in (0, 17, 1233))


def test_time_slicing():
    s = TimeSlicing(0.0, 1.0, 7)
    assert s.epsilon * s.n_slices == pytest.approx(1.0, abs=1e-15)
    assert s.times[0] == 0.0 and s.times[-1] == 1.0
    with pytest.raises(ValueError):
        TimeSlicing(1.0, 1.0, 3)
    with pytest.raises(ValueError):
        TimeSlicing(0.0, 1.0, 0)


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=0.0)
    with pytest.raises(ValueError):
        PhysicalConstants(mass=-1.0)


def test_norm_of_zero_and_constant():
    g = build_grid(0, 1, 101)
    assert l2_norm(WaveFunction(g, np.zeros(101))) == 0.0
    assert l2_norm(WaveFunction(g, np.ones(101))) == pytest.approx(math.sqrt(1.01), rel=1e-14)
    assert l2_norm(WaveFunction(g, np.ones(101))) == pytest.approx(1.00499, abs=1e-5)


def test_wavefunction_length_checked():
    with pytest.raises(ValueError):
        WaveFunction(build_grid(0, 1, 5), np.ones(4))


def test_packet_peak_and_norm():
    g = build_grid(-20, 20, 4001)
    psi = gaussian_packet(g, 0.0, 1.0, 0.0)
    assert abs(psi.values[2000]) == pytest.approx((2 * math.pi) ** -0.25, rel=1e-14)
    assert abs(psi.values[2000]) == pytest.approx(0.63162, abs=1e-5)
    # analytic norm is 1; Riemann sums of Gaussians converge spectrally
    assert abs(l2_norm(psi) - 1) < 1e-10


def test_packet_norm_and_moments_with_momentum():
    g = build_grid(-20, 20, 801)
    psi = gaussian_packet(g, 1.5, 0.8, 3.0)
    assert abs(l2_norm(psi) - 1) < 1e-8
    mean, std = position_moments(psi)
    assert mean == pytest.approx(1.5, abs=1e-10)
    assert std == pytest.approx(0.8, abs=1e-10)


def test_packet_at_edge_rejected():
    g = build_grid(-5, 5, 201)
    with pytest.raises(ValueError):
        gaussian_packet(g, 4.0, 1.0)


def test_packet_with_heavy_tails_warns():
    g = build_grid(-5, 5, 201)
    with pytest.warns(UserWarning, match="edge"):
        gaussian_packet(g, 0.0, 1.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gaussian_packet(build_grid(-10, 10, 401), 0.0, 1.0)


def test_delta_definition():
    g = build_grid(-20, 20, 801)
    d = discrete_delta(g, 123)
    assert d.values[123] == pytest.approx(20.0, rel=1e-14)
    assert np.count_nonzero(d.values) == 1
    assert np.sum(d.values).real * g.spacing == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(IndexError):
        discrete_delta(g, 801)


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
       st.integers(min_value=0, max_value=1000))
def test_norm_is_homogeneous(a, seed):
    g = build_grid(-1, 2, 64)
    rng = np.random.default_rng(seed)
    psi = WaveFunction(g, rng.normal(size=64) + 1j * rng.normal(size=64))
    assert l2_norm(a * psi) ** 2 == pytest.approx(abs(a) ** 2 * l2_norm(psi) ** 2,
                                                  rel=1e-12, abs=1e-300)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=99), st.integers(min_value=0, max_value=1000))
def test_delta_sifting(j, seed):
    g = build_grid(-2.3, 4.1, 100)
    rng = np.random.default_rng(seed)
    psi = WaveFunction(g, rng.normal(size=100) + 1j * rng.normal(size=100))
    got = inner(discrete_delta(g, j), psi)
    assert abs(got - psi.values[j]) <= 4 * np.finfo(float).eps * abs(psi.values[j])


def test_central_and_interior_masks():
    g = build_grid(-20, 20, 801)
    m = g.central(0.5)
    assert g.nodes[m].min() == pytest.approx(-10) and g.nodes[m].max() == pytest.approx(10)
    s = g.interior(0.1)
    assert s.start == 80 and s.stop == 721
