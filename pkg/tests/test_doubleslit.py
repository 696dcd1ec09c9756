import cmath
import math

import numpy as np
import pytest
from scipy.special import fresnel

from pathlattice.doubleslit import (ScreenPattern, SlitGeometry, detection_probability,
                                    fringe_visibility, hole_amplitudes,
                                    reference_config, reference_geometry, screen_pattern,
                                    slit_amplitude)
from pathlattice.kernel import free_particle_kernel
from pathlattice.lattice import SpatialGrid, build_grid


@pytest.fixture(scope="module")
def geom():
    return reference_geometry()


@pytest.fixture(scope="module")
def amps(geom):
    return hole_amplitudes(geom)


def fresnel_slit(x, lo, hi, x0, tB, tC):
    """Closed form of the slit integral for hbar = m = 1."""
    alpha = 0.5 * (1 / tB + 1 / tC)
    y_star = (x0 / tB + x / tC) / (2 * alpha)
    const = x0**2 / (2 * tB) + x**2 / (2 * tC) - alpha * y_star**2
    scale = math.sqrt(2 * alpha / math.pi)
    S_hi, C_hi = fresnel((hi - y_star) * scale)
    S_lo, C_lo = fresnel((lo - y_star) * scale)
    integral = math.sqrt(math.pi / (2 * alpha)) * ((C_hi - C_lo) + 1j * (S_hi - S_lo))
    pref = cmath.exp(-0.5j * math.pi) / (2 * math.pi * math.sqrt(tB * tC))
    return pref * np.exp(1j * const) * integral


def test_reference_geometry(geom):
    assert geom.detector_grid.n_points == 2001
    assert geom.separation == pytest.approx(2.0)
    assert reference_config()["central_window"] == [-2.5, 2.5]


@pytest.mark.parametrize("kw", [dict(slit1=(1, 0)), dict(slit2=(-1.0, -0.95)),
                                dict(screen_B_t=0.0)])
def test_bad_geometry_rejected(kw):
    base = dict(source_x=0.0, screen_B_t=1.0, slit1=(-1.1, -0.9), slit2=(0.9, 1.1),
                screen_C_t=1.0, detector_grid=build_grid(-10, 10, 101))
    base.update(kw)
    with pytest.raises(ValueError):
        SlitGeometry(**base)


@pytest.mark.parametrize("x0,tB,tC", [(0.0, 1.0, 1.0), (0.3, 0.7, 2.0)])
def test_slit_amplitude_matches_fresnel_closed_form(x0, tB, tC):
    g = SlitGeometry(x0, tB, (-1.1, -0.9), (0.9, 1.1), tC, build_grid(-10, 10, 201))
    for hole in (1, 2):
        lo, hi = g.slit(hole)
        got = slit_amplitude(g, hole)
        exact = fresnel_slit(g.detector_grid.nodes, lo, hi, x0, tB, tC)
        assert np.max(np.abs(got - exact)) < 1e-12 * np.max(np.abs(exact)) + 1e-15


def test_quadrature_node_minimum(geom):
    with pytest.raises(ValueError):
        slit_amplitude(geom, 1, n_nodes=32)
    with pytest.raises(ValueError):
        slit_amplitude(geom, 3)


def test_narrow_slit_limit():
    w, a = 1e-4, 0.5
    g = SlitGeometry(0.0, 1.0, (a, a + w), (2.0, 2.1), 1.0, build_grid(-3, 3, 61))
    x = g.detector_grid.nodes
    y = a + w / 2
    approx = w * free_particle_kernel(x, 2.0, y, 1.0) * free_particle_kernel(y, 1.0, 0.0, 0.0)
    assert np.max(np.abs(slit_amplitude(g, 1) / approx - 1)) < 1e-6


def test_symmetric_geometry_gives_mirror_patterns(geom, amps):
    phi1, phi2 = amps
    assert np.allclose(phi1, phi2[::-1], rtol=1e-12, atol=0)
    P = screen_pattern(geom, amplitudes=amps).P
    assert np.allclose(P, P[::-1], rtol=1e-11, atol=0)


def test_mode_identities(geom, amps):
    pat = lambda mode, **kw: screen_pattern(geom, mode, amplitudes=amps, **kw)
    s1, s2 = pat("single", hole=1).P, pat("single", hole=2).P
    measured, coherent = pat("measured").P, pat("coherent").P
    assert np.allclose(measured, s1 + s2, rtol=1e-14)
    assert np.array_equal(pat("mixed", fraction=0.0).P, coherent)
    assert np.allclose(pat("mixed", fraction=1.0).P, measured, rtol=1e-14)
    assert pat("mixed", fraction=0.25).label == "mixed(0.25)"
    assert pat("single", hole=2).label == "single2"


def test_mode_arguments_checked(geom, amps):
    with pytest.raises(ValueError):
        screen_pattern(geom, "both", amplitudes=amps)
    with pytest.raises(ValueError):
        screen_pattern(geom, "mixed", fraction=1.5, amplitudes=amps)
    with pytest.raises(ValueError):
        screen_pattern(geom, "single", amplitudes=amps)


def test_single_slit_peak_near_geometric_image(geom, amps):
    x = geom.detector_grid.nodes
    P = np.abs(amps[0]) ** 2
    # straight line from the source through the slit centre lands at -2
    assert abs(x[np.argmax(P)] + 2.0) < 0.2


def test_fringe_spacing(geom, amps):
    # cross term 2 Re(phi1 conj(phi2)) ~ cos(2 x): nodes every pi/2
    x = geom.detector_grid.nodes
    cross = np.real(amps[0] * np.conj(amps[1]))
    sel = np.abs(x) <= 2.5
    xs, cs = x[sel], cross[sel]
    i = np.nonzero(np.sign(cs[:-1]) != np.sign(cs[1:]))[0]
    zeros = xs[i] - cs[i] * (xs[i + 1] - xs[i]) / (cs[i + 1] - cs[i])
    assert len(zeros) >= 3
    assert np.allclose(np.diff(zeros), math.pi / 2, rtol=0.05)


def test_visibility_ordering(geom, amps):
    window = reference_config()["central_window"]
    vis = [fringe_visibility(screen_pattern(geom, "mixed", fraction=f, amplitudes=amps), window)
           for f in (0, 0.25, 0.5, 0.75, 1)]
    assert vis[0] > 0.99
    assert vis[-1] < 0.05
    assert all(b < a for a, b in zip(vis, vis[1:]))


def test_visibility_window_checks(geom, amps):
    p = screen_pattern(geom, amplitudes=amps)
    with pytest.raises(ValueError):
        fringe_visibility(p, (0.0, 0.015))
    with pytest.raises(ValueError):
        fringe_visibility(p, (-11.0, 0.0))
    with pytest.raises(ValueError):
        fringe_visibility(p, (1.0, 1.0))


def test_one_in_sixty():
    grid = SpatialGrid(0.0, 59.0, 60)
    pattern = ScreenPattern(grid, np.ones(60), "measured")
    expected, p = detection_probability(pattern, (9.5, 10.5), 60)
    assert p == pytest.approx(1 / 60, rel=1e-15)
    assert expected == pytest.approx(1.0, rel=1e-15)


def test_bins_full_and_additive(geom, amps):
    p = screen_pattern(geom, amplitudes=amps)
    assert detection_probability(p, (-10, 10))[1] == pytest.approx(1.0, rel=1e-15)
    left = detection_probability(p, (-10, -0.005))[1]
    right = detection_probability(p, (-0.004, 10))[1]
    assert left + right == pytest.approx(1.0, rel=1e-13)
    a = detection_probability(p, (-3, -1.005))[1]
    b = detection_probability(p, (-1.0, 2))[1]
    assert detection_probability(p, (-3, 2))[1] == pytest.approx(a + b, rel=1e-13)
    with pytest.raises(ValueError):
        detection_probability(p, (0.001, 0.002))
