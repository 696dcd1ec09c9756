import numpy as np
import pytest

from pathlattice.lattice import PhysicalConstants, build_grid
from pathlattice.potentials import (Free, Harmonic, MaskedFree, Tabulated, potential_from_dict)


def test_free_and_harmonic_values():
    assert Free()(3.0) == 0.0
    assert Harmonic(2.0)(1.5, 0.0, PhysicalConstants(mass=3.0)) == pytest.approx(13.5)
    assert np.allclose(Harmonic(1.0).gradient(np.array([1.0, -2.0])), [1.0, -2.0])


def test_tabulated_interpolates_linearly():
    g = build_grid(0, 2, 3)
    pot = Tabulated(g, [0.0, 1.0, 4.0])
    assert pot(1.5) == pytest.approx(2.5)
    assert np.allclose(pot(np.array([0.0, 0.5, 2.0])), [0.0, 0.5, 4.0])
    with pytest.raises(ValueError):
        Tabulated(g, [0.0, 1.0])


def test_mask_blocks_outside_apertures():
    pot = MaskedFree(((-1, -0.5), (0.5, 1)))
    x = np.array([-0.75, 0.0, 0.75, 2.0])
    assert pot.transmits(x).tolist() == [True, False, True, False]
    assert np.isinf(pot(x)).tolist() == [False, True, False, True]
    with pytest.raises(ValueError):
        MaskedFree(((1, 0),))


@pytest.mark.parametrize("pot", [Free(), Harmonic(0.7), MaskedFree(((0, 1),)),
                                 Tabulated(build_grid(0, 1, 4), [1, 2, 3, 4])])
def test_dict_round_trip(pot):
    back = potential_from_dict(pot.to_dict())
    x = np.linspace(0.1, 0.9, 5)
    assert back.kind == pot.kind
    assert np.array_equal(back(x), pot(x))
