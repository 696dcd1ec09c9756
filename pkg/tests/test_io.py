import json

import numpy as np
import pytest

from pathlattice import io
from pathlattice.action import classical_path
from pathlattice.doubleslit import ScreenPattern
from pathlattice.kernel import build_propagator
from pathlattice.lattice import PhysicalConstants, TimeSlicing, WaveFunction, build_grid
from pathlattice.potentials import Harmonic


@pytest.fixture
def psi():
    g = build_grid(-1.3, 2.9, 17)
    rng = np.random.default_rng(7)
    return WaveFunction(g, rng.normal(size=17) + 1j * rng.normal(size=17))


def test_wavefunction_csv_round_trip(tmp_path, psi):
    path = tmp_path / "psi.csv"
    io.write_wavefunction_csv(path, psi)
    back = io.read_wavefunction_csv(path)
    assert np.array_equal(back.values, psi.values)
    assert np.array_equal(back.x, psi.x)
    raw = path.read_bytes()
    assert raw.startswith(b"x,re,im\n") and b"\r" not in raw


def test_wavefunction_json_round_trip(psi):
    d = json.loads(json.dumps(io.wavefunction_to_json(psi)))
    back = io.wavefunction_from_json(d)
    assert back.grid == psi.grid
    assert np.array_equal(back.values, psi.values)


def test_path_csv_round_trip(tmp_path):
    p = classical_path(Harmonic(1.0), 1.0, 0.2, TimeSlicing(0.0, 1.0, 33))
    io.write_path_csv(tmp_path / "p.csv", p)
    back = io.read_path_csv(tmp_path / "p.csv")
    assert np.array_equal(back.positions, p.positions)
    assert back.slicing.n_slices == 33


def test_pattern_round_trip(tmp_path):
    g = build_grid(-2, 2, 9)
    pat = ScreenPattern(g, np.linspace(0, 1, 9) ** 2, "coherent")
    io.write_pattern_csv(tmp_path / "pat.csv", pat)
    assert np.array_equal(io.read_pattern_csv(tmp_path / "pat.csv").P, pat.P)
    assert io.pattern_to_json(pat)["mode"] == "coherent"


def test_trajectory_formats(tmp_path, psi):
    states = [psi, 2 * psi]
    io.write_trajectory_csv(tmp_path / "t.csv", [0.0, 0.5], states)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,x,re,im" and len(lines) == 1 + 2 * 17
    d = io.trajectory_to_json([0.0, 0.5], states)
    assert d["times"] == [0.0, 0.5]
    assert np.array_equal(np.array(d["re"][1]) + 1j * np.array(d["im"][1]), 2 * psi.values)


def test_columns_checked(tmp_path):
    (tmp_path / "bad.csv").write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="columns"):
        io.read_wavefunction_csv(tmp_path / "bad.csv")


@pytest.fixture
def K():
    return build_propagator(build_grid(-1, 1, 21), 0.25, 0.01, Harmonic(1.0))


def test_propagator_json_round_trip(K):
    c = PhysicalConstants(hbar=1.0, mass=1.0)
    back, c2 = io.propagator_from_json(json.loads(json.dumps(io.propagator_to_json(K, c))))
    assert np.array_equal(back.entries, K.entries)
    assert (back.t_from, back.t_to) == (K.t_from, K.t_to)
    assert back.grid == K.grid and c2 == c


def test_propagator_binary_round_trip(tmp_path, K):
    path = tmp_path / "K.bin"
    c = PhysicalConstants(hbar=2.0, mass=0.5)
    io.write_propagator_binary(path, K, c)
    back, c2 = io.read_propagator_binary(path)
    assert np.array_equal(back.entries, K.entries)
    assert c2 == c
    raw = path.read_bytes()
    assert raw.startswith(io.MAGIC)
    header_end = raw.index(b"\n", len(io.MAGIC)) + 1
    assert len(raw) - header_end == 21 * 21 * 16


def test_binary_errors(tmp_path, K):
    (tmp_path / "junk.bin").write_bytes(b"hello\n")
    with pytest.raises(ValueError, match="not a propagator"):
        io.read_propagator_binary(tmp_path / "junk.bin")
    io.write_propagator_binary(tmp_path / "K.bin", K)
    cut = (tmp_path / "K.bin").read_bytes()[:-16]
    (tmp_path / "cut.bin").write_bytes(cut)
    with pytest.raises(ValueError, match="expected"):
        io.read_propagator_binary(tmp_path / "cut.bin")


def test_table_csv(tmp_path):
    io.write_table_csv(tmp_path / "t.csv", ("name", "value"), [("a", 0.1), ("b", 2)])
    assert (tmp_path / "t.csv").read_text().splitlines() == [
        "name,value", "a,0.10000000000000001", "b,2"]
