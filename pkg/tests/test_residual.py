import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingcircuits.circuit import AND, XOR, XOR_AND, Circuit, all_states, index_to_state, state_to_index
from isingcircuits.oracle import residual_local_minima
from isingcircuits.residual import (
    BOUNDARY, ResidualPartition, check_affine_solution, check_affine_solution_via_oracle,
    touching_pairs, write_legend, write_ppm,
)
from isingcircuits.synth import auxiliary_search

FIG2_LINEAR = [[-0.3, -0.5], [-1, -1]]
FIG2_OFFSET = [0.5, 1]
J1 = [[0, 1], [0, 0]]


def test_ground_state_map_examples():
    P = ResidualPartition.for_m2(1.0)
    assert P.ground_state_map([0, 0]) == {(1, -1), (-1, 1)}
    assert P.on_boundary([0, 0])
    assert P.ground_state_map([1.3, 3]) == {(-1, -1)}
    assert np.allclose(P.energies([1.3, 3]), [-3.3, -2.7, 0.7, 5.3])


def test_zero_coupling_is_sign_rule():
    P = ResidualPartition(np.zeros((3, 3)))
    a = np.array([0.4, -2.0, 1.0])
    assert P.ground_state_map(a) == {tuple(int(v) for v in -np.sign(a))}


def test_m1_halfspace():
    P = ResidualPartition(np.zeros((1, 1)))
    (hs,) = P.cell_halfspaces((-1,))
    assert hs.normal.tolist() == [2.0] and hs.offset == 0.0
    assert P.in_cell([0.5], (-1,)) and not P.in_cell([-0.5], (-1,))


def test_purple_cell_halfspaces():
    P = ResidualPartition.for_m2(1.0)
    hs = P.cell_halfspaces((1, -1))
    assert len(hs) == 3
    normals = sorted(tuple(h.normal) for h in hs)
    assert normals == [(-2.0, 0.0), (-2.0, 2.0), (0.0, 2.0)]


def test_rejects_bad_coupling():
    with pytest.raises(ValueError):
        ResidualPartition(np.ones((2, 2)))
    with pytest.raises(ValueError):
        ResidualPartition(np.zeros((3, 3))).rasterize()


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_halfspaces_match_argmin(m, seed):
    rng = np.random.default_rng(seed)
    P = ResidualPartition(np.triu(rng.normal(size=(m, m)), 1))
    a = rng.normal(scale=2, size=m)
    gs = P.ground_state_map(a, tol=0.0)
    for k in range(1 << m):
        y = index_to_state(k, m)
        assert P.in_cell(a, y) == (gs == {y})


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_energy_difference_is_affine(m, seed):
    rng = np.random.default_rng(seed)
    P = ResidualPartition(np.triu(rng.normal(size=(m, m)), 1))
    a, b = rng.normal(size=m), rng.normal(size=m)
    y, z = rng.integers(0, 1 << m, size=2)
    Y = all_states(m).astype(float)
    d = lambda v: P.energies(v)[z] - P.energies(v)[y]
    assert np.isclose(d(a) - d(b), (Y[z] - Y[y]) @ (a - b))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_no_local_minima_region(m, seed):
    # if E(a,z) - E(a,y) < E(0, z - y) for every y != z, then z is the only local minimum
    rng = np.random.default_rng(seed)
    J = np.triu(rng.normal(size=(m, m)), 1)
    P = ResidualPartition(J)
    Y = all_states(m).astype(float)
    for _ in range(50):
        a = rng.normal(scale=3, size=m)
        E = P.energies(a)
        z = int(np.argmin(E))
        ok = all(E[z] - E[y] < (Y[z] - Y[y]) @ J @ (Y[z] - Y[y]) for y in range(1 << m) if y != z)
        if ok:
            assert residual_local_minima(J, a) == {index_to_state(z, m)}


def test_xa_example_affine_solution():
    assert check_affine_solution(XOR_AND, FIG2_LINEAR, FIG2_OFFSET, J1)
    assert check_affine_solution_via_oracle(XOR_AND, FIG2_LINEAR, FIG2_OFFSET, J1)


def test_zero_map_fails():
    c = Circuit.from_index(2, 2, 9)
    assert not check_affine_solution(c, np.zeros((2, 2)), np.zeros(2), np.zeros((2, 2)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_affine_check_agrees_with_oracle(n, m, seed):
    rng = np.random.default_rng(seed)
    c = Circuit.from_output_indices(n, m, rng.integers(0, 1 << m, size=1 << n))
    linear = rng.normal(size=(m, n))
    offset = rng.normal(size=m)
    J = np.triu(rng.normal(size=(m, m)), 1)
    assert check_affine_solution(c, linear, offset, J) == check_affine_solution_via_oracle(c, linear, offset, J, tol=0.0)


def test_cell_union_membership_xor_auxiliary():
    g, res = auxiliary_search(XOR, 1)
    H = res.hamiltonian
    P = ResidualPartition(H.J)
    for k in range(4):
        x = index_to_state(k, 2)
        assert P.cell_union_membership(H.A(x), XOR.output(k))
        assert not P.cell_union_membership(H.A(x), (-XOR.output(k)[0],))
    with pytest.raises(ValueError):
        P.cell_union_membership([0, 0], (1, 1, 1))


def test_raster_cell_adjacency():
    for J12, pair in ((1.0, (1, 2)), (-1.0, (0, 3))):
        L = ResidualPartition.for_m2(J12).rasterize(3.0, 120)
        assert set(np.unique(L)) - {BOUNDARY} == {0, 1, 2, 3}
        centre = range(57, 63)
        assert touching_pairs(L, centre, centre) == {pair}
    L0 = ResidualPartition.for_m2(0.0).rasterize(3.0, 120)
    assert len(touching_pairs(L0, range(59, 61), range(59, 61))) == 6


def test_raster_labels_agree_with_halfspaces():
    P = ResidualPartition.for_m2(0.7)
    N, R = 40, 2.5
    L = P.rasterize(R, N)
    coords = -R + (np.arange(N) + 0.5) * 2 * R / N
    for r in range(N):
        for c in range(N):
            if L[r, c] != BOUNDARY:
                a = (coords[c], coords[::-1][r])
                assert P.in_cell(a, index_to_state(int(L[r, c]), 2))


def test_ppm_and_legend_deterministic(tmp_path):
    L = ResidualPartition.for_m2(1.0).rasterize(3.0, 16)
    write_ppm(L, tmp_path / "a.ppm")
    write_ppm(L, tmp_path / "b.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()
    head = (tmp_path / "a.ppm").read_text().splitlines()[:3]
    assert head == ["P3", "16 16", "255"]
    write_legend(2, tmp_path / "legend.txt")
    lines = (tmp_path / "legend.txt").read_text().splitlines()
    assert lines[1].startswith("0 (-1,-1)") and lines[-1].startswith("-1 boundary")
