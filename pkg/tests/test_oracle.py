import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingcircuits.circuit import COPY, XOR_AND, Circuit, index_to_state, state_to_index
from isingcircuits.constraints import LOCAL_FREE
from isingcircuits.hamiltonian import Hamiltonian, level_energies
from isingcircuits.oracle import (
    SpuriousLocalMinimum, encodes, encoding_margin, energy_graph, extract_tree, ground_state_report,
    ground_states, local_minima, local_minima_via_lemma, residual_local_minima,
)
from isingcircuits.synth import synthesize


def xa_example():
    return Hamiltonian.from_affine([[-0.3, -0.5], [-1, -1]], [0.5, 1], [[0, 1], [0, 0]])


def test_xa_example_levels():
    H = xa_example()
    assert np.allclose(level_energies(H, (1, 1)), [2.3, -0.3, -1.7, -0.3])
    assert np.allclose(level_energies(H, (-1, -1)), [-3.3, -2.7, 0.7, 5.3])
    assert ground_states(H, (1, 1)) == {(-1, 1)}
    assert ground_states(H, (-1, -1)) == {(-1, -1)}
    assert encodes(H, XOR_AND)


def test_zero_hamiltonian_is_fully_degenerate():
    H = Hamiltonian.zero(1, 2)
    assert len(ground_states(H, (1,))) == 4
    assert not encodes(H, Circuit.from_index(1, 2, 0))
    assert ground_state_report(H).any_degenerate


def test_copy_solution_encodes():
    H = Hamiltonian(1, 1, [0], [[-0.5]], [[0]])
    assert encodes(H, COPY)
    assert encoding_margin(H, COPY) == 1.0


def test_local_minima_examples():
    H = Hamiltonian.from_affine(np.zeros((2, 1)), [2, -3], np.zeros((2, 2)))
    assert local_minima(H, (1,)) == {(-1, 1)}
    J = [[0, 1], [0, 0]]
    assert residual_local_minima(J, [1.3, 3]) == {(-1, -1)}
    assert not local_minima_via_lemma(J, [1.3, 3], (-1, 1))
    assert local_minima_via_lemma(J, [1.3, 3], (-1, -1))


def test_lemma_with_zero_coupling():
    a = np.array([0.5, -1.0, 2.0])
    for k in range(8):
        y = np.array(index_to_state(k, 3))
        assert local_minima_via_lemma(np.zeros((3, 3)), a, y) == bool(np.all(a * y <= 0))


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_lemma_matches_neighbour_scan(m, seed):
    rng = np.random.default_rng(seed)
    J = np.triu(rng.normal(size=(m, m)), 1)
    a = rng.normal(size=m)
    scan = residual_local_minima(J, a)
    for k in range(1 << m):
        y = index_to_state(k, m)
        assert local_minima_via_lemma(J, a, y) == (y in scan)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_ground_state_is_local_minimum(n, m, seed):
    rng = np.random.default_rng(seed)
    H = Hamiltonian(n, m, rng.normal(size=m), rng.normal(size=(n, m)), np.triu(rng.normal(size=(m, m)), 1))
    for k in range(1 << n):
        x = index_to_state(k, n)
        assert ground_states(H, x) <= local_minima(H, x)


def test_energy_graph():
    H = Hamiltonian(0, 1, [1.0], np.zeros((0, 1)), [[0]])
    assert energy_graph(H, ()).edges == {(1, 0)}
    G = energy_graph(xa_example(), (1, 1))
    assert (state_to_index((1, 1)), state_to_index((-1, 1))) in G.edges
    # two outputs tie at -0.3, so 5 of the 6 pairs are strictly ordered
    assert len(G.edges) == 5


def test_extract_tree_xa_example():
    H = xa_example()
    # x=(-1,-1) has a unique local minimum, so a tree exists
    T = extract_tree(H, XOR_AND, (-1, -1))
    assert T.is_spanning_tree(state_to_index((-1, -1)))
    # at x=(1,1), (1,-1) ties with its neighbour (1,1): a plateau, hence a non-strict local minimum
    assert local_minima(H, (1, 1)) == {(-1, 1), (1, -1)}
    with pytest.raises(SpuriousLocalMinimum) as info:
        extract_tree(H, XOR_AND, (1, 1))
    assert info.value.state == (1, -1)


def test_extract_tree_reports_trap():
    # y1 y2 coupling strongly ferromagnetic with opposite biases: (1,1) and (-1,-1) both minima
    H = Hamiltonian(0, 2, [0.1, 0.1], np.zeros((0, 2)), [[0, -5], [0, 0]])
    c = Circuit(0, 2, np.array([[-1, -1]]))
    with pytest.raises(SpuriousLocalMinimum) as info:
        extract_tree(H, c, ())
    assert info.value.state == (1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 255))
def test_extract_tree_on_local_free_solutions(idx):
    c = Circuit.from_index(2, 2, idx)
    res = synthesize(c, LOCAL_FREE)
    if res.feasible:
        f = c.output_indices
        for k in range(4):
            T = extract_tree(res.hamiltonian, c, index_to_state(k, 2))
            assert T.is_spanning_tree(int(f[k]))
            E = level_energies(res.hamiltonian, index_to_state(k, 2))
            assert all(E[a] > E[b] for a, b in T.edges)
