import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingcircuits.circuit import COPY, XOR_AND, all_states, index_to_state
from isingcircuits.hamiltonian import (
    Hamiltonian, HamiltonianError, HamiltonianFormatError, degeneracy_report, energy_table,
    evaluate, evaluate_direct, feature_vector, format_hamiltonian, frobenius, make_generic,
    num_params, packed_dot, parse_hamiltonian, read_hamiltonian, to_boolean_polynomial, unpack,
    write_hamiltonian,
)
from isingcircuits.oracle import encodes


def xa_example():
    return Hamiltonian.from_affine([[-0.3, -0.5], [-1, -1]], [0.5, 1], [[0, 1], [0, 0]])


def random_h(rng, n, m, scale=1.0):
    return unpack(rng.normal(scale=scale, size=num_params(n, m)), n, m)


shapes = st.tuples(st.integers(0, 4), st.integers(1, 4))


def test_num_params():
    assert num_params(2, 2) == 2 + 4 + 1
    assert num_params(3, 3) == 3 + 9 + 3


def test_xa_example_energies():
    H = xa_example()
    assert np.allclose(H.A((1, 1)), [-0.3, -1])
    assert np.allclose(H.A((-1, -1)), [1.3, 3])
    assert math.isclose(evaluate(H, (1, 1), (1, 1)), -0.3)
    assert math.isclose(evaluate(H, (1, 1), (-1, 1)), -1.7)


def test_zero_hamiltonian():
    H = Hamiltonian.zero(2, 3)
    assert np.all(energy_table(H) == 0)


def test_feature_vector_examples():
    assert feature_vector((1,), (-1,)).tolist() == [-1, -1]
    assert feature_vector((), (1, -1)).tolist() == [1, -1, -1]


def test_j_must_be_strict_upper():
    with pytest.raises(HamiltonianError):
        Hamiltonian(0, 2, [0, 0], np.zeros((0, 2)), [[1, 0], [0, 0]])
    with pytest.raises(HamiltonianError):
        Hamiltonian(0, 2, [0, 0], np.zeros((0, 2)), [[0, 0], [1, 0]])
    with pytest.raises(HamiltonianError):
        Hamiltonian(0, 1, [np.nan], np.zeros((0, 1)), [[0]])


def test_from_full_drops_input_terms():
    with pytest.warns(UserWarning):
        H = Hamiltonian.from_full(1, 1, [0.5, 0.25], [[0, -1], [0, 0]])
    assert H.h.tolist() == [0.25]
    assert H.W.tolist() == [[-1.0]]


@settings(max_examples=200, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_linearity_exact(shape, seed):
    n, m = shape
    rng = np.random.default_rng(seed)
    H = random_h(rng, n, m)
    x = index_to_state(int(rng.integers(1 << n)), n)
    y = index_to_state(int(rng.integers(1 << m)), m)
    assert evaluate(H, x, y) == packed_dot(H.pack(), feature_vector(x, y))
    assert math.isclose(evaluate(H, x, y), evaluate_direct(H, x, y), rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_pack_unpack_roundtrip(shape, seed):
    n, m = shape
    H = random_h(np.random.default_rng(seed), n, m)
    assert unpack(H.pack(), n, m) == H


def test_energy_table_matches_evaluate():
    H = random_h(np.random.default_rng(1), 2, 3)
    E = energy_table(H)
    for a in range(4):
        for b in range(8):
            assert math.isclose(E[a, b], evaluate(H, index_to_state(a, 2), index_to_state(b, 3)), abs_tol=1e-12)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_quadratic_part_spin_flip_symmetric(m, seed):
    rng = np.random.default_rng(seed)
    J = np.triu(rng.normal(size=(m, m)), 1)
    for y in all_states(m):
        assert frobenius(J, np.outer(y, y)) == frobenius(J, np.outer(-y, -y))


def test_boolean_transform_example():
    H = Hamiltonian(0, 2, [0, 0], np.zeros((0, 2)), [[0, 1], [0, 0]])
    P = to_boolean_polynomial(H)
    assert P.quadratic[0, 1] == 4
    assert P.linear.tolist() == [-2, -2]
    assert P.constant == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_boolean_transform_agrees(n, m, seed):
    H = random_h(np.random.default_rng(seed), n, m)
    P = to_boolean_polynomial(H)
    for a in range(1 << n):
        for b in range(1 << m):
            x, y = index_to_state(a, n), index_to_state(b, m)
            sigma = [(v + 1) // 2 for v in x + y]
            assert math.isclose(P(sigma), evaluate(H, x, y), abs_tol=1e-9)


def test_degeneracy_report_zero_hamiltonian():
    from isingcircuits.circuit import Circuit

    rep = degeneracy_report(Hamiltonian.zero(1, 1), Circuit.from_index(1, 1, 0))
    assert rep.D == 12
    assert rep.solution_gap == 0
    assert not rep.encodes


def test_degeneracy_report_xa_example():
    rep = degeneracy_report(xa_example(), XOR_AND)
    assert rep.solution_gap > 0
    assert rep.D % 2 == 0
    assert rep.min_gap <= rep.solution_gap


def test_make_generic_copy_with_tie():
    # h = 0, W = -1: H(x, y) = -x y, and both wrong states tie at +1
    H = Hamiltonian(1, 1, [0.0], [[-1.0]], [[0.0]])
    assert degeneracy_report(H, COPY).D > 0
    trace = []
    G = make_generic(H, COPY, trace=trace)
    assert degeneracy_report(G, COPY).D == 0
    assert encodes(G, COPY)
    assert all(a >= b for a, b in zip(trace, trace[1:]))


def test_make_generic_leaves_generic_input():
    H = Hamiltonian(1, 1, [0.1], [[-1.0]], [[0.0]])
    assert degeneracy_report(H, COPY).D == 0
    assert make_generic(H, COPY) is H


def test_make_generic_rejects_non_encoding():
    with pytest.raises(HamiltonianError):
        make_generic(Hamiltonian(1, 1, [0.0], [[1.0]], [[0.0]]), COPY)


def test_text_roundtrip(tmp_path):
    H = random_h(np.random.default_rng(3), 3, 3)
    assert parse_hamiltonian(format_hamiltonian(H)) == H
    write_hamiltonian(H, tmp_path / "h.ham")
    assert read_hamiltonian(tmp_path / "h.ham") == H
    assert "np." not in format_hamiltonian(H)


@pytest.mark.parametrize("text", [
    "",
    "hamiltonian 1 1\n",
    "ham 1 2\nj 1 0 1.0\n",
    "ham 1 1\nh 3 1.0\n",
    "ham 1 1\nq 0 1.0\n",
    "ham 1 1\nh 0 abc\n",
])
def test_text_format_errors(text):
    with pytest.raises(HamiltonianFormatError):
        parse_hamiltonian(text)
