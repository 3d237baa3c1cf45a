"""Exhaustive ground truth over output states at fixed input.

Everything here scans all ``2**m`` outputs, so it is independent of the LP
machinery and is what certifies synthesis results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .circuit import BudgetExceeded, Circuit, SpinState, all_states, index_to_state, state_to_index
from .constraints import EnergyGraph
from .hamiltonian import Hamiltonian, level_energies

TOL = 1e-9
MAX_SCAN_OUTPUTS = int(os.environ.get("ISING_SCAN_CAP", 24))


class SpuriousLocalMinimum(RuntimeError):
    def __init__(self, state: SpinState, input_state: SpinState):
        super().__init__(f"spurious local minimum {state} at input {input_state}")
        self.state = state
        self.input_state = input_state


def _check(H: Hamiltonian, x) -> None:
    if H.m > MAX_SCAN_OUTPUTS:
        raise BudgetExceeded(f"exhaustive scan over 2^{H.m} outputs exceeds cap 2^{MAX_SCAN_OUTPUTS}")
    if len(x) != H.n:
        raise ValueError(f"input has dimension {len(x)}, expected {H.n}")


@dataclass(frozen=True)
class GroundStateReport:
    minimizers: dict       # input state -> frozenset of output states
    min_energy: dict       # input state -> float

    def degenerate(self, x) -> bool:
        return len(self.minimizers[tuple(x)]) > 1

    @property
    def any_degenerate(self) -> bool:
        return any(len(v) > 1 for v in self.minimizers.values())


def ground_states(H: Hamiltonian, x, tol: float = TOL) -> set[SpinState]:
    _check(H, x)
    E = level_energies(H, x)
    lo = E.min()
    return {index_to_state(int(k), H.m) for k in np.flatnonzero(E <= lo + tol)}


def ground_state_report(H: Hamiltonian, tol: float = TOL) -> GroundStateReport:
    mins, energies = {}, {}
    for k in range(1 << H.n):
        x = index_to_state(k, H.n)
        mins[x] = frozenset(ground_states(H, x, tol))
        energies[x] = float(level_energies(H, x).min())
    return GroundStateReport(mins, energies)


def encoding_margin(H: Hamiltonian, c: Circuit) -> float:
    """``min_x min_{y≠f(x)} H(x,y) - H(x,f(x))``; positive iff ``H`` encodes ``c``."""
    if (H.n, H.m) != (c.n, c.m):
        raise ValueError("Hamiltonian and circuit shapes differ")
    worst = np.inf
    f = c.output_indices
    for k in range(1 << c.n):
        E = level_energies(H, index_to_state(k, c.n))
        target = E[f[k]]
        E = np.delete(E, f[k])
        if E.size:
            worst = min(worst, float(E.min() - target))
    return worst


def encodes(H: Hamiltonian, c: Circuit, tol: float = TOL) -> bool:
    """True iff ``f(x)`` is the unique ground state on every level, by more than ``tol``."""
    _check(H, (0,) * H.n)
    return encoding_margin(H, c) > tol


def _local_minima_from_energies(E: np.ndarray, m: int) -> list[int]:
    out = []
    for y in range(1 << m):
        if all(E[y ^ (1 << i)] >= E[y] for i in range(m)):
            out.append(y)
    return out


def local_minima(H: Hamiltonian, x) -> set[SpinState]:
    """Outputs no worse than every Hamming-distance-1 neighbour (non-strict)."""
    _check(H, x)
    E = level_energies(H, x)
    return {index_to_state(y, H.m) for y in _local_minima_from_energies(E, H.m)}


def local_minima_via_lemma(J, a, y) -> bool:
    """Closed-form test ``a_i y_i + 2 Σ_j J̃_ij y_i y_j ≤ 0`` for all ``i``,
    with ``J̃ = (J + Jᵀ)/2``."""
    J = np.asarray(J, dtype=float)
    Jt = (J + J.T) / 2
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    return bool(np.all(a * y + 2 * y * (Jt @ y) <= 0))


def residual_energies(J, a) -> np.ndarray:
    """``E_J(a, y)`` for every output index ``y``."""
    J = np.triu(np.asarray(J, dtype=float), 1)
    a = np.asarray(a, dtype=float)
    Y = all_states(a.shape[0]).astype(float)
    return Y @ a + np.einsum("ki,ij,kj->k", Y, J, Y)


def residual_local_minima(J, a) -> set[SpinState]:
    m = len(a)
    return {index_to_state(y, m) for y in _local_minima_from_energies(residual_energies(J, a), m)}


def energy_graph(H: Hamiltonian, x, tol: float = TOL) -> EnergyGraph:
    """Edge ``(z, y)`` for every pair with ``H(x, z) > H(x, y) + tol``."""
    _check(H, x)
    E = level_energies(H, x)
    size = 1 << H.m
    edges = [(z, y) for z in range(size) for y in range(size) if E[z] - E[y] > tol]
    return EnergyGraph(H.m, state_to_index(x), frozenset(edges))


def extract_tree(H: Hamiltonian, c: Circuit, x) -> EnergyGraph:
    """Steepest-drop arborescence rooted at ``f(x)``.

    Each ``y ≠ f(x)`` points to its lowest-energy Hamming neighbour (ties to
    the lowest index).  Raises :class:`SpuriousLocalMinimum` if some
    ``y ≠ f(x)`` has no strictly lower neighbour.
    """
    _check(H, x)
    E = level_energies(H, x)
    k = state_to_index(x)
    root = int(c.output_indices[k])
    edges = []
    for y in range(1 << H.m):
        if y == root:
            continue
        nbrs = [y ^ (1 << i) for i in range(H.m)]
        best = min(nbrs, key=lambda z: (E[z], z))
        if not E[best] < E[y]:
            raise SpuriousLocalMinimum(index_to_state(y, H.m), tuple(x))
        edges.append((y, best))
    tree = EnergyGraph(H.m, k, frozenset(edges))
    problem = tree.spanning_tree_problem(root)
    if problem:
        # unreachable when every edge strictly lowers the energy
        raise RuntimeError(f"extracted graph is not a spanning tree: {problem}")
    return tree


def unique_local_minimum_everywhere(H: Hamiltonian, c: Circuit) -> bool:
    """True iff ``f(x)`` is the only local minimum on every input level."""
    for k in range(1 << c.n):
        x = index_to_state(k, c.n)
        if local_minima(H, x) != {c.output(k)}:
            return False
    return True
