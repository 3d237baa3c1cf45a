"""Linear constraint systems whose feasible regions are sets of Hamiltonians.

Every row ``r`` is paired with right-hand side 1 and read as ``⟨u, r⟩ ≥ 1``
for the packed coefficient vector ``u``.  Rows are emitted input-index major,
competitor-index minor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, all_states, index_to_state
from .hamiltonian import Hamiltonian, feature_tensor, num_params, unpack, upper_pairs

GLOBAL = "global"
LOCAL_FREE = "local_free"
TREE_EDGE = "tree_edge"


class InvalidTree(ValueError):
    pass


@dataclass(frozen=True)
class EnergyGraph:
    """Directed graph on output indices; edge ``(z, y)`` means ``H(x, z) > H(x, y)``."""

    m: int
    input_level: int
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in self.edges))
        if any(a == b for a, b in self.edges):
            raise InvalidTree("energy graph has a self-loop")

    def state_edges(self):
        return sorted((index_to_state(a, self.m), index_to_state(b, self.m)) for a, b in self.edges)

    def out_degree(self) -> dict[int, int]:
        deg = {v: 0 for v in range(1 << self.m)}
        for a, _ in self.edges:
            deg[a] += 1
        return deg

    def fingerprint(self) -> tuple:
        return (self.input_level, tuple(sorted(self.edges)))

    def spanning_tree_problem(self, root: int) -> str | None:
        """Why this is not a spanning tree of the hypercube rooted at ``root``
        (``None`` when it is one)."""
        size = 1 << self.m
        if len(self.edges) != size - 1:
            return f"expected {size - 1} edges, found {len(self.edges)}"
        parent = {}
        for a, b in self.edges:
            d = a ^ b
            if d == 0 or d & (d - 1):
                return f"edge {a}->{b} does not join Hamming neighbours"
            if a in parent:
                return f"node {a} has out-degree > 1"
            parent[a] = b
        if root in parent:
            return "root has an outgoing edge"
        for v in range(size):
            seen = set()
            while v != root:
                if v in seen:
                    return "graph has a cycle"
                seen.add(v)
                if v not in parent:
                    return f"node {v} has no outgoing edge"
                v = parent[v]
        return None

    def is_spanning_tree(self, root: int) -> bool:
        return self.spanning_tree_problem(root) is None

    def to_text(self) -> str:
        lines = [f"# energy graph m={self.m} input={self.input_level} ({len(self.edges)} edges)"]
        lines += [f"{a} {b}" for a, b in sorted(self.edges)]
        return "\n".join(lines) + "\n"


@dataclass
class ConstraintSystem:
    n: int
    m: int
    rows: np.ndarray
    rhs: np.ndarray
    tags: list = field(default_factory=list)   # (input index, competitor index, partner index, kind)

    def __len__(self):
        return self.rows.shape[0]

    def scaled(self, margin: float) -> "ConstraintSystem":
        return ConstraintSystem(self.n, self.m, self.rows, self.rhs * margin, list(self.tags))

    def slacks(self, u) -> np.ndarray:
        return self.rows @ np.asarray(u, dtype=float) - self.rhs

    def satisfied_by(self, u, tol: float = 0.0) -> bool:
        return bool(np.all(self.slacks(u) >= -tol))

    def to_text(self) -> str:
        lines = [f"# constraints n={self.n} m={self.m} rows={len(self)} (row . u >= rhs)"]
        for row, r, tag in zip(self.rows, self.rhs, self.tags):
            vals = " ".join(f"{v:g}" for v in row)
            x, y, z, kind = tag
            lines.append(f"{vals} >= {r:g}  # {kind} x={x} y={y} vs={z}")
        return "\n".join(lines) + "\n"


def _competitor_rows(c: Circuit):
    F = feature_tensor(c.n, c.m)
    f = c.output_indices
    nx, ny = F.shape[0], F.shape[1]
    xs, ys = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    mask = ys != f[:, None]
    xs, ys = xs[mask], ys[mask]
    rows = F[xs, ys] - F[xs, f[xs]]
    return xs, ys, f[xs], rows


def global_min_rows(c: Circuit) -> ConstraintSystem:
    """``⟨u, v(x,y) - v(x,f(x))⟩ ≥ 1`` for every input ``x`` and ``y ≠ f(x)``."""
    xs, ys, fs, rows = _competitor_rows(c)
    tags = [(int(x), int(y), int(z), GLOBAL) for x, y, z in zip(xs, ys, fs)]
    return ConstraintSystem(c.n, c.m, rows, np.ones(rows.shape[0]), tags)


def local_min_free_rows(c: Circuit) -> ConstraintSystem:
    """Global rows plus ``⟨J, (f(x)-y)⊗(f(x)-y)⟩_F`` moved to the left.

    Feasible ``u`` give Hamiltonians whose only local minimum on every input
    level is ``f(x)``.
    """
    xs, ys, fs, rows = _competitor_rows(c)
    rows = rows.copy()
    S = all_states(c.m).astype(float)
    diff = S[fs] - S[ys]
    off = c.m + c.n * c.m
    for t, (i, j) in enumerate(upper_pairs(c.m)):
        rows[:, off + t] += diff[:, i] * diff[:, j]
    tags = [(int(x), int(y), int(z), LOCAL_FREE) for x, y, z in zip(xs, ys, fs)]
    return ConstraintSystem(c.n, c.m, rows, np.ones(rows.shape[0]), tags)


def tree_rows(c: Circuit, trees: dict[int, EnergyGraph]) -> ConstraintSystem:
    """One row ``⟨u, v(x,y) - v(x,z)⟩ ≥ 1`` per tree edge ``(y, z)``."""
    F = feature_tensor(c.n, c.m)
    f = c.output_indices
    rows, tags = [], []
    for x in range(1 << c.n):
        tree = trees[x]
        problem = tree.spanning_tree_problem(int(f[x]))
        if problem:
            raise InvalidTree(f"input {x}: {problem}")
        for y, z in sorted(tree.edges):
            rows.append(F[x, y] - F[x, z])
            tags.append((x, y, z, TREE_EDGE))
    rows = np.array(rows, dtype=float).reshape(-1, num_params(c.n, c.m))
    return ConstraintSystem(c.n, c.m, rows, np.ones(rows.shape[0]), tags)


def decode(u, n: int, m: int) -> Hamiltonian:
    return unpack(u, n, m)
