"""Residual Hamiltonian ``E_J(a, y) = a·y + yᵀJy`` and its minimizing partition of a-space.

For fixed ``J`` the cell of an output ``y`` is the set of ``a`` where ``y``
is the unique minimiser; it is cut out by the ``2^m - 1`` open half-spaces
``⟨a, z - y⟩ + ⟨J, z⊗z - y⊗y⟩_F > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, SpinState, all_states, index_to_state, state_to_index
from .hamiltonian import Hamiltonian
from .oracle import TOL, encodes

BOUNDARY = -1

# colour scheme for the m = 2 partition, keyed by output index
PARTITION_COLORS = {
    0: (255, 127, 14),    # (-1,-1) orange
    1: (148, 103, 189),   # (1,-1) purple
    3: (31, 119, 180),    # (1,1) blue
    2: (44, 160, 44),     # (-1,1) green
    BOUNDARY: (0, 0, 0),
}


@dataclass(frozen=True)
class HalfSpace:
    """Open half-space ``{a : normal·a + offset > 0}``."""

    normal: np.ndarray
    offset: float

    def value(self, a) -> float:
        return float(np.dot(self.normal, a) + self.offset)

    def contains(self, a, tol: float = 0.0) -> bool:
        return self.value(a) > tol


class ResidualPartition:
    def __init__(self, J):
        J = np.asarray(J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ValueError("J must be square")
        if np.any(np.tril(J) != 0):
            raise ValueError("J must be strictly upper triangular")
        self.J = J
        self.m = J.shape[0]
        self._Y = all_states(self.m).astype(float)
        self._quad = np.einsum("ki,ij,kj->k", self._Y, J, self._Y)

    @classmethod
    def for_m2(cls, J12: float) -> "ResidualPartition":
        return cls(np.array([[0.0, J12], [0.0, 0.0]]))

    def energy(self, a, y) -> float:
        a = np.asarray(a, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(a @ y + y @ self.J @ y)

    def energies(self, a) -> np.ndarray:
        """``E_J(a, y)`` for all outputs; ``a`` may be a batch ``(..., m)``."""
        return np.asarray(a, dtype=float) @ self._Y.T + self._quad

    def ground_state_map(self, a, tol: float = TOL) -> set[SpinState]:
        E = self.energies(a)
        return {index_to_state(int(k), self.m) for k in np.flatnonzero(E <= E.min() + tol)}

    def on_boundary(self, a, tol: float = TOL) -> bool:
        return len(self.ground_state_map(a, tol)) > 1

    def cell_halfspaces(self, y) -> list[HalfSpace]:
        ky = state_to_index(y)
        yv = self._Y[ky]
        out = []
        for kz in range(1 << self.m):
            if kz == ky:
                continue
            out.append(HalfSpace(self._Y[kz] - yv, float(self._quad[kz] - self._quad[ky])))
        return out

    def in_cell(self, a, y, tol: float = 0.0) -> bool:
        return all(hs.contains(a, tol) for hs in self.cell_halfspaces(y))

    def cell_union_membership(self, a, outputs_fixed, tol: float = TOL) -> bool:
        """True iff ``a`` has a unique ground state whose leading bits are ``outputs_fixed``."""
        outputs_fixed = tuple(outputs_fixed)
        if len(outputs_fixed) > self.m:
            raise ValueError("more fixed outputs than output spins")
        gs = self.ground_state_map(a, tol)
        return len(gs) == 1 and next(iter(gs))[: len(outputs_fixed)] == outputs_fixed

    def rasterize(self, radius: float = 3.0, resolution: int = 200, tol: float = TOL) -> np.ndarray:
        """``N × N`` grid of output indices (``-1`` on the boundary set).

        Pixel ``[r, c]`` sits at ``a1 = -R + (c + ½)·2R/N`` and
        ``a2 = R - (r + ½)·2R/N`` (row 0 at the top).  A pixel is boundary when
        its two lowest energies differ by less than ``tol·(1 + |E_min|)``.
        """
        if self.m != 2:
            raise ValueError("rasterize needs m == 2")
        coords = grid_coordinates(radius, resolution)
        a1, a2 = np.meshgrid(coords, coords[::-1])
        E = self.energies(np.stack([a1, a2], axis=-1))
        order = np.sort(E, axis=-1)
        labels = np.argmin(E, axis=-1)
        degenerate = order[..., 1] - order[..., 0] < tol * (1 + np.abs(order[..., 0]))
        labels = np.where(degenerate, BOUNDARY, labels)
        return labels.astype(np.int64)


def grid_coordinates(radius: float, resolution: int) -> np.ndarray:
    step = 2 * radius / resolution
    return -radius + (np.arange(resolution) + 0.5) * step


def check_affine_solution(c: Circuit, linear, offset, J, tol: float = 0.0) -> bool:
    """True iff every input's image ``A(x) = linear @ x + offset`` lies strictly
    inside the cell of ``f(x)``."""
    P = ResidualPartition(np.triu(np.asarray(J, dtype=float), 1))
    linear = np.asarray(linear, dtype=float).reshape(c.m, c.n)
    offset = np.asarray(offset, dtype=float).reshape(c.m)
    X = all_states(c.n).astype(float)
    for k in range(1 << c.n):
        a = linear @ X[k] + offset
        if not P.in_cell(a, c.output(k), tol):
            return False
    return True


def check_affine_solution_via_oracle(c: Circuit, linear, offset, J, tol: float = TOL) -> bool:
    H = Hamiltonian.from_affine(linear, offset, np.asarray(J, dtype=float))
    return encodes(H, c, tol)


# ---------------------------------------------------------------- raster files

def write_ppm(labels: np.ndarray, path, colors: dict | None = None) -> None:
    """Plain-text P3 pixmap of a label grid."""
    colors = PARTITION_COLORS if colors is None else colors
    h, w = labels.shape
    lines = ["P3", f"{w} {h}", "255"]
    for row in labels:
        lines.append(" ".join("%d %d %d" % colors[int(v)] for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_legend(m: int, path, colors: dict | None = None) -> None:
    colors = PARTITION_COLORS if colors is None else colors
    lines = ["# index state r g b"]
    for k in range(1 << m):
        state = ",".join("%+d" % s for s in index_to_state(k, m))
        r, g, b = colors[k]
        lines.append(f"{k} ({state}) {r} {g} {b}")
    r, g, b = colors[BOUNDARY]
    lines.append(f"{BOUNDARY} boundary {r} {g} {b}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def touching_pairs(labels: np.ndarray, rows=None, cols=None) -> set[tuple[int, int]]:
    """Pairs of distinct cell labels that occur together in some 3 × 3 pixel
    window, optionally restricted to windows centred in ``rows × cols``.

    Two cells that share a boundary segment show up as a touching pair; the
    boundary label itself is ignored.
    """
    h, w = labels.shape
    rows = range(1, h - 1) if rows is None else rows
    cols = range(1, w - 1) if cols is None else cols
    out = set()
    for r in rows:
        for c in cols:
            window = set(np.unique(labels[max(r - 1, 0) : r + 2, max(c - 1, 0) : c + 2]).tolist())
            window.discard(BOUNDARY)
            out |= {(a, b) for a in window for b in window if a < b}
    return out
