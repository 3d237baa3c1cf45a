"""Voronoi solutions and the Hamiltonians they induce.

An embedding ``B(y) = T y + b`` (``T`` is ``n × m``) sends output states to
sites in input space.  ``B`` solves a circuit when every input ``x`` is
strictly closer to ``B f(x)`` than to ``B y`` for every other output ``y``.
For injective solutions, ``H(x, y) = -Tᵀ(x - b)·y + yᵀ J_T y`` with
``J_T = triu(TᵀT, 1)`` encodes the circuit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, all_states
from .hamiltonian import Hamiltonian


class VoronoiError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AffineEmbedding:
    T: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.T, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if T.shape[0] != b.shape[0]:
            raise VoronoiError(f"T has {T.shape[0]} rows but b has length {b.shape[0]}")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def m(self) -> int:
        return self.T.shape[1]

    def __call__(self, y) -> np.ndarray:
        return self.T @ np.asarray(y, dtype=float) + self.b

    def sites(self) -> np.ndarray:
        """Images of all outputs, row ``k`` = ``B(index_to_state(k))``."""
        return all_states(self.m).astype(float) @ self.T.T + self.b

    def pseudo_adjoint(self, x) -> np.ndarray:
        return self.T.T @ (np.asarray(x, dtype=float) - self.b)

    @property
    def J_T(self) -> np.ndarray:
        return np.triu(self.T.T @ self.T, 1)

    def collisions(self) -> list[tuple[int, int]]:
        S = self.sites()
        return [(i, j) for i in range(len(S)) for j in range(i + 1, len(S)) if np.array_equal(S[i], S[j])]

    def is_injective(self) -> bool:
        return not self.collisions()


def voronoi_cell_membership(sites, p, x) -> bool:
    """Is ``x`` strictly closer to site ``p`` than to every other site?

    Uses the half-space form ``⟨p - q, x⟩ + ½(‖q‖² - ‖p‖²) > 0``.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    match = np.all(sites == p, axis=1)
    if not match.any():
        raise VoronoiError("p is not one of the sites")
    for q in sites[~match]:
        if not np.dot(p - q, x) + 0.5 * (q @ q - p @ p) > 0:
            return False
    return True


def voronoi_cell_membership_by_distance(sites, p, x) -> bool:
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(x - p)
    others = sites[~np.all(sites == p, axis=1)]
    return bool(np.all(d < np.linalg.norm(others - x, axis=1)))


def _slacks(c: Circuit, B: AffineEmbedding) -> np.ndarray:
    """``‖x - By‖² - ‖x - Bf(x)‖²`` for every input and every ``y ≠ f(x)``."""
    X = all_states(c.n).astype(float)
    S = B.sites()
    d2 = ((X[:, None, :] - S[None, :, :]) ** 2).sum(axis=-1)
    f = c.output_indices
    own = d2[np.arange(len(X)), f]
    other = d2.copy()
    other[np.arange(len(X)), f] = np.inf
    return other - own[:, None]


def voronoi_margin(c: Circuit, B: AffineEmbedding) -> float:
    return float(_slacks(c, B).min())


def is_voronoi_solution(c: Circuit, B: AffineEmbedding) -> bool:
    """Every input strictly nearer to ``B f(x)`` than to ``B y`` for all ``y ≠ f(x)``.

    A site shared by ``f(x)`` and another output ties exactly, so such
    collisions make the embedding fail.
    """
    if (B.n, B.m) != (c.n, c.m):
        raise VoronoiError(f"embedding maps R^{B.m} -> R^{B.n}, circuit has shape ({c.n}, {c.m})")
    return voronoi_margin(c, B) > 0


def perturb_to_injective(c: Circuit, B: AffineEmbedding, seed: int = 0, max_rounds: int = 64) -> AffineEmbedding:
    """Random small perturbation of ``T`` that separates colliding sites while
    keeping every input strictly inside its cell.

    The step size is derived from the measured Voronoi slack so that no
    squared distance moves by more than a quarter of it; each candidate is
    re-verified and the step halved on failure.
    """
    if not is_voronoi_solution(c, B):
        raise VoronoiError("input embedding is not a Voronoi solution")
    if B.is_injective():
        return B
    rng = np.random.default_rng(seed)
    X = all_states(c.n).astype(float)
    slack = voronoi_margin(c, B)
    reach = np.max(np.linalg.norm(X[:, None, :] - B.sites()[None, :, :], axis=-1))
    Y = all_states(c.m).astype(float)
    for _ in range(max_rounds):
        E = rng.standard_normal(B.T.shape)
        spread = np.max(np.linalg.norm(Y @ E.T, axis=1))
        # |Δ‖x - By‖²| ≤ 2·reach·t·spread + (t·spread)²; keep it under slack/4
        t = min(slack / (16 * reach * spread), np.sqrt(slack) / (4 * spread))
        for _ in range(60):
            cand = AffineEmbedding(B.T + t * E, B.b)
            if cand.is_injective() and is_voronoi_solution(c, cand):
                return cand
            t /= 2
    raise VoronoiError("could not find an injective perturbation")


def hamiltonian_from_voronoi(c: Circuit, B: AffineEmbedding) -> Hamiltonian:
    """``H(x, y) = -B*(x)·y + ⟨J_T, y⊗y⟩_F`` for an injective Voronoi solution."""
    if not B.is_injective():
        raise VoronoiError("embedding is not injective on the output hypercube")
    if not is_voronoi_solution(c, B):
        raise VoronoiError("embedding is not a Voronoi solution of the circuit")
    # A(x) = -Tᵀ(x - b) = -Tᵀx + Tᵀb, so h = Tᵀb and W = -T
    return Hamiltonian(c.n, c.m, B.T.T @ B.b, -B.T, B.J_T)


def random_voronoi_instance(n: int, m: int, rng: np.random.Generator, min_slack: float = 1e-3,
                            max_tries: int = 1000):
    """Random injective embedding and the circuit it solves (nearest-site rule)."""
    X = all_states(n).astype(float)
    for _ in range(max_tries):
        B = AffineEmbedding(rng.normal(size=(n, m)), rng.normal(scale=0.5, size=n))
        if not B.is_injective():
            continue
        S = B.sites()
        d2 = ((X[:, None, :] - S[None, :, :]) ** 2).sum(axis=-1)
        order = np.sort(d2, axis=1)
        if np.any(order[:, 1] - order[:, 0] < min_slack):
            continue
        c = Circuit.from_output_indices(n, m, np.argmin(d2, axis=1))
        return c, B
    raise VoronoiError("failed to draw a random Voronoi instance")


# ---------------------------------------------------------------- text format

def format_embedding(B: AffineEmbedding) -> str:
    lines = [f"emb {B.n} {B.m}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in B.T]
    lines.append(" ".join(repr(float(v)) for v in B.b))
    return "\n".join(lines) + "\n"


def parse_embedding(text: str) -> AffineEmbedding:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    head = lines[0].split() if lines else []
    if len(head) != 3 or head[0] != "emb":
        raise VoronoiError("bad header; expected 'emb <n> <m>'")
    n, m = int(head[1]), int(head[2])
    if len(lines) != n + 2:
        raise VoronoiError(f"expected {n} rows of T and one row for b")
    T = np.array([[float(t) for t in ln.split()] for ln in lines[1 : n + 1]]).reshape(n, m)
    b = np.array([float(t) for t in lines[n + 1].split()])
    if b.shape != (n,):
        raise VoronoiError("offset row has the wrong length")
    return AffineEmbedding(T, b)


def read_embedding(path) -> AffineEmbedding:
    with open(path) as fh:
        return parse_embedding(fh.read())


def write_embedding(B: AffineEmbedding, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_embedding(B))
