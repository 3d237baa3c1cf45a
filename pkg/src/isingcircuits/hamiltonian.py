"""Reduced Ising Hamiltonians ``H(x, y) = A(x)·y + yᵀJy`` with pinned inputs.

Only output biases ``h``, input-output couplings ``W`` (``n × m``) and
output-output couplings ``J`` (strictly upper triangular ``m × m``) are
stored; ``A_i(x) = h_i + Σ_k W[k, i] x_k``.

The packed coefficient vector has length ``p = m + n*m + m(m-1)/2`` and
layout ``[h | W row-major | J_ij for i<j lexicographic]``; the matching
feature vector of a state is ``[y | x_k y_i | y_i y_j]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuit import Circuit, all_states, state_to_index


class HamiltonianError(ValueError):
    pass


class HamiltonianFormatError(HamiltonianError):
    pass


def num_params(n: int, m: int) -> int:
    return m + n * m + m * (m - 1) // 2


@lru_cache(maxsize=None)
def upper_pairs(m: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(m) for j in range(i + 1, m))


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    n: int
    m: int
    h: np.ndarray
    W: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(self.m)
        W = np.array(self.W, dtype=float).reshape(self.n, self.m)
        J = np.array(self.J, dtype=float).reshape(self.m, self.m)
        if np.any(np.tril(J) != 0):
            raise HamiltonianError("J must be strictly upper triangular")
        for arr in (h, W, J):
            if not np.all(np.isfinite(arr)):
                raise HamiltonianError("coefficients must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "J", J)

    @classmethod
    def zero(cls, n: int, m: int) -> "Hamiltonian":
        return cls(n, m, np.zeros(m), np.zeros((n, m)), np.zeros((m, m)))

    @classmethod
    def from_affine(cls, linear, offset, J) -> "Hamiltonian":
        """From ``A(x) = linear @ x + offset`` (``linear`` is ``m × n``) and ``J``."""
        linear = np.atleast_2d(np.asarray(linear, dtype=float))
        offset = np.asarray(offset, dtype=float).reshape(-1)
        m = offset.shape[0]
        linear = linear.reshape(m, -1)
        J = np.asarray(J, dtype=float)
        if J.shape != (m, m):
            raise HamiltonianError(f"J must be {m}x{m}, got {J.shape}")
        return cls(linear.shape[1], m, offset, linear.T, np.triu(J, 1))

    @classmethod
    def from_full(cls, n: int, m: int, biases, couplings) -> "Hamiltonian":
        """Reduce a Hamiltonian on all ``n + m`` spins (inputs first).

        Terms touching only input spins do not affect conditional ground
        states and are dropped with a warning.
        """
        biases = np.asarray(biases, dtype=float).reshape(n + m)
        C = np.asarray(couplings, dtype=float).reshape(n + m, n + m)
        C = np.triu(C, 1) + np.tril(C, -1).T
        if np.any(biases[:n] != 0) or np.any(C[:n, :n] != 0):
            warnings.warn("dropping input-only biases/couplings of a pinned-input Hamiltonian", stacklevel=2)
        return cls(n, m, biases[n:], C[:n, n:], C[n:, n:])

    @property
    def linear(self) -> np.ndarray:
        """Linear part of ``A`` as an ``m × n`` matrix."""
        return self.W.T

    @property
    def J_sym(self) -> np.ndarray:
        """``sym(J) = (J + Jᵀ)/2``, the symmetric hollow form."""
        return (self.J + self.J.T) / 2

    def A(self, x: Sequence[int]) -> np.ndarray:
        return self.h + np.asarray(x, dtype=float) @ self.W

    @property
    def num_params(self) -> int:
        return num_params(self.n, self.m)

    def pack(self) -> np.ndarray:
        iu = upper_pairs(self.m)
        j = np.array([self.J[i, k] for i, k in iu], dtype=float)
        return np.concatenate([self.h, self.W.reshape(-1), j])

    def l1_norm(self) -> float:
        return float(np.abs(self.pack()).sum())

    def energy(self, x, y) -> float:
        return evaluate(self, x, y)

    def energies(self) -> np.ndarray:
        return energy_table(self)

    def __add__(self, other: "Hamiltonian") -> "Hamiltonian":
        _check_shape(self, other.n, other.m)
        return Hamiltonian(self.n, self.m, self.h + other.h, self.W + other.W, self.J + other.J)

    def scaled(self, factor: float) -> "Hamiltonian":
        return Hamiltonian(self.n, self.m, self.h * factor, self.W * factor, self.J * factor)

    def __eq__(self, other):
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and np.array_equal(self.pack(), other.pack())

    def __hash__(self):
        return hash((self.n, self.m, self.pack().tobytes()))

    def __repr__(self):
        return f"Hamiltonian(n={self.n}, m={self.m}, u={self.pack().tolist()})"


def _check_shape(H: Hamiltonian, n: int, m: int) -> None:
    if (H.n, H.m) != (n, m):
        raise HamiltonianError(f"shape mismatch: Hamiltonian is ({H.n}, {H.m}), expected ({n}, {m})")


def unpack(u, n: int, m: int) -> Hamiltonian:
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != num_params(n, m):
        raise HamiltonianError(f"coefficient vector has length {u.shape[0]}, expected {num_params(n, m)}")
    h = u[:m]
    W = u[m : m + n * m].reshape(n, m)
    J = np.zeros((m, m))
    for t, (i, j) in enumerate(upper_pairs(m)):
        J[i, j] = u[m + n * m + t]
    return Hamiltonian(n, m, h, W, J)


def feature_vector(x: Sequence[int], y: Sequence[int]) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    m = y.shape[0]
    yy = [y[i] * y[j] for i, j in upper_pairs(m)]
    return np.concatenate([y, np.outer(x, y).reshape(-1), np.array(yy, dtype=float)])


@lru_cache(maxsize=64)
def feature_tensor(n: int, m: int) -> np.ndarray:
    """``(2**n, 2**m, p)`` array of feature vectors for every ``(x, y)``."""
    X = all_states(n).astype(float)
    Y = all_states(m).astype(float)
    lin = Y[None, :, :].repeat(1 << n, axis=0)
    cross = (X[:, None, :, None] * Y[None, :, None, :]).reshape(1 << n, 1 << m, n * m)
    pairs = upper_pairs(m)
    quad = np.stack([Y[:, i] * Y[:, j] for i, j in pairs], axis=1) if pairs else np.zeros((1 << m, 0))
    quad = quad[None, :, :].repeat(1 << n, axis=0)
    out = np.concatenate([lin, cross, quad], axis=2)
    out.setflags(write=False)
    return out


def evaluate(H: Hamiltonian, x: Sequence[int], y: Sequence[int]) -> float:
    """Energy ``H(x, y)``.

    Computed as the correctly rounded sum of the exact products ``u_i v_i``
    (all ``v_i`` are ±1), so it coincides with the packed inner product.
    """
    if len(x) != H.n or len(y) != H.m:
        raise HamiltonianError(f"state dimensions ({len(x)}, {len(y)}) do not match ({H.n}, {H.m})")
    return packed_dot(H.pack(), feature_vector(x, y))


def packed_dot(u, v) -> float:
    return math.fsum(np.asarray(u, dtype=float) * np.asarray(v, dtype=float))


def evaluate_direct(H: Hamiltonian, x, y) -> float:
    """Energy from ``Σ A_i(x) y_i + Σ_{i<j} J_ij y_i y_j`` with the quadratic
    part taken as the Frobenius product ``⟨J, y⊗y⟩``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(H.A(x) @ y + frobenius(H.J, np.outer(y, y)))


def frobenius(A, B) -> float:
    return float(np.sum(np.asarray(A) * np.asarray(B)))


def energy_table(H: Hamiltonian) -> np.ndarray:
    """``(2**n, 2**m)`` array of energies indexed by canonical state indices."""
    return feature_tensor(H.n, H.m) @ H.pack()


def level_energies(H: Hamiltonian, x) -> np.ndarray:
    """Energies of all ``2**m`` outputs at input ``x``."""
    return feature_tensor(H.n, H.m)[state_to_index(x)] @ H.pack()


# ---------------------------------------------------------------- boolean convention

@dataclass(frozen=True)
class BooleanPolynomial:
    """``H̃(σ) = constant + linear·σ + Σ_{i<j} quadratic[i, j] σ_i σ_j`` over
    ``σ ∈ {0,1}^(n+m)`` (inputs first)."""

    constant: float
    linear: np.ndarray
    quadratic: np.ndarray

    def __call__(self, sigma) -> float:
        s = np.asarray(sigma, dtype=float)
        return float(self.constant + self.linear @ s + s @ self.quadratic @ s)


def full_coefficients(H: Hamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Bias vector and strictly-upper-triangular coupling matrix over all
    ``n + m`` spins (input-only terms zero)."""
    d = H.n + H.m
    b = np.zeros(d)
    b[H.n :] = H.h
    C = np.zeros((d, d))
    C[: H.n, H.n :] = H.W
    C[H.n :, H.n :] = H.J
    return b, C


def to_boolean_polynomial(H: Hamiltonian) -> BooleanPolynomial:
    """Coefficients of ``H̃`` with ``H̃((s+1)/2) = H(s)`` for every spin state.

    Substituting ``s = 2σ - 1`` gives ``b̃ = Σ J - Σ h``,
    ``h̃_i = 2h_i - 2 Σ_{j≠i} J_{ij}`` and ``J̃_ij = 4 J_ij``.
    """
    b, C = full_coefficients(H)
    row_sums = C.sum(axis=0) + C.sum(axis=1)
    return BooleanPolynomial(
        constant=float(C.sum() - b.sum()),
        linear=2 * b - 2 * row_sums,
        quadratic=4 * C,
    )


# ---------------------------------------------------------------- degeneracy

@dataclass(frozen=True)
class DegeneracyReport:
    D: int
    solution_gap: float
    min_gap: float

    @property
    def encodes(self) -> bool:
        return self.solution_gap > 0


def _check_circuit(H: Hamiltonian, c: Circuit) -> None:
    _check_shape(H, c.n, c.m)


def _exact_energies(H: Hamiltonian) -> np.ndarray:
    u = H.pack()
    F = feature_tensor(H.n, H.m)
    return np.array([[packed_dot(u, F[a, b]) for b in range(F.shape[1])] for a in range(F.shape[0])])


def solution_gap(H: Hamiltonian, c: Circuit, energies=None) -> float:
    E = _exact_energies(H) if energies is None else energies
    if c.m == 0:
        return math.inf
    f = c.output_indices
    base = E[np.arange(E.shape[0]), f]
    others = E.copy()
    others[np.arange(E.shape[0]), f] = np.inf
    return float(np.min(others - base[:, None]))


def degeneracy_report(H: Hamiltonian, c: Circuit, tol: float = 0.0) -> DegeneracyReport:
    """Degeneracy number, solution gap ``δ`` and minimum energy gap ``ε``.

    Two states are degenerate when their energies differ by at most ``tol``
    (exact equality by default).
    """
    _check_circuit(H, c)
    E = _exact_energies(H)
    flat = np.sort(E.reshape(-1))
    diffs = np.abs(flat[:, None] - flat[None, :])
    total = flat.size
    D = int(np.count_nonzero(diffs <= tol) - total)
    positive = diffs[diffs > tol]
    eps = float(positive.min()) if positive.size else math.inf
    return DegeneracyReport(D=D, solution_gap=solution_gap(H, c, E), min_gap=eps)


def _degenerate_pair(H: Hamiltonian, tol: float):
    E = _exact_energies(H).reshape(-1)
    order = np.argsort(E, kind="stable")
    for a, b in zip(order[:-1], order[1:]):
        if abs(E[a] - E[b]) <= tol:
            return int(min(a, b)), int(max(a, b))
    return None


def make_generic(H: Hamiltonian, c: Circuit, tol: float = 0.0, trace: list | None = None,
                 max_iter: int | None = None) -> Hamiltonian:
    """Perturb ``H`` until all ``2^(n+m)`` energies are distinct, keeping the encoding.

    Each round picks a degenerate pair ``(a, b)`` and adds ``(ε/3)·R`` where
    ``R`` is a unit single-coefficient perturbation with ``R(a) ≠ R(b)``: the
    bias of the first output where ``a`` and ``b`` differ, or, when they share
    outputs, the coupling between the first differing input and output 0.
    If ``trace`` is given, the degeneracy number before each round and after
    the last one is appended to it.
    """
    _check_circuit(H, c)
    rep = degeneracy_report(H, c, tol)
    if rep.solution_gap <= tol:
        raise HamiltonianError("Hamiltonian does not encode the circuit")
    n, m = H.n, H.m
    limit = rep.D + 1 if max_iter is None else max_iter
    for _ in range(limit):
        if trace is not None:
            trace.append(rep.D)
        if rep.D == 0:
            return H
        a, b = _degenerate_pair(H, tol)
        xa, ya = divmod(a, 1 << m)
        xb, yb = divmod(b, 1 << m)
        u = np.zeros(H.num_params)
        if ya != yb:
            i = ((ya ^ yb) & -(ya ^ yb)).bit_length() - 1
            u[i] = 1.0
        else:
            k = ((xa ^ xb) & -(xa ^ xb)).bit_length() - 1
            u[m + k * m] = 1.0
        step = rep.min_gap / 3 if math.isfinite(rep.min_gap) else 1.0
        H = unpack(H.pack() + step * u, n, m)
        rep = degeneracy_report(H, c, tol)
    if trace is not None:
        trace.append(rep.D)
    if rep.D:
        raise HamiltonianError(f"degeneracy removal did not converge (D = {rep.D})")
    return H


# ---------------------------------------------------------------- text format

def format_hamiltonian(H: Hamiltonian) -> str:
    lines = [f"ham {H.n} {H.m}"]
    for i in range(H.m):
        if H.h[i] != 0:
            lines.append(f"h {i} {float(H.h[i])!r}")
    for k in range(H.n):
        for i in range(H.m):
            if H.W[k, i] != 0:
                lines.append(f"w {k} {i} {float(H.W[k, i])!r}")
    for i, j in upper_pairs(H.m):
        if H.J[i, j] != 0:
            lines.append(f"j {i} {j} {float(H.J[i, j])!r}")
    return "\n".join(lines) + "\n"


def parse_hamiltonian(text: str) -> Hamiltonian:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise HamiltonianFormatError("empty Hamiltonian file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "ham":
        raise HamiltonianFormatError(f"bad header {lines[0]!r}; expected 'ham <n> <m>'")
    n, m = int(head[1]), int(head[2])
    h, W, J = np.zeros(m), np.zeros((n, m)), np.zeros((m, m))
    for ln in lines[1:]:
        tok = ln.split()
        try:
            if tok[0] == "h" and len(tok) == 3:
                h[_idx(tok[1], m)] = float(tok[2])
            elif tok[0] == "w" and len(tok) == 4:
                W[_idx(tok[1], n), _idx(tok[2], m)] = float(tok[3])
            elif tok[0] == "j" and len(tok) == 4:
                i, j = _idx(tok[1], m), _idx(tok[2], m)
                if i >= j:
                    raise HamiltonianFormatError(f"coupling line needs i < j: {ln!r}")
                J[i, j] = float(tok[3])
            else:
                raise HamiltonianFormatError(f"unrecognised line {ln!r}")
        except ValueError as exc:
            raise HamiltonianFormatError(f"bad line {ln!r}: {exc}") from None
    return Hamiltonian(n, m, h, W, J)


def _idx(tok: str, bound: int) -> int:
    v = int(tok)
    if not 0 <= v < bound:
        raise HamiltonianFormatError(f"index {v} out of range [0, {bound})")
    return v


def read_hamiltonian(path) -> Hamiltonian:
    with open(path) as fh:
        return parse_hamiltonian(fh.read())


def write_hamiltonian(H: Hamiltonian, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_hamiltonian(H))
