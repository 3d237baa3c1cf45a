"""Boolean functions on the hypercube.

Spin states are stored as tuples of ``-1``/``+1`` ints.  Every state of
dimension ``d`` corresponds to an integer index in ``[0, 2**d)``: bit ``i`` of
the index is set exactly when entry ``i`` of the state is ``+1`` (bit 0 is the
least significant).  This ordering is used everywhere in the package.

Tables are kept in spin convention internally; the boolean convention only
appears when reading or writing truth-table files.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

SpinState = tuple[int, ...]

SPIN = "spin"
BOOLEAN = "bool"

# count of circuits enumerate_circuits() may yield; overridable from the environment
DEFAULT_ENUMERATION_CAP = int(os.environ.get("ISING_ENUM_CAP", 1 << 20))


class CircuitError(ValueError):
    pass


class TruthTableFormatError(CircuitError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def index_to_state(index: int, d: int) -> SpinState:
    return tuple(1 if (index >> i) & 1 else -1 for i in range(d))


def state_to_index(state: Sequence[int]) -> int:
    idx = 0
    for i, s in enumerate(state):
        if s == 1:
            idx |= 1 << i
        elif s != -1:
            raise CircuitError(f"spin entries must be -1 or +1, got {s!r}")
    return idx


def all_states(d: int) -> np.ndarray:
    """``(2**d, d)`` int8 array whose row ``k`` is ``index_to_state(k, d)``."""
    idx = np.arange(1 << d)[:, None]
    bits = (idx >> np.arange(d)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


def hamming_neighbors(index: int, d: int) -> list[int]:
    return [index ^ (1 << i) for i in range(d)]


def spin_to_bool(values):
    return tuple((v + 1) // 2 for v in values)


def bool_to_spin(values):
    return tuple(2 * v - 1 for v in values)


@dataclass(frozen=True, eq=False)
class Circuit:
    """A total function ``f: Σⁿ → Σᵐ`` stored as its truth table.

    ``table[k]`` is the output (spin convention) for the input with canonical
    index ``k``.
    """

    n: int
    m: int
    table: np.ndarray

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int8).reshape(1 << self.n, self.m)
        if not np.all(np.abs(table) == 1):
            raise CircuitError("table entries must be -1 or +1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, n: int, m: int, fn: Callable[[SpinState], Sequence[int]]) -> "Circuit":
        rows = []
        for k in range(1 << n):
            out = tuple(fn(index_to_state(k, n)))
            if len(out) != m:
                raise CircuitError(f"function returned {len(out)} outputs, expected {m}")
            rows.append(out)
        return cls(n, m, np.array(rows, dtype=np.int8).reshape(1 << n, m))

    @classmethod
    def from_output_indices(cls, n: int, m: int, outputs: Sequence[int]) -> "Circuit":
        outputs = np.asarray(outputs, dtype=np.int64)
        if outputs.shape != (1 << n,):
            raise CircuitError(f"expected {1 << n} outputs, got {outputs.shape}")
        return cls(n, m, all_states(m)[outputs])

    @classmethod
    def from_index(cls, n: int, m: int, index: int) -> "Circuit":
        """Circuit number ``index`` in canonical enumeration order.

        The output index for input ``k`` is digit ``k`` of ``index`` written in
        base ``2**m`` (input 0 is the least significant digit).
        """
        base = 1 << m
        outs = []
        for _ in range(1 << n):
            index, r = divmod(index, base)
            outs.append(r)
        if index:
            raise CircuitError("circuit index out of range")
        return cls.from_output_indices(n, m, outs)

    @property
    def output_indices(self) -> np.ndarray:
        weights = 1 << np.arange(self.m)
        return ((self.table > 0).astype(np.int64) * weights).sum(axis=1)

    @property
    def index(self) -> int:
        base = 1 << self.m
        return sum(int(o) * base**k for k, o in enumerate(self.output_indices))

    def __call__(self, x: Sequence[int]) -> SpinState:
        return tuple(int(v) for v in self.table[state_to_index(x)])

    def output(self, k: int) -> SpinState:
        return tuple(int(v) for v in self.table[k])

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.m, self.table.tobytes()))

    def __repr__(self):
        return f"Circuit(n={self.n}, m={self.m}, outputs={self.output_indices.tolist()})"

    def __neg__(self) -> "Circuit":
        return Circuit(self.n, self.m, -self.table)


def component(c: Circuit, i: int) -> Circuit:
    if not 0 <= i < c.m:
        raise IndexError(f"output index {i} out of range for m={c.m}")
    return Circuit(c.n, 1, c.table[:, i : i + 1])


def glue(*circuits: Circuit) -> Circuit:
    """Product circuit ``f1 × f2 × ...`` (outputs concatenated in argument order)."""
    if not circuits:
        raise CircuitError("glue needs at least one circuit")
    n = circuits[0].n
    if any(c.n != n for c in circuits):
        raise CircuitError("glue requires equal input arity")
    table = np.concatenate([c.table for c in circuits], axis=1)
    return Circuit(n, table.shape[1], table)


def convert_table(table: np.ndarray, to: str) -> np.ndarray:
    """Relabel a table of values; ``s ↦ (s+1)/2`` towards boolean, ``σ ↦ 2σ-1`` towards spin."""
    table = np.asarray(table)
    if to == BOOLEAN:
        return (table + 1) // 2
    if to == SPIN:
        return 2 * table - 1
    raise CircuitError(f"unknown convention {to!r}")


def convert(c: Circuit, to: str) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Rows ``(input, output)`` of ``c`` written in convention ``to``."""
    inputs = all_states(c.n)
    table = c.table
    if to == BOOLEAN:
        inputs, table = convert_table(inputs, BOOLEAN), convert_table(table, BOOLEAN)
    elif to != SPIN:
        raise CircuitError(f"unknown convention {to!r}")
    return [(tuple(map(int, x)), tuple(map(int, y))) for x, y in zip(inputs, table)]


def from_rows(n: int, m: int, rows, convention: str = SPIN) -> Circuit:
    """Build a circuit from ``(input, output)`` rows in any order."""
    outputs: dict[int, tuple[int, ...]] = {}
    for x, y in rows:
        x, y = tuple(x), tuple(y)
        if len(x) != n or len(y) != m:
            raise CircuitError(f"row {x} -> {y} does not match shape ({n}, {m})")
        if convention == BOOLEAN:
            if not set(x + y) <= {0, 1}:
                raise CircuitError(f"boolean row {x} -> {y} has values outside {{0,1}}")
            x, y = bool_to_spin(x), bool_to_spin(y)
        k = state_to_index(x)
        if k in outputs:
            raise CircuitError(f"duplicate row for input {x}")
        state_to_index(y)
        outputs[k] = y
    missing = [index_to_state(k, n) for k in range(1 << n) if k not in outputs]
    if missing:
        raise CircuitError(f"missing rows for inputs {missing[:4]}")
    return Circuit(n, m, np.array([outputs[k] for k in range(1 << n)], dtype=np.int8))


def is_threshold(c: Circuit):
    """Decide whether a single-output circuit is a threshold function.

    Returns ``(True, (w0, w))`` with ``f(x)·(w0 + w·x) ≥ 1`` on every input,
    or ``(False, None)``.
    """
    from .constraints import global_min_rows
    from .lp import l1_minimize

    if c.m != 1:
        raise CircuitError("is_threshold needs a single-output circuit")
    system = global_min_rows(c)
    sol = l1_minimize(system.rows, system.rhs)
    if not sol.feasible:
        return False, None
    # u = (h, W); the rows read -2 f(x) (h + W·x) >= 1
    w0, w = -2 * sol.u[0], -2 * sol.u[1:]
    X = all_states(c.n).astype(float)
    margins = c.table[:, 0] * (w0 + X @ w)
    if margins.min() < 1 - 1e-7:
        raise ArithmeticError(f"threshold witness margin {margins.min()} below 1")
    return True, (float(w0), w)


def enumerate_circuits(n: int, m: int, cap: int | None = None) -> Iterator[Circuit]:
    """Every total function ``Σⁿ → Σᵐ`` once, in canonical index order."""
    total = count_circuits(n, m)
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if total > cap:
        raise BudgetExceeded(f"shape ({n}, {m}) has {total} circuits, cap is {cap}")
    states = all_states(m)
    for outs in itertools.product(range(1 << m), repeat=1 << n):
        # product() varies the last slot fastest; reverse so input 0 is least significant
        yield Circuit(n, m, states[list(reversed(outs))])


def count_circuits(n: int, m: int) -> int:
    return (1 << m) ** (1 << n)


# ---------------------------------------------------------------- truth-table I/O

def format_truth_table(c: Circuit, convention: str = SPIN) -> str:
    lines = [f"shape {c.n} {c.m} {convention}"]

    def tok(v):
        if convention == SPIN:
            return "+1" if v > 0 else "-1"
        return str(v)

    for x, y in convert(c, convention):
        lines.append(" ".join(map(tok, x)) + " -> " + " ".join(map(tok, y)))
    return "\n".join(lines) + "\n"


def parse_truth_table(text: str) -> Circuit:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise TruthTableFormatError("empty truth table")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "shape":
        raise TruthTableFormatError(f"bad header {lines[0]!r}; expected 'shape <n> <m> <spin|bool>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise TruthTableFormatError(f"bad header {lines[0]!r}") from None
    convention = head[3]
    if convention not in (SPIN, BOOLEAN):
        raise TruthTableFormatError(f"unknown convention {convention!r}")
    allowed = {"-1": -1, "+1": 1, "1": 1} if convention == SPIN else {"0": 0, "1": 1}
    rows = []
    for ln in lines[1:]:
        if "->" not in ln:
            raise TruthTableFormatError(f"row without '->': {ln!r}")
        lhs, rhs = ln.split("->")
        try:
            x = tuple(allowed[t] for t in lhs.split())
            y = tuple(allowed[t] for t in rhs.split())
        except KeyError as exc:
            raise TruthTableFormatError(f"bad token {exc.args[0]!r} in row {ln!r}") from None
        rows.append((x, y))
    try:
        return from_rows(n, m, rows, convention)
    except CircuitError as exc:
        raise TruthTableFormatError(str(exc)) from None


def read_truth_table(path) -> Circuit:
    with open(path) as fh:
        return parse_truth_table(fh.read())


def write_truth_table(c: Circuit, path, convention: str = SPIN) -> None:
    with open(path, "w") as fh:
        fh.write(format_truth_table(c, convention))


# ---------------------------------------------------------------- named circuits

def _and(x):
    return (1 if all(v == 1 for v in x) else -1,)


def _xor(x):
    # spin convention: XOR is +1 when the inputs disagree
    return (-x[0] * x[1],)


AND = Circuit.from_function(2, 1, _and)
XOR = Circuit.from_function(2, 1, _xor)
OR = Circuit.from_function(2, 1, lambda x: (1 if 1 in x else -1,))
COPY = Circuit.from_function(1, 1, lambda x: (x[0],))
XOR_AND = glue(XOR, AND)
XOR_XOR = glue(XOR, XOR)
IDENTITY2 = Circuit.from_function(2, 2, lambda x: x)


def constant(n: int, value: Sequence[int]) -> Circuit:
    return Circuit.from_function(n, len(value), lambda x: tuple(value))


def _bool_table(n: int, m: int, text: str) -> Circuit:
    rows = []
    for item in text.split():
        x, y = item.split(":")
        rows.append((tuple(map(int, x)), tuple(map(int, y))))
    return from_rows(n, m, rows, BOOLEAN)


# type-2 circuits (no threshold component) that are nevertheless feasible;
# boolean rows "x1x2..:f1f2.." with x1 stored as entry 0
TYPE2_FEASIBLE_33 = _bool_table(3, 3, "000:000 001:000 010:000 011:011 100:000 101:101 110:111 111:000")
TYPE2_FEASIBLE_42 = _bool_table(
    4, 2,
    "0000:00 0001:00 0010:00 0011:00 0100:00 0101:00 0110:00 0111:01 "
    "1000:00 1001:00 1010:01 1011:01 1100:00 1101:10 1110:10 1111:01",
)
