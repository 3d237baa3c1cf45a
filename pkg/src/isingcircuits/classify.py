"""Exhaustive classification of small circuit shapes by component feasibility.

A circuit is type 0 when every single-output component is a threshold
function, type 1 when some are, and type 2 when none are.  Each circuit is
also checked for global feasibility with an LP phase 1.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path

import numpy as np

from .circuit import AND, XOR, BudgetExceeded, Circuit, DEFAULT_ENUMERATION_CAP, component, count_circuits, is_threshold
from .synth import is_feasible

TYPES = (0, 1, 2)


@lru_cache(maxsize=None)
def _component_threshold(n: int, index: int) -> bool:
    return is_threshold(Circuit.from_index(n, 1, index))[0]


def component_indices(c: Circuit) -> list[int]:
    return [component(c, i).index for i in range(c.m)]


def circuit_type(c: Circuit) -> int:
    """0, 1 or 2 when all, some or none of the components are threshold."""
    ok = [_component_threshold(c.n, k) for k in component_indices(c)]
    if all(ok):
        return 0
    return 1 if any(ok) else 2


@dataclass
class ClassificationReport:
    shape: tuple[int, int]
    counts: dict = field(default_factory=lambda: {t: 0 for t in TYPES})
    feasible: dict = field(default_factory=lambda: {t: 0 for t in TYPES})
    violations: list = field(default_factory=list)    # type-0 circuits found infeasible

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def total_feasible(self) -> int:
        return sum(self.feasible.values())

    def to_text(self) -> str:
        n, m = self.shape
        lines = [f"shape ({n},{m}): {self.total} circuits, {self.total_feasible} feasible",
                 f"{'type':>6} {'count':>8} {'feasible':>9}"]
        for t in TYPES:
            lines.append(f"{t:>6} {self.counts[t]:>8} {self.feasible[t]:>9}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shape", "type", "count", "feasible_count"])
        for t in TYPES:
            w.writerow([f"{self.shape[0]}x{self.shape[1]}", t, self.counts[t], self.feasible[t]])
        return buf.getvalue()


def _classify_range(args) -> np.ndarray:
    """``(hi - lo, 2)`` array of (type, feasible) for indices in ``[lo, hi)``."""
    n, m, lo, hi = args
    out = np.zeros((hi - lo, 2), dtype=np.int8)
    for idx in range(lo, hi):
        c = Circuit.from_index(n, m, idx)
        out[idx - lo] = (circuit_type(c), is_feasible(c))
    return out


def _chunk_path(cache_dir: Path, n: int, m: int, lo: int, hi: int) -> Path:
    return cache_dir / f"shape{n}x{m}_{lo}_{hi}.npy"


def classify_indices(n: int, m: int, jobs: int = 1, cache_dir=None, chunk: int = 1024,
                     cap: int | None = None) -> np.ndarray:
    """Per-circuit (type, feasible) for every canonical index of shape ``(n, m)``."""
    total = count_circuits(n, m)
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if total > cap:
        raise BudgetExceeded(f"{total} shape ({n},{m}) circuits exceed the cap of {cap}")
    bounds = [(n, m, lo, min(total, lo + chunk)) for lo in range(0, total, chunk)]
    cache = Path(cache_dir) if cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)
    results: dict[int, np.ndarray] = {}
    todo = []
    for b in bounds:
        path = cache and _chunk_path(cache, *b)
        if path is not None and path.exists():
            results[b[2]] = np.load(path)
        else:
            todo.append(b)

    def store(b, arr):
        results[b[2]] = arr
        if cache is not None:
            # write-then-rename so an interrupted sweep never leaves a torn chunk
            path = _chunk_path(cache, *b)
            tmp = path.with_suffix(".tmp.npy")
            np.save(tmp, arr)
            os.replace(tmp, path)

    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for b, arr in zip(todo, pool.map(_classify_range, todo)):
                store(b, arr)
    else:
        for b in todo:
            store(b, _classify_range(b))
    return np.concatenate([results[b[2]] for b in bounds]) if bounds else np.zeros((0, 2), np.int8)


def classify_shape(n: int, m: int, jobs: int = 1, cache_dir=None, cap: int | None = None) -> ClassificationReport:
    """Count circuits and feasible circuits of each type over the whole shape."""
    data = classify_indices(n, m, jobs, cache_dir, cap=cap)
    rep = ClassificationReport((n, m))
    for t in TYPES:
        sel = data[:, 0] == t
        rep.counts[t] = int(sel.sum())
        rep.feasible[t] = int(data[sel, 1].sum())
    rep.violations = [int(i) for i in np.flatnonzero((data[:, 0] == 0) & (data[:, 1] == 0))]
    return rep


# ---------------------------------------------------------------- shape (2, m) characterization

def spin_action_orbit(c: Circuit) -> set[int]:
    """Orbit of a shape (2,1) circuit under input negations, input swap and output negation."""
    if (c.n, c.m) != (2, 1):
        raise ValueError("spin action is defined here for shape (2,1) only")
    orbit = set()
    for s1, s2, swap, sout in product((1, -1), (1, -1), (False, True), (1, -1)):
        def g(x, s1=s1, s2=s2, swap=swap, sout=sout):
            x1, x2 = (x[1], x[0]) if swap else (x[0], x[1])
            return (sout * c((s1 * x1, s2 * x2))[0],)
        orbit.add(Circuit.from_function(2, 1, g).index)
    return orbit


AND_ORBIT = frozenset(spin_action_orbit(AND))
XOR_ORBIT = frozenset(spin_action_orbit(XOR))


def characterization(c: Circuit) -> bool:
    """No XOR-type component, or at least one AND-type component."""
    comps = component_indices(c)
    return not any(k in XOR_ORBIT for k in comps) or any(k in AND_ORBIT for k in comps)


@dataclass
class TheoremCheck:
    m: int
    checked: int
    mismatches: list          # (circuit index, lp_feasible, characterization)

    @property
    def holds(self) -> bool:
        return not self.mismatches


def check_2m_theorem(m: int) -> TheoremCheck:
    """Compare LP feasibility with the AND/XOR characterization over every shape (2,m) circuit."""
    if not 1 <= m <= 3:
        raise ValueError("check_2m_theorem supports 1 <= m <= 3")
    total = count_circuits(2, m)
    bad = []
    for idx in range(total):
        c = Circuit.from_index(2, m, idx)
        lp_ok = is_feasible(c)
        pred = characterization(c)
        if lp_ok != pred:
            bad.append((idx, lp_ok, pred))
    return TheoremCheck(m, total, bad)
