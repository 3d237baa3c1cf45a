"""Synthesis drivers: LP-based Hamiltonian construction with oracle certification."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .circuit import BudgetExceeded, Circuit, glue, index_to_state
from .constraints import GLOBAL, LOCAL_FREE, global_min_rows, local_min_free_rows, tree_rows
from .hamiltonian import Hamiltonian, unpack
from .oracle import TOL, encoding_margin, extract_tree, unique_local_minimum_everywhere

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
TREE = "tree"

DEFAULT_AUX_CAP = int(os.environ.get("ISING_AUX_CAP", 1 << 20))


class CertificationError(RuntimeError):
    """The LP reported a solution that the exhaustive oracle rejects."""


class SearchExhausted(RuntimeError):
    pass


@dataclass
class SynthesisResult:
    status: str
    mode: str
    hamiltonian: Hamiltonian | None = None
    l1_norm: float = float("nan")
    certificate: bool = False
    margin: float = float("nan")
    metadata: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _system(c: Circuit, mode: str):
    if mode == GLOBAL:
        return global_min_rows(c)
    if mode == LOCAL_FREE:
        return local_min_free_rows(c)
    raise ValueError(f"unknown synthesis mode {mode!r}")


def certify(H: Hamiltonian, c: Circuit, mode: str, tol: float = TOL) -> tuple[bool, float]:
    margin = encoding_margin(H, c)
    ok = margin > tol
    if ok and mode in (LOCAL_FREE, TREE):
        ok = unique_local_minimum_everywhere(H, c)
    return ok, margin


def _solve_system(c: Circuit, system, mode: str, tol: float, feas_tol: float) -> SynthesisResult:
    sol = lp.l1_minimize(system.rows, system.rhs, feas_tol=feas_tol)
    if not sol.feasible:
        return SynthesisResult(INFEASIBLE, mode, metadata={"lp_iterations": sol.iterations})
    H = unpack(sol.u, c.n, c.m)
    ok, margin = certify(H, c, mode, tol)
    if not ok:
        raise CertificationError(
            f"LP solution for {c!r} failed {mode} certification "
            f"(margin {margin:.3e}, tol {tol:g}, feas_tol {feas_tol:g})"
        )
    return SynthesisResult(FEASIBLE, mode, H, sol.norm, True, margin,
                           {"lp_iterations": sol.iterations, "rows": len(system)})


def synthesize(c: Circuit, mode: str = GLOBAL, margin: float = 1.0, tol: float = TOL,
               feas_tol: float = lp.FEAS_TOL) -> SynthesisResult:
    """L1-minimal Hamiltonian for ``c`` under the ``mode`` constraint family.

    ``mode`` is ``"global"`` (``f(x)`` strict ground state) or
    ``"local_free"`` (additionally no other local minima).  Every feasible
    result is re-checked exhaustively.
    """
    system = _system(c, mode)
    if margin != 1.0:
        system = system.scaled(margin)
    return _solve_system(c, system, mode, tol, feas_tol)


def is_feasible(c: Circuit, mode: str = GLOBAL) -> bool:
    """Phase-1 feasibility only (no L1 optimisation)."""
    system = _system(c, mode)
    return lp.is_feasible(system.rows, system.rhs)


# ---------------------------------------------------------------- spanning-tree refinement

def _trees(H: Hamiltonian, c: Circuit) -> dict:
    return {k: extract_tree(H, c, index_to_state(k, c.n)) for k in range(1 << c.n)}


def _fingerprint(trees: dict) -> tuple:
    return tuple(trees[k].fingerprint() for k in sorted(trees))


def refine_spanning_trees(c: Circuit, max_iters: int = 20, tol: float = TOL,
                          feas_tol: float = lp.FEAS_TOL) -> list[SynthesisResult]:
    """Iterate: extract steepest-drop trees from the current Hamiltonian, then
    re-solve the L1 program over those tree edges.

    Starts from the local-minimum-free solution.  Stops when an extracted tree
    set repeats one seen before, or after ``max_iters`` re-solves.  The last
    result's metadata records ``stop_reason``.
    """
    start = synthesize(c, LOCAL_FREE, tol=tol, feas_tol=feas_tol)
    if not start.feasible:
        raise ValueError("local-minimum-free program is infeasible; nothing to refine")
    results = [start]
    trees = _trees(start.hamiltonian, c)
    seen = {_fingerprint(trees): 0}
    start.metadata["tree_fingerprint"] = hash(_fingerprint(trees))
    stop = "max_iters"
    for it in range(1, max_iters + 1):
        res = _solve_system(c, tree_rows(c, trees), TREE, tol, feas_tol)
        if not res.feasible:
            # cannot happen: the previous iterate satisfies these edges up to scaling
            raise CertificationError(f"tree program infeasible at iteration {it}")
        trees = _trees(res.hamiltonian, c)
        fp = _fingerprint(trees)
        res.metadata.update(iteration=it, tree_fingerprint=hash(fp))
        results.append(res)
        if fp in seen:
            stop = "fingerprint_repeat"
            res.metadata["repeats_iteration"] = seen[fp]
            break
        seen[fp] = it
    results[-1].metadata["stop_reason"] = stop
    return results


# ---------------------------------------------------------------- auxiliary search

@dataclass(frozen=True)
class AuxiliaryMap:
    k: int
    table: np.ndarray     # (2**n, k) spins

    def as_circuit(self, n: int) -> Circuit:
        return Circuit(n, self.k, self.table.reshape(1 << n, self.k))


def _aux_candidate_ok(args) -> bool:
    c, k, g_index = args
    g = Circuit.from_index(c.n, k, g_index)
    return is_feasible(glue(c, g))


def _aux_chunk(args) -> int | None:
    c, k, lo, hi = args
    for gi in range(lo, hi):
        if _aux_candidate_ok((c, k, gi)):
            return gi
    return None


def _finish(c: Circuit, g: Circuit, strategy: str, tried: int):
    res = synthesize(glue(c, g))
    res.metadata.update(strategy=strategy, candidates_tried=tried)
    return AuxiliaryMap(g.m, g.table.copy()), res


def auxiliary_search(c: Circuit, k: int, strategy: str = "exhaustive", seed: int = 0,
                     trials: int = 1000, cap: int | None = None, jobs: int = 1):
    """Find ``g: Σⁿ → Σᵏ`` such that ``c × g`` is feasible.

    Exhaustive search walks candidates in canonical index order and returns
    the first success (``None`` if there is none).  ``strategy="random"``
    draws ``trials`` seeded candidates and raises :class:`SearchExhausted`
    when none works.
    """
    if k == 0:
        res = synthesize(c)
        return (AuxiliaryMap(0, np.zeros((1 << c.n, 0), dtype=np.int8)), res) if res.feasible else None
    total = (1 << k) ** (1 << c.n)
    if strategy == "exhaustive":
        cap = DEFAULT_AUX_CAP if cap is None else cap
        if total > cap:
            raise BudgetExceeded(f"{total} auxiliary maps exceed the cap of {cap}")
        chunk = max(1, min(4096, total // max(1, 4 * jobs)))
        bounds = [(c, k, lo, min(total, lo + chunk)) for lo in range(0, total, chunk)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for hit in pool.map(_aux_chunk, bounds):
                    if hit is not None:
                        pool.shutdown(cancel_futures=True)
                        return _finish(c, Circuit.from_index(c.n, k, hit), strategy, hit + 1)
            return None
        for b in bounds:
            hit = _aux_chunk(b)
            if hit is not None:
                return _finish(c, Circuit.from_index(c.n, k, hit), strategy, hit + 1)
        return None
    if strategy == "random":
        rng = np.random.default_rng(seed)
        for t in range(trials):
            outs = rng.integers(0, 1 << k, size=1 << c.n)
            g = Circuit.from_output_indices(c.n, k, outs)
            if is_feasible(glue(c, g)):
                return _finish(c, g, strategy, t + 1)
        raise SearchExhausted(f"no auxiliary map found in {trials} random trials")
    raise ValueError(f"unknown strategy {strategy!r}")
