"""Single-spin-flip dynamics over output spins with the input pinned.

Greedy descent is the zero-temperature limit: move to the best Hamming
neighbour while that strictly lowers the energy.  Glauber dynamics samples at
finite inverse temperature ``beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import SpinState, index_to_state, state_to_index
from .hamiltonian import Hamiltonian, level_energies

LOCAL_MIN = "local_min"
STEP_CAP = "step_cap"
STEPS_DONE = "steps"


@dataclass
class Trajectory:
    input: SpinState
    states: list = field(default_factory=list)     # output indices
    energies: list = field(default_factory=list)
    terminal_reason: str = LOCAL_MIN
    m: int = 0

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    @property
    def final_state(self) -> SpinState:
        return index_to_state(self.states[-1], self.m)

    def spin_states(self) -> list[SpinState]:
        return [index_to_state(k, self.m) for k in self.states]

    def to_text(self) -> str:
        x = ",".join("%+d" % v for v in self.input)
        lines = [f"# input {x} terminal {self.terminal_reason}", "# step state_index energy"]
        lines += [f"{t} {k} {e!r}" for t, (k, e) in enumerate(zip(self.states, self.energies))]
        return "\n".join(lines) + "\n"


def _check(H: Hamiltonian, x, y0) -> None:
    if len(x) != H.n or len(y0) != H.m:
        raise ValueError(f"state shapes ({len(x)}, {len(y0)}) do not match Hamiltonian ({H.n}, {H.m})")


def greedy_descend(H: Hamiltonian, x, y0, step_cap: int | None = None) -> Trajectory:
    """Best-improvement descent; ties go to the lowest output index.

    Stops at the first state with no strictly lower neighbour.  At most
    ``2^m - 1`` moves are possible, so the default cap never binds; with a
    smaller ``step_cap`` the trajectory may end with reason ``"step_cap"``.
    """
    _check(H, x, y0)
    E = level_energies(H, x)
    cap = (1 << H.m) if step_cap is None else step_cap
    y = state_to_index(y0)
    traj = Trajectory(tuple(int(v) for v in x), [y], [float(E[y])], LOCAL_MIN, H.m)
    while True:
        best = min((y ^ (1 << i) for i in range(H.m)), key=lambda z: (E[z], z), default=y)
        if not E[best] < E[y]:
            return traj
        if traj.steps >= cap:
            traj.terminal_reason = STEP_CAP
            return traj
        y = best
        traj.states.append(y)
        traj.energies.append(float(E[y]))


@dataclass
class GlauberResult:
    trajectory: Trajectory
    occupancy: np.ndarray          # fraction of recorded steps in each output index
    target: int | None
    target_fraction: float
    flips_proposed: np.ndarray     # (2^m, m) proposals from state k at spin i
    flips_accepted: np.ndarray


def glauber_sample(H: Hamiltonian, x, y0, beta: float, steps: int, seed: int = 0,
                   target=None, burn_in: int = 0) -> GlauberResult:
    """Random-site Glauber chain: pick a uniform spin, flip with probability
    ``1 / (1 + exp(beta * ΔE))``.

    Occupancy counts the state after each of the ``steps - burn_in`` recorded
    updates.  ``target`` (an output state) sets ``target_fraction``.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    _check(H, x, y0)
    E = level_energies(H, x)
    rng = np.random.default_rng(seed)
    sites = rng.integers(0, H.m, size=steps)
    draws = rng.random(steps)
    size = 1 << H.m
    counts = np.zeros(size, dtype=np.int64)
    proposed = np.zeros((size, H.m), dtype=np.int64)
    accepted = np.zeros((size, H.m), dtype=np.int64)
    y = state_to_index(y0)
    states, energies = [y], [float(E[y])]
    for t in range(steps):
        i = int(sites[t])
        z = y ^ (1 << i)
        dE = E[z] - E[y]
        # logistic rule written to avoid overflow for large beta * dE
        arg = beta * dE
        p = 1.0 / (1.0 + np.exp(arg)) if arg < 700 else 0.0
        proposed[y, i] += 1
        if draws[t] < p:
            accepted[y, i] += 1
            y = z
        states.append(y)
        energies.append(float(E[y]))
        if t >= burn_in:
            counts[y] += 1
    recorded = max(1, steps - burn_in)
    occ = counts / recorded
    tk = None if target is None else state_to_index(target)
    frac = float(occ[tk]) if tk is not None else float("nan")
    traj = Trajectory(tuple(int(v) for v in x), states, energies, STEPS_DONE, H.m)
    return GlauberResult(traj, occ, tk, frac, proposed, accepted)
