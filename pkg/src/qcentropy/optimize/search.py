"""Seeded multi-start compass search.

Every restart draws its start uniformly from [-pi, pi]^n using its own
generator, seeded by ``(seed, restart_index)``, and runs an adaptive coordinate
search: each coordinate carries its own step, which doubles after a successful
move and halves after a failed one. A restart stops once every step is below
``final_step`` or the sweep cap is hit.

Coordinates are local: a problem keeps a per-restart anchor point and the
search moves in coordinates centred on it. After every sweep the accumulated
move is folded into the anchor and the local coordinates reset to zero. For a
plain vector objective the anchor is just the current point; for the unitary
landscape it is the current set of local unitaries, which keeps the coordinate
directions well conditioned wherever the search is.

Restarts are advanced in lockstep so one objective call evaluates a whole
batch. Rows never interact, so each restart follows exactly the trajectory it
would follow alone and the merged result does not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Protocol, Sequence

import numpy as np

EXPAND = 2.0
SHRINK = 0.5


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    objective_tol: float = 1e-9
    initial_step: float = 0.5
    final_step: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.objective_tol > 0 and self.initial_step > 0 and self.final_step > 0):
            raise ValueError("tolerances and step sizes must be positive")
        if self.final_step > self.initial_step:
            raise ValueError("final_step must not exceed initial_step")


class Problem(Protocol):
    """Batched objective over anchored local coordinates.

    ``n_start`` is the length of a start vector; ``anchor`` turns a batch of
    start vectors into anchors. ``n_params`` local coordinates, split into
    ``blocks``, describe moves away from an anchor; ``recenter`` folds a move
    into the anchor without changing the objective.

    ``context(a, x, b)`` may precompute anything that depends only on
    coordinates outside block ``b``; ``evaluate_block`` then scores trial values
    of block ``b``'s coordinates, given as an array of shape
    (variants, rows, block_size).
    """

    n_start: int
    n_params: int
    blocks: Sequence[tuple[int, int]]

    def anchor(self, x0: np.ndarray) -> np.ndarray: ...

    def evaluate(self, a: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def context(self, a: np.ndarray, x: np.ndarray, block: int) -> Any: ...

    def evaluate_block(self, ctx: Any, block: int, block_params: np.ndarray) -> np.ndarray: ...

    def recenter(self, a: np.ndarray, x: np.ndarray) -> np.ndarray: ...


class FunctionProblem:
    """Adapter for a plain batched objective (rows of parameters -> values); anchors are points."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], n_params: int):
        self.fn = fn
        self.n_start = self.n_params = n_params
        self.blocks = [(0, n_params)]

    def anchor(self, x0):
        return np.array(x0, dtype=float)

    def evaluate(self, a, x):
        return np.asarray(self.fn(a + x), dtype=float)

    def context(self, a, x, block):
        return a, a + x

    def evaluate_block(self, ctx, block, block_params):
        a, point = ctx
        lo, hi = self.blocks[block]
        v = block_params.shape[0]
        full = np.broadcast_to(point, (v,) + point.shape).copy()
        full[..., lo:hi] = a[..., lo:hi] + block_params
        return np.asarray(self.fn(full.reshape(-1, self.n_params)), dtype=float).reshape(v, -1)

    def recenter(self, a, x):
        return a + x


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    anchors: np.ndarray  # final points, one anchor per restart
    f: np.ndarray  # (restarts,) final objective values
    iterations: np.ndarray
    converged: np.ndarray

    @property
    def best(self) -> int:
        # argmin returns the first index on ties, i.e. the lowest restart
        return int(np.argmin(self.f))


def start_points(n: int, cfg: OptimizerConfig) -> np.ndarray:
    return np.stack([np.random.default_rng([cfg.seed, r]).uniform(-np.pi, np.pi, n) for r in range(cfg.restarts)])


def compass_search(
    problem: Problem, cfg: OptimizerConfig, pattern: bool = True, anchors: Optional[np.ndarray] = None
) -> SearchOutcome:
    """Minimise ``problem`` from every restart of ``cfg``, or from the given ``anchors`` (one row each)."""
    if not hasattr(problem, "evaluate"):
        raise TypeError("wrap plain callables in FunctionProblem")
    if anchors is None:
        anchors = problem.anchor(start_points(problem.n_start, cfg))
    else:
        anchors = np.array(anchors)
        cfg = replace(cfg, restarts=anchors.shape[0])
    zeros = np.zeros((cfg.restarts, problem.n_params))
    f = np.asarray(problem.evaluate(anchors, zeros), dtype=float)
    step = np.full_like(zeros, cfg.initial_step)
    iterations = np.zeros(cfg.restarts, dtype=int)
    active = np.ones(cfg.restarts, dtype=bool)
    tol = cfg.objective_tol

    for _ in range(cfg.max_iterations):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        aa, fa, sa = anchors[rows], f[rows], step[rows]
        xa = np.zeros((rows.size, problem.n_params))
        for b, (lo, hi) in enumerate(problem.blocks):
            ctx = problem.context(aa, xa, b)
            for j in range(lo, hi):
                trial = np.stack([xa[:, lo:hi], xa[:, lo:hi]])
                trial[0, :, j - lo] += sa[:, j]
                trial[1, :, j - lo] -= sa[:, j]
                fp, fm = problem.evaluate_block(ctx, b, trial)
                take_minus = fm < fp
                fnew = np.where(take_minus, fm, fp)
                # a move must beat the objective tolerance; keeps rounding noise from driving the walk
                ok = fnew < fa - tol
                if np.any(ok):
                    xa[ok, j] += np.where(take_minus[ok], -sa[ok, j], sa[ok, j])
                    fa[ok] = fnew[ok]
                sa[:, j] = np.minimum(np.where(ok, sa[:, j] * EXPAND, sa[:, j] * SHRINK), np.pi)
        if pattern:
            # the sweep started at local zero, so repeating its net move is a probe at 2x
            moved = np.flatnonzero(np.any(xa != 0, axis=1))
            if moved.size:
                probe = 2 * xa[moved]
                fprobe = np.asarray(problem.evaluate(aa[moved], probe), dtype=float)
                ok = fprobe < fa[moved] - tol
                xa[moved[ok]] = probe[ok]
                fa[moved[ok]] = fprobe[ok]
        anchors[rows] = problem.recenter(aa, xa)
        f[rows], step[rows] = fa, sa
        iterations[rows] += 1
        done = sa.max(axis=1) < cfg.final_step
        active[rows[done]] = False

    # re-score final points with the full objective so reported values are path-independent
    f = np.asarray(problem.evaluate(anchors, zeros), dtype=float)
    return SearchOutcome(anchors, f, iterations, ~active)
