"""Variable-shape simplex search over the unit cube.

SimplexSearch is a resumable state machine: pending() lists the points whose
values are needed next, advance() feeds them back. That single implementation
is driven three ways: synchronously by nm_minimize(), through the ask/tell
contract by NelderMeadSolver, and per-rectangle by the DIRECT hybrid.

Candidates are clipped to [0, 1]^d before evaluation. A candidate that lands
exactly on an existing vertex after clipping is not evaluated; it is treated
as arbitrarily bad, which pushes the iteration toward an inside contraction
(and a failed contraction toward a shrink).
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..cache import CacheKey, canonical_key
from ..manager import Solver
from ..sampling import SampleRequest, lhs_sample
from ..space import Point, SearchSpace, decode, encode
from ..trials import TrialRecord

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5

DEGENERATE_VOLUME = 1e-12
REINIT_EDGE = 0.05


def _axis_simplex(x0: np.ndarray, edge: float) -> list[np.ndarray]:
    """x0 plus one offset vertex per axis, stepping away from the nearer wall."""
    vertices = [x0.copy()]
    for i in range(len(x0)):
        v = x0.copy()
        step = edge if x0[i] + edge <= 1.0 else -edge
        v[i] = min(max(v[i] + step, 0.0), 1.0)
        vertices.append(v)
    return vertices


def _volume(vertices: list[np.ndarray]) -> float:
    m = len(vertices) - 1
    if m == 0:
        return 1.0
    basis = np.stack([v - vertices[0] for v in vertices[1:]], axis=0)
    return abs(float(np.linalg.det(basis))) / math.factorial(m)


def _is_degenerate(vertices: list[np.ndarray]) -> bool:
    """Shape degeneracy: volume vanishing relative to the simplex's own scale.

    A uniformly shrunk simplex is converging, not degenerate, so the volume is
    normalized by the longest edge length before comparing to the threshold."""
    scale = max(
        (float(np.max(np.abs(v - vertices[0]))) for v in vertices[1:]), default=0.0
    )
    if scale == 0.0:
        return True
    m = len(vertices) - 1
    return _volume(vertices) / scale**m < DEGENERATE_VOLUME


class SimplexSearch:
    def __init__(
        self,
        x0: np.ndarray | None = None,
        edge: float = 0.1,
        vertices: Sequence[np.ndarray] | None = None,
    ):
        if vertices is not None:
            self._init_vertices = [np.asarray(v, dtype=float) for v in vertices]
        else:
            if x0 is None:
                raise ValueError("need x0 or explicit vertices")
            self._init_vertices = _axis_simplex(np.asarray(x0, dtype=float), edge)
        self.iterations = 0
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf
        self._verts: list[np.ndarray] = []
        self._fs: list[float] = []
        self._gen = self._main()
        self._pending: list[np.ndarray] = next(self._gen)

    def pending(self) -> list[np.ndarray]:
        return [p.copy() for p in self._pending]

    def advance(self, values: Sequence[float]) -> None:
        if len(values) != len(self._pending):
            raise ValueError(f"expected {len(self._pending)} values, got {len(values)}")
        for x, f in zip(self._pending, values):
            if f < self.best_f:
                self.best_f = float(f)
                self.best_x = x.copy()
        self._pending = self._gen.send([float(f) for f in values])

    def value_spread(self) -> float:
        if not self._fs:
            return math.inf
        return max(self._fs) - min(self._fs)

    # -- internals ---------------------------------------------------------

    def _collides(self, x: np.ndarray) -> bool:
        return any(float(np.max(np.abs(x - v))) < 1e-15 for v in self._verts)

    def _sort(self) -> None:
        order = sorted(range(len(self._fs)), key=lambda i: self._fs[i])
        self._verts = [self._verts[i] for i in order]
        self._fs = [self._fs[i] for i in order]

    def _main(self):
        self._verts = [v.copy() for v in self._init_vertices]
        self._fs = list((yield self._verts))
        while True:
            self._sort()
            if _is_degenerate(self._verts):
                best = self._verts[0]
                rebuilt = _axis_simplex(best, REINIT_EDGE)
                self._verts = [best.copy()] + rebuilt[1:]
                new_fs = yield rebuilt[1:]
                self._fs = [self._fs[0]] + list(new_fs)
                self._sort()
            self.iterations += 1
            worst = self._verts[-1]
            f_worst = self._fs[-1]
            centroid = np.mean(self._verts[:-1], axis=0)

            xr = np.clip(centroid + REFLECT * (centroid - worst), 0.0, 1.0)
            fr = math.inf if self._collides(xr) else (yield [xr])[0]

            if fr < self._fs[0]:
                xe = np.clip(centroid + EXPAND * (centroid - worst), 0.0, 1.0)
                fe = math.inf if self._collides(xe) else (yield [xe])[0]
                if fe < fr:
                    self._verts[-1], self._fs[-1] = xe, fe
                else:
                    self._verts[-1], self._fs[-1] = xr, fr
            elif fr < self._fs[-2]:
                self._verts[-1], self._fs[-1] = xr, fr
            else:
                if fr < f_worst:  # outside contraction
                    xc = np.clip(centroid + CONTRACT * (xr - centroid), 0.0, 1.0)
                    fc = math.inf if self._collides(xc) else (yield [xc])[0]
                    accepted = fc <= fr
                else:  # inside contraction
                    xc = np.clip(centroid - CONTRACT * (centroid - worst), 0.0, 1.0)
                    fc = math.inf if self._collides(xc) else (yield [xc])[0]
                    accepted = fc < f_worst
                if accepted:
                    self._verts[-1], self._fs[-1] = xc, fc
                else:  # shrink toward the best vertex
                    best = self._verts[0]
                    shrunk = [
                        np.clip(best + SHRINK * (v - best), 0.0, 1.0) for v in self._verts[1:]
                    ]
                    new_fs = yield shrunk
                    self._verts = [best] + shrunk
                    self._fs = [self._fs[0]] + list(new_fs)


def nm_minimize(
    fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    edge: float = 0.1,
    max_iters: int = 200,
    f_spread_tol: float = 0.0,
) -> tuple[np.ndarray, float, int]:
    """Drive a SimplexSearch synchronously; returns (best_x, best_f, iterations)."""
    search = SimplexSearch(np.asarray(x0, dtype=float), edge=edge)
    while search.iterations < max_iters:
        search.advance([fn(x) for x in search.pending()])
        if search.iterations > 0 and search.value_spread() <= f_spread_tol:
            break
    return search.best_x, search.best_f, search.iterations


class NelderMeadSolver(Solver):
    """Simplex search over the continuous channels of a space; integer and
    categorical channels stay frozen at the (snapped) start point."""

    def __init__(
        self,
        space: SearchSpace,
        seed: int,
        edge: float = 0.1,
        max_iters: int | None = None,
    ):
        self._space = space
        self._cont = space.continuous_indices
        if not self._cont:
            raise ValueError("Nelder-Mead needs at least one continuous variable")
        self._max_iters = max_iters
        rng = np.random.default_rng(seed)
        start = lhs_sample(space, SampleRequest(1, int(rng.integers(0, 2**63))))[0]
        self._template = encode(space, start)
        self._search = SimplexSearch(self._template[self._cont], edge=edge)
        self._slots: list[tuple[CacheKey, Point]] = []  # one slot per pending simplex point
        self._values: list[float | None] = []

    def _to_point(self, u: np.ndarray) -> Point:
        merged = self._template.copy()
        merged[self._cont] = u
        return decode(self._space, merged)

    def _prepare_slots(self) -> None:
        points = [self._to_point(u) for u in self._search.pending()]
        self._slots = [(canonical_key(self._space, p), p) for p in points]
        self._values = [None] * len(points)

    def ask(self, max_points: int) -> list[Point]:
        if not self._slots:
            self._prepare_slots()
        unserved = [p for (_, p), v in zip(self._slots, self._values) if v is None]
        return unserved[:max_points]

    def tell(self, records: Sequence[TrialRecord]) -> None:
        by_key = {canonical_key(self._space, r.point): r.objective for r in records}
        for i, (key, _) in enumerate(self._slots):
            if self._values[i] is None and key in by_key:
                self._values[i] = by_key[key]
        if self._slots and all(v is not None for v in self._values):
            self._search.advance(self._values)  # type: ignore[arg-type]
            self._slots = []
            self._values = []

    def is_done(self) -> bool:
        return self._max_iters is not None and self._search.iterations >= self._max_iters
