"""Default search method: LHS initialization, GA generations, and local
pattern-search growth steps around selected population members.

Each generation the solver picks centers (the best member plus random draws
from the Pareto front of low objective versus high nearest-neighbor distance),
polls compass points at each center's current step size, and breeds children
by tournament selection, per-variable crossover, and encoded-space mutation.
A center moves to its best poll only under sufficient decrease
(f_new < f_old - alpha * step^2); otherwise its step halves. Elites and
centers persist across generations; everyone else is replaced by the best
children, whose steps reset to the initial value.

Foreign records arriving through cross-solver sharing are adopted whenever
they beat the current worst member.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..cache import CacheKey, canonical_key
from ..manager import Solver
from ..sampling import SampleRequest, lhs_sample
from ..space import CategoricalVariable, Point, SearchSpace, decode, encode, encoded_distance
from ..trials import TrialRecord


@dataclass(frozen=True)
class HybridConfig:
    population: int = 10
    centers: int = 2
    delta_init: float = 0.1
    alpha: float = 1e-4
    crossover_prob: float = 0.8
    mutation_prob: float = 0.2
    tournament: int = 2
    elites: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.centers < self.population:
            raise ValueError("need 0 <= centers < population")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.delta_init <= 0:
            raise ValueError("delta_init must be positive")
        if not 0 <= self.elites < self.population:
            raise ValueError("need 0 <= elites < population")
        if self.tournament < 1:
            raise ValueError("tournament size must be >= 1")


@dataclass(eq=False)
class Member:
    point: Point
    encoded: np.ndarray
    objective: float
    delta: float
    eval_id: int

    def rank_key(self) -> tuple[float, int]:
        return (self.objective, self.eval_id)


@dataclass(frozen=True)
class GrowthEvent:
    """One pattern-search decision, kept for conformance instrumentation."""

    accepted: bool
    f_center: float
    f_best_poll: float | None
    delta_before: float
    delta_after: float
    alpha: float


@dataclass
class _Generation:
    centers: list[Member]
    poll_keys: list[list[CacheKey]]
    children_keys: list[CacheKey]
    asked_keys: set[CacheKey] = field(default_factory=set)


def nearest_neighbor_distances(space: SearchSpace, members: Sequence[Member]) -> list[float]:
    dists = []
    for i, m in enumerate(members):
        best = np.inf
        for j, other in enumerate(members):
            if i != j:
                best = min(best, encoded_distance(space, m.encoded, other.encoded))
        dists.append(float(best))
    return dists


def pareto_front(objectives: Sequence[float], nn_dists: Sequence[float]) -> list[int]:
    """Nondominated members under (minimize objective, maximize nn distance)."""
    front = []
    for i in range(len(objectives)):
        dominated = False
        for j in range(len(objectives)):
            if j == i:
                continue
            if (
                objectives[j] <= objectives[i]
                and nn_dists[j] >= nn_dists[i]
                and (objectives[j] < objectives[i] or nn_dists[j] > nn_dists[i])
            ):
                dominated = True
                break
        if not dominated:
            front.append(i)
    return front


def select_centers(
    space: SearchSpace,
    members: Sequence[Member],
    n_centers: int,
    rng: np.random.Generator,
) -> list[Member]:
    """Best member first, then uniform draws (without replacement) from the
    Pareto front of (objective, nearest-neighbor distance); falls back to the
    rest of the population if the front runs out."""
    if n_centers <= 0 or not members:
        return []
    members = list(members)
    best = min(members, key=Member.rank_key)
    chosen = [best]
    if len(chosen) < n_centers:
        nn = nearest_neighbor_distances(space, members)
        front = [members[i] for i in pareto_front([m.objective for m in members], nn)]
        candidates = [m for m in front if m is not best]
        while len(chosen) < n_centers and candidates:
            pick = int(rng.integers(0, len(candidates)))
            chosen.append(candidates.pop(pick))
        leftovers = [m for m in members if m not in chosen]
        while len(chosen) < n_centers and leftovers:
            pick = int(rng.integers(0, len(leftovers)))
            chosen.append(leftovers.pop(pick))
    return chosen


def poll_points(space: SearchSpace, member: Member) -> list[Point]:
    """Compass points at +/- delta along each numeric channel, snapped into
    bounds; points that snap onto the center are dropped."""
    center_key = canonical_key(space, member.point)
    polls = []
    for i in space.numeric_indices:
        for sign in (+1.0, -1.0):
            coords = member.encoded.copy()
            coords[i] = coords[i] + sign * member.delta
            candidate = decode(space, coords)  # decode snaps out-of-bounds coords
            if canonical_key(space, candidate) != center_key:
                polls.append(candidate)
    return polls


def growth_update(
    space: SearchSpace,
    center: Member,
    poll_records: Sequence[TrialRecord],
    alpha: float,
) -> GrowthEvent:
    """Pattern-search decision for one center: move to the best poll under
    sufficient decrease (f_best < f_center - alpha * delta^2), else halve the
    step. An empty poll set counts as a failure. Mutates the member; the step
    is kept on a move and halved otherwise."""
    delta = center.delta
    f_old = center.objective
    best = min(poll_records, key=lambda r: (r.objective, r.eval_id), default=None)
    if best is not None and best.objective < f_old - alpha * delta * delta:
        center.point = best.point
        center.encoded = encode(space, best.point)
        center.objective = best.objective
        center.eval_id = best.eval_id
        return GrowthEvent(True, f_old, best.objective, delta, delta, alpha)
    center.delta = delta / 2
    return GrowthEvent(
        False,
        f_old,
        best.objective if best is not None else None,
        delta,
        center.delta,
        alpha,
    )


def make_children(
    space: SearchSpace,
    members: Sequence[Member],
    count: int,
    config: HybridConfig,
    rng: np.random.Generator,
) -> list[Point]:
    """Tournament parents, per-variable uniform crossover, encoded-space
    mutation (Gaussian sigma 0.1 for numeric channels, resample-other-level
    for categorical ones)."""

    def tournament() -> Member:
        draws = rng.integers(0, len(members), size=config.tournament)
        return min((members[i] for i in draws), key=Member.rank_key)

    children = []
    for _ in range(count):
        p1, p2 = tournament(), tournament()
        enc = p1.encoded.copy()
        for ch in range(len(space.variables)):
            if rng.random() < config.crossover_prob and rng.random() < 0.5:
                enc[ch] = p2.encoded[ch]
        for ch, var in enumerate(space.variables):
            if rng.random() < config.mutation_prob:
                if isinstance(var, CategoricalVariable):
                    levels = len(var.levels)
                    if levels > 1:
                        current = int(round(enc[ch]))
                        others = [i for i in range(levels) if i != current]
                        enc[ch] = float(others[int(rng.integers(0, len(others)))])
                else:
                    enc[ch] = float(np.clip(enc[ch] + rng.normal(0.0, 0.1), 0.0, 1.0))
        children.append(decode(space, enc))
    return children


class HybridSearch(Solver):
    def __init__(self, space: SearchSpace, seed: int, config: HybridConfig | None = None):
        self._space = space
        self.config = config or HybridConfig()
        self._rng = np.random.default_rng(seed)
        self.population: list[Member] = []
        self.growth_log: list[GrowthEvent] = []
        self._init_keys: list[CacheKey] | None = None
        self._generation: _Generation | None = None

    # -- ask ------------------------------------------------------------------

    def ask(self, max_points: int) -> list[Point]:
        if max_points <= 0:
            return []
        if not self.population and self._init_keys is None:
            n = min(self.config.population, max_points)
            points = lhs_sample(self._space, SampleRequest(n, int(self._rng.integers(0, 2**63))))
            self._init_keys = [canonical_key(self._space, p) for p in points]
            return points
        return self._ask_generation(max_points)

    def _ask_generation(self, max_points: int) -> list[Point]:
        cfg = self.config
        centers = select_centers(self._space, self.population, min(cfg.centers, len(self.population)), self._rng)
        children = make_children(self._space, self.population, cfg.population - cfg.elites, cfg, self._rng)

        candidates: list[tuple[Point, CacheKey, str, int]] = []
        for ci, center in enumerate(centers):
            for p in poll_points(self._space, center):
                candidates.append((p, canonical_key(self._space, p), "poll", ci))
        for p in children:
            candidates.append((p, canonical_key(self._space, p), "child", -1))

        gen = _Generation(centers=centers, poll_keys=[[] for _ in centers], children_keys=[])
        points: list[Point] = []
        served: set[CacheKey] = set()
        for point, key, role, ci in candidates:
            if len(points) >= max_points and key not in served:
                continue
            if key not in served:
                served.add(key)
                points.append(point)
            if role == "poll":
                gen.poll_keys[ci].append(key)
            else:
                gen.children_keys.append(key)
        gen.asked_keys = served
        self._generation = gen
        return points

    # -- tell -----------------------------------------------------------------

    def tell(self, records: Sequence[TrialRecord]) -> None:
        recmap: dict[CacheKey, TrialRecord] = {}
        for rec in records:
            recmap.setdefault(canonical_key(self._space, rec.point), rec)
        if self._init_keys is not None and not self.population:
            self._absorb_init(recmap)
        elif self._generation is not None:
            self._absorb_generation(recmap)
        else:
            # nothing asked this round; shared foreign records can still help
            self._adopt_foreign(recmap.values())

    def _member_from(self, rec: TrialRecord) -> Member:
        return Member(
            point=rec.point,
            encoded=encode(self._space, rec.point),
            objective=rec.objective,
            delta=self.config.delta_init,
            eval_id=rec.eval_id,
        )

    def _absorb_init(self, recmap: dict[CacheKey, TrialRecord]) -> None:
        assert self._init_keys is not None
        own = set(self._init_keys)
        for key in self._init_keys:
            if key in recmap:
                self.population.append(self._member_from(recmap[key]))
        self._adopt_foreign(rec for key, rec in recmap.items() if key not in own)

    def _absorb_generation(self, recmap: dict[CacheKey, TrialRecord]) -> None:
        gen = self._generation
        assert gen is not None
        self._generation = None
        cfg = self.config

        for center, keys in zip(gen.centers, gen.poll_keys):
            event = growth_update(
                self._space, center, [recmap[k] for k in keys if k in recmap], cfg.alpha
            )
            self.growth_log.append(event)

        keep: list[Member] = list(gen.centers)
        for elite in sorted(self.population, key=Member.rank_key)[: cfg.elites]:
            if elite not in keep:
                keep.append(elite)
        keep = keep[: cfg.population]  # centers + elites can overflow tiny populations

        child_records: dict[CacheKey, TrialRecord] = {}
        for key in gen.children_keys:
            if key in recmap:
                child_records.setdefault(key, recmap[key])
        fills = [
            self._member_from(rec)
            for rec in sorted(child_records.values(), key=lambda r: (r.objective, r.eval_id))
        ]
        slots = max(cfg.population - len(keep), 0)
        new_pop = keep + fills[:slots]
        if len(new_pop) < cfg.population:
            survivors = [m for m in sorted(self.population, key=Member.rank_key) if m not in new_pop]
            new_pop += survivors[: cfg.population - len(new_pop)]
        self.population = new_pop

        self._adopt_foreign(rec for key, rec in recmap.items() if key not in gen.asked_keys)

    def _adopt_foreign(self, records) -> None:
        """A shared record better than the current worst member replaces it."""
        if not self.population:
            return
        member_keys = {canonical_key(self._space, m.point) for m in self.population}
        for rec in sorted(records, key=lambda r: r.eval_id):
            key = canonical_key(self._space, rec.point)
            if key in member_keys:
                continue
            worst_i = max(range(len(self.population)), key=lambda i: self.population[i].rank_key())
            if rec.objective < self.population[worst_i].objective:
                member_keys.discard(canonical_key(self._space, self.population[worst_i].point))
                self.population[worst_i] = self._member_from(rec)
                member_keys.add(key)

    def is_done(self) -> bool:
        return False
