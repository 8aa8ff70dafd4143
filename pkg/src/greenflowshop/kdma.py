"""Knowledge-driven memetic algorithm (KDMA) for the bi-objective problem.

The search minimizes (makespan, total carbon) with four problem-knowledge
strategies layered on a generational evolutionary loop:

* collaborative initialization: one makespan-greedy member built by NEH-style
  insertion over all factories, one carbon-greedy member built by power-sorted
  minimum-emission insertion, the rest random;
* tournament selection, PMX crossover on the flattened permutation, and swap
  mutation as the variation step;
* local search around the key factory (the one attaining the makespan) with
  four moves: best-position reinsertion and swap inside the key factory, and
  swap/reinsertion between the key factory and a non-key factory;
* idle-machine shutdown during evaluation (the carbon reduction flag).

Survivor selection is non-dominated sorting with crowding distance, and an
external archive keeps every non-dominated point ever evaluated.  A run is
fully deterministic per seed: the seed is split into one stream for
initialization and one for the generational loop, so disabling the
initialization strategy leaves all later randomness unchanged.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterator, Sequence

from .encoding import Genotype, flatten, random_genotype, unflatten
from .model import Instance, ObjectivePoint, evaluate, factory_makespan
from .seeds import derive_seed

LOCAL_SEARCH_OPERATORS = ("L1", "L2", "L3", "L4")


@dataclass(frozen=True)
class KdmaParams:
    """Search configuration; defaults follow the calibrated settings."""

    population_size: int = 100
    crossover_prob: float = 0.9
    mutation_prob: float = 0.2
    tournament_size: int = 2
    max_evaluations: int = 25_000
    local_search_fraction: float = 0.1
    use_collab_init: bool = True
    use_local_search: bool = True
    use_carbon_reduction: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_evaluations < self.population_size:
            raise ValueError("max_evaluations must be >= population_size")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if not 0.0 <= self.local_search_fraction <= 1.0:
            raise ValueError("local_search_fraction must be in [0, 1]")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass
class Individual:
    """A population member with its objectives and attached fitness."""

    genotype: Genotype
    point: ObjectivePoint
    rank: int = 0
    crowding: float = 0.0


@dataclass
class RunStats:
    evaluations: int
    generations: int
    offon_cycles: int


def dominates(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """Weak dominance with at least one strict improvement (minimization)."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


class ParetoArchive:
    """Mutually non-dominated (genotype, point) pairs, unique by objectives.

    Entries stay sorted by ascending makespan (hence strictly descending
    carbon), which makes insertion a bisect plus a local sweep.
    """

    def __init__(self) -> None:
        self._keys: list[int] = []
        self._entries: list[tuple[Genotype, ObjectivePoint]] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[Genotype, ObjectivePoint]]:
        return iter(self._entries)

    @property
    def entries(self) -> list[tuple[Genotype, ObjectivePoint]]:
        return list(self._entries)

    def points(self) -> list[ObjectivePoint]:
        return [point for _, point in self._entries]

    def objectives(self) -> list[tuple[float, float]]:
        return [(point.makespan, point.ce_total) for _, point in self._entries]

    def add(self, genotype: Genotype, point: ObjectivePoint) -> bool:
        """Insert unless dominated or an objective duplicate; prune the rest."""
        ms, ce = point.makespan, point.ce_total
        keys = self._keys
        entries = self._entries
        i = bisect_left(keys, ms)
        if i > 0 and entries[i - 1][1].ce_total <= ce:
            return False
        if i < len(keys) and keys[i] == ms and entries[i][1].ce_total <= ce:
            return False
        j = i
        while j < len(keys) and entries[j][1].ce_total >= ce:
            j += 1
        if j > i:
            del keys[i:j]
            del entries[i:j]
        keys.insert(i, ms)
        entries.insert(i, (genotype, point))
        return True


def fast_nondominated_sort(points: Sequence[tuple[float, float]]) -> list[list[int]]:
    """Index fronts by non-domination rank, rank 0 first.

    Two-objective staircase sweep: after a lexicographic sort, a point's
    front is the first one whose current tail does not dominate it; each
    front's tail carries the smallest second objective seen in that front,
    so checking the tail is equivalent to checking every member.
    """
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1], i))
    fronts: list[list[int]] = []
    tails: list[tuple[float, float]] = []
    for i in order:
        f1, f2 = points[i]
        for r, (t1, t2) in enumerate(tails):
            if t2 < f2 or (t2 == f2 and t1 < f1):
                continue
            fronts[r].append(i)
            tails[r] = (f1, f2)
            break
        else:
            fronts.append([i])
            tails.append((f1, f2))
    return fronts


def crowding_distances(
    points: Sequence[tuple[float, float]], front: Sequence[int]
) -> dict[int, float]:
    """Crowding distance of each front member; extremes get infinity."""
    distances = {i: 0.0 for i in front}
    size = len(front)
    if size == 0:
        return distances
    for axis in (0, 1):
        ordered = sorted(front, key=lambda i: (points[i][axis], i))
        distances[ordered[0]] = math.inf
        distances[ordered[-1]] = math.inf
        lo = points[ordered[0]][axis]
        hi = points[ordered[-1]][axis]
        if hi == lo:
            continue
        scale = hi - lo
        for t in range(1, size - 1):
            i = ordered[t]
            if distances[i] != math.inf:
                distances[i] += (points[ordered[t + 1]][axis] - points[ordered[t - 1]][axis]) / scale
    return distances


def assign_fitness(members: Sequence[Individual]) -> list[list[int]]:
    """Attach (rank, crowding) to every member; returns the index fronts."""
    points = [(m.point.makespan, m.point.ce_total) for m in members]
    fronts = fast_nondominated_sort(points)
    for rank, front in enumerate(fronts):
        distances = crowding_distances(points, front)
        for i in front:
            members[i].rank = rank
            members[i].crowding = distances[i]
    return fronts


def tournament_select(population: Sequence[Individual], k: int, rng: Random) -> Individual:
    """Best of k uniform draws with replacement; earlier draw wins ties."""
    best = population[rng.randrange(len(population))]
    for _ in range(k - 1):
        challenger = population[rng.randrange(len(population))]
        if challenger.rank < best.rank or (
            challenger.rank == best.rank and challenger.crowding > best.crowding
        ):
            best = challenger
    return best


def environmental_selection(members: Sequence[Individual], size: int) -> list[Individual]:
    """Survivors by ascending rank, boundary rank split by crowding.

    Sorting is stable throughout, so the outcome is deterministic in the
    input order.  Members keep the rank/crowding computed on the merged set.
    """
    fronts = assign_fitness(members)
    survivors: list[Individual] = []
    for front in fronts:
        if len(survivors) + len(front) <= size:
            survivors.extend(members[i] for i in front)
            if len(survivors) == size:
                break
        else:
            remaining = size - len(survivors)
            by_crowding = sorted(front, key=lambda i: -members[i].crowding)
            survivors.extend(members[i] for i in by_crowding[:remaining])
            break
    return survivors


def _job_power_totals(instance: Instance) -> list[float]:
    return [sum(row) for row in instance.proc_power]


def _job_ce_constants(instance: Instance) -> list[float]:
    """Per-job running+auxiliary carbon, for scoring partial assignments."""
    cached = instance.__dict__.get("_job_ce")
    if cached is None:
        elec = instance.elec_coeff
        aux = instance.aux_coeff
        cached = []
        for p_row, pp_row in zip(instance.proc_time, instance.proc_power):
            total = 0.0
            for j, p in enumerate(p_row):
                total += p * pp_row[j] * elec
                total += p * aux[j]
            cached.append(total)
        object.__setattr__(instance, "_job_ce", cached)
    return cached


def _others_makespan(makespans: Sequence[int], skip: int) -> int:
    value = 0
    for f, ms in enumerate(makespans):
        if f != skip and ms > value:
            value = ms
    return value


def mneh_init(instance: Instance, rng: Random) -> Genotype:
    """Makespan-greedy construction by exhaustive insertion.

    Jobs are taken in a random order; each is tried at every position of
    every factory and kept where the overall makespan is smallest.  Ties go
    to the lower factory index, then the lower position.
    """
    order = list(range(1, instance.num_jobs + 1))
    rng.shuffle(order)
    factories: list[list[int]] = [[] for _ in range(instance.num_factories)]
    makespans = [0] * instance.num_factories
    for job in order:
        best: tuple[int, int, int, int] | None = None
        for f, seq in enumerate(factories):
            others = _others_makespan(makespans, f)
            for pos in range(len(seq) + 1):
                candidate = seq[:pos] + [job] + seq[pos:]
                fac_ms = factory_makespan(instance, candidate)
                total = fac_ms if fac_ms > others else others
                if best is None or total < best[0]:
                    best = (total, f, pos, fac_ms)
        assert best is not None
        _, f, pos, fac_ms = best
        factories[f].insert(pos, job)
        makespans[f] = fac_ms
    return Genotype(tuple(tuple(seq) for seq in factories))


def min_carbon_init(instance: Instance, reduction_enabled: bool = False) -> Genotype:
    """Carbon-greedy construction; deterministic.

    Jobs are placed in non-ascending order of total rated processing power
    (ties: lower job index first), each at the factory/position giving the
    partial assignment the least total carbon.  Ties as in :func:`mneh_init`.
    """
    from .model import _sweep

    totals = _job_power_totals(instance)
    order = sorted(range(1, instance.num_jobs + 1), key=lambda job: (-totals[job - 1], job))
    job_ce = _job_ce_constants(instance)
    factories: list[list[int]] = [[] for _ in range(instance.num_factories)]
    placed_ce = 0.0
    for job in order:
        placed_ce += job_ce[job - 1]
        best: tuple[float, int, int] | None = None
        for f, seq in enumerate(factories):
            for pos in range(len(seq) + 1):
                factories[f] = seq[:pos] + [job] + seq[pos:]
                _, idle, _ = _sweep(instance, factories, reduction_enabled)
                factories[f] = seq
                total = placed_ce + idle
                if best is None or total < best[0]:
                    best = (total, f, pos)
        assert best is not None
        _, f, pos = best
        factories[f].insert(pos, job)
    return Genotype(tuple(tuple(seq) for seq in factories))


def init_population(instance: Instance, params: KdmaParams, rng: Random) -> list[Genotype]:
    """Collaborative initialization, or all-random when the flag is off."""
    n, num_factories = instance.num_jobs, instance.num_factories
    if not params.use_collab_init:
        return [random_genotype(n, num_factories, rng) for _ in range(params.population_size)]
    members = [
        mneh_init(instance, rng),
        min_carbon_init(instance, params.use_carbon_reduction),
    ]
    members.extend(
        random_genotype(n, num_factories, rng) for _ in range(params.population_size - 2)
    )
    return members


def pmx_permutations(
    perm1: Sequence[int], perm2: Sequence[int], a: int, b: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """PMX children of two permutations with cut positions 1 <= a <= b <= n.

    The segment [a..b] is swapped; a conflicting gene outside the segment
    follows the segment's mapping chain until a free gene is reached.
    """
    if not 1 <= a <= b <= len(perm1):
        raise ValueError(f"cut positions ({a}, {b}) out of range for n={len(perm1)}")
    lo, hi = a - 1, b
    return (
        _pmx_child(perm1, perm2, lo, hi),
        _pmx_child(perm2, perm1, lo, hi),
    )


def _pmx_child(
    base: Sequence[int], donor: Sequence[int], lo: int, hi: int
) -> tuple[int, ...]:
    child = list(base)
    child[lo:hi] = donor[lo:hi]
    segment_pos = {gene: idx for idx, gene in enumerate(donor[lo:hi], start=lo)}
    for idx in range(len(base)):
        if lo <= idx < hi:
            continue
        gene = base[idx]
        while gene in segment_pos:
            gene = base[segment_pos[gene]]
        child[idx] = gene
    return tuple(child)


def pmx_crossover(parent1: Genotype, parent2: Genotype, rng: Random) -> tuple[Genotype, Genotype]:
    """PMX on the flattened permutations; both children take parent 1's sizes.

    Factory reassignment is left to the between-factory local search moves,
    keeping this operator a pure permutation recombination.
    """
    perm1, sizes = flatten(parent1)
    perm2, _ = flatten(parent2)
    n = len(perm1)
    a = rng.randint(1, n)
    b = rng.randint(1, n)
    if a > b:
        a, b = b, a
    child1, child2 = pmx_permutations(perm1, perm2, a, b)
    return unflatten(child1, sizes), unflatten(child2, sizes)


def swap_mutation(genotype: Genotype, rng: Random) -> Genotype:
    """Swap two distinct flattened positions; identity when n == 1."""
    perm, sizes = flatten(genotype)
    n = len(perm)
    if n < 2:
        return genotype
    i = rng.randrange(n)
    j = rng.randrange(n - 1)
    if j >= i:
        j += 1
    jobs = list(perm)
    jobs[i], jobs[j] = jobs[j], jobs[i]
    return unflatten(jobs, sizes)


def key_factory(instance: Instance, genotype: Genotype) -> int:
    """0-based index of the factory attaining the makespan; ties -> lowest."""
    best_f = 0
    best_ms = -1
    for f, seq in enumerate(genotype.factories):
        ms = factory_makespan(instance, seq)
        if ms > best_ms:
            best_f, best_ms = f, ms
    return best_f


def local_search_move(
    instance: Instance, genotype: Genotype, operator: str, rng: Random
) -> tuple[Genotype, bool]:
    """Apply one key-factory move; (result, applied).

    Inapplicable moves (single factory for L3/L4, too-small key factory,
    an empty drawn partner factory) return the genotype unchanged with
    ``applied=False``.
    """
    if operator not in LOCAL_SEARCH_OPERATORS:
        raise ValueError(f"unknown local search operator {operator!r}")
    factories = [list(seq) for seq in genotype.factories]
    kf = key_factory(instance, genotype)
    key_seq = factories[kf]
    num_factories = len(factories)

    if operator == "L1":
        if not key_seq:
            return genotype, False
        job = key_seq.pop(rng.randrange(len(key_seq)))
        others = 0
        for f, seq in enumerate(factories):
            if f != kf:
                ms = factory_makespan(instance, seq)
                if ms > others:
                    others = ms
        best_pos = 0
        best_total = None
        for pos in range(len(key_seq) + 1):
            candidate = key_seq[:pos] + [job] + key_seq[pos:]
            fac_ms = factory_makespan(instance, candidate)
            total = fac_ms if fac_ms > others else others
            if best_total is None or total < best_total:
                best_total = total
                best_pos = pos
        key_seq.insert(best_pos, job)
    elif operator == "L2":
        if len(key_seq) < 2:
            return genotype, False
        i = rng.randrange(len(key_seq))
        j = rng.randrange(len(key_seq) - 1)
        if j >= i:
            j += 1
        key_seq[i], key_seq[j] = key_seq[j], key_seq[i]
    elif operator == "L3":
        if num_factories < 2 or not key_seq:
            return genotype, False
        partner = _draw_non_key(num_factories, kf, rng)
        partner_seq = factories[partner]
        if not partner_seq:
            return genotype, False
        i = rng.randrange(len(key_seq))
        j = rng.randrange(len(partner_seq))
        key_seq[i], partner_seq[j] = partner_seq[j], key_seq[i]
    else:  # L4
        if num_factories < 2 or not key_seq:
            return genotype, False
        job = key_seq.pop(rng.randrange(len(key_seq)))
        partner = _draw_non_key(num_factories, kf, rng)
        partner_seq = factories[partner]
        partner_seq.insert(rng.randrange(len(partner_seq) + 1), job)
    return Genotype(tuple(tuple(seq) for seq in factories)), True


def _draw_non_key(num_factories: int, kf: int, rng: Random) -> int:
    partner = rng.randrange(num_factories - 1)
    if partner >= kf:
        partner += 1
    return partner


def local_search_pass(
    instance: Instance,
    member: Individual,
    params: KdmaParams,
    rng: Random,
    eval_budget_remaining: int,
) -> tuple[Individual, int, list[tuple[Genotype, ObjectivePoint]]]:
    """One L1->L4 sweep with Pareto acceptance.

    Each applicable move costs one evaluation against the remaining budget.
    A candidate is rejected when the incumbent or the pass's starting point
    dominates it (the latter guard makes the pass never return a member
    dominated by its input); a dominating candidate replaces the incumbent;
    a mutually non-dominated one replaces it with probability 0.5.

    Returns (member, evaluations consumed, evaluated candidates).
    """
    incumbent = member
    origin = (member.point.makespan, member.point.ce_total)
    consumed = 0
    evaluated: list[tuple[Genotype, ObjectivePoint]] = []
    for operator in LOCAL_SEARCH_OPERATORS:
        if consumed >= eval_budget_remaining:
            break
        candidate, applied = local_search_move(instance, incumbent.genotype, operator, rng)
        if not applied:
            continue
        point = evaluate(instance, candidate, params.use_carbon_reduction)
        consumed += 1
        evaluated.append((candidate, point))
        cand_obj = (point.makespan, point.ce_total)
        incumbent_obj = (incumbent.point.makespan, incumbent.point.ce_total)
        if dominates(incumbent_obj, cand_obj) or dominates(origin, cand_obj):
            continue
        if dominates(cand_obj, incumbent_obj) or rng.random() < 0.5:
            incumbent = Individual(candidate, point)
    return incumbent, consumed, evaluated


def split_streams(seed: int) -> tuple[Random, Random]:
    """Independent (initialization, loop) streams for one run seed.

    Keeping them separate means toggling the initialization strategy does
    not shift any randomness consumed by the generational loop.
    """
    return Random(derive_seed(seed, "init")), Random(derive_seed(seed, "loop"))


def run_kdma(
    instance: Instance,
    params: KdmaParams,
    on_evaluation: Callable[[Genotype, ObjectivePoint], None] | None = None,
) -> tuple[ParetoArchive, RunStats]:
    """Run the full algorithm; deterministic per (instance, params).

    The archive absorbs every evaluated point.  ``on_evaluation`` is a hook
    for instrumentation (e.g. logging all evaluations at test scale); it
    must not mutate its arguments.
    """
    init_rng, loop_rng = split_streams(params.seed)
    archive = ParetoArchive()
    evals_used = 0
    reduction = params.use_carbon_reduction

    def scored(genotype: Genotype) -> Individual:
        nonlocal evals_used
        point = evaluate(instance, genotype, reduction)
        evals_used += 1
        archive.add(genotype, point)
        if on_evaluation is not None:
            on_evaluation(genotype, point)
        return Individual(genotype, point)

    population = [scored(g) for g in init_population(instance, params, init_rng)]
    assign_fitness(population)

    size = params.population_size
    ls_targets = math.ceil(params.local_search_fraction * size)
    generations = 0
    while evals_used < params.max_evaluations:
        offspring: list[Individual] = []
        while len(offspring) < size:
            parent1 = tournament_select(population, params.tournament_size, loop_rng)
            parent2 = tournament_select(population, params.tournament_size, loop_rng)
            if loop_rng.random() < params.crossover_prob:
                children = pmx_crossover(parent1.genotype, parent2.genotype, loop_rng)
            else:
                children = (parent1.genotype, parent2.genotype)
            for child in children:
                if len(offspring) >= size:
                    break
                if loop_rng.random() < params.mutation_prob:
                    child = swap_mutation(child, loop_rng)
                offspring.append(scored(child))
        if params.use_local_search and ls_targets > 0:
            assign_fitness(offspring)
            ranked = sorted(
                range(len(offspring)),
                key=lambda i: (offspring[i].rank, -offspring[i].crowding, i),
            )
            for i in ranked[:ls_targets]:
                remaining = params.max_evaluations - evals_used
                if remaining <= 0:
                    break
                improved, consumed, evaluated = local_search_pass(
                    instance, offspring[i], params, loop_rng, remaining
                )
                evals_used += consumed
                for genotype, point in evaluated:
                    archive.add(genotype, point)
                    if on_evaluation is not None:
                        on_evaluation(genotype, point)
                offspring[i] = improved
        population = environmental_selection(list(population) + offspring, size)
        generations += 1

    stats = RunStats(
        evaluations=evals_used,
        generations=generations,
        offon_cycles=sum(point.offon_cycles for _, point in archive),
    )
    return archive, stats
