"""Comparison algorithms and independent verification oracles.

``simulate_schedule`` rebuilds a schedule by discrete-event simulation and
must agree exactly with the recursive decoder; ``brute_force_pareto``
enumerates every genotype of a small instance for ground-truth fronts.
``run_nsga2`` and ``random_search`` are the comparison baselines.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import replace
from random import Random

from .encoding import Genotype, random_genotype
from .kdma import KdmaParams, ParetoArchive, RunStats, run_kdma
from .model import Instance, Schedule, _require_partition, evaluate


class SizeGuardError(ValueError):
    """Raised when an instance is too large to enumerate exhaustively."""


def run_nsga2(instance: Instance, params: KdmaParams) -> tuple[ParetoArchive, RunStats]:
    """NSGA-II baseline: the same loop with every extra strategy disabled.

    Shutdown-based carbon reduction stays off; it is treated as part of the
    knowledge-driven algorithm, not of the baseline.
    """
    return run_kdma(
        instance,
        replace(
            params,
            use_collab_init=False,
            use_local_search=False,
            use_carbon_reduction=False,
            local_search_fraction=0.0,
        ),
    )


def random_search(
    instance: Instance, evals: int, rng: Random, reduction_enabled: bool = False
) -> ParetoArchive:
    """Archive of ``evals`` independent uniform random genotypes."""
    if evals < 1:
        raise ValueError("evals must be >= 1")
    archive = ParetoArchive()
    for _ in range(evals):
        genotype = random_genotype(instance.num_jobs, instance.num_factories, rng)
        archive.add(genotype, evaluate(instance, genotype, reduction_enabled))
    return archive


def simulate_schedule(instance: Instance, genotype: Genotype) -> Schedule:
    """Schedule by event-driven simulation; must equal the decoder exactly.

    Each operation waits on two completions: its job's previous operation
    and its machine's previous position.  When the last dependency finishes,
    the operation starts immediately (no inserted idle) and its own
    completion is scheduled.  No completion-time recursion is used.
    """
    factories = genotype.factories
    _require_partition(instance, factories)
    proc = instance.proc_time
    m = instance.num_machines
    all_starts = []
    all_completions = []
    makespans = []
    for seq in factories:
        n_f = len(seq)
        if n_f == 0:
            all_starts.append(())
            all_completions.append(())
            makespans.append(0)
            continue
        starts = [[0] * m for _ in range(n_f)]
        completions = [[0] * m for _ in range(n_f)]
        waiting = [[(k > 0) + (j > 0) for j in range(m)] for k in range(n_f)]
        ready_at = [[0] * m for _ in range(n_f)]
        events: list[tuple[int, int, int]] = []
        heapq.heappush(events, (proc[seq[0] - 1][0], 0, 0))
        completions[0][0] = proc[seq[0] - 1][0]
        while events:
            t, k, j = heapq.heappop(events)
            for nk, nj in ((k, j + 1), (k + 1, j)):
                if nk >= n_f or nj >= m:
                    continue
                if t > ready_at[nk][nj]:
                    ready_at[nk][nj] = t
                waiting[nk][nj] -= 1
                if waiting[nk][nj] == 0:
                    start = ready_at[nk][nj]
                    finish = start + proc[seq[nk] - 1][nj]
                    starts[nk][nj] = start
                    completions[nk][nj] = finish
                    heapq.heappush(events, (finish, nk, nj))
        all_starts.append(tuple(tuple(row) for row in starts))
        all_completions.append(tuple(tuple(row) for row in completions))
        makespans.append(completions[n_f - 1][m - 1])
    return Schedule(
        start=tuple(all_starts),
        completion=tuple(all_completions),
        factory_makespans=tuple(makespans),
    )


ENUMERATION_GUARD = 8


def brute_force_pareto(
    instance: Instance, reduction_enabled: bool = False, max_jobs: int = ENUMERATION_GUARD
) -> ParetoArchive:
    """Exact Pareto front by full enumeration; guarded by instance size.

    Every assignment of jobs to factories crossed with every per-factory
    order is evaluated.  Refuses instances with more than ``max_jobs`` jobs.
    """
    n = instance.num_jobs
    if n > max_jobs:
        raise SizeGuardError(
            f"instance has n={n} jobs; exhaustive enumeration is limited to n <= {max_jobs}"
        )
    num_factories = instance.num_factories
    archive = ParetoArchive()
    jobs = range(1, n + 1)
    for assignment in itertools.product(range(num_factories), repeat=n):
        buckets: list[list[int]] = [[] for _ in range(num_factories)]
        for job, f in zip(jobs, assignment):
            buckets[f].append(job)
        for perms in itertools.product(*(itertools.permutations(b) for b in buckets)):
            genotype = Genotype(perms)
            archive.add(genotype, evaluate(instance, genotype, reduction_enabled))
    return archive
