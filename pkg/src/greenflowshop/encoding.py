"""Genotype representation: ordered per-factory job sequences.

A genotype partitions the jobs 1..n into F ordered sequences, one per
factory.  This is the single source of truth for solution structure; the
flattened (permutation, size-profile) view exists only so order-based
operators such as PMX can act on one permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Genotype:
    """Ordered job sequences, one tuple per factory."""

    factories: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "factories", tuple(tuple(seq) for seq in self.factories)
        )

    @property
    def num_factories(self) -> int:
        return len(self.factories)

    @property
    def num_jobs(self) -> int:
        return sum(len(seq) for seq in self.factories)


def partition_violations(factories: Iterable[Sequence[int]], n: int) -> list[str]:
    """Violations of 'the sequences partition jobs 1..n', as messages."""
    violations = []
    seen = bytearray(n + 1)
    count = 0
    for seq in factories:
        for job in seq:
            if job < 1 or job > n:
                violations.append(f"unknown job {job}")
                continue
            if seen[job]:
                violations.append(f"duplicate job {job}")
                continue
            seen[job] = 1
            count += 1
    if count != n:
        for job in range(1, n + 1):
            if not seen[job]:
                violations.append(f"missing job {job}")
    return violations


def validate(genotype: Genotype, n: int, num_factories: int) -> list[str]:
    """Empty list iff the genotype is a valid partition for (n, F)."""
    violations = []
    if genotype.num_factories != num_factories:
        violations.append(
            f"expected {num_factories} factories, got {genotype.num_factories}"
        )
    violations.extend(partition_violations(genotype.factories, n))
    return violations


def flatten(genotype: Genotype) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Concatenated job permutation plus the per-factory size profile."""
    perm: list[int] = []
    sizes = []
    for seq in genotype.factories:
        perm.extend(seq)
        sizes.append(len(seq))
    return tuple(perm), tuple(sizes)


def unflatten(perm: Sequence[int], sizes: Sequence[int]) -> Genotype:
    """Inverse of :func:`flatten` for a given size profile."""
    if sum(sizes) != len(perm):
        raise ValueError(
            f"size profile sums to {sum(sizes)}, permutation has {len(perm)} jobs"
        )
    factories = []
    pos = 0
    for size in sizes:
        factories.append(tuple(perm[pos : pos + size]))
        pos += size
    return Genotype(tuple(factories))


def random_genotype(n: int, num_factories: int, rng: Random) -> Genotype:
    """Uniform random job order with a uniform factory draw per job."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    factories: list[list[int]] = [[] for _ in range(num_factories)]
    for job in order:
        factories[rng.randrange(num_factories)].append(job)
    return Genotype(tuple(tuple(seq) for seq in factories))
