"""Problem data and exact bi-objective evaluation.

An :class:`Instance` describes a distributed homogeneous flow shop: F
identical factories, each with the same m machines in line, n jobs with
identical processing times and power draw in every factory.  Evaluation maps
a genotype to a semi-active schedule (no operation can start earlier without
reordering) and to the objective pair (makespan, total carbon emissions).

Carbon accounting:

* running: processing time x processing power x electricity factor, summed
  over all operations.  Identical for every genotype of an instance.
* idle: per machine, the gaps between consecutive operations, charged at
  idle power x electricity factor.  Time before a machine's first operation
  and after its last is never charged (the machine is treated as off).  With
  the shutdown strategy enabled, a gap long and costly enough is replaced by
  the fixed off/on emission and counted as one power cycle.
* auxiliary: processing time x per-machine auxiliary-material factor.
  Genotype-independent, like the running term.

Times are exact integers; emissions are IEEE doubles accumulated in one
canonical order (factory, position, machine) so that the fused evaluator and
the schedule-based accounting agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .encoding import Genotype, partition_violations

IDLE_ACCOUNTING_MODES = ("machine_span", "factory_span")


class GenotypeError(ValueError):
    """Raised when a genotype is not a valid partition of the jobs."""


class ObjectivePoint(NamedTuple):
    """Objective pair with the carbon breakdown behind it."""

    makespan: int
    ce_total: float
    ce_run: float
    ce_idle: float
    ce_au: float
    offon_cycles: int


@dataclass(frozen=True)
class Instance:
    """Immutable problem data; safe to share across threads and processes.

    ``proc_time`` and ``proc_power`` are n rows of m values.  ``aux_coeff``
    has one value per machine.  ``offon_emission`` / ``offon_time`` are the
    fixed cost and minimum gap length of one machine power cycle.
    """

    id: str
    num_factories: int
    num_machines: int
    num_jobs: int
    proc_time: tuple[tuple[int, ...], ...]
    proc_power: tuple[tuple[float, ...], ...]
    idle_power: float
    elec_coeff: float
    aux_coeff: tuple[float, ...]
    offon_emission: float
    offon_time: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "proc_time", tuple(tuple(int(v) for v in row) for row in self.proc_time)
        )
        object.__setattr__(
            self, "proc_power", tuple(tuple(float(v) for v in row) for row in self.proc_power)
        )
        object.__setattr__(self, "aux_coeff", tuple(float(v) for v in self.aux_coeff))
        self._check()

    def _check(self) -> None:
        if self.num_factories < 1:
            raise ValueError("num_factories must be >= 1")
        if self.num_machines < 1:
            raise ValueError("num_machines must be >= 1")
        if self.num_jobs < 1:
            raise ValueError("num_jobs must be >= 1")
        n, m = self.num_jobs, self.num_machines
        for name, rows in (("proc_time", self.proc_time), ("proc_power", self.proc_power)):
            if len(rows) != n:
                raise ValueError(f"{name} must have {n} rows, got {len(rows)}")
            for i, row in enumerate(rows):
                if len(row) != m:
                    raise ValueError(f"{name} row {i + 1} must have {m} values, got {len(row)}")
        for i, row in enumerate(self.proc_time):
            for v in row:
                if v < 1:
                    raise ValueError(f"proc_time row {i + 1} has non-positive time {v}")
        for i, row in enumerate(self.proc_power):
            for v in row:
                if v < 0:
                    raise ValueError(f"proc_power row {i + 1} has negative power {v}")
        if len(self.aux_coeff) != m:
            raise ValueError(f"aux_coeff must have {m} values, got {len(self.aux_coeff)}")
        for name, v in (
            ("idle_power", self.idle_power),
            ("elec_coeff", self.elec_coeff),
            ("offon_emission", self.offon_emission),
            ("offon_time", self.offon_time),
        ):
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")
        for v in self.aux_coeff:
            if v < 0:
                raise ValueError(f"aux_coeff values must be non-negative, got {v}")


@dataclass(frozen=True)
class Schedule:
    """Decoded start/completion times, indexed [factory][position][machine]."""

    start: tuple[tuple[tuple[int, ...], ...], ...]
    completion: tuple[tuple[tuple[int, ...], ...], ...]
    factory_makespans: tuple[int, ...]


def _constants(instance: Instance) -> tuple[float, float]:
    """(running, auxiliary) carbon of an instance, cached on the instance.

    Both are genotype-independent: every job visits all m machines of its
    factory with the same times and powers wherever it is placed.
    """
    cached = instance.__dict__.get("_ce_constants")
    if cached is None:
        elec = instance.elec_coeff
        aux_coeff = instance.aux_coeff
        run = 0.0
        aux = 0.0
        for p_row, pp_row in zip(instance.proc_time, instance.proc_power):
            for j, p in enumerate(p_row):
                run += p * pp_row[j] * elec
                aux += p * aux_coeff[j]
        cached = (run, aux)
        object.__setattr__(instance, "_ce_constants", cached)
    return cached


def carbon_run(instance: Instance) -> float:
    """Carbon emitted by processing energy; constant across genotypes."""
    return _constants(instance)[0]


def carbon_aux(instance: Instance) -> float:
    """Carbon from auxiliary-material consumption; constant across genotypes."""
    return _constants(instance)[1]


def _charge_gap(gap, rate, reduction_enabled, offon_time, offon_emission):
    """(charge, cycles) for one idle gap under the chosen strategy.

    A shutdown replaces the idle charge only when the gap is at least the
    power-cycle time AND the idle charge strictly exceeds the power-cycle
    emission; both must hold.
    """
    charge = gap * rate
    if reduction_enabled and gap >= offon_time and charge > offon_emission:
        return offon_emission, 1
    return charge, 0


def _sweep(
    instance: Instance,
    factories: Sequence[Sequence[int]],
    reduction_enabled: bool,
    idle_accounting: str = "machine_span",
) -> tuple[list[int], float, int]:
    """Completion recursion and idle accounting fused into one pass.

    Returns (factory makespans, idle carbon, off/on cycles).  Accepts
    partial job sets, so construction heuristics can score prefixes.  Gap
    charges accumulate in (factory, position, machine) order; carbon_idle
    replays the identical order so both paths agree bitwise.
    """
    proc = instance.proc_time
    m = instance.num_machines
    rate = instance.idle_power * instance.elec_coeff
    offon_emission = instance.offon_emission
    offon_time = instance.offon_time
    if idle_accounting not in IDLE_ACCOUNTING_MODES:
        raise ValueError(f"unknown idle_accounting mode {idle_accounting!r}")
    span_all = idle_accounting == "factory_span"

    makespans = []
    idle = 0.0
    cycles = 0
    machine_range = range(m)
    for seq in factories:
        if not seq:
            makespans.append(0)
            continue
        first_row = proc[seq[0] - 1]
        row = []
        c = 0
        for j in machine_range:
            c += first_row[j]
            row.append(c)
        for k in range(1, len(seq)):
            p_row = proc[seq[k] - 1]
            left = 0
            for j in machine_range:
                above = row[j]
                if left > above:
                    gap = left - above
                    charge = gap * rate
                    if reduction_enabled and gap >= offon_time and charge > offon_emission:
                        idle += offon_emission
                        cycles += 1
                    else:
                        idle += charge
                    left += p_row[j]
                else:
                    left = above + p_row[j]
                row[j] = left
        fac_ms = row[m - 1]
        if span_all:
            # Leading/trailing spans measured against the factory makespan.
            c = 0
            for j in machine_range:
                gap = c
                c += first_row[j]
                if gap > 0:
                    charge, cyc = _charge_gap(
                        gap, rate, reduction_enabled, offon_time, offon_emission
                    )
                    idle += charge
                    cycles += cyc
                gap = fac_ms - row[j]
                if gap > 0:
                    charge, cyc = _charge_gap(
                        gap, rate, reduction_enabled, offon_time, offon_emission
                    )
                    idle += charge
                    cycles += cyc
        makespans.append(fac_ms)
    return makespans, idle, cycles


def _require_partition(instance: Instance, factories: Sequence[Sequence[int]]) -> None:
    n = instance.num_jobs
    seen = bytearray(n + 1)
    count = 0
    for seq in factories:
        for job in seq:
            if job < 1 or job > n:
                raise GenotypeError(f"unknown job {job}")
            if seen[job]:
                raise GenotypeError(f"duplicate job {job}")
            seen[job] = 1
            count += 1
    if count != n:
        missing = next(job for job in range(1, n + 1) if not seen[job])
        raise GenotypeError(f"missing job {missing}")


def factory_makespan(instance: Instance, sequence: Sequence[int]) -> int:
    """Makespan of one factory's (possibly partial) job sequence."""
    if not sequence:
        return 0
    proc = instance.proc_time
    m = instance.num_machines
    row = list(proc[sequence[0] - 1])
    c = 0
    for j in range(m):
        c += row[j]
        row[j] = c
    for k in range(1, len(sequence)):
        p_row = proc[sequence[k] - 1]
        left = 0
        for j in range(m):
            above = row[j]
            left = (above if above > left else left) + p_row[j]
            row[j] = left
    return row[m - 1]


def decode(instance: Instance, genotype: Genotype) -> Schedule:
    """Decode a genotype into its semi-active schedule.

    Within each factory: the first job chains along machines, the first
    machine chains along jobs, and every other operation starts at the
    maximum of its machine predecessor's and job predecessor's completions.
    """
    factories = genotype.factories
    _require_partition(instance, factories)
    proc = instance.proc_time
    m = instance.num_machines
    all_starts = []
    all_completions = []
    makespans = []
    for seq in factories:
        starts = []
        completions = []
        prev_row: tuple[int, ...] | None = None
        for pos, job in enumerate(seq):
            p_row = proc[job - 1]
            s_row = []
            c_row = []
            left = 0
            for j in range(m):
                above = prev_row[j] if prev_row is not None else 0
                start = above if above > left else left
                left = start + p_row[j]
                s_row.append(start)
                c_row.append(left)
            prev_row = tuple(c_row)
            starts.append(tuple(s_row))
            completions.append(prev_row)
        all_starts.append(tuple(starts))
        all_completions.append(tuple(completions))
        makespans.append(completions[-1][m - 1] if completions else 0)
    return Schedule(
        start=tuple(all_starts),
        completion=tuple(all_completions),
        factory_makespans=tuple(makespans),
    )


def makespan(schedule: Schedule) -> int:
    """Maximum factory makespan."""
    return max(schedule.factory_makespans)


def carbon_idle(
    instance: Instance,
    schedule: Schedule,
    reduction_enabled: bool,
    idle_accounting: str = "machine_span",
) -> tuple[float, int]:
    """(idle carbon, off/on cycles) of a decoded schedule.

    ``machine_span`` (default) charges only the gaps between consecutive
    operations on a machine.  ``factory_span`` additionally charges each
    machine's lead-in from time zero and tail-out up to the factory
    makespan, for sensitivity runs against the coarser idle reading.
    """
    if idle_accounting not in IDLE_ACCOUNTING_MODES:
        raise ValueError(f"unknown idle_accounting mode {idle_accounting!r}")
    rate = instance.idle_power * instance.elec_coeff
    offon_time = instance.offon_time
    offon_emission = instance.offon_emission
    m = instance.num_machines
    idle = 0.0
    cycles = 0
    for f, completions in enumerate(schedule.completion):
        starts = schedule.start[f]
        for k in range(1, len(completions)):
            prev_row = completions[k - 1]
            s_row = starts[k]
            for j in range(m):
                gap = s_row[j] - prev_row[j]
                if gap > 0:
                    charge, cyc = _charge_gap(
                        gap, rate, reduction_enabled, offon_time, offon_emission
                    )
                    idle += charge
                    cycles += cyc
        if idle_accounting == "factory_span" and completions:
            fac_ms = schedule.factory_makespans[f]
            first_starts = starts[0]
            last_completions = completions[-1]
            for j in range(m):
                for gap in (first_starts[j], fac_ms - last_completions[j]):
                    if gap > 0:
                        charge, cyc = _charge_gap(
                            gap, rate, reduction_enabled, offon_time, offon_emission
                        )
                        idle += charge
                        cycles += cyc
    return idle, cycles


def evaluate(
    instance: Instance,
    genotype: Genotype,
    reduction_enabled: bool = False,
    idle_accounting: str = "machine_span",
) -> ObjectivePoint:
    """Objective point of a genotype.  Pure and deterministic."""
    factories = genotype.factories
    _require_partition(instance, factories)
    makespans, idle, cycles = _sweep(instance, factories, reduction_enabled, idle_accounting)
    run, aux = _constants(instance)
    return ObjectivePoint(
        makespan=max(makespans),
        ce_total=run + idle + aux,
        ce_run=run,
        ce_idle=idle,
        ce_au=aux,
        offon_cycles=cycles,
    )


def check_constraints(
    instance: Instance, genotype: Genotype, schedule: Schedule
) -> list[str]:
    """Violation report for a (genotype, schedule) pair; empty means valid.

    Violations are data, not failures: assignment problems, precedence or
    machine overlaps, negative times, and a makespan below some completion
    are all reported as messages.
    """
    report = list(partition_violations(genotype.factories, instance.num_jobs))
    m = instance.num_machines
    proc = instance.proc_time
    reported_makespan = max(schedule.factory_makespans)
    for f, completions in enumerate(schedule.completion):
        starts = schedule.start[f]
        seq = genotype.factories[f] if f < len(genotype.factories) else ()
        for k, c_row in enumerate(completions):
            s_row = starts[k]
            for j in range(m):
                if c_row[j] < 0 or s_row[j] < 0:
                    report.append(f"factory {f} position {k} machine {j}: negative time")
                if k < len(seq):
                    expected = s_row[j] + proc[seq[k] - 1][j]
                    if c_row[j] != expected:
                        report.append(
                            f"factory {f} position {k} machine {j}: completion "
                            f"{c_row[j]} != start + processing {expected}"
                        )
                if j > 0 and s_row[j] < c_row[j - 1]:
                    report.append(
                        f"factory {f} position {k} machine {j}: starts before "
                        f"its previous operation finishes"
                    )
                if k > 0 and s_row[j] < completions[k - 1][j]:
                    report.append(
                        f"factory {f} machine {j}: operations of positions "
                        f"{k - 1} and {k} overlap"
                    )
            if c_row[m - 1] > reported_makespan:
                report.append(
                    f"factory {f} position {k}: completion {c_row[m - 1]} "
                    f"exceeds reported makespan {reported_makespan}"
                )
    return report
