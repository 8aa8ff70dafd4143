"""Experiment runner: comparison campaigns, ablations, Taguchi calibration.

A run is keyed by (instance id, algorithm family, replicate index); its seed
derives from the master seed and that key, so the knowledge-strategy
ablations (same family) share random streams with the full algorithm, while
different baselines get independent streams.

Outputs per campaign directory:

* ``records.jsonl``   one JSON object per run: archive, best genotype,
  indicator values, and measured wall time.  Primary data.
* ``reference_fronts.json``   per-instance reference front and bounds.
* ``results.csv``   one row per run.  Fully deterministic: wall time is
  reported only in the records, and the CSV's ``runtime_ms`` column is
  pinned to 0 so repeated invocations and any worker-pool size produce
  identical bytes.

Runs execute across a process pool; records are merged and sorted on the
run key before any output is written, so parallelism never changes bytes.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .. import metrics
from ..baselines import ENUMERATION_GUARD, brute_force_pareto, random_search, run_nsga2
from ..kdma import KdmaParams, run_kdma
from ..model import Instance
from ..seeds import derive_seed, spawn_rng
from .instance_io import read_instance
from .report import write_mean_tables

COMPARISON_ALGORITHMS = ("kdma", "nsga2", "random")

# label -> (seed family, KdmaParams overrides); ablations share the kdma family.
ALGORITHM_CONFIGS: dict[str, tuple[str, dict]] = {
    "kdma": ("kdma", {}),
    "nsga2": ("nsga2", {}),
    "random": ("random", {}),
    "without_init": ("kdma", {"use_collab_init": False}),
    "without_local": ("kdma", {"use_local_search": False}),
    "non_carbon": ("kdma", {"use_carbon_reduction": False}),
}

ABLATION_CONFIGS = ("kdma", "without_init", "without_local", "non_carbon")

CSV_HEADER = "instance,algorithm,seed,evals,best_makespan,best_ce,spread,gd,igd,offon_cycles,runtime_ms"


@dataclass
class RunRecord:
    """One algorithm run on one instance with one replicate seed."""

    instance: str
    f: int
    m: int
    n: int
    algorithm: str
    seed: int
    evals: int
    archive: list[tuple[int, float]]
    best_genotype: list[list[int]]
    offon_cycles: int
    wall_ms: int
    spread: float | None = None
    gd: float | None = None
    igd: float | None = None

    def key(self) -> tuple[str, str, int]:
        return (self.instance, self.algorithm, self.seed)


def execute_run(
    instance: Instance, algorithm: str, replicate: int, master_seed: int, params: KdmaParams
) -> RunRecord:
    """Execute one run; deterministic apart from the measured wall time."""
    family, overrides = ALGORITHM_CONFIGS[algorithm]
    run_seed = derive_seed(master_seed, "run", instance.id, family, replicate)
    started = time.perf_counter()
    if family == "random":
        rng = spawn_rng(master_seed, "run", instance.id, family, replicate)
        archive = random_search(instance, params.max_evaluations, rng)
        evals = params.max_evaluations
        cycles = sum(point.offon_cycles for _, point in archive)
    else:
        run_params = replace(params, seed=run_seed, **overrides)
        if family == "nsga2":
            archive, stats = run_nsga2(instance, run_params)
        else:
            archive, stats = run_kdma(instance, run_params)
        evals = stats.evaluations
        cycles = stats.offon_cycles
    wall_ms = int((time.perf_counter() - started) * 1000)
    entries = archive.entries
    best_ms_genotype = min(entries, key=lambda e: (e[1].makespan, e[1].ce_total))[0]
    return RunRecord(
        instance=instance.id,
        f=instance.num_factories,
        m=instance.num_machines,
        n=instance.num_jobs,
        algorithm=algorithm,
        seed=replicate,
        evals=evals,
        archive=[(p.makespan, p.ce_total) for _, p in entries],
        best_genotype=[list(seq) for seq in best_ms_genotype.factories],
        offon_cycles=cycles,
        wall_ms=wall_ms,
    )


def _execute_task(task: tuple[str, str, int, int, dict]) -> dict:
    path, algorithm, replicate, master_seed, params_dict = task
    instance = read_instance(path)
    record = execute_run(instance, algorithm, replicate, master_seed, KdmaParams(**params_dict))
    return asdict(record)


def _run_all(
    instance_paths: Sequence[Path],
    algorithms: Sequence[str],
    seeds: int,
    params: KdmaParams,
    master_seed: int,
    workers: int,
) -> list[RunRecord]:
    tasks = [
        (str(path), algorithm, replicate, master_seed, asdict(params))
        for path in sorted(instance_paths)
        for algorithm in algorithms
        for replicate in range(seeds)
    ]
    if workers <= 1:
        results = [_execute_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_task, tasks, chunksize=1))
    records = [RunRecord(**data) for data in results]
    for record in records:
        record.archive = [(int(ms), float(ce)) for ms, ce in record.archive]
    records.sort(key=RunRecord.key)
    return records


def attach_indicators(
    records: Sequence[RunRecord], instances: dict[str, Instance] | None = None
) -> dict[str, dict]:
    """Build per-instance reference fronts and fill in indicator values.

    For instances small enough to enumerate (and provided in ``instances``),
    the exact front replaces the union of the run archives.  The exact front
    is computed with the shutdown strategy enabled, whose points are never
    above the plain ones.
    """
    by_instance: dict[str, list[RunRecord]] = {}
    for record in records:
        by_instance.setdefault(record.instance, []).append(record)
    reference: dict[str, dict] = {}
    for instance_id in sorted(by_instance):
        group = by_instance[instance_id]
        exact = None
        if instances and group[0].n <= ENUMERATION_GUARD:
            instance = instances.get(instance_id)
            if instance is not None:
                exact = brute_force_pareto(instance, reduction_enabled=True).objectives()
        front, bounds = metrics.build_reference_front(
            [record.archive for record in group], exact=exact
        )
        normalized_reference = metrics.normalize(front, bounds)
        for record in group:
            normalized = metrics.normalize(record.archive, bounds)
            record.spread = metrics.spread(record.archive, bounds)
            record.gd = metrics.gd(normalized, normalized_reference)
            record.igd = metrics.igd(normalized, normalized_reference)
        reference[instance_id] = {"points": front, "bounds": bounds}
    return reference


def run_experiment(
    instance_paths: Sequence[Path],
    algorithms: Sequence[str],
    seeds: int,
    params: KdmaParams,
    out_dir: str | Path,
    master_seed: int = 0,
    workers: int = 1,
) -> list[RunRecord]:
    """Full campaign: run, build reference fronts, emit records and CSV."""
    for algorithm in algorithms:
        if algorithm not in ALGORITHM_CONFIGS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    records = _run_all(instance_paths, algorithms, seeds, params, master_seed, workers)
    instances = {}
    for path in instance_paths:
        instance = read_instance(path)
        instances[instance.id] = instance
    reference = attach_indicators(records, instances)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records(records, reference, out)
    write_results_csv(records, out / "results.csv")
    write_mean_tables([asdict(r) for r in records], out)
    return records


def run_ablation(
    instance_paths: Sequence[Path],
    seeds: int,
    params: KdmaParams,
    out_dir: str | Path,
    master_seed: int = 0,
    workers: int = 1,
) -> list[RunRecord]:
    """Knowledge-strategy ablation campaign with shared seed streams.

    Emits the standard campaign outputs plus ``carbon_by_factories.csv``,
    the mean archive carbon per factory count for the full configuration
    against the one without the shutdown strategy.
    """
    records = run_experiment(
        instance_paths, ABLATION_CONFIGS, seeds, params, out_dir, master_seed, workers
    )
    rows = carbon_by_factories(records)
    lines = ["factories,with_reduction,without_reduction"]
    lines.extend(f"{f},{with_red:.6f},{without_red:.6f}" for f, with_red, without_red in rows)
    (Path(out_dir) / "carbon_by_factories.csv").write_text(
        "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
    )
    return records


def carbon_by_factories(records: Sequence[RunRecord]) -> list[tuple[int, float, float]]:
    """(factory count, mean carbon with reduction, without) rows.

    The per-run statistic is the mean total carbon over the archive; rows
    average it over all runs of the factory count.
    """
    sums: dict[tuple[int, str], list[float]] = {}
    for record in records:
        if record.algorithm not in ("kdma", "non_carbon"):
            continue
        mean_ce = sum(ce for _, ce in record.archive) / len(record.archive)
        sums.setdefault((record.f, record.algorithm), []).append(mean_ce)
    rows = []
    for f in sorted({key[0] for key in sums}):
        with_red = sums.get((f, "kdma"), [])
        without_red = sums.get((f, "non_carbon"), [])
        if with_red and without_red:
            rows.append(
                (f, sum(with_red) / len(with_red), sum(without_red) / len(without_red))
            )
    return rows


# The classic L16 orthogonal array restricted to three four-level columns;
# every level appears four times per column and every level pair once per
# column pair.
L16_DESIGN = (
    (1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4),
    (2, 1, 2), (2, 2, 1), (2, 3, 4), (2, 4, 3),
    (3, 1, 3), (3, 2, 4), (3, 3, 1), (3, 4, 2),
    (4, 1, 4), (4, 2, 3), (4, 3, 2), (4, 4, 1),
)

TAGUCHI_LEVELS = {
    "population_size": (50, 100, 150, 200),
    "crossover_prob": (0.7, 0.8, 0.9, 1.0),
    "mutation_prob": (0.1, 0.2, 0.3, 0.4),
}

_TAGUCHI_PARAMS = ("population_size", "crossover_prob", "mutation_prob")


def taguchi_configurations() -> list[dict]:
    """The 16 calibration configurations with their level indices."""
    configurations = []
    for row in L16_DESIGN:
        config = {"levels": row}
        for param, level in zip(_TAGUCHI_PARAMS, row):
            config[param] = TAGUCHI_LEVELS[param][level - 1]
        configurations.append(config)
    return configurations


def taguchi_calibrate(
    instance_paths: Sequence[Path],
    out_dir: str | Path,
    master_seed: int = 0,
    replicates: int = 10,
    max_evaluations: int = 25_000,
    workers: int = 1,
    base_params: KdmaParams | None = None,
) -> dict:
    """Calibrate (population size, crossover, mutation) on an L16 design.

    Each configuration runs ``replicates`` times per instance; reference
    fronts are shared per instance across all configurations so the mean
    IGD values are comparable.  Emits ``taguchi_configs.csv`` (16 rows) and
    ``taguchi_levels.csv`` (per-level means, delta, rank per parameter).
    """
    base = base_params or KdmaParams()
    configurations = taguchi_configurations()
    tasks = []
    for path in sorted(instance_paths):
        for index, config in enumerate(configurations):
            params = replace(
                base,
                population_size=config["population_size"],
                crossover_prob=config["crossover_prob"],
                mutation_prob=config["mutation_prob"],
                max_evaluations=max_evaluations,
            )
            for replicate in range(replicates):
                tasks.append((str(path), index, replicate, master_seed, asdict(params)))
    if workers <= 1:
        results = [_taguchi_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_taguchi_task, tasks, chunksize=1))
    results.sort(key=lambda r: (r["instance"], r["config"], r["replicate"]))

    by_instance: dict[str, list[dict]] = {}
    for result in results:
        by_instance.setdefault(result["instance"], []).append(result)
    igd_by_config: dict[int, list[float]] = {i: [] for i in range(len(configurations))}
    for instance_id in sorted(by_instance):
        group = by_instance[instance_id]
        front, bounds = metrics.build_reference_front([r["archive"] for r in group])
        normalized_reference = metrics.normalize(front, bounds)
        for result in group:
            normalized = metrics.normalize(result["archive"], bounds)
            igd_by_config[result["config"]].append(metrics.igd(normalized, normalized_reference))

    config_means = {
        index: sum(values) / len(values) for index, values in igd_by_config.items()
    }
    level_means: dict[str, list[float]] = {}
    for p_index, param in enumerate(_TAGUCHI_PARAMS):
        means = []
        for level in range(1, 5):
            rows = [i for i, row in enumerate(L16_DESIGN) if row[p_index] == level]
            means.append(sum(config_means[i] for i in rows) / len(rows))
        level_means[param] = means
    deltas = {param: max(means) - min(means) for param, means in level_means.items()}
    order = sorted(_TAGUCHI_PARAMS, key=lambda p: -deltas[p])
    ranks = {param: order.index(param) + 1 for param in _TAGUCHI_PARAMS}

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["config,population_size,crossover_prob,mutation_prob,mean_igd"]
    for index, config in enumerate(configurations):
        lines.append(
            f"{index + 1},{config['population_size']},{config['crossover_prob']},"
            f"{config['mutation_prob']},{config_means[index]:.6f}"
        )
    (out / "taguchi_configs.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    lines = ["parameter,level1,level2,level3,level4,delta,rank"]
    for param in _TAGUCHI_PARAMS:
        means = level_means[param]
        lines.append(
            f"{param},{means[0]:.6f},{means[1]:.6f},{means[2]:.6f},{means[3]:.6f},"
            f"{deltas[param]:.6f},{ranks[param]}"
        )
    (out / "taguchi_levels.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    return {
        "config_means": config_means,
        "level_means": level_means,
        "deltas": deltas,
        "ranks": ranks,
    }


def _taguchi_task(task: tuple[str, int, int, int, dict]) -> dict:
    path, config_index, replicate, master_seed, params_dict = task
    instance = read_instance(path)
    run_seed = derive_seed(master_seed, "tune", instance.id, config_index, replicate)
    archive, _ = run_kdma(instance, KdmaParams(**{**params_dict, "seed": run_seed}))
    return {
        "instance": instance.id,
        "config": config_index,
        "replicate": replicate,
        "archive": archive.objectives(),
    }


def write_records(
    records: Sequence[RunRecord], reference: dict[str, dict], out_dir: Path
) -> None:
    with (out_dir / "records.jsonl").open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(asdict(record), sort_keys=True) + "\n")
    (out_dir / "reference_fronts.json").write_text(
        json.dumps(reference, sort_keys=True, indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def write_results_csv(records: Sequence[RunRecord], path: Path) -> None:
    """Deterministic per-run CSV; see the module docstring for runtime_ms."""
    lines = [CSV_HEADER]
    for record in records:
        best_ms = min(ms for ms, _ in record.archive)
        best_ce = min(ce for _, ce in record.archive)
        lines.append(
            f"{record.instance},{record.algorithm},{record.seed},{record.evals},"
            f"{best_ms},{best_ce:.6f},{record.spread:.6f},{record.gd:.6f},"
            f"{record.igd:.6f},{record.offon_cycles},0"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
