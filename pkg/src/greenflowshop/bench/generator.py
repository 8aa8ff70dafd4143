"""Deterministic instance dataset generation.

The full grid crosses factory counts {2,3,4,5,6}, job counts {20,50,100} and
machine counts {2,5,8} with 10 instances per combination (450 files).  The
small suite is a 10-instance slice (n=20, factories {2,3}, machines {2,5})
sized for quick experiments and the acceptance checks.  Every value is
sampled from a stream derived from the master seed and the instance key, so
a dataset regenerates bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..model import Instance
from ..seeds import spawn_rng
from .instance_io import write_instance


@dataclass(frozen=True)
class GeneratorConfig:
    """Dataset grid and value ranges."""

    factories: tuple[int, ...] = (2, 3, 4, 5, 6)
    jobs: tuple[int, ...] = (20, 50, 100)
    machines: tuple[int, ...] = (2, 5, 8)
    instances_per_combination: int = 10
    proc_time_range: tuple[int, int] = (10, 50)
    proc_power_range: tuple[float, float] = (5.0, 10.0)
    idle_power: float = 2.0
    elec_coeff: float = 0.581
    aux_coeff_range: tuple[float, float] = (0.05, 0.1)
    offon_emission: float = 6.0
    offon_time: float = 3.0

    def __post_init__(self) -> None:
        for name in ("factories", "jobs", "machines"):
            values = getattr(self, name)
            object.__setattr__(self, name, tuple(int(v) for v in values))
            if not getattr(self, name):
                raise ValueError(f"{name} grid must be non-empty")
        if self.instances_per_combination < 1:
            raise ValueError("instances_per_combination must be >= 1")


def config_from_json(path: str | Path) -> GeneratorConfig:
    """Load a config from a JSON object of GeneratorConfig field overrides."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config root must be a JSON object")
    for key in ("proc_time_range", "proc_power_range", "aux_coeff_range"):
        if key in data:
            data[key] = tuple(data[key])
    return GeneratorConfig(**data)


def instance_id(f: int, n: int, m: int, replicate: int) -> str:
    return f"f{f}m{m}n{n}r{replicate:02d}"


def build_instance(
    config: GeneratorConfig, f: int, n: int, m: int, replicate: int, master_seed: int
) -> Instance:
    """Sample one instance; deterministic in (config, key, master seed)."""
    rng = spawn_rng(master_seed, "instance", f, n, m, replicate)
    p_lo, p_hi = config.proc_time_range
    pp_lo, pp_hi = config.proc_power_range
    aux_lo, aux_hi = config.aux_coeff_range
    proc_time = tuple(
        tuple(rng.randint(p_lo, p_hi) for _ in range(m)) for _ in range(n)
    )
    proc_power = tuple(
        tuple(round(rng.uniform(pp_lo, pp_hi), 2) for _ in range(m)) for _ in range(n)
    )
    aux_coeff = tuple(round(rng.uniform(aux_lo, aux_hi), 3) for _ in range(m))
    return Instance(
        id=instance_id(f, n, m, replicate),
        num_factories=f,
        num_machines=m,
        num_jobs=n,
        proc_time=proc_time,
        proc_power=proc_power,
        idle_power=config.idle_power,
        elec_coeff=config.elec_coeff,
        aux_coeff=aux_coeff,
        offon_emission=config.offon_emission,
        offon_time=config.offon_time,
    )


def generate_instances(
    config: GeneratorConfig, out_dir: str | Path, master_seed: int
) -> list[Path]:
    """Write the full grid of instance files; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for f in config.factories:
        for n in config.jobs:
            for m in config.machines:
                for replicate in range(config.instances_per_combination):
                    instance = build_instance(config, f, n, m, replicate, master_seed)
                    path = out / f"{instance.id}.dat"
                    write_instance(instance, path)
                    paths.append(path)
    return paths


SMALL_SUITE_COMBOS = ((2, 20, 2), (2, 20, 5), (3, 20, 2), (3, 20, 5))
SMALL_SUITE_SIZE = 10


def small_suite_specs() -> list[tuple[int, int, int, int]]:
    """(f, n, m, replicate) keys of the 10-instance small suite.

    Instances cycle round-robin over the four (f, m) combinations, so both
    factory counts are represented.
    """
    specs = []
    per_combo = [0] * len(SMALL_SUITE_COMBOS)
    for i in range(SMALL_SUITE_SIZE):
        combo = i % len(SMALL_SUITE_COMBOS)
        f, n, m = SMALL_SUITE_COMBOS[combo]
        specs.append((f, n, m, per_combo[combo]))
        per_combo[combo] += 1
    return specs


def generate_small_suite(
    out_dir: str | Path, master_seed: int, config: GeneratorConfig | None = None
) -> list[Path]:
    """Write the small suite; sampling matches the full grid's streams."""
    cfg = config or GeneratorConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for f, n, m, replicate in small_suite_specs():
        instance = build_instance(cfg, f, n, m, replicate, master_seed)
        path = out / f"{instance.id}.dat"
        write_instance(instance, path)
        paths.append(path)
    return paths
